"""Spectral measures: the hermitian part of a causal response.

A lossless response contributes matrix-weighted frequency atoms; a lossy one
contributes a smooth hermitian matrix density. The normalization convention
used throughout the package is

    F^H(omega) = pi * sum_k [ Mplus_k delta(omega - Omega_k)
                              + Mminus_k delta(omega + Omega_k) ]
                 + density(omega),

with Mminus_k the entrywise complex conjugate of Mplus_k (reality of the
time-domain kernel) and Mplus_k hermitian PSD.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["SpectralAtom", "SpectralMeasure"]


@dataclass(frozen=True)
class SpectralAtom:
    """Conjugate pair of delta atoms at +/- omega (omega > 0)."""

    omega: float
    mplus: np.ndarray
    mminus: np.ndarray

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("atom frequency must be positive")
        mp = np.asarray(self.mplus, dtype=complex)
        mm = np.asarray(self.mminus, dtype=complex)
        object.__setattr__(self, "mplus", mp)
        object.__setattr__(self, "mminus", mm)
        scale = max(float(np.max(np.abs(mp))), 1e-300)
        if np.max(np.abs(mp - mp.conj().T)) > 1e-8 * scale:
            raise ValueError("atom weight is not hermitian")
        if np.max(np.abs(mm - mp.conj())) > 1e-8 * scale:
            raise ValueError("Mminus must be the complex conjugate of Mplus")


@dataclass(frozen=True)
class SpectralMeasure:
    """Atoms plus an optional smooth density, all of one matrix dimension.

    density is a callable omega -> hermitian (dim x dim) complex matrix with
    density(-omega) = conj(density(omega)). peaks lists (center, halfwidth)
    hints used by quadrature to place panels; grid holds sample frequencies
    for serialization.
    """

    dim: int
    atoms: tuple = ()
    density: Callable[[float], np.ndarray] | None = None
    peaks: tuple = ()
    grid: np.ndarray | None = None

    def __post_init__(self):
        atoms = tuple(self.atoms)
        for a in atoms:
            if a.mplus.shape != (self.dim, self.dim):
                raise ValueError("atom dimension mismatch")
        object.__setattr__(self, "atoms", atoms)

    @property
    def is_atomic(self) -> bool:
        return self.density is None

    @classmethod
    def from_atoms(cls, pairs, dim: int | None = None) -> SpectralMeasure:
        """Build from (omega, Mplus) pairs; Mminus is the conjugate."""
        atoms = []
        for omega, mplus in pairs:
            mplus = np.asarray(mplus, dtype=complex)
            atoms.append(SpectralAtom(float(omega), mplus, mplus.conj()))
        if dim is None:
            if not atoms:
                raise ValueError("dimension required for an empty measure")
            dim = atoms[0].mplus.shape[0]
        return cls(dim=dim, atoms=tuple(sorted(atoms, key=lambda a: a.omega)))

    def project(self, p: np.ndarray) -> SpectralMeasure:
        """Transport the measure through a real linear map: P^T M P per atom.

        p has shape (reduced_dim, outer_dim); the projected measure acts on
        the outer variables, F_outer^H = P^T F^H P.
        """
        p = np.asarray(p, dtype=float)
        if p.shape[0] != self.dim:
            raise ValueError("projector row count must match measure dimension")
        atoms = tuple(SpectralAtom(a.omega, p.T @ a.mplus @ p, p.T @ a.mminus @ p)
                      for a in self.atoms)
        density = None
        if self.density is not None:
            inner = self.density
            density = lambda w, _p=p: _p.T @ inner(w) @ _p  # noqa: E731
        return SpectralMeasure(dim=p.shape[1], atoms=atoms, density=density,
                               peaks=self.peaks, grid=self.grid)

    def select(self, indices) -> SpectralMeasure:
        """Restrict the measure to a subset of variables."""
        idx = np.asarray(indices, dtype=int)
        p = np.zeros((self.dim, idx.size))
        p[idx, np.arange(idx.size)] = 1.0
        return self.project(p)

    def total_weight(self) -> np.ndarray:
        """sum_k (Mplus_k + Mminus_k): integral of the atomic part over pi."""
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for a in self.atoms:
            acc += a.mplus + a.mminus
        return acc

    def density_samples(self, omegas) -> np.ndarray:
        if self.density is None:
            raise ValueError("measure has no smooth density")
        omegas = np.asarray(omegas, dtype=float)
        out = np.zeros((omegas.size, self.dim, self.dim), dtype=complex)
        for k, w in enumerate(omegas):
            out[k] = self.density(float(w))
        return out
