"""Hamiltonian-matrix mechanics: Williamson normal form, the gain-immittance
response W(s) = -s (s1 - Jh)^-1 J, the fundamental matrix exp(tJh), and the
integral identity tying exp(tJh) to the hermitian part of W.

Phase-space coordinates are interleaved (q1, p1, q2, p2, ...) so the canonical
symplectic matrix is block diagonal in 2x2 blocks [[0, 1], [-1, 0]].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import expm

from .errors import FreeParticleSector, NotPSD, ResonantEvaluation
from .spectra import SpectralMeasure

__all__ = [
    "symplectic_form",
    "WilliamsonResult",
    "williamson",
    "gain_immittance",
    "w_hermitian_measure",
    "fundamental",
    "verify_fundamental_identity",
    "resolvent_rational",
]

_J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])


def symplectic_form(n_pairs: int) -> np.ndarray:
    """Canonical symplectic matrix, block diagonal in 2x2 blocks."""
    j = np.zeros((2 * n_pairs, 2 * n_pairs))
    for k in range(n_pairs):
        j[2 * k: 2 * k + 2, 2 * k: 2 * k + 2] = _J2
    return j


def _check_canonical_j(j: np.ndarray) -> None:
    n = j.shape[0]
    if n % 2 or not np.allclose(j, symplectic_form(n // 2)):
        raise ValueError("J must be the canonical interleaved symplectic matrix")


@dataclass(frozen=True)
class WilliamsonResult:
    """Symplectic congruence S with S^T h S = blockdiag(Omega_k 1_2, 0).

    Columns (2k, 2k+1) of S span the k-th canonical pair; oscillator pairs
    come first (frequencies ascending), frozen zero-frequency pairs last.
    """

    S: np.ndarray
    frequencies: np.ndarray
    dyn_indices: tuple
    nondyn_indices: tuple

    @property
    def n_oscillators(self) -> int:
        return len(self.dyn_indices)

    @property
    def canonical_h(self) -> np.ndarray:
        d = np.zeros(self.S.shape[0])
        for k, om in enumerate(self.frequencies):
            d[2 * k: 2 * k + 2] = om
        return np.diag(d)


def _psd_split(h: np.ndarray, tol: float):
    """eigh-based split of a PSD matrix into kernel and positive part."""
    evals, evecs = np.linalg.eigh(h)
    scale = max(float(np.max(np.abs(evals))), 1e-300)
    if evals.min() < -1e-9 * scale:
        raise NotPSD(f"h has negative eigenvalue {evals.min():.3e}")
    kernel = evals <= tol * scale
    return evals, evecs, kernel


def williamson(h: np.ndarray, j: np.ndarray | None = None,
               tol: float = 1e-10) -> WilliamsonResult:
    """Williamson normal form of a symmetric PSD Hamiltonian matrix.

    The positive sector is diagonalized through the antisymmetric kernel
    matrix K = h^{1/2} J h^{1/2}: eigenvectors of iK at -Omega map to
    Jh-eigenvectors at +i*Omega, whose real/imaginary parts give the
    symplectic columns. Zero modes of h are paired symplectically into a
    frozen (nondynamical) sector. A kernel of K strictly larger than the
    kernel of h signals a non-diagonal Jordan block of Jh (free-particle
    dynamics) and is rejected; this is the rank((Jh)^2) < rank(Jh) test
    evaluated on the spectral data already at hand.
    """
    h = np.asarray(h, dtype=float)
    n = h.shape[0]
    if j is None:
        j = symplectic_form(n // 2)
    _check_canonical_j(j)
    if np.max(np.abs(h - h.T)) > 1e-9 * max(np.max(np.abs(h)), 1e-300):
        raise NotPSD("h is not symmetric")
    h = 0.5 * (h + h.T)

    evals, evecs, kernel = _psd_split(h, tol)
    ker_dim = int(kernel.sum())
    sqrt_vals = np.sqrt(np.clip(evals, 0.0, None))
    hsqrt = (evecs * sqrt_vals) @ evecs.T

    k_mat = hsqrt @ j @ hsqrt
    ik = 1j * k_mat
    ik = 0.5 * (ik + ik.conj().T)
    mu, u = np.linalg.eigh(ik)
    k_scale = max(float(np.max(np.abs(mu))), 1e-300)
    zero_k = np.abs(mu) <= max(tol * k_scale, 1e5 * np.finfo(float).eps * k_scale)
    if int(zero_k.sum()) > ker_dim:
        raise FreeParticleSector(
            "Jh has a non-diagonal Jordan block at zero frequency "
            f"(dim ker K = {int(zero_k.sum())} > dim ker h = {ker_dim})")

    neg = np.where((mu < 0) & ~zero_k)[0]
    order = neg[np.argsort(-mu[neg])]  # ascending Omega = -mu
    freqs = -mu[order]
    cols = []
    for idx in order:
        om = -mu[idx]
        # K u = i om u maps to the Jh eigenvector v = J h^{1/2} u / (i om);
        # recovering v through h^{-1/2} instead would drop the component of
        # the eigenvector inside ker(h) that nonreciprocal constraints mix in
        v = (j @ (hsqrt @ u[:, idx])) / (1j * om)
        v = v * np.sqrt(2.0 * om)
        a, b = v.real.copy(), v.imag.copy()
        # fix the overall phase so the leading component of a is positive
        lead = np.argmax(np.abs(a) + np.abs(b))
        if a[lead] < 0 or (a[lead] == 0 and b[lead] < 0):
            a, b = -a, -b
        cols.extend([a, b])

    # nondynamical sector: symplectic Gram-Schmidt inside ker(h)
    ker_basis = [evecs[:, i].copy() for i in np.where(kernel)[0]]
    nondyn_cols = []
    while ker_basis:
        e = ker_basis.pop(0)
        if not ker_basis:
            raise FreeParticleSector("unpaired zero mode of h")
        overlaps = [abs(e @ j @ f) for f in ker_basis]
        m = int(np.argmax(overlaps))
        if overlaps[m] <= tol:
            raise FreeParticleSector("symplectic form degenerate on ker(h)")
        f = ker_basis.pop(m)
        f = f / (e @ j @ f)
        rest = []
        for x in ker_basis:
            x = x - (e @ j @ x) * f + (f @ j @ x) * e
            rest.append(x)
        ker_basis = rest
        nondyn_cols.extend([e, f])

    s = np.column_stack(cols + nondyn_cols) if (cols or nondyn_cols) else np.zeros((n, 0))
    n_dyn = len(cols) // 2
    dyn_indices = tuple((2 * k, 2 * k + 1) for k in range(n_dyn))
    nondyn_indices = tuple((2 * k, 2 * k + 1)
                           for k in range(n_dyn, n_dyn + len(nondyn_cols) // 2))

    res = WilliamsonResult(S=s, frequencies=np.asarray(freqs, dtype=float),
                           dyn_indices=dyn_indices, nondyn_indices=nondyn_indices)
    # construction-time sanity: symplecticity and block-canonical form
    if np.max(np.abs(s.T @ j @ s - j)) > 1e-8 * max(1.0, np.max(np.abs(s)) ** 2):
        raise FreeParticleSector("symplectic assembly failed; h is too degenerate")
    return res


def symplectic_inverse(s: np.ndarray, j: np.ndarray | None = None) -> np.ndarray:
    """Inverse of a symplectic matrix: S^-1 = -J S^T J."""
    if j is None:
        j = symplectic_form(s.shape[0] // 2)
    return -j @ s.T @ j


def gain_immittance(h: np.ndarray, j: np.ndarray, s: complex,
                    tol: float = 1e-12) -> np.ndarray:
    """W(s) = -s (s1 - Jh)^-1 J."""
    h = np.asarray(h, dtype=float)
    a = j @ h
    n = a.shape[0]
    m = s * np.eye(n) - a
    evs = np.linalg.eigvals(a)
    if np.min(np.abs(evs - s)) <= tol * max(1.0, abs(s)):
        raise ResonantEvaluation(f"s={s} is an eigenvalue of Jh")
    return -s * np.linalg.solve(m, j)


def w_hermitian_measure(h: np.ndarray, j: np.ndarray | None = None,
                        tol: float = 1e-10) -> SpectralMeasure:
    """Atomic measure of W^H transported to the original frame.

    In the canonical frame each oscillator block contributes
    (Omega/2)(1 - sigma_y) at +Omega; the symplectic transform sandwiches the
    block weights as S . block . S^T. Nondynamical pairs contribute nothing.
    """
    h = np.asarray(h, dtype=float)
    if j is None:
        j = symplectic_form(h.shape[0] // 2)
    res = williamson(h, j, tol)
    block_plus = 0.5 * (np.eye(2) - SIGMA_Y)
    pairs = []
    for k, om in enumerate(res.frequencies):
        sk = res.S[:, 2 * k: 2 * k + 2]
        pairs.append((om, om * sk @ block_plus @ sk.T))
    return SpectralMeasure.from_atoms(pairs, dim=h.shape[0])


def fundamental(h: np.ndarray, j: np.ndarray, t: float) -> np.ndarray:
    """Matrix exponential exp(t J h) (scaling and squaring)."""
    return expm(t * (j @ np.asarray(h, dtype=float)))


@dataclass(frozen=True)
class IdentityReport:
    max_deviation: float
    times: np.ndarray
    ok: bool


def verify_fundamental_identity(h: np.ndarray, j: np.ndarray | None = None,
                                times=None, tol: float = 1e-9) -> IdentityReport:
    """Check exp(tJh) against the spectral-atom form of its integral identity.

    For positive definite h the identity reads
        exp(tJh) = (i/pi) int domega/omega e^{-i omega t} W^H(omega) J,
    which for an atomic W^H reduces to
        sum_k (i/Omega_k) [Mplus_k e^{-i Omega_k t} - Mminus_k e^{+i Omega_k t}] J.
    """
    h = np.asarray(h, dtype=float)
    if j is None:
        j = symplectic_form(h.shape[0] // 2)
    evals = np.linalg.eigvalsh(0.5 * (h + h.T))
    if evals.min() <= 0:
        raise NotPSD("identity check requires positive definite h")
    if times is None:
        times = np.linspace(-5.0, 5.0, 21)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    measure = w_hermitian_measure(h, j)
    max_dev = 0.0
    for t in times:
        lhs = fundamental(h, j, float(t))
        rhs = np.zeros_like(lhs, dtype=complex)
        for atom in measure.atoms:
            rhs += (1j / atom.omega) * (atom.mplus * np.exp(-1j * atom.omega * t)
                                        - atom.mminus * np.exp(1j * atom.omega * t)) @ j
        dev = float(np.max(np.abs(lhs - rhs)))
        max_dev = max(max_dev, dev)
    return IdentityReport(max_deviation=max_dev, times=times, ok=max_dev <= tol)


def resolvent_rational(a: np.ndarray):
    """Faddeev-LeVerrier resolvent of a constant matrix.

    Returns (mats, charpoly) with (s1 - A)^-1 = sum_k mats[k] s^(m-1-k) / p(s)
    and charpoly coefficients ascending in s. Intended for desk-scale systems;
    the recursion loses accuracy beyond a few tens of dimensions.
    """
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    if m > 40:
        raise ValueError("Faddeev-LeVerrier resolvent limited to dim <= 40")
    mats = [np.eye(m)]
    coeffs = np.zeros(m + 1)
    coeffs[m] = 1.0  # leading coefficient of s^m
    mk = np.eye(m)
    for k in range(1, m + 1):
        am = a @ mk
        ck = -np.trace(am) / k
        coeffs[m - k] = ck
        mk = am + ck * np.eye(m)
        if k < m:
            mats.append(mk.copy())
    return mats, coeffs


def port_response_rational(h: np.ndarray, j: np.ndarray, rows: np.ndarray):
    """Port projection of W(s) as numerator coefficient arrays.

    rows (p x 2n) selects the observed linear combinations x_i of phase-space
    coordinates; the returned (nums, den) give the rational response
        W_ij(s) = -s x_i^T (s1 - Jh)^-1 J x_j = nums[i][j](s) / den(s)
    with ascending coefficients.
    """
    h = np.asarray(h, dtype=float)
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    a = j @ h
    mats, den = resolvent_rational(a)
    m = a.shape[0]
    p = rows.shape[0]
    # polynomial matrix sum_k mats[k] s^(m-1-k), projected
    proj = np.zeros((len(mats), p, p))
    for k, mk in enumerate(mats):
        proj[k] = rows @ mk @ j @ rows.T
    nums = [[None] * p for _ in range(p)]
    for i in range(p):
        for jj in range(p):
            asc = proj[::-1, i, jj]      # ascending in s
            num = -npoly.polymulx(asc)   # multiply by s, then negate
            nums[i][jj] = num
    return nums, den
