"""Quantum thermal two-point correlators of linear networks.

The port formula
    <x(t) x(0)^T> = (hbar/pi) int_R domega/omega [n_th(omega) + 1]
                    F^H(omega) e^{-i omega t}
is evaluated in closed form for atomic measures,

    <x(t) x(0)^T> = hbar sum_k (1/Omega_k) [ (n_k + 1) Mplus_k e^{-i Omega_k t}
                                             + n_k Mminus_k e^{+i Omega_k t} ],

using n(-omega) + 1 = -n(omega) to fold the negative-frequency atoms (this
reduction is unit-tested against the directly quantized gyrator oscillator),
and by panel quadrature for smooth densities. The phase-space route evolves
the equal-time covariance with exp(tJh) through the Williamson frame.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from . import symplectic as sp
from .errors import (
    LossyMeasure,
    QuadratureUnderResolved,
    SpectralFormRequired,
    ZeroFrequency,
)
from .spectra import SpectralAtom, SpectralMeasure

__all__ = [
    "K_BOLTZMANN",
    "ThermalState",
    "nth",
    "equal_time_block",
    "CorrelatorSeries",
    "correlate_lossless",
    "correlate_phase_space",
    "correlate_lossy",
    "QuadratureSpec",
    "dissipative_oscillator_zh",
    "dissipative_oscillator_measure",
    "dissipative_oscillator_bath_measure",
    "bath_discretize",
    "pi_cross_correlator",
    "project_series",
]

K_BOLTZMANN = 1.380649e-23  # J/K
_HBAR_SI = 1.054571817e-34  # J*s


@dataclass(frozen=True)
class ThermalState:
    """Thermal equilibrium state: beta in 1/J (math.inf = ground state)."""

    beta: float
    hbar: float = _HBAR_SI

    def __post_init__(self):
        if not (self.beta > 0):
            raise ValueError("beta must be positive (use math.inf for T=0)")

    @classmethod
    def ground(cls, hbar: float = _HBAR_SI) -> ThermalState:
        return cls(beta=math.inf, hbar=hbar)

    @classmethod
    def from_temperature(cls, kelvin: float, hbar: float = _HBAR_SI) -> ThermalState:
        if kelvin <= 0:
            raise ValueError("temperature must be positive; use ground() for T=0")
        return cls(beta=1.0 / (K_BOLTZMANN * kelvin), hbar=hbar)

    @property
    def is_ground(self) -> bool:
        return math.isinf(self.beta)


def nth(state: ThermalState, omega: float) -> float:
    """Bose occupation (coth(beta hbar omega/2) - 1)/2; n(-w) + 1 = -n(w)."""
    if omega == 0.0:
        raise ZeroFrequency("thermal occupation is singular at omega = 0")
    if state.is_ground:
        return 0.0 if omega > 0 else -1.0
    x = 0.5 * state.beta * state.hbar * omega
    return 0.5 * (1.0 / math.tanh(x) - 1.0)


def equal_time_block(state: ThermalState, omega: float) -> np.ndarray:
    """Equal-time covariance block hbar(n + 1/2) 1_2 - (hbar/2) sigma_y."""
    if omega <= 0:
        raise ValueError("oscillator frequency must be positive")
    n = nth(state, omega)
    return state.hbar * (n + 0.5) * np.eye(2) - 0.5 * state.hbar * sp.SIGMA_Y


@dataclass(frozen=True)
class CorrelatorSeries:
    """Time grid and complex correlation matrices <x(t) x(0)^T>.

    When produced from a spectral measure, the measure/state (and quadrature
    parameters, if any) are kept so spectral post-processing can apply time
    derivatives exactly as -i*omega factors.
    """

    times: np.ndarray
    values: np.ndarray  # (nt, dim, dim) complex
    labels: tuple = ()
    measure: SpectralMeasure | None = None
    state: ThermalState | None = None
    quad: "QuadratureSpec | None" = None

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.times, dtype=float))
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 3 or v.shape[0] != t.size or v.shape[1] != v.shape[2]:
            raise ValueError("values must have shape (len(times), dim, dim)")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def to_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "values": [[[float(z.real), float(z.imag)] for z in mat.ravel()]
                       for mat in self.values],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> CorrelatorSeries:
        times = np.asarray(d["times"], dtype=float)
        raw = d["values"]
        dim = int(round(math.sqrt(len(raw[0])))) if raw else 0
        vals = np.array([[complex(re, im) for re, im in mat] for mat in raw],
                        dtype=complex).reshape(times.size, dim, dim)
        return cls(times=times, values=vals)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        d = self.dim
        header = ["t"]
        for i in range(d):
            for j in range(d):
                header += [f"re_{i}_{j}", f"im_{i}_{j}"]
        w.writerow(header)
        for t, mat in zip(self.times, self.values):
            row = [repr(float(t))]
            for z in mat.ravel():
                row += [repr(float(z.real)), repr(float(z.imag))]
            w.writerow(row)
        return buf.getvalue()


def project_series(series: CorrelatorSeries, rows: np.ndarray,
                   labels: tuple = ()) -> CorrelatorSeries:
    """P <x x^T> P^T for a real selection/combination matrix P."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    vals = np.einsum("ai,tij,bj->tab", rows, series.values, rows)
    measure = None
    if series.measure is not None:
        measure = series.measure.project(rows.T)
    return CorrelatorSeries(series.times, vals, labels, measure=measure,
                            state=series.state, quad=series.quad)


def correlate_lossless(measure: SpectralMeasure, state: ThermalState,
                       times) -> CorrelatorSeries:
    """Closed-form atom sum of the port correlator formula."""
    if not measure.is_atomic:
        raise LossyMeasure("measure has a smooth density; use correlate_lossy")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    vals = np.zeros((times.size, measure.dim, measure.dim), dtype=complex)
    hbar = state.hbar
    for atom in measure.atoms:
        n = nth(state, atom.omega)
        ph_minus = np.exp(-1j * atom.omega * times)
        ph_plus = np.exp(1j * atom.omega * times)
        vals += (hbar / atom.omega) * (
            (n + 1.0) * ph_minus[:, None, None] * atom.mplus
            + n * ph_plus[:, None, None] * atom.mminus)
    return CorrelatorSeries(times, vals, measure=measure, state=state)


def correlate_phase_space(h: np.ndarray, j: np.ndarray | None,
                          state: ThermalState, times,
                          labels: tuple = ()) -> CorrelatorSeries:
    """<xi(t) xi(0)^T> = exp(tJh) <xi xi^T> with the nondynamical sector frozen.

    Computed in the Williamson frame: each oscillator block rotates by
    Omega_k t and carries the thermal covariance block; frozen pairs
    contribute zero rows/columns.
    """
    h = np.asarray(h, dtype=float)
    dim = h.shape[0]
    if j is None:
        j = sp.symplectic_form(dim // 2)
    res = sp.williamson(h, j)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    vals = np.zeros((times.size, dim, dim), dtype=complex)
    for k, om in enumerate(res.frequencies):
        sk = res.S[:, 2 * k: 2 * k + 2]
        block0 = equal_time_block(state, float(om))
        cos = np.cos(om * times)
        sin = np.sin(om * times)
        rot = np.zeros((times.size, 2, 2))
        rot[:, 0, 0] = cos
        rot[:, 0, 1] = sin
        rot[:, 1, 0] = -sin
        rot[:, 1, 1] = cos
        vals += np.einsum("ai,tij,jk,bk->tab", sk, rot, block0, sk)
    return CorrelatorSeries(times, vals, labels, state=state,
                            measure=sp.w_hermitian_measure(h, j))


@dataclass(frozen=True)
class QuadratureSpec:
    """Panel quadrature parameters for smooth spectral densities.

    omega_max bounds the support actually integrated; omega_floor is the
    infrared cutoff below which spectral weight is dropped (a nonzero density
    at omega = 0 makes the port-flux formula infrared divergent, which for a
    discretized bath corresponds to modes below its lowest resonance; match
    omega_floor to delta_omega * exp(-euler_gamma) when comparing routes).
    rule is 'gauss' (Gauss-Legendre panels) or 'trapezoid'; the trapezoid
    rule may place a node at omega = 0, where density(omega)/omega is
    replaced by its finite slope limit.
    """

    omega_max: float
    n_points: int = 24
    rule: str = "gauss"
    omega_floor: float = 0.0
    tol: float = 1e-6
    check_convergence: bool = True


def _panel_edges(spec: QuadratureSpec, peaks, t_max: float) -> np.ndarray:
    lo = max(spec.omega_floor, 0.0)
    hi = spec.omega_max
    edges = {lo, hi}
    widths = [w for (_, w) in peaks] or [0.05 * hi]
    wmin = min(widths)
    for center, width in peaks:
        for k in (1.0, 2.0, 4.0, 8.0, 16.0, 40.0):
            for sgn in (-1.0, 1.0):
                x = center + sgn * k * width
                if lo < x < hi:
                    edges.add(x)
        if lo < center < hi:
            edges.add(center)
    # geometric refinement toward the infrared end resolves the 1/omega factor
    base = lo if lo > 0 else min(wmin, hi) * 1e-3
    x = base
    while x < hi * 0.5:
        if lo < x < hi:
            edges.add(x)
        x *= 4.0
    base_edges = np.array(sorted(edges))
    # cap panel width so e^{-i omega t} stays resolvable by the panel rule
    if t_max > 0:
        width_max = max(spec.n_points, 8) * (2.0 * math.pi) / (6.0 * t_max)
        out = [base_edges[0]]
        for a, b in zip(base_edges[:-1], base_edges[1:]):
            parts = int(np.ceil((b - a) / width_max))
            if parts > 1:
                out.extend(np.linspace(a, b, parts + 1)[1:])
            else:
                out.append(b)
        base_edges = np.array(out)
    return base_edges


def _quad_nodes(edges: np.ndarray, n_points: int, rule: str):
    nodes_all = []
    weights_all = []
    if rule == "gauss":
        x, w = np.polynomial.legendre.leggauss(n_points)
        for a, b in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            nodes_all.append(mid + half * x)
            weights_all.append(half * w)
    elif rule == "trapezoid":
        for a, b in zip(edges[:-1], edges[1:]):
            xs = np.linspace(a, b, max(n_points, 2))
            ws = np.full(xs.size, (b - a) / (xs.size - 1))
            ws[0] *= 0.5
            ws[-1] *= 0.5
            nodes_all.append(xs)
            weights_all.append(ws)
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    return np.concatenate(nodes_all), np.concatenate(weights_all)


def _lossy_values(measure: SpectralMeasure, state: ThermalState, times,
                  spec: QuadratureSpec, n_points: int) -> np.ndarray:
    t_max = float(np.max(np.abs(times))) if times.size else 0.0
    nodes, weights = _quad_nodes(_panel_edges(spec, measure.peaks, t_max),
                                 n_points, spec.rule)
    dim = measure.dim
    vals = np.zeros((times.size, dim, dim), dtype=complex)
    hbar = state.hbar
    slope = None
    for w_node, w_weight in zip(nodes, weights):
        if w_node <= 0.0:
            # omega = 0 node (trapezoid rule): the folded integrand tends to
            # the density slope (entrywise imaginary), independent of t and
            # temperature since (n+1)D' + nD'* = D' for D'* = -D'
            if slope is None:
                eps = 1e-7 * max(spec.omega_max, 1.0)
                slope = (measure.density(eps) - measure.density(-eps)) / (2 * eps)
            vals += (hbar / math.pi) * w_weight * slope
            continue
        dmat = measure.density(float(w_node))
        n = nth(state, float(w_node))
        ph_minus = np.exp(-1j * w_node * times)
        ph_plus = np.exp(1j * w_node * times)
        contrib = ((n + 1.0) * ph_minus[:, None, None] * dmat
                   + n * ph_plus[:, None, None] * dmat.conj())
        vals += (hbar / math.pi) * (w_weight / w_node) * contrib
    return vals


def correlate_lossy(measure: SpectralMeasure, state: ThermalState, times,
                    spec: QuadratureSpec) -> CorrelatorSeries:
    """Quadrature of the port correlator formula for a smooth density.

    Any atomic part of the measure is added in closed form. Raises
    QuadratureUnderResolved if doubling n_points moves the result by more
    than spec.tol (relative).
    """
    if measure.density is None:
        raise LossyMeasure("measure has no smooth density; use correlate_lossless")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    vals = _lossy_values(measure, state, times, spec, spec.n_points)
    if spec.check_convergence:
        vals2 = _lossy_values(measure, state, times, spec, 2 * spec.n_points)
        scale = max(float(np.max(np.abs(vals2))), 1e-300)
        change = float(np.max(np.abs(vals2 - vals))) / scale
        if change > spec.tol:
            raise QuadratureUnderResolved(
                f"doubling n_points changed the result by {change:.3e} "
                f"(tol {spec.tol:.1e})")
        vals = vals2
    if measure.atoms:
        atomic = SpectralMeasure(dim=measure.dim, atoms=measure.atoms)
        vals = vals + correlate_lossless(atomic, state, times).values
    return CorrelatorSeries(times, vals, measure=measure, state=state, quad=spec)


# --- dissipative two-port gyrator oscillator ---------------------------------

def dissipative_oscillator_zh(g: float, r: float, omega0: float,
                              omega: float) -> np.ndarray:
    """Hermitian part of the conductance-shunted gyrator oscillator impedance.

    Z^H(omega) = Z_+ + Z_- with
    Z_pm = [G (Omega R)^2 / 2] / [(omega pm Omega)^2 + (G Omega R)^2]
           * (1_2 mp sigma_y),
    the Lorentzian-broadened pair of the lossless atoms (capacitance
    C = 1/(Omega R) at each port).
    """
    if g <= 0 or r <= 0 or omega0 <= 0:
        raise ValueError("g, r, omega0 must be positive")
    amp = 0.5 * g * (omega0 * r) ** 2
    gam = g * omega0 * r
    zp = amp / ((omega + omega0) ** 2 + gam ** 2)
    zm = amp / ((omega - omega0) ** 2 + gam ** 2)
    eye = np.eye(2)
    return zp * (eye - sp.SIGMA_Y) + zm * (eye + sp.SIGMA_Y)


def dissipative_oscillator_measure(g: float, r: float, omega0: float
                                   ) -> SpectralMeasure:
    """Smooth spectral measure of the shunted gyrator oscillator."""
    gam = g * omega0 * r

    def density(w: float) -> np.ndarray:
        return dissipative_oscillator_zh(g, r, omega0, w)

    grid = np.linspace(0.0, omega0 + 40 * gam, 2001)
    return SpectralMeasure(dim=2, density=density,
                           peaks=((omega0, gam),), grid=grid)


def dissipative_oscillator_bath_measure(g: float, r: float, omega0: float,
                                        delta_omega: float, n_modes: int
                                        ) -> SpectralMeasure:
    """Exact port atoms of the bath-discretized shunted gyrator oscillator.

    With each conductance replaced by the LC strands of bath_discretize, the
    port impedance is s[[a,-b],[b,a]]/(a^2+b^2) with a = Cs^2 + sY_N(s) and
    b = s/R, so the mode frequencies solve the secular equation
    F(nu) = C nu + nu sum_n (1/L_n)/(omega_n^2 - nu^2) = +/- 1/R and the atom
    weight at nu_k is (1_2 +/- sigma_y)/(2 F'(nu_k)). Equivalent to the
    netlist expansion + Williamson route (asserted in tests) but costs O(N)
    instead of a dense eigendecomposition, using the digamma closed form of
    the equal-weight uniform-grid sum.
    """
    from scipy.special import polygamma, psi

    if min(g, r, omega0, delta_omega) <= 0 or n_modes < 1:
        raise ValueError("parameters must be positive, n_modes >= 1")
    c = 1.0 / (omega0 * r)
    gyr = 1.0 / r
    delta = delta_omega
    n = n_modes
    kappa = 2.0 * g * delta / math.pi  # 1/L_n, equal for all strands
    w_grid = delta * np.arange(1, n + 1)
    w2 = w_grid * w_grid

    def sum_direct(nu):
        nu = np.atleast_2d(nu).T
        return np.sum(1.0 / (w2[None, :] - nu * nu), axis=1)

    def sum_closed(nu):
        # sum_{m<=N} 1/(m^2 d^2 - nu^2) via the infinite cotangent sum minus
        # the digamma tail; ill-conditioned for nu beyond the grid end
        a = np.asarray(nu) / delta
        full = (1.0 - np.pi * a / np.tan(np.pi * a)) / (2.0 * a * a)
        tail = (psi(n + 1 + a) - psi(n + 1 - a)) / (2.0 * a)
        return (full - tail) / (delta * delta)

    def f_val(nu):
        nu = np.asarray(nu, dtype=float)
        inside = nu < (n - 1.5) * delta
        out = np.empty_like(nu)
        if np.any(inside):
            out[inside] = nu[inside] * kappa * sum_closed(nu[inside])
        if np.any(~inside):
            out[~inside] = nu[~inside] * kappa * sum_direct(nu[~inside])
        return c * nu + out

    edges = np.concatenate([[0.0], w_grid,
                            [w_grid[-1] * 1.5 + 10.0 * (omega0 + gyr / c)]])
    roots = []
    signs = []
    eps = delta * 1e-9
    for tgt, sg in ((gyr, 1.0), (-gyr, -1.0)):
        lo = edges[:-1] + eps
        hi = edges[1:] - eps
        hi = hi.copy()
        hi[-1] = edges[-1]
        flo = f_val(lo) - tgt
        fhi = f_val(hi) - tgt
        ok = (flo * fhi) < 0
        lo, hi, flo = lo[ok].copy(), hi[ok].copy(), flo[ok]
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            fm = f_val(mid) - tgt
            left = (flo * fm) <= 0
            hi[left] = mid[left]
            lo[~left] = mid[~left]
            flo[~left] = fm[~left]
        roots.append(0.5 * (lo + hi))
        signs.append(np.full(lo.size, sg))
    roots = np.concatenate(roots)
    signs = np.concatenate(signs)

    # F'(nu) = C + kappa * sum_n (omega_n^2 + nu^2)/(omega_n^2 - nu^2)^2,
    # evaluated by blocked direct summation (one pass over all roots)
    fprime = np.empty_like(roots)
    block = max(1, int(2_000_000 // max(n, 1)))
    for start in range(0, roots.size, block):
        nu = roots[start:start + block][:, None]
        d2 = w2[None, :] - nu * nu
        fprime[start:start + block] = c + kappa * np.sum(
            (w2[None, :] + nu * nu) / (d2 * d2), axis=1)

    eye = np.eye(2)
    pairs = [(float(nu), (eye + sg * sp.SIGMA_Y) / (2.0 * fp))
             for nu, sg, fp in zip(roots, signs, fprime)]
    return SpectralMeasure.from_atoms(pairs, dim=2)


def bath_discretize(g_conductance: float, delta_omega: float, n_modes: int):
    """Element sequences approximating a conductance by LC strands.

    C_n = 2G/(pi n^2 DeltaOmega), L_n = pi/(2 G DeltaOmega); strand
    resonances sit exactly at n * DeltaOmega.
    """
    if g_conductance <= 0 or delta_omega <= 0:
        raise ValueError("conductance and frequency step must be positive")
    if n_modes < 1:
        raise ValueError("need at least one bath mode")
    l_n = math.pi / (2.0 * g_conductance * delta_omega)
    return [(2.0 * g_conductance / (math.pi * n * n * delta_omega), l_n)
            for n in range(1, n_modes + 1)]


def pi_cross_correlator(series: CorrelatorSeries, c: float, r: float
                        ) -> CorrelatorSeries:
    """Correlator of the conjugate charges Pi = C dPhi/dt + (Y/2) Phi.

    Applied spectrally: the measure transforms as rho -> L rho L^dagger with
    L(omega) = -i omega C 1 + Y/2 and Y the charge-gyration matrix (1/R on
    the standard two-port orientation), so time derivatives are exact
    -i*omega factors rather than finite differences.
    """
    if series.measure is None or series.state is None:
        raise SpectralFormRequired(
            "series carries no spectral measure; recompute via a correlate_* route")
    measure = series.measure
    if measure.dim != 2:
        raise ValueError("conjugate-charge relation is defined for the two-port stage")
    y = (1.0 / r) * np.array([[0.0, 1.0], [-1.0, 0.0]])

    def lmat(w: float) -> np.ndarray:
        return -1j * w * c * np.eye(2) + 0.5 * y

    atoms = tuple(
        SpectralAtom(a.omega,
                     lmat(a.omega) @ a.mplus @ lmat(a.omega).conj().T,
                     lmat(-a.omega) @ a.mminus @ lmat(-a.omega).conj().T)
        for a in measure.atoms)
    density = None
    if measure.density is not None:
        inner = measure.density

        def density(w: float, _inner=inner) -> np.ndarray:
            lw = lmat(w)
            return lw @ _inner(w) @ lw.conj().T

    new_measure = SpectralMeasure(dim=2, atoms=atoms, density=density,
                                  peaks=measure.peaks, grid=measure.grid)
    if new_measure.density is None:
        return correlate_lossless(new_measure, series.state, series.times)
    spec = series.quad or QuadratureSpec(omega_max=_default_omega_max(new_measure))
    return correlate_lossy(new_measure, series.state, series.times, spec)


def _default_omega_max(measure: SpectralMeasure) -> float:
    if measure.peaks:
        return max(c + 40 * w for c, w in measure.peaks)
    if measure.grid is not None and len(measure.grid):
        return float(np.max(measure.grid))
    return 1.0
