"""Immittance and scattering representation handling.

Foster decomposition of lossless positive-real matrices,

    F(s) = B_inf + A_0/s + s A_inf + sum_k (s A_k + B_k)/(s^2 + Omega_k^2),

two-port stage factorization through ideal transformer rows, S <-> Z <-> Y
conversions with per-port reference impedances, reduction of scattering
matrices that have no immittance representation, and the hermitian-part
spectral measures feeding the correlator formulas.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import network as nw
from . import symplectic as sp
from .errors import (
    NoConstantEigenspace,
    NoImmittance,
    NotLossless,
    ResidueNotPSD,
)
from .ratmat import (
    Poly,
    RatFunc,
    RatMatrix,
    require_lossless_positive_real,
)
from .spectra import SpectralMeasure

__all__ = [
    "FosterForm",
    "TwoPortStage",
    "ScatteringReduction",
    "s_to_z",
    "z_to_s",
    "y_from_z",
    "foster_decompose",
    "foster_synthesize",
    "stage_factorize",
    "synthesize_stages",
    "gyrator_stage_impedance",
    "lc_stage_impedance",
    "reduce_singular_scattering",
    "reduced_immittance",
    "port_hermitian_measure",
    "response_measure",
    "hamiltonian_from_foster",
]


@dataclass(frozen=True)
class FosterForm:
    """Partial-fraction data of a lossless PR immittance.

    binf holds the full constant term (for lossless matrices its symmetric
    part vanishes; the antisymmetric remainder is a frequency-independent
    gyration that never reaches the correlators). a0/ainf are the residues at
    the origin and at infinity. Each stage is (omega, A, B) with A symmetric
    PSD and B antisymmetric; the residue at +i*omega is A/2 - iB/(2*omega),
    hermitian PSD. kind is 'impedance' or 'admittance'.
    """

    binf: np.ndarray
    a0: np.ndarray
    ainf: np.ndarray
    stages: tuple  # of (omega, A, B)
    kind: str = "impedance"

    def __post_init__(self):
        binf = np.asarray(self.binf, dtype=float)
        object.__setattr__(self, "binf", binf)
        object.__setattr__(self, "a0", np.asarray(self.a0, dtype=float))
        object.__setattr__(self, "ainf", np.asarray(self.ainf, dtype=float))
        stages = tuple((float(om), np.asarray(a, dtype=float),
                        np.asarray(b, dtype=float))
                       for om, a, b in self.stages)
        omegas = [om for om, _, _ in stages]
        if any(om <= 0 for om in omegas):
            raise ValueError("stage frequencies must be positive")
        if len(set(np.round(omegas, 12))) != len(omegas):
            raise ValueError("stage frequencies must be distinct")
        object.__setattr__(self, "stages", stages)
        if self.kind not in ("impedance", "admittance"):
            raise ValueError("kind must be 'impedance' or 'admittance'")

    @property
    def dim(self) -> int:
        return self.binf.shape[0]

    @classmethod
    def empty(cls, dim: int, kind: str = "impedance") -> FosterForm:
        z = np.zeros((dim, dim))
        return cls(z, z.copy(), z.copy(), (), kind)

    def residue_at(self, omega: float) -> np.ndarray:
        for om, a, b in self.stages:
            if om == omega:
                return 0.5 * a - 0.5j * b / om
        raise KeyError(f"no stage at omega={omega}")

    # serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "Binf": self.binf.tolist(),
            "A0": self.a0.tolist(),
            "Ainf": self.ainf.tolist(),
            "stages": [{"omega": om, "A": a.tolist(), "B": b.tolist()}
                       for om, a, b in self.stages],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> FosterForm:
        return cls(binf=np.array(d["Binf"], dtype=float),
                   a0=np.array(d["A0"], dtype=float),
                   ainf=np.array(d["Ainf"], dtype=float),
                   stages=tuple((float(st["omega"]), np.array(st["A"], dtype=float),
                                 np.array(st["B"], dtype=float))
                                for st in d["stages"]),
                   kind=d.get("kind", "impedance"))

    @classmethod
    def from_json(cls, text: str) -> FosterForm:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TwoPortStage:
    """One canonical resonant stage coupled to the ports by transformer rows.

    Nonreciprocal stages realize the gyrator-capacitor two-port; reciprocal
    stages a series LC one-port. r_stage is fixed to 1 and all scale carried
    by t_rows (Omega * R * C = 1 within the stage).
    """

    omega: float
    r_stage: float
    kind: str  # 'nonreciprocal' | 'reciprocal'
    t_rows: np.ndarray  # (2, N) or (1, N)


def gyrator_stage_impedance(omega: float, r: float) -> RatMatrix:
    """Impedance of the capacitor-loaded gyrator two-port.

    Z(s) = [[s/C, -R Omega^2], [R Omega^2, s/C]] / (s^2 + Omega^2) with
    C = 1/(Omega R).
    """
    den = Poly([omega * omega, 0.0, 1.0])
    diag = RatFunc(Poly([0.0, omega * r]), den)
    off = RatFunc(Poly([r * omega * omega]), den)
    zero_minus = off.scale(-1.0)
    return RatMatrix([[diag, zero_minus], [off, diag]])


def lc_stage_impedance(omega: float, r: float) -> RatMatrix:
    """Scalar impedance (s/C)/(s^2 + Omega^2) with C = 1/(Omega R)."""
    den = Poly([omega * omega, 0.0, 1.0])
    return RatMatrix([[RatFunc(Poly([0.0, omega * r]), den)]])


# --- S <-> Z <-> Y -----------------------------------------------------------

def _rref_halves(n: int, rref) -> tuple[np.ndarray, np.ndarray]:
    rref = np.asarray(rref, dtype=float) * np.ones(n)
    if np.any(rref <= 0):
        raise ValueError("reference impedances must be positive")
    return np.diag(np.sqrt(rref)), np.diag(1.0 / np.sqrt(rref))


def s_to_z(s_mat: RatMatrix, rref=1.0) -> RatMatrix:
    """Z = R^(1/2) (1 - S)^-1 (1 + S) R^(1/2); raises NoImmittance when
    det(1 - S) vanishes identically (use reduce_singular_scattering)."""
    n = s_mat.rows
    eye = RatMatrix.identity(n)
    rh, _ = _rref_halves(n, rref)
    try:
        inv = (eye - s_mat).inverse()
    except ZeroDivisionError:
        raise NoImmittance("det(1 - S) is identically zero")
    return (inv @ (eye + s_mat)).congruence(rh)


def z_to_s(z_mat: RatMatrix, rref=1.0) -> RatMatrix:
    """S = R^(-1/2) (Z - R)(Z + R)^-1 R^(1/2)."""
    n = z_mat.rows
    rh, rih = _rref_halves(n, rref)
    rdiag = RatMatrix.from_constant(rh @ rh)
    try:
        inv = (z_mat + rdiag).inverse()
    except ZeroDivisionError:
        raise NoImmittance("det(Z + R) is identically zero")
    left = RatMatrix([[RatFunc(Poly(e.num.coeffs * rih[i, i]), e.den, reduce=False)
                       for e in row] for i, row in enumerate((z_mat - rdiag).entries)])
    right = RatMatrix([[RatFunc(Poly(e.num.coeffs * rh[j, j]), e.den, reduce=False)
                        for j, e in enumerate(row)] for row in inv.entries])
    return left @ right


def y_from_z(z_mat: RatMatrix) -> RatMatrix:
    """Y = Z^-1."""
    return z_mat.inverse()


# --- Foster decomposition ----------------------------------------------------

def foster_decompose(f: RatMatrix, tol: float = 1e-8,
                     kind: str = "impedance") -> FosterForm:
    """Partial-fraction decomposition of a lossless PR matrix.

    Raises NotLosslessPR if the input fails the losslessness check and
    ResidueNotPSD if any finite-frequency residue has a negative eigenvalue.
    """
    require_lossless_positive_real(f, tol)
    n = f.rows
    poles = f.poles(tol)
    a0 = np.zeros((n, n))
    stages = []
    for p in poles:
        if p.location.imag < 0:
            continue  # conjugate partner of a recorded stage
        if p.location == 0:
            res = p.residue
            a0 = res.real.copy()
            continue
        om = float(p.location.imag)
        res = p.residue
        eigs = np.linalg.eigvalsh(0.5 * (res + res.conj().T))
        scale = max(float(np.max(np.abs(res))), 1e-300)
        if eigs.min() < -1e-8 * scale:
            raise ResidueNotPSD(
                f"residue at i*{om} has eigenvalue {eigs.min():.3e}", float(eigs.min()))
        a = 2.0 * res.real
        b = -2.0 * om * res.imag
        a = 0.5 * (a + a.T)
        b = 0.5 * (b - b.T)
        stages.append((om, a, b))
    stages.sort(key=lambda st: st[0])

    ainf = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            e = f.entries[i][j]
            if e.num.degree == e.den.degree + 1:
                ainf[i, j] = e.num.coeffs[-1]
    ainf = 0.5 * (ainf + ainf.T)

    # constant term: average of F(s) minus all recovered parts on a sample
    samples = np.array([0.83 + 0.41j, -0.57 + 1.31j, 1.91 - 0.77j])
    scale_om = max([om for om, _, _ in stages], default=1.0)
    binf = np.zeros((n, n), dtype=complex)
    for s in samples * scale_om:
        val = f.eval(s) - s * ainf
        if np.max(np.abs(a0)) > 0:
            val -= a0 / s
        for om, a, b in stages:
            val -= (s * a + b) / (s * s + om * om)
        binf += val / samples.size
    if np.max(np.abs(binf.imag)) > 1e-7 * max(1.0, np.max(np.abs(binf))):
        raise ValueError("constant term did not come out real; reduction failed")
    return FosterForm(binf=binf.real, a0=a0, ainf=ainf, stages=tuple(stages),
                      kind=kind)


def foster_synthesize(form: FosterForm) -> RatMatrix:
    """Rational matrix of a FosterForm (the decomposition read right to left)."""
    n = form.dim
    den = Poly.one()
    if np.max(np.abs(form.a0)) > 0:
        den = den.shift_up(1)
    for om, _, _ in form.stages:
        den = den * Poly([om * om, 0.0, 1.0])
    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            num = Poly.zero()
            num = num + form.binf[i, j] * den
            num = num + form.ainf[i, j] * den.shift_up(1)
            if np.max(np.abs(form.a0)) > 0:
                q = _poly_without_factor(den, Poly([0.0, 1.0]))
                num = num + form.a0[i, j] * q
            for om, a, b in form.stages:
                q = _poly_without_factor(den, Poly([om * om, 0.0, 1.0]))
                num = num + (Poly([b[i, j], a[i, j]])) * q
            row.append(RatFunc(num, den))
        entries.append(row)
    return RatMatrix(entries)


def _poly_without_factor(den: Poly, factor: Poly) -> Poly:
    """den / factor for an exact known factor (root-multiset division)."""
    from numpy.polynomial import polynomial as npoly
    quot, rem = npoly.polydiv(den.coeffs, factor.coeffs)
    if rem.size and np.max(np.abs(rem)) > 1e-9 * max(1.0, np.max(np.abs(den.coeffs))):
        raise ValueError("requested factor does not divide the denominator")
    return Poly(quot)


# --- stage factorization -----------------------------------------------------

def stage_factorize(omega: float, a: np.ndarray, b: np.ndarray,
                    tol: float = 1e-10) -> list[TwoPortStage]:
    """Split one resonant stage into canonical two-port/one-port stages.

    The hermitian PSD residue M = A/2 - iB/(2 Omega) is eigendecomposed;
    every complex eigenvector yields a nonreciprocal gyrator stage with
    coupling rows alpha [Im w; Re w], every real eigenvector a reciprocal
    one-port, alpha = sqrt(2 lambda / Omega). Stage resistances are fixed to
    1 with all scale in the rows, and each row block is rotated (det +1, so
    the gyration orientation is preserved) to put its first nonzero column in
    the form (+r, 0).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = 0.5 * a - 0.5j * b / omega
    m = 0.5 * (m + m.conj().T)
    evals, evecs = np.linalg.eigh(m)
    scale = max(float(np.max(np.abs(evals))), 1e-300)
    if evals.min() < -1e-8 * scale:
        raise ResidueNotPSD(
            f"stage residue at i*{omega} has eigenvalue {evals.min():.3e}",
            float(evals.min()))
    stages: list[TwoPortStage] = []
    for lam, w in zip(evals, evecs.T):
        if lam <= tol * scale:
            continue
        alpha = np.sqrt(2.0 * lam / omega)
        u, v = w.real, w.imag
        cross = np.outer(u, v) - np.outer(v, u)
        if np.max(np.abs(cross)) <= 1e-9:
            # eigenvector is real up to a phase: reciprocal one-port stage
            direction = u if np.linalg.norm(u) >= np.linalg.norm(v) else v
            direction = direction / np.linalg.norm(direction)
            rows = (alpha * direction)[None, :]
            if rows[0, np.argmax(np.abs(rows[0]))] < 0:
                rows = -rows
            stages.append(TwoPortStage(omega, 1.0, "reciprocal", rows))
        else:
            rows = np.vstack([alpha * v, alpha * u])
            stages.append(TwoPortStage(omega, 1.0, "nonreciprocal",
                                       _canonical_rotation(rows)))
    return stages


def _canonical_rotation(rows: np.ndarray) -> np.ndarray:
    """Rotate a 2xN row block so its first nonzero column is (+r, 0)."""
    for j in range(rows.shape[1]):
        col = rows[:, j]
        r = np.hypot(col[0], col[1])
        if r > 1e-12 * max(1.0, np.max(np.abs(rows))):
            c, s = col[0] / r, col[1] / r
            q = np.array([[c, s], [-s, c]])
            return q @ rows
    return rows


def synthesize_stages(stages, omega: float, n: int) -> RatMatrix:
    """Sum of T^T Z_stage T over a stage list (re-synthesis check)."""
    acc = RatMatrix.zeros(n, n)
    for st in stages:
        z = (gyrator_stage_impedance(st.omega, st.r_stage)
             if st.kind == "nonreciprocal" else
             lc_stage_impedance(st.omega, st.r_stage))
        acc = acc + z.congruence(st.t_rows.T)
    return acc


# --- singular scattering -----------------------------------------------------

@dataclass(frozen=True)
class ScatteringReduction:
    """Orthogonal split S = T^T (S_reduced  (+)  (+/-)1_k) T.

    The first (n - k) rows of t couple the outer ports to the reduced block;
    the last k rows span the frequency-independent +1 (impedance kind) or -1
    (admittance kind) eigenspace: trivially open or shorted directions.
    """

    t: np.ndarray
    k_open: int
    s_reduced: RatMatrix
    p: np.ndarray
    kind: str

    @property
    def n_ports(self) -> int:
        return self.t.shape[0]


def reduce_singular_scattering(s_mat: RatMatrix, tol: float = 1e-8,
                               kind: str = "impedance",
                               rref: float = 1.0) -> ScatteringReduction:
    """Factor out the constant +1 (or -1 for admittance kind) eigenspace.

    S is sampled at several imaginary frequencies (and their conjugates, so
    the intersection eigenspace is real); the common null space of S -/+ 1
    gives the trivially open/short directions, and the orthogonal complement
    carries the reduced scattering block.
    """
    if not s_mat.is_square:
        raise ValueError("scattering matrix must be square")
    n = s_mat.rows
    sign = 1.0 if kind == "impedance" else -1.0
    omegas = np.logspace(-1.0, 1.0, 7) * _frequency_scale(s_mat)
    samples = []
    for w in omegas:
        sv = s_mat.eval(1j * w)
        dev = np.max(np.abs(sv @ sv.conj().T - np.eye(n)))
        if dev > 1e-6:
            raise NotLossless(f"S(i*{w:.4g}) deviates from unitarity by {dev:.3e}")
        samples.extend([sv, sv.conj()])
    stack = np.vstack([sv - sign * np.eye(n) for sv in samples])
    _, svals, vh = np.linalg.svd(stack)
    svals = np.concatenate([svals, np.zeros(n - svals.size)])
    null_mask = svals <= tol * max(1.0, svals[0] if svals.size else 1.0)
    k = int(null_mask.sum())
    if k == 0:
        raise NoConstantEigenspace(
            "no frequency-independent eigenspace; plain conversion applies")
    basis = vh[n - k:].conj()  # complex null-space basis, rows
    # extract a real orthonormal basis (conjugate closure guarantees one)
    real_stack = np.hstack([basis.T.real, basis.T.imag])
    q, svals_r, _ = np.linalg.svd(real_stack, full_matrices=True)
    rank = int(np.sum(svals_r > tol * max(1.0, svals_r[0])))
    if rank != k:
        raise NoConstantEigenspace("constant eigenspace has no real basis")
    open_rows = q[:, :k].T
    comp_rows = q[:, k:].T  # orthonormal complement, (n-k) x n
    comp_rows = _sign_canonical(comp_rows)
    open_rows = _sign_canonical(open_rows)
    t = np.vstack([comp_rows, open_rows])
    s_red = s_mat.congruence(comp_rows)
    return ScatteringReduction(t=t, k_open=k, s_reduced=s_red, p=comp_rows,
                               kind=kind)


def reduced_immittance(red: ScatteringReduction, rref: float = 1.0) -> RatMatrix:
    """Immittance of the reduced block: Z for impedance kind, Y for admittance."""
    n = red.s_reduced.rows
    eye = RatMatrix.identity(n)
    if red.kind == "impedance":
        return s_to_z(red.s_reduced, rref)
    inv = (eye + red.s_reduced).inverse()
    y = (inv @ (eye - red.s_reduced)).scale(1.0 / rref)
    return y


def _sign_canonical(rows: np.ndarray) -> np.ndarray:
    out = rows.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def _frequency_scale(m: RatMatrix) -> float:
    mags = []
    for row in m.entries:
        for e in row:
            r = e.den.roots()
            mags.extend(np.abs(r[np.abs(r) > 1e-12]))
    return float(np.median(mags)) if mags else 1.0


# --- spectral measures -------------------------------------------------------

def port_hermitian_measure(obj, rref: float = 1.0,
                           tol: float = 1e-8) -> SpectralMeasure:
    """Atomic hermitian-part measure of a lossless response.

    Accepts a FosterForm or a ScatteringReduction (whose reduced immittance
    is decomposed and transported through the coupling rows P as P^T M P).
    Atom weights at +Omega_k are A_k/2 + i B_k/(2 Omega_k); constant, origin
    and infinite-frequency terms carry no weight under open/short conditions.
    """
    if isinstance(obj, ScatteringReduction):
        inner = foster_decompose(reduced_immittance(obj, rref), tol,
                                 kind=obj.kind)
        return port_hermitian_measure(inner).project(obj.p)
    form: FosterForm = obj
    pairs = []
    for om, a, b in form.stages:
        mplus = 0.5 * a + 0.5j * b / om
        pairs.append((om, mplus))
    if not pairs:
        return SpectralMeasure(dim=form.dim)
    return SpectralMeasure.from_atoms(pairs, dim=form.dim)


def response_measure(f: RatMatrix, tol: float = 1e-8) -> SpectralMeasure:
    """Spectral measure of a general passive rational response.

    Simple imaginary-axis poles become atoms; strictly stable poles broaden
    into a smooth density, evaluated as the hermitian part of the causal
    boundary value with the polynomial (constant + linear) part removed,
    since open/short conditions exclude it. Right-half-plane poles mean the
    response is not passive and are rejected.
    """
    if not f.is_square:
        raise ValueError("response must be square")
    n = f.rows
    pole_list = f.poles(tol)
    atoms = []
    peaks = []
    has_density = False
    for p in pole_list:
        scale = max(1.0, abs(p.location))
        if p.location.real > tol * scale:
            raise NotLossless(f"pole {p.location} in the right half-plane")
        if abs(p.location.real) <= tol * scale:
            if p.location == 0 or p.location.imag < 0:
                continue
            if p.order != 1:
                raise NotLossless(f"axis pole {p.location} of order {p.order}")
            atoms.append((float(p.location.imag), p.residue.conj()))
        else:
            has_density = True
            if p.location.imag > 0:
                peaks.append((float(p.location.imag), float(-p.location.real)))
            elif p.location.imag == 0:
                peaks.append((0.0, float(-p.location.real)))

    # polynomial part: constant and linear growth, removed from the density
    c0 = np.zeros((n, n))
    c1 = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            e = f.entries[i][j]
            dn = e.num.degree - e.den.degree
            if dn > 1:
                raise ValueError(f"entry ({i},{j}) grows faster than s")
            if dn >= 0:
                coeffs = np.polynomial.polynomial.polydiv(
                    e.num.coeffs, e.den.coeffs)[0]
                c0[i, j] = coeffs[0] if coeffs.size else 0.0
                if dn == 1 and coeffs.size > 1:
                    c1[i, j] = coeffs[1]

    density = None
    if has_density:
        def density(w: float, _f=f, _c0=c0, _c1=c1) -> np.ndarray:
            val = _f.eval(-1j * w) - (_c0 - 1j * w * _c1)
            return 0.5 * (val + val.conj().T)

    atom_part = tuple()
    if atoms:
        atom_part = SpectralMeasure.from_atoms(atoms, dim=n).atoms
    return SpectralMeasure(dim=n, atoms=atom_part, density=density,
                           peaks=tuple(peaks))


# --- phase-space realization of a Foster form --------------------------------

def hamiltonian_from_foster(form: FosterForm) -> nw.HamiltonianSystem:
    """Direct-sum Hamiltonian realization of the finite-frequency stages.

    Every stage contributes its own oscillator block (gyrator-capacitor pair
    for nonreciprocal stages, series LC for reciprocal ones); port variables
    are the transformer-weighted sums of stage port variables. Constant ,
    origin and linear terms carry no dynamics under open/short conditions
    and are omitted.
    """
    n = form.dim
    blocks: list[np.ndarray] = []
    flux_rows: list[np.ndarray] = []  # per stage: (n, block_dim)
    for om, a, b in form.stages:
        for st in stage_factorize(om, a, b):
            if st.kind == "nonreciprocal":
                lag = nw.QuadraticLagrangian(
                    cmat=np.eye(2) / (om * st.r_stage),
                    gmat=(1.0 / st.r_stage) * np.array([[0.0, 1.0], [-1.0, 0.0]]),
                    mmat=np.zeros((2, 2)),
                    coord_labels=("a", "b"), port_rows=np.eye(2),
                    port_names=("a", "b"), mode=nw.AnalysisMode.NODE_FLUX)
                sys_st = nw.legendre(lag, hbar=1.0)
                blocks.append(sys_st.h)
                flux_rows.append(st.t_rows.T @ sys_st.port_flux)
            else:
                c_st = 1.0 / (om * st.r_stage)
                l_st = 1.0 / (om * om * c_st)
                h_st = np.diag([1.0 / l_st, 1.0 / c_st])
                blocks.append(h_st)
                row = np.zeros((1, 2))
                row[0, 0] = 1.0
                flux_rows.append(st.t_rows.T @ row)
    dim = sum(bk.shape[0] for bk in blocks)
    h = np.zeros((dim, dim))
    port_flux = np.zeros((n, dim))
    port_momentum = np.zeros((n, dim))
    off = 0
    for bk, fr in zip(blocks, flux_rows):
        d = bk.shape[0]
        h[off:off + d, off:off + d] = bk
        port_flux[:, off:off + d] = fr
        off += d
    return nw.HamiltonianSystem(
        h=h, j=sp.symplectic_form(dim // 2), port_flux=port_flux,
        port_momentum=port_momentum,
        port_names=tuple(f"p{i + 1}" for i in range(n)),
        coord_labels=tuple(f"xi{i}" for i in range(dim)),
        mode=nw.AnalysisMode.NODE_FLUX, hbar=1.0)
