"""Rational matrix functions of the Laplace variable s.

Polynomials are stored with real coefficients in ascending degree order.
Rational functions keep a monic denominator and are reduced on construction
(common roots cancelled by companion-matrix root matching; float coefficients
make exact GCD ill-posed, so every reduction is verified by re-evaluation and
rolled back if it changed the function).

These are the carriers for impedance Z(s), admittance Y(s) and scattering
S(s) matrices throughout the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ClusterAmbiguity, NotLosslessPR, PoleEvaluation

__all__ = [
    "Poly",
    "RatFunc",
    "RatMatrix",
    "PoleData",
    "LosslessReport",
    "hermitian_part",
    "is_lossless_positive_real",
]

# Default relative tolerance for pole clustering and root cancellation.
# Denominators that went through repeated products accumulate roundoff.
DEFAULT_CLUSTER_TOL = 1e-8

_TRIM_REL = 1e-13


def _trim(coeffs: np.ndarray, rel: float = 0.0) -> np.ndarray:
    """Drop trailing (highest-degree) coefficients below rel * max|c|."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if c.size == 0:
        return c
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(0)
    cut = rel * scale
    last = c.size
    while last > 0 and abs(c[last - 1]) <= cut:
        last -= 1
    return c[:last].copy()


@dataclass(frozen=True)
class Poly:
    """Real-coefficient polynomial, ascending degree; zero poly has no coeffs."""

    coeffs: np.ndarray

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _trim(np.asarray(coeffs, dtype=float)))

    @classmethod
    def zero(cls) -> Poly:
        return cls([])

    @classmethod
    def one(cls) -> Poly:
        return cls([1.0])

    @classmethod
    def from_roots(cls, roots, lead: float = 1.0) -> Poly:
        roots = np.asarray(roots, dtype=complex)
        if roots.size == 0:
            return cls([lead])
        c = npoly.polyfromroots(roots) * lead
        scale = np.max(np.abs(c)) or 1.0
        if np.max(np.abs(c.imag)) > 1e-8 * scale:
            raise ValueError("root multiset is not closed under conjugation")
        return cls(c.real)

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1  # zero poly -> -1

    def __call__(self, s):
        if self.is_zero:
            return np.zeros_like(np.asarray(s, dtype=complex)) if np.ndim(s) else 0j
        return npoly.polyval(np.asarray(s, dtype=complex), self.coeffs)

    def __add__(self, other: Poly) -> Poly:
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        return Poly(npoly.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other: Poly) -> Poly:
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, Poly):
            if self.is_zero or other.is_zero:
                return Poly.zero()
            return Poly(npoly.polymul(self.coeffs, other.coeffs))
        if self.is_zero or other == 0:
            return Poly.zero()
        return Poly(self.coeffs * float(other))

    __rmul__ = __mul__

    def shift_up(self, k: int = 1) -> Poly:
        """Multiply by s**k."""
        if self.is_zero:
            return self
        return Poly(np.concatenate([np.zeros(k), self.coeffs]))

    def deriv(self) -> Poly:
        if self.degree < 1:
            return Poly.zero()
        return Poly(npoly.polyder(self.coeffs))

    def roots(self) -> np.ndarray:
        """Roots via the companion matrix; empty for degree <= 0."""
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        return npoly.polyroots(self.coeffs)

    def deflate(self, root: float) -> Poly:
        """Synthetic division by (s - root) for a real root."""
        out = _deflate_coeffs(self.coeffs.astype(complex), root)
        scale = np.max(np.abs(out)) or 1.0
        if np.max(np.abs(out.imag)) > 1e-7 * scale:
            raise ValueError("deflation by a complex root leaves complex "
                             "coefficients; deflate the conjugate pair")
        return Poly(out.real)

    def monic_pair(self) -> tuple[float, Poly]:
        """Return (leading coefficient, monic polynomial)."""
        if self.is_zero:
            return 0.0, self
        lead = self.coeffs[-1]
        return lead, Poly(self.coeffs / lead)

    def allclose(self, other: Poly, tol: float = 1e-9) -> bool:
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n)
        b = np.zeros(n)
        a[: self.coeffs.size] = self.coeffs
        b[: other.coeffs.size] = other.coeffs
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1.0)
        return bool(np.max(np.abs(a - b)) <= tol * scale)

    def __repr__(self):
        return f"Poly({self.coeffs.tolist()})"


def _deflate_coeffs(c: np.ndarray, root: complex) -> np.ndarray:
    """Synthetic division of ascending coefficients by (s - root)."""
    n = c.size
    out = np.zeros(n - 1, dtype=complex)
    acc = c[n - 1]
    for k in range(n - 2, -1, -1):
        out[k] = acc
        acc = c[k] + acc * root
    return out


def _match_roots(rn: np.ndarray, rd: np.ndarray, tol: float):
    """Greedily pair numerator/denominator roots closer than tol (relative)."""
    used_n: list[int] = []
    used_d: list[int] = []
    for i, r in enumerate(rn):
        best = -1
        best_dist = np.inf
        for j in range(rd.size):
            if j in used_d:
                continue
            d = abs(r - rd[j])
            if d < best_dist:
                best_dist = d
                best = j
        if best >= 0 and best_dist <= tol * max(1.0, abs(r), abs(rd[best])):
            used_n.append(i)
            used_d.append(best)
    keep_n = np.array([r for i, r in enumerate(rn) if i not in used_n])
    keep_d = np.array([r for j, r in enumerate(rd) if j not in used_d])
    return keep_n, keep_d, len(used_n)


@dataclass(frozen=True)
class RatFunc:
    """Rational function num/den, reduced, with monic denominator."""

    num: Poly
    den: Poly

    def __init__(self, num, den, reduce: bool = True, tol: float = DEFAULT_CLUSTER_TOL):
        num = num if isinstance(num, Poly) else Poly(num)
        den = den if isinstance(den, Poly) else Poly(den)
        if den.is_zero:
            raise ValueError("denominator is the zero polynomial")
        if num.is_zero:
            object.__setattr__(self, "num", Poly.zero())
            object.__setattr__(self, "den", Poly.one())
            return
        if reduce and num.degree >= 1 and den.degree >= 1:
            num, den = _reduce_pair(num, den, tol)
        dlead, den = den.monic_pair()
        num = num * (1.0 / dlead)
        # drop float dust in the coefficients relative to each poly's scale
        num = Poly(_trim(num.coeffs, _TRIM_REL))
        den = Poly(_trim(den.coeffs, _TRIM_REL))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def constant(cls, value: float) -> RatFunc:
        return cls([float(value)], [1.0])

    @classmethod
    def zero(cls) -> RatFunc:
        return cls([], [1.0])

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __call__(self, s):
        dv = self.den(s)
        return self.num(s) / dv

    def eval_checked(self, s: complex, tol: float = 1e-12) -> complex:
        dv = self.den(s)
        scale = float(np.sum(np.abs(self.den.coeffs) * np.abs(s) ** np.arange(self.den.coeffs.size)))
        if abs(dv) <= tol * max(scale, 1e-300):
            raise PoleEvaluation(f"s={s} is a pole (|den|={abs(dv):.3e})")
        return complex(self.num(s) / dv)

    # rational arithmetic ---------------------------------------------------

    def __add__(self, other: RatFunc) -> RatFunc:
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.den.allclose(other.den, 1e-13):
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: RatFunc) -> RatFunc:
        return self + other.scale(-1.0)

    def __mul__(self, other: RatFunc) -> RatFunc:
        if self.is_zero or other.is_zero:
            return RatFunc.zero()
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: RatFunc) -> RatFunc:
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def scale(self, a: float) -> RatFunc:
        if a == 0.0 or self.is_zero:
            return RatFunc.zero()
        return RatFunc(self.num * a, self.den, reduce=False)

    def allclose(self, other: RatFunc, tol: float = 1e-9) -> bool:
        # cross-multiplied coefficient comparison avoids spurious pole issues
        lhs = self.num * other.den
        rhs = other.num * self.den
        return lhs.allclose(rhs, tol)

    def __repr__(self):
        return f"RatFunc({self.num.coeffs.tolist()}, {self.den.coeffs.tolist()})"


def _reduce_pair(num: Poly, den: Poly, tol: float) -> tuple[Poly, Poly]:
    rn = num.roots()
    rd = den.roots()
    keep_n, keep_d, cancelled = _match_roots(rn, rd, tol)
    if cancelled == 0:
        return num, den
    nlead = num.coeffs[-1]
    dlead = den.coeffs[-1]
    try:
        new_num = Poly.from_roots(keep_n, nlead)
        new_den = Poly.from_roots(keep_d, dlead)
    except ValueError:
        return num, den
    # verify the reduction did not change the function
    smpl = np.array([0.37 + 0.61j, -1.21 + 0.83j, 2.04 - 0.35j, -0.52 - 1.77j])
    scale = max(1.0, float(np.max(np.abs(rd)))) if rd.size else 1.0
    smpl = smpl * scale
    old = num(smpl) / den(smpl)
    new = new_num(smpl) / new_den(smpl)
    ref = np.max(np.abs(old)) or 1.0
    if np.max(np.abs(old - new)) > 1e-6 * ref:
        return num, den
    return new_num, new_den


@dataclass(frozen=True)
class PoleData:
    """One pole of a rational matrix: location, order and matrix residue.

    The residue is the limit of (s - location)**order * M(s), i.e. the
    leading Laurent coefficient; entries where the pole has lower order
    contribute zero.
    """

    location: complex
    order: int
    residue: np.ndarray


@dataclass(frozen=True)
class RatMatrix:
    """Rectangular matrix of rational functions."""

    entries: tuple  # tuple of tuples of RatFunc, row-major
    rows: int = field(init=False)
    cols: int = field(init=False)

    def __init__(self, entries):
        ent = tuple(tuple(e for e in row) for row in entries)
        if not ent or not ent[0]:
            raise ValueError("RatMatrix must have at least one entry")
        ncols = len(ent[0])
        if any(len(row) != ncols for row in ent):
            raise ValueError("ragged rows")
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "rows", len(ent))
        object.__setattr__(self, "cols", ncols)

    # construction helpers --------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        one = RatFunc.constant(1.0)
        zero = RatFunc.zero()
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RatMatrix:
        z = RatFunc.zero()
        return cls([[z for _ in range(cols)] for _ in range(rows)])

    @classmethod
    def from_constant(cls, mat) -> RatMatrix:
        mat = np.asarray(mat, dtype=float)
        return cls([[RatFunc.constant(mat[i, j]) for j in range(mat.shape[1])]
                    for i in range(mat.shape[0])])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij) -> RatFunc:
        i, j = ij
        return self.entries[i][j]

    # algebra ---------------------------------------------------------------

    def transpose(self) -> RatMatrix:
        return RatMatrix([[self.entries[i][j] for i in range(self.rows)]
                          for j in range(self.cols)])

    def __add__(self, other: RatMatrix) -> RatMatrix:
        return RatMatrix([[self.entries[i][j] + other.entries[i][j]
                           for j in range(self.cols)] for i in range(self.rows)])

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        return RatMatrix([[self.entries[i][j] - other.entries[i][j]
                           for j in range(self.cols)] for i in range(self.rows)])

    def scale(self, a: float) -> RatMatrix:
        return RatMatrix([[e.scale(a) for e in row] for row in self.entries])

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = RatFunc.zero()
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return RatMatrix(out)

    def congruence(self, p: np.ndarray) -> RatMatrix:
        """Return P M P^T for a real constant matrix P (rows x self.rows)."""
        p = np.asarray(p, dtype=float)
        out = []
        for a in range(p.shape[0]):
            row = []
            for b in range(p.shape[0]):
                acc = RatFunc.zero()
                for i in range(self.rows):
                    if p[a, i] == 0.0:
                        continue
                    for j in range(self.cols):
                        if p[b, j] == 0.0:
                            continue
                        acc = acc + self.entries[i][j].scale(p[a, i] * p[b, j])
                row.append(acc)
            out.append(row)
        return RatMatrix(out)

    def inverse(self) -> RatMatrix:
        """Adjugate/determinant inverse over a common denominator.

        Intended for desk-scale matrices (n <= 6); degree growth makes the
        cofactor route unreliable beyond that.
        """
        if not self.is_square:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        if n > 6:
            raise ValueError("rational inverse limited to matrices up to 6x6")
        den, nummat = self._common_denominator()
        det = _poly_det([[nummat[i][j] for j in range(n)] for i in range(n)])
        if det.is_zero:
            raise ZeroDivisionError("rational matrix is singular")
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [[nummat[r][c] for c in range(n) if c != j]
                         for r in range(n) if r != i]
                cof = _poly_det(minor) if n > 1 else Poly.one()
                sign = -1.0 if (i + j) % 2 else 1.0
                # adj(N)_ji = cofactor_ij; M^-1 = den * adj(N) / det(N)
                out[j][i] = RatFunc(cof * den * sign, det)
        return RatMatrix(out)

    def _common_denominator(self) -> tuple[Poly, list[list[Poly]]]:
        """Least common denominator by root-multiset union."""
        all_roots: list[complex] = []
        entry_roots = [[self.entries[i][j].den.roots() for j in range(self.cols)]
                       for i in range(self.rows)]
        for i in range(self.rows):
            for j in range(self.cols):
                for r in entry_roots[i][j]:
                    # extend the union multiset
                    count_here = sum(
                        1 for rr in entry_roots[i][j]
                        if abs(rr - r) <= DEFAULT_CLUSTER_TOL * max(1.0, abs(r)))
                    count_all = sum(
                        1 for rr in all_roots
                        if abs(rr - r) <= DEFAULT_CLUSTER_TOL * max(1.0, abs(r)))
                    if count_all < count_here:
                        all_roots.extend([r] * (count_here - count_all))
        den = Poly.from_roots(np.array(all_roots)) if all_roots else Poly.one()
        nummat = []
        for i in range(self.rows):
            row = []
            for j in range(self.cols):
                e = self.entries[i][j]
                missing = list(all_roots)
                for r in entry_roots[i][j]:
                    k = min(range(len(missing)), key=lambda m: abs(missing[m] - r),
                            default=-1)
                    if k >= 0 and abs(missing[k] - r) <= DEFAULT_CLUSTER_TOL * max(1.0, abs(r)):
                        missing.pop(k)
                row.append(e.num * Poly.from_roots(np.array(missing)))
            nummat.append(row)
        return den, nummat

    # evaluation ------------------------------------------------------------

    def eval(self, s: complex, tol: float = 1e-12) -> np.ndarray:
        """Evaluate entrywise at s; raises PoleEvaluation at (near-)poles."""
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for i in range(self.rows):
            for j in range(self.cols):
                out[i, j] = self.entries[i][j].eval_checked(s, tol)
        return out

    def __call__(self, s: complex) -> np.ndarray:
        return self.eval(s)

    # pole analysis ---------------------------------------------------------

    def poles(self, tol: float = DEFAULT_CLUSTER_TOL) -> list[PoleData]:
        """All poles with orders and matrix residues, clustered within tol.

        Residues are computed by deflation: the entry numerator over the
        denominator with the pole roots divided out, evaluated at the pole.
        """
        records = []  # (root, order, i, j)
        for i in range(self.rows):
            for j in range(self.cols):
                rts = self.entries[i][j].den.roots()
                used = np.zeros(rts.size, dtype=bool)
                for k, r in enumerate(rts):
                    if used[k]:
                        continue
                    group = [k]
                    for m in range(k + 1, rts.size):
                        if not used[m] and abs(rts[m] - r) <= tol * max(1.0, abs(r)):
                            group.append(m)
                    for m in group:
                        used[m] = True
                    center = np.mean(rts[group])
                    if len(group) > 1:
                        # a true order-m root clusters at the eps^(1/m) level;
                        # wider spread means two resolvable poles fell in one
                        # tolerance ball
                        diam = float(np.max(np.abs(rts[group] - center)))
                        if diam > 1e-5 * max(1.0, abs(center)):
                            raise ClusterAmbiguity(
                                f"entry ({i},{j}): {len(group)} resolvable roots "
                                f"near {center} inside one tolerance ball")
                    records.append((center, len(group), i, j))
        clusters: list[list] = []
        for rec in records:
            placed = False
            for cl in clusters:
                if abs(cl[0][0] - rec[0]) <= tol * max(1.0, abs(rec[0])):
                    cl.append(rec)
                    placed = True
                    break
            if not placed:
                clusters.append([rec])
        out = []
        for cl in clusters:
            locs = np.array([r[0] for r in cl])
            center = np.mean(locs)
            diam = float(np.max(np.abs(locs - center))) if locs.size > 1 else 0.0
            if diam > 2.0 * tol * max(1.0, abs(center)):
                raise ClusterAmbiguity(
                    f"pole cluster near {center} has diameter {diam:.3e}")
            order = max(r[1] for r in cl)
            residue = np.zeros((self.rows, self.cols), dtype=complex)
            for loc, m, i, j in cl:
                if m != order:
                    continue  # lower-order entry: residue limit is zero
                e = self.entries[i][j]
                dc = e.den.coeffs.astype(complex)
                for _ in range(m):
                    rts = npoly.polyroots(dc)
                    k = int(np.argmin(np.abs(rts - center)))
                    dc = _deflate_coeffs(dc, rts[k])
                residue[i, j] = e.num(center) / npoly.polyval(center, dc)
            # snap near-real/near-imaginary cluster centers
            if abs(center.imag) <= tol * max(1.0, abs(center)):
                center = complex(center.real, 0.0)
            if abs(center.real) <= tol * max(1.0, abs(center)):
                center = complex(0.0, center.imag)
            out.append(PoleData(complex(center), order, residue))
        out.sort(key=lambda p: (abs(p.location), p.location.imag))
        return out

    # serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [
                {"num": self.entries[i][j].num.coeffs.tolist(),
                 "den": self.entries[i][j].den.coeffs.tolist()}
                for i in range(self.rows) for j in range(self.cols)
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> RatMatrix:
        rows, cols = int(d["rows"]), int(d["cols"])
        ent = d["entries"]
        if len(ent) != rows * cols:
            raise ValueError("entry count does not match rows*cols")
        mat = [[RatFunc(ent[i * cols + j]["num"], ent[i * cols + j]["den"])
                for j in range(cols)] for i in range(rows)]
        return cls(mat)

    @classmethod
    def from_json(cls, text: str) -> RatMatrix:
        return cls.from_dict(json.loads(text))


def _poly_det(mat: list[list[Poly]]) -> Poly:
    """Determinant of a small polynomial matrix by cofactor expansion."""
    n = len(mat)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    acc = Poly.zero()
    for j in range(n):
        if mat[0][j].is_zero:
            continue
        minor = [[mat[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = mat[0][j] * _poly_det(minor)
        acc = acc + (term if j % 2 == 0 else term * -1.0)
    return acc


def hermitian_part(f: np.ndarray) -> np.ndarray:
    """(F + F^dagger)/2 of a square complex matrix."""
    f = np.asarray(f, dtype=complex)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ValueError("hermitian_part needs a square matrix")
    return 0.5 * (f + f.conj().T)


@dataclass(frozen=True)
class LosslessReport:
    """Diagnostic result of the lossless positive-real check."""

    ok: bool
    failures: tuple
    pole_locations: tuple
    min_residue_eigenvalue: float

    def __bool__(self) -> bool:
        return self.ok


def is_lossless_positive_real(z: RatMatrix, tol: float = 1e-8) -> LosslessReport:
    """Check that Z(s) is a lossless positive-real matrix.

    Conditions: every pole is simple and lies on the imaginary axis, the
    residue matrix at each pole is hermitian PSD (the linear-growth matrix is
    treated as the residue at infinity), and Z(-s) = -Z(s)^T identically.
    The report lists every violated condition instead of raising.
    """
    if not z.is_square:
        raise ValueError("losslessness is defined for square matrices")
    failures: list[str] = []
    min_eig = np.inf

    try:
        pole_list = z.poles(tol)
    except ClusterAmbiguity as exc:
        return LosslessReport(False, (f"pole clustering failed: {exc}",), (), np.nan)

    for p in pole_list:
        if p.order != 1:
            failures.append(f"pole {p.location} has order {p.order}")
        if abs(p.location.real) > tol * max(1.0, abs(p.location)):
            failures.append(f"pole {p.location} off the imaginary axis")
            continue
        res = p.residue
        herm_dev = np.max(np.abs(res - res.conj().T))
        scale = max(np.max(np.abs(res)), 1e-300)
        if herm_dev > 1e-7 * scale:
            failures.append(f"residue at {p.location} is not hermitian")
        else:
            eigs = np.linalg.eigvalsh(hermitian_part(res))
            min_eig = min(min_eig, float(eigs.min() / scale))
            if eigs.min() < -1e-8 * scale:
                failures.append(
                    f"residue at {p.location} has negative eigenvalue {eigs.min():.3e}")

    # linear growth at infinity acts as the residue of the pole at infinity
    ainf = np.zeros((z.rows, z.cols))
    for i in range(z.rows):
        for j in range(z.cols):
            e = z.entries[i][j]
            dn = e.num.degree - e.den.degree
            if dn > 1:
                failures.append(f"entry ({i},{j}) grows faster than s")
            elif dn == 1:
                ainf[i, j] = e.num.coeffs[-1] / e.den.coeffs[-1]
    if np.max(np.abs(ainf)) > 0:
        if np.max(np.abs(ainf - ainf.T)) > 1e-8 * np.max(np.abs(ainf)):
            failures.append("linear-growth matrix is not symmetric")
        elif np.linalg.eigvalsh(ainf).min() < -1e-10 * np.max(np.abs(ainf)):
            failures.append("linear-growth matrix is not PSD")

    # odd symmetry Z(-s) = -Z(s)^T: coefficient comparison after
    # cross-multiplication, plus a sampled check as a safety net
    for i in range(z.rows):
        for j in range(z.cols):
            a = z.entries[i][j]
            b = z.entries[j][i]
            a_neg_num = Poly(a.num.coeffs * ((-1.0) ** np.arange(a.num.coeffs.size))) \
                if not a.num.is_zero else Poly.zero()
            a_neg_den = Poly(a.den.coeffs * ((-1.0) ** np.arange(a.den.coeffs.size)))
            lhs = a_neg_num * b.den
            rhs = b.num * a_neg_den
            if not lhs.allclose(rhs * -1.0, 1e-8):
                failures.append(f"Z(-s) != -Z(s)^T at entry ({i},{j})")
                break
        else:
            continue
        break
    if not failures:
        rng = np.random.default_rng(7)
        for _ in range(6):
            w = float(rng.uniform(0.1, 5.0))
            try:
                zi = z.eval(1j * w)
            except PoleEvaluation:
                continue
            h = hermitian_part(zi)
            if np.max(np.abs(h)) > 1e-7 * max(np.max(np.abs(zi)), 1.0):
                failures.append(f"hermitian part nonzero at s=i*{w:.3f}")
                break

    return LosslessReport(
        ok=not failures,
        failures=tuple(failures),
        pole_locations=tuple(p.location for p in pole_list),
        min_residue_eigenvalue=float(min_eig if np.isfinite(min_eig) else 0.0),
    )


def require_lossless_positive_real(z: RatMatrix, tol: float = 1e-8) -> LosslessReport:
    report = is_lossless_positive_real(z, tol)
    if not report.ok:
        raise NotLosslessPR("; ".join(report.failures))
    return report
