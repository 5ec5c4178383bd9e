"""Tests for rational matrix algebra: evaluation, poles, residues, losslessness."""

import numpy as np
import pytest

from qfluct.errors import ClusterAmbiguity, PoleEvaluation
from qfluct.ratmat import (
    Poly,
    RatFunc,
    RatMatrix,
    hermitian_part,
    is_lossless_positive_real,
)

SIGMA_Y = np.array([[0, -1j], [1j, 0]])


def gyrator_impedance(c=1.0, r=1.0):
    """Two-port [[s/C, -R Om^2], [R Om^2, s/C]] / (s^2 + Om^2), Om = 1/(RC)."""
    om = 1.0 / (r * c)
    den = [om * om, 0.0, 1.0]
    diag = RatFunc([0.0, 1.0 / c], den)
    off = RatFunc([r * om * om], den)
    return RatMatrix([[diag, off.scale(-1.0)], [off, diag]])


def horner(coeffs, s):
    """Independent Horner-scheme oracle, highest coefficient first."""
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


def contour_residue(rf: RatFunc, center: complex, radius: float = 1e-2,
                    n: int = 256) -> complex:
    """Residue by a small-circle contour integral (trapezoid on the circle)."""
    theta = 2 * np.pi * np.arange(n) / n
    z = center + radius * np.exp(1j * theta)
    vals = rf(z) * (z - center)
    return complex(np.mean(vals))


class TestPoly:
    def test_zero_is_canonical(self):
        assert Poly([0.0, 0.0]).is_zero
        assert Poly([]).degree == -1

    def test_eval_matches_horner(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            coeffs = rng.normal(size=rng.integers(1, 7))
            s = complex(rng.normal(), rng.normal())
            assert abs(Poly(coeffs)(s) - horner(coeffs, s)) < 1e-12 * (1 + abs(horner(coeffs, s)))

    def test_roots_roundtrip(self):
        p = Poly.from_roots([1.0, -2.0, 3.0], lead=2.5)
        assert np.allclose(sorted(p.roots().real), [-2.0, 1.0, 3.0])

    def test_deflate_real_root(self):
        p = Poly.from_roots([1.0, 2.0])
        q = p.deflate(2.0)
        assert q.allclose(Poly.from_roots([1.0]))


class TestRatFunc:
    def test_reduction_cancels_common_roots(self):
        # s(s-1)/( s(s+2) ) -> (s-1)/(s+2)
        num = Poly.from_roots([0.0, 1.0])
        den = Poly.from_roots([0.0, -2.0])
        rf = RatFunc(num, den)
        assert rf.num.degree == 1 and rf.den.degree == 1
        assert abs(rf(3.0) - (3.0 - 1.0) / (3.0 + 2.0)) < 1e-12

    def test_den_monic(self):
        rf = RatFunc([1.0], [2.0, 4.0])
        assert abs(rf.den.coeffs[-1] - 1.0) < 1e-15

    def test_random_eval_against_horner(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            num = rng.normal(size=4)   # degree 3
            den = np.append(rng.normal(size=3), 1.0)
            rf = RatFunc(num, den, reduce=False)
            s = 1 + 1j
            expect = horner(num, s) / horner(den, s)
            assert abs(rf(s) - expect) <= 1e-12 * max(1.0, abs(expect))

    def test_arithmetic(self):
        a = RatFunc([1.0], [1.0, 1.0])      # 1/(1+s)
        b = RatFunc([0.0, 1.0], [2.0, 1.0])  # s/(2+s)
        s = 0.7 + 0.3j
        assert abs((a + b)(s) - (a(s) + b(s))) < 1e-12
        assert abs((a * b)(s) - a(s) * b(s)) < 1e-12
        assert abs((a / b)(s) - a(s) / b(s)) < 1e-12

    def test_pole_evaluation_raises(self):
        rf = RatFunc([1.0], [1.0, 0.0, 1.0])  # 1/(1+s^2)
        with pytest.raises(PoleEvaluation):
            rf.eval_checked(1j)


class TestEval:
    def test_gyrator_impedance_at_two(self):
        z = gyrator_impedance(1.0, 1.0)
        got = z.eval(2.0)
        assert np.allclose(got, np.array([[2, -1], [1, 2]]) / 5.0, atol=1e-14)

    def test_identity_matrix(self):
        eye = RatMatrix.identity(3)
        for s in (0.5, 2j, -1.3 + 0.7j):
            assert np.allclose(eye.eval(s), np.eye(3))

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(5)
        num = rng.normal(size=3)
        den = np.append(rng.normal(size=2), 1.0)
        m = RatMatrix([[RatFunc(num, den, reduce=False)]])
        s = 0.9 + 1.4j
        assert abs(m.eval(np.conj(s))[0, 0] - np.conj(m.eval(s)[0, 0])) < 1e-12


class TestPoles:
    def test_gyrator_poles_simple_imaginary(self):
        z = gyrator_impedance(1.0, 1.0)
        poles = z.poles()
        locs = sorted(p.location.imag for p in poles)
        assert np.allclose(locs, [-1.0, 1.0], atol=1e-10)
        assert all(p.order == 1 for p in poles)

    def test_constant_matrix_has_no_poles(self):
        m = RatMatrix.from_constant(np.eye(2))
        assert m.poles() == []

    def test_scalar_residue_analytic(self):
        # (s/C)/(s^2 + Om^2), C=1, Om=2: residue at 2i is s/(s+2i)|_{2i} = 1/2
        rf = RatFunc([0.0, 1.0], [4.0, 0.0, 1.0])
        m = RatMatrix([[rf]])
        poles = m.poles()
        at = {round(p.location.imag, 9): p for p in poles}
        assert abs(at[2.0].residue[0, 0] - 0.5) < 1e-12

    def test_residue_against_contour_integral(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            root_pairs = rng.uniform(0.5, 3.0, size=2)
            den = Poly.from_roots(np.concatenate(
                [1j * root_pairs, -1j * root_pairs]))
            num = Poly(rng.normal(size=3))
            rf = RatFunc(num, den, reduce=False)
            m = RatMatrix([[rf]])
            for p in m.poles():
                oracle = contour_residue(rf, p.location)
                assert abs(p.residue[0, 0] - oracle) < 1e-8 * max(1.0, abs(oracle))

    def test_reconstruction_from_residues(self):
        z = gyrator_impedance(2.0, 0.5)
        poles = z.poles()
        rng = np.random.default_rng(13)
        for _ in range(20):
            s = complex(rng.normal(), rng.normal()) * 2.0
            total = np.zeros((2, 2), dtype=complex)
            for p in poles:
                total += p.residue / (s - p.location)
            assert np.max(np.abs(total - z.eval(s))) < 1e-9

    def test_cluster_ambiguity(self):
        # poles at i and i(1 + 3e-3) clash at a clustering tol of 1e-2
        den = Poly.from_roots([1j, -1j, 1.003j, -1.003j])
        m = RatMatrix([[RatFunc(Poly([1.0]), den, reduce=False)]])
        with pytest.raises(ClusterAmbiguity):
            m.poles(tol=1e-2)

    def test_pole_at_origin(self):
        m = RatMatrix([[RatFunc([1.0], [0.0, 2.0])]])  # 1/(2s) -> 0.5/s
        poles = m.poles()
        assert len(poles) == 1
        assert poles[0].location == 0
        assert abs(poles[0].residue[0, 0] - 0.5) < 1e-14


class TestHermitianPart:
    def test_antisymmetric_imaginary_is_hermitian(self):
        # i * (real antisymmetric) is hermitian and must pass through unchanged
        f = 2.5j * np.array([[0.0, -1.0], [1.0, 0.0]])
        assert np.allclose(hermitian_part(f), f)

    def test_real_symmetric_unchanged(self):
        f = np.array([[1.0, 2.0], [2.0, 5.0]])
        assert np.allclose(hermitian_part(f), f)

    def test_explicit_example(self):
        f = np.array([[1.0, 2.0 + 1.0j], [0.0, 3.0]])
        expect = np.array([[1.0, 1.0 + 0.5j], [1.0 - 0.5j, 3.0]])
        assert np.allclose(hermitian_part(f), expect)

    def test_idempotent_and_linear(self):
        rng = np.random.default_rng(17)
        f = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        hp = hermitian_part
        assert np.allclose(hp(hp(f)), hp(f))
        assert np.allclose(hp(2.0 * f + 3.0 * g), 2.0 * hp(f) + 3.0 * hp(g))


class TestLossless:
    def test_gyrator_impedance_is_lossless_pr(self):
        report = is_lossless_positive_real(gyrator_impedance())
        assert report.ok, report.failures

    def test_pure_resistor_is_not(self):
        z = RatMatrix.from_constant([[1.0]])
        report = is_lossless_positive_real(z)
        assert not report.ok

    def test_lossy_rc_is_not(self):
        # 1/(1 + sRC): stable but dissipative
        z = RatMatrix([[RatFunc([1.0], [1.0, 0.47])]])
        assert not is_lossless_positive_real(z).ok

    def test_negated_residue_is_not(self):
        z = RatMatrix([[RatFunc([0.0, -1.0], [1.0, 0.0, 1.0])]])  # -s/(1+s^2)
        report = is_lossless_positive_real(z)
        assert not report.ok


class TestSerialization:
    def test_json_roundtrip(self):
        z = gyrator_impedance(0.7, 1.9)
        z2 = RatMatrix.from_json(z.to_json())
        rng = np.random.default_rng(23)
        for _ in range(5):
            s = complex(rng.normal(), rng.normal())
            assert np.allclose(z.eval(s), z2.eval(s), atol=1e-12)

    def test_schema_keys(self):
        d = gyrator_impedance().to_dict()
        assert set(d) == {"rows", "cols", "entries"}
        assert set(d["entries"][0]) == {"num", "den"}
        assert len(d["entries"]) == d["rows"] * d["cols"]


class TestInverse:
    def test_inverse_of_gyrator_impedance(self):
        z = gyrator_impedance(1.3, 0.8)
        y = z.inverse()
        for s in (0.5 + 0.2j, 2.0, -0.7 + 1.1j):
            assert np.allclose(y.eval(s) @ z.eval(s), np.eye(2), atol=1e-9)

    def test_matmul_matches_pointwise(self):
        a = gyrator_impedance(1.0, 1.0)
        b = gyrator_impedance(2.0, 0.5)
        prod = a @ b
        s = 0.3 + 0.9j
        assert np.allclose(prod.eval(s), a.eval(s) @ b.eval(s), atol=1e-10)
