"""Netlist parsing, Lagrangian assembly, Legendre transform and port responses."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from qfluct import network as nw
from qfluct.errors import (
    ModeUnsupportedElement,
    NetlistSemanticError,
    NetlistSyntaxError,
    SingularKinetic,
)

NRHO = """
# two capacitors + gyrator, the fundamental nonreciprocal two-port
C c1 1 0 1.0
C c2 2 0 1.0
G g1 1 0 2 0 1.0
port P1 1
port P2 2
"""

LC = "C c1 1 0 1.0\nL l1 1 0 1.0\nport P1 1\n"


class TestParser:
    def test_two_port_example(self):
        net = nw.parse_netlist(NRHO)
        assert len(net.elements) == 3
        assert [p.name for p in net.ports] == ["P1", "P2"]
        assert net.nodes == ("1", "2")

    def test_empty_file(self):
        net = nw.parse_netlist("")
        assert net.elements == () and net.ports == ()

    def test_nonpositive_value_rejected(self):
        with pytest.raises(NetlistSemanticError):
            nw.parse_netlist("C c1 1 0 -1.0")

    def test_syntax_error_carries_location(self):
        with pytest.raises(NetlistSyntaxError) as err:
            nw.parse_netlist("C c1 1 0\n")
        assert err.value.line == 1

    def test_unknown_element(self):
        with pytest.raises(NetlistSyntaxError):
            nw.parse_netlist("Q q1 1 0 1.0")

    def test_duplicate_name(self):
        with pytest.raises(NetlistSemanticError):
            nw.parse_netlist("C a 1 0 1.0\nC a 2 0 1.0")

    def test_port_unknown_node(self):
        with pytest.raises(NetlistSemanticError):
            nw.parse_netlist("C c1 1 0 1.0\nport P1 7")

    def test_comments_and_rref(self):
        net = nw.parse_netlist("C c1 1 0 1.0  # shunt cap\nport P1 1 Rref=50\n")
        assert net.ports[0].rref == 50.0

    def test_resistor_siemens_flag(self):
        net = nw.parse_netlist("R r1 1 0 0.05 S\nC c1 1 0 1\nport P1 1")
        r = [e for e in net.elements if e.kind == "R"][0]
        assert r.siemens and r.value == 0.05


class TestLagrangian:
    def test_nrho_matrices(self):
        lag = nw.build_lagrangian(nw.parse_netlist(NRHO))
        assert np.allclose(lag.cmat, np.eye(2))
        assert np.allclose(lag.mmat, 0.0)
        # +(1/2R)(dPhi_1 Phi_2 - dPhi_2 Phi_1): G[0,1] = +1/R
        assert np.allclose(lag.gmat, [[0.0, 1.0], [-1.0, 0.0]])

    def test_lc(self):
        lag = nw.build_lagrangian(nw.parse_netlist(LC))
        assert np.allclose(lag.cmat, [[1.0]])
        assert np.allclose(lag.mmat, [[1.0]])
        assert np.allclose(lag.gmat, 0.0)

    def test_single_capacitor(self):
        lag = nw.build_lagrangian(nw.parse_netlist("C c1 1 0 2.0\nport P 1"))
        assert np.allclose(lag.cmat, [[2.0]])
        assert np.allclose(lag.mmat, 0.0)

    def test_resistor_rejected_in_lossless_build(self):
        with pytest.raises(ModeUnsupportedElement):
            nw.build_lagrangian(nw.parse_netlist("R r1 1 0 1.0\nport P 1"))

    def test_charge_mode_dualizes(self):
        text = "L l1 1 0 4.0\nG g1 1 0 2 0 2.0\nL l2 2 0 4.0\nport P1 1\nport P2 2"
        lag = nw.build_lagrangian(nw.parse_netlist(text),
                                  nw.AnalysisMode.LOOP_CHARGE)
        assert np.allclose(lag.cmat, 4.0 * np.eye(2))
        assert np.allclose(lag.gmat, [[0.0, 2.0], [-2.0, 0.0]])


class TestLegendre:
    def test_nrho_hamiltonian(self):
        # H = (Pi1 - Phi2/2)^2/2 + (Pi2 + Phi1/2)^2/2 in (Phi1,Pi1,Phi2,Pi2)
        system = nw.legendre(nw.build_lagrangian(nw.parse_netlist(NRHO)), hbar=1.0)
        expect = np.array([
            [0.25, 0.0, 0.0, 0.5],
            [0.0, 1.0, -0.5, 0.0],
            [0.0, -0.5, 0.25, 0.0],
            [0.5, 0.0, 0.0, 1.0],
        ])
        assert np.allclose(system.h, expect)

    def test_lc_hamiltonian(self):
        system = nw.legendre(nw.build_lagrangian(nw.parse_netlist(LC)), hbar=1.0)
        assert np.allclose(system.h, np.eye(2))

    def test_free_particle_h_built_but_degenerate(self):
        # a single capacitor gives H = Pi^2/2C with a zero flux block;
        # flagged downstream by the normal form, not here
        system = nw.legendre(nw.build_lagrangian(
            nw.parse_netlist("C c1 1 0 1.0\nport P 1")), hbar=1.0)
        assert np.allclose(system.h, np.diag([0.0, 1.0]))

    def test_singular_kinetic_raises(self):
        with pytest.raises(SingularKinetic):
            nw.legendre(nw.build_lagrangian(nw.parse_netlist(
                "L l1 1 0 1.0\nport P 1")))

    def test_equations_of_motion_match_lagrangian(self):
        # xi' = J h xi must reproduce C q'' + G q' + M q = 0
        rng = np.random.default_rng(2)
        net = nw.parse_netlist(
            "C c1 1 0 1.3\nC c2 2 0 0.8\nC c12 1 2 0.2\nL l1 1 0 0.9\n"
            "G g1 1 0 2 0 1.7\nport P1 1\nport P2 2")
        lag = nw.build_lagrangian(net)
        system = nw.legendre(lag, hbar=1.0)
        n = lag.n
        q0 = rng.normal(size=n)
        v0 = rng.normal(size=n)

        cinv = np.linalg.inv(lag.cmat)

        def second_order(t, y):
            q, v = y[:n], y[n:]
            a = -cinv @ (lag.gmat @ v + lag.mmat @ q)
            return np.concatenate([v, a])

        # initial momenta p = C v + G q / 2
        p0 = lag.cmat @ v0 + 0.5 * lag.gmat @ q0
        xi0 = np.zeros(2 * n)
        xi0[0::2] = q0
        xi0[1::2] = p0

        a_mat = system.j @ system.h

        def first_order(t, xi):
            return a_mat @ xi

        t_end = 1.0
        sol2 = solve_ivp(second_order, (0, t_end), np.concatenate([q0, v0]),
                         rtol=1e-11, atol=1e-12, dense_output=True)
        sol1 = solve_ivp(first_order, (0, t_end), xi0,
                         rtol=1e-11, atol=1e-12, dense_output=True)
        ts = np.linspace(0, t_end, 7)
        q_second = sol2.sol(ts)[:n]
        q_first = sol1.sol(ts)[0::2]
        assert np.max(np.abs(q_second - q_first)) < 1e-8


class TestTransformer:
    def test_ratio_squares_port_response(self):
        # LC seen through a 1:n transformer scales Z by n^2
        base = nw.parse_netlist(LC)
        z_base = nw.port_impedance(nw.legendre(nw.build_lagrangian(base), hbar=1.0))
        n_ratio = 3.0
        through = nw.parse_netlist(
            "C c1 2 0 1.0\nL l1 2 0 1.0\nT t1 1 0 2 0 {}\nport P1 1".format(1.0 / n_ratio))
        z_thru = nw.port_impedance(nw.legendre(nw.build_lagrangian(through), hbar=1.0))
        for s in (0.4 + 0.3j, 2.2, 1.7j + 0.1):
            assert np.allclose(z_thru.eval(s), z_base.eval(s) * n_ratio ** 2,
                               rtol=1e-9)


class TestPortResponses:
    def test_nrho_impedance_matches_formula(self):
        system = nw.legendre(nw.build_lagrangian(nw.parse_netlist(NRHO)), hbar=1.0)
        z = nw.port_impedance(system)
        for s in (2.0, 0.3 + 0.8j, -1.1 + 0.4j):
            om = 1.0
            expect = np.array([[s, -om], [om, s]]) / (s * s + om * om)
            assert np.allclose(z.eval(s), expect, atol=1e-10)

    def test_capacitor_impedance(self):
        system = nw.legendre(nw.build_lagrangian(
            nw.parse_netlist("C c1 1 0 2.0\nport P 1")), hbar=1.0)
        z = nw.port_impedance(system)
        s = 1.7 + 0.2j
        assert abs(z.eval(s)[0, 0] - 1.0 / (2.0 * s)) < 1e-12

    def test_charge_mode_admittance_dual(self):
        # series-inductor dual of the gyrator two-port: Y = [[sL', ...]]-form
        text = "L l1 1 0 1.0\nG g1 1 0 2 0 1.0\nL l2 2 0 1.0\nport P1 1\nport P2 2"
        system = nw.legendre(nw.build_lagrangian(
            nw.parse_netlist(text), nw.AnalysisMode.LOOP_CHARGE), hbar=1.0)
        y = nw.port_admittance(system)
        om = 1.0  # g_c/L = 1
        for s in (0.6 + 0.4j, 2.5):
            expect = np.array([[s, -om], [om, s]]) / (s * s + om * om)
            assert np.allclose(y.eval(s), expect, atol=1e-10)

    def test_mna_matches_w_route_for_lossless(self):
        net = nw.parse_netlist(NRHO)
        z_w = nw.port_impedance(nw.legendre(nw.build_lagrangian(net), hbar=1.0))
        z_mna = nw.port_impedance_mna(net)
        for s in (0.8 + 0.1j, 3.0):
            assert np.allclose(z_w.eval(s), z_mna.eval(s), atol=1e-10)

    def test_mna_dissipative_two_port(self):
        g = 0.2
        net = nw.parse_netlist(
            f"C c1 1 0 1\nC c2 2 0 1\nG g1 1 0 2 0 1\n"
            f"R r1 1 0 {g} S\nR r2 2 0 {g} S\nport P1 1\nport P2 2")
        z = nw.port_impedance_mna(net)
        for s in (0.5 + 0.3j, 1.4, 2.0j + 0.2):
            num = np.array([[g + s, -1.0], [1.0, g + s]])
            expect = num / ((s + g) ** 2 + 1.0)
            assert np.allclose(z.eval(s), expect, atol=1e-10)


class TestBathExpansion:
    def test_sequences(self):
        seq = nw.expand_resistors(
            nw.parse_netlist("C c 1 0 1\nR r 1 0 1.0 S\nport P 1"), 3, 1.0)
        caps = sorted(e.value for e in seq.elements if e.kind == "C" and
                      e.name.startswith("r__"))
        assert np.allclose(caps, sorted(2.0 / (np.pi * np.array([1, 4, 9]))))
        inds = {e.value for e in seq.elements if e.kind == "L"}
        assert np.allclose(list(inds), np.pi / 2.0)

    def test_mode_frequencies_on_grid(self):
        from qfluct.correlator import bath_discretize
        for g, dom in ((1.0, 1.0), (0.05, 0.01), (3.3, 0.2)):
            seq = bath_discretize(g, dom, 5)
            freqs = [1.0 / np.sqrt(l * c) for c, l in seq]
            assert np.allclose(freqs, dom * np.arange(1, 6), rtol=1e-12)

    def test_internal_resistor_rejected(self):
        net = nw.parse_netlist("C c1 1 0 1\nC c2 2 0 1\nR r 1 2 1.0\nport P 1")
        with pytest.raises(ModeUnsupportedElement):
            nw.expand_resistors(net, 3, 0.1)
