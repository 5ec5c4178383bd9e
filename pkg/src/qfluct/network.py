"""Netlist data model, text parser, and quadratic Lagrangian/Hamiltonian
construction for lumped circuits in node-flux or loop-charge coordinates.

Grammar (line oriented, '#' comments):

    C <name> <node+> <node-> <farads>
    L <name> <node+> <node-> <henries>
    G <name> <nA+> <nA-> <nB+> <nB-> <ohms>          gyrator
    T <name> <nP+> <nP-> <nS+> <nS-> <ratio>         ideal transformer
    R <name> <node+> <node-> <value> [S]             resistor (S = siemens)
    port <name> <node+> [<node->] [Rref=<ohms>]

Ground is the literal node `0`. Port order fixes the row/column order of all
response matrices.

Sign convention: a gyrator `G g A+ A- B+ B- R` adds the Lagrangian coupling
(1/2R) (dPhi_A Phi_B - dPhi_B Phi_A), which reproduces the standard two-port
nonreciprocal impedance [[s/C, -R Omega^2], [R Omega^2, s/C]]/(s^2 + Omega^2)
when loaded with equal capacitors. In loop-charge mode the same orientation
contributes charge gyration R (inductors become kinetic, capacitors
potential).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import symplectic as sp
from .errors import (
    ModeUnsupportedElement,
    NetlistSemanticError,
    NetlistSyntaxError,
    SingularKinetic,
)
from .ratmat import RatFunc, RatMatrix

__all__ = [
    "Element",
    "Port",
    "Netlist",
    "parse_netlist",
    "AnalysisMode",
    "QuadraticLagrangian",
    "HamiltonianSystem",
    "build_lagrangian",
    "legendre",
    "expand_resistors",
    "port_impedance",
    "port_admittance",
]

HBAR_SI = 1.054571817e-34  # J*s


class AnalysisMode(Enum):
    NODE_FLUX = "flux"
    LOOP_CHARGE = "charge"


@dataclass(frozen=True)
class Element:
    kind: str          # 'C', 'L', 'G', 'T', 'R'
    name: str
    nodes: tuple       # 2 nodes for C/L/R, 4 for G/T
    value: float       # farads / henries / ohms / ratio
    siemens: bool = False  # resistor value given as a conductance


@dataclass(frozen=True)
class Port:
    name: str
    node_plus: str
    node_minus: str = "0"
    rref: float | None = None  # None -> homogeneous default


@dataclass(frozen=True)
class Netlist:
    elements: tuple = ()
    ports: tuple = ()
    default_rref: float = 1.0

    @property
    def nodes(self) -> tuple:
        seen: dict[str, None] = {}
        for e in self.elements:
            for n in e.nodes:
                if n != "0":
                    seen.setdefault(n)
        for p in self.ports:
            for n in (p.node_plus, p.node_minus):
                if n != "0":
                    seen.setdefault(n)
        return tuple(seen)

    def port_rrefs(self) -> np.ndarray:
        return np.array([p.rref if p.rref is not None else self.default_rref
                         for p in self.ports])


def parse_netlist(text: str, default_rref: float = 1.0) -> Netlist:
    """Parse netlist text; raises NetlistSyntaxError/NetlistSemanticError."""
    elements: list[Element] = []
    ports: list[Port] = []
    names: set[str] = set()
    declared: set[str] = {"0"}

    def value_of(tok: str, line_no: int, col: int) -> float:
        try:
            return float(tok)
        except ValueError:
            raise NetlistSyntaxError(line_no, col, f"expected a number, got {tok!r}")

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        head = toks[0]
        kind = head.upper()
        if kind in ("C", "L", "R"):
            if len(toks) < 5 or (kind != "R" and len(toks) != 5):
                raise NetlistSyntaxError(line_no, 1, f"{kind} needs: name n+ n- value")
            name, np_, nm = toks[1], toks[2], toks[3]
            val = value_of(toks[4], line_no, 5)
            siemens = False
            if kind == "R":
                if len(toks) == 6 and toks[5].upper() in ("S", "SIEMENS"):
                    siemens = True
                elif len(toks) > 5:
                    raise NetlistSyntaxError(line_no, 6, "unexpected trailing tokens")
            elements.append(Element(kind, name, (np_, nm), val, siemens))
            declared.update((np_, nm))
        elif kind in ("G", "T"):
            if len(toks) != 7:
                raise NetlistSyntaxError(
                    line_no, 1, f"{kind} needs: name nA+ nA- nB+ nB- value")
            name = toks[1]
            nodes = tuple(toks[2:6])
            val = value_of(toks[6], line_no, 7)
            elements.append(Element(kind, name, nodes, val))
            declared.update(nodes)
        elif head == "port":
            if len(toks) < 3:
                raise NetlistSyntaxError(line_no, 1, "port needs: name node+ [node-]")
            name = toks[1]
            rest = toks[2:]
            rref = None
            if rest and rest[-1].startswith("Rref="):
                rref = value_of(rest[-1][5:], line_no, len(toks))
                rest = rest[:-1]
            if not rest or len(rest) > 2:
                raise NetlistSyntaxError(line_no, 1, "port needs: name node+ [node-]")
            node_plus = rest[0]
            node_minus = rest[1] if len(rest) == 2 else "0"
            ports.append(Port(name, node_plus, node_minus, rref))
            names_key = "port:" + name
            if names_key in names:
                raise NetlistSemanticError(f"duplicate port name {name!r}")
            names.add(names_key)
            continue
        else:
            raise NetlistSyntaxError(line_no, 1, f"unknown element kind {head!r}")
        if name in names:
            raise NetlistSemanticError(f"duplicate element name {name!r}")
        names.add(name)

    for e in elements:
        if e.value <= 0:
            raise NetlistSemanticError(
                f"element {e.name!r} has nonpositive value {e.value}")
        if e.kind == "G" and len(set(e.nodes[:2])) + len(set(e.nodes[2:])) < 4:
            if e.nodes[0] == e.nodes[1] or e.nodes[2] == e.nodes[3]:
                raise NetlistSemanticError(
                    f"gyrator {e.name!r} has a collapsed terminal pair")
    net = Netlist(tuple(elements), tuple(ports), default_rref)
    for p in ports:
        for n in (p.node_plus, p.node_minus):
            if n != "0" and n not in declared:
                raise NetlistSemanticError(f"port {p.name!r} references unknown node {n!r}")
    return net


@dataclass(frozen=True)
class QuadraticLagrangian:
    """L = (1/2) dq^T C dq + (1/2) dq^T G q - (1/2) q^T M q.

    C symmetric PSD (kinetic), G antisymmetric (gyration), M symmetric PSD
    (potential). port_rows maps coordinates to the observed port variables.
    """

    cmat: np.ndarray
    gmat: np.ndarray
    mmat: np.ndarray
    coord_labels: tuple
    port_rows: np.ndarray
    port_names: tuple
    mode: AnalysisMode

    @property
    def n(self) -> int:
        return self.cmat.shape[0]


@dataclass(frozen=True)
class HamiltonianSystem:
    """H = (1/2) xi^T h xi on interleaved coordinates (q1, p1, q2, p2, ...).

    port_flux / port_momentum map the phase-space vector to port coordinates
    and their conjugate momenta; hbar carries the action unit.
    """

    h: np.ndarray
    j: np.ndarray
    port_flux: np.ndarray
    port_momentum: np.ndarray
    port_names: tuple
    coord_labels: tuple
    mode: AnalysisMode
    hbar: float = HBAR_SI

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    def with_hbar(self, hbar: float) -> HamiltonianSystem:
        return replace(self, hbar=hbar)


def _pattern(index: dict, plus: str, minus: str, n: int) -> np.ndarray:
    v = np.zeros(n)
    if plus != "0":
        v[index[plus]] += 1.0
    if minus != "0":
        v[index[minus]] -= 1.0
    return v


def build_lagrangian(net: Netlist, mode: AnalysisMode = AnalysisMode.NODE_FLUX
                     ) -> QuadraticLagrangian:
    """Assemble the quadratic Lagrangian of a lossless netlist.

    In node-flux mode capacitors are kinetic and inductors potential; in
    loop-charge mode the netlist graph is read as the dual (loop) graph and
    the roles swap, with gyrators contributing charge gyration R. Resistors
    must be expanded into bath oscillators first. Ideal transformers are
    eliminated by substituting secondary flux = ratio * primary flux.
    """
    nodes = list(net.nodes)
    index = {nm: i for i, nm in enumerate(nodes)}
    n = len(nodes)
    cmat = np.zeros((n, n))
    gmat = np.zeros((n, n))
    mmat = np.zeros((n, n))
    flux = mode is AnalysisMode.NODE_FLUX

    transformers = []
    for e in net.elements:
        if e.kind == "R":
            raise ModeUnsupportedElement(
                f"resistor {e.name!r} in a lossless build; expand with a "
                "discretized bath first (expand_resistors / --bath)")
        if e.kind == "C":
            p = _pattern(index, *e.nodes, n)
            if flux:
                cmat += e.value * np.outer(p, p)
            else:
                mmat += (1.0 / e.value) * np.outer(p, p)
        elif e.kind == "L":
            p = _pattern(index, *e.nodes, n)
            if flux:
                mmat += (1.0 / e.value) * np.outer(p, p)
            else:
                cmat += e.value * np.outer(p, p)
        elif e.kind == "G":
            pa = _pattern(index, e.nodes[0], e.nodes[1], n)
            pb = _pattern(index, e.nodes[2], e.nodes[3], n)
            g = (1.0 / e.value) if flux else e.value
            gmat += g * (np.outer(pa, pb) - np.outer(pb, pa))
        elif e.kind == "T":
            transformers.append(e)

    port_rows = np.array([_pattern(index, p.node_plus, p.node_minus, n)
                          for p in net.ports]).reshape(len(net.ports), n)

    labels = list(nodes)
    if transformers:
        cmat, gmat, mmat, port_rows, labels = _eliminate_transformers(
            transformers, index, cmat, gmat, mmat, port_rows, labels)

    return QuadraticLagrangian(
        cmat=cmat, gmat=gmat, mmat=mmat, coord_labels=tuple(labels),
        port_rows=port_rows, port_names=tuple(p.name for p in net.ports),
        mode=mode)


def _eliminate_transformers(transformers, index, cmat, gmat, mmat, port_rows,
                            labels):
    """Eliminate Phi(s+) - Phi(s-) = ratio * (Phi(p+) - Phi(p-)) constraints.

    Each constraint is written as a row over the current coordinates and
    solved for one pivot coordinate (preferring the secondary node), which is
    then substituted out of all quadratic forms and port rows. e_acc maps the
    original node space to the current reduced space so chained transformers
    stay expressible.
    """
    n0 = cmat.shape[0]
    e_acc = np.eye(n0)  # original coords = e_acc @ current coords

    def node_row(node: str) -> np.ndarray:
        if node == "0":
            return np.zeros(e_acc.shape[1])
        return e_acc[index[node]]

    for e in transformers:
        np_, nm, ns_p, ns_m = e.nodes
        c = node_row(ns_p) - node_row(ns_m) \
            - e.value * (node_row(np_) - node_row(nm))
        scale = np.max(np.abs(c))
        if scale <= 1e-12:
            raise NetlistSemanticError(
                f"transformer {e.name!r} constraint is degenerate or redundant")
        pivot = None
        for cand in (ns_p, ns_m):
            if cand != "0":
                col = int(np.argmax(np.abs(e_acc[index[cand]])))
                if abs(c[col]) > 1e-9 * scale and abs(e_acc[index[cand], col]) > 0.9:
                    pivot = col
                    break
        if pivot is None:
            pivot = int(np.argmax(np.abs(c)))
        ncur = c.size
        keep = [i for i in range(ncur) if i != pivot]
        step = np.zeros((ncur, ncur - 1))
        for k, i in enumerate(keep):
            step[i, k] = 1.0
        step[pivot, :] = [-c[i] / c[pivot] for i in keep]
        cmat = step.T @ cmat @ step
        gmat = step.T @ gmat @ step
        mmat = step.T @ mmat @ step
        port_rows = port_rows @ step
        e_acc = e_acc @ step
        labels = [labels[i] for i in keep]
    gmat = 0.5 * (gmat - gmat.T)
    cmat = 0.5 * (cmat + cmat.T)
    mmat = 0.5 * (mmat + mmat.T)
    return cmat, gmat, mmat, port_rows, labels


def legendre(lag: QuadraticLagrangian, hbar: float = HBAR_SI,
             cond_bound: float = 1e12) -> HamiltonianSystem:
    """Legendre transform to H = (1/2)(p - G q/2)^T C^-1 (p - G q/2) + (1/2) q^T M q.

    Coordinates are interleaved (q1, p1, ...) so the canonical J is block
    diagonal. Raises SingularKinetic when C is not invertible at the
    configured condition bound.
    """
    c = lag.cmat
    n = lag.n
    if n == 0:
        raise SingularKinetic("empty coordinate space")
    svals = np.linalg.svd(c, compute_uv=False)
    if svals.min() <= 0 or svals.max() / svals.min() > cond_bound:
        raise SingularKinetic(
            "kinetic matrix is singular (add the parallel-capacitor structure "
            f"the gyrator stage needs); cond={svals.max() / max(svals.min(), 1e-300):.3e}")
    cinv = np.linalg.inv(c)
    g = lag.gmat
    hqq = lag.mmat + 0.25 * g.T @ cinv @ g
    hqp = -0.5 * g.T @ cinv
    hpp = cinv
    h = np.zeros((2 * n, 2 * n))
    q = slice(0, 2 * n, 2)
    p = slice(1, 2 * n, 2)
    h[q, q] = hqq
    h[q, p] = hqp
    h[p, q] = hqp.T
    h[p, p] = hpp
    h = 0.5 * (h + h.T)

    nports = lag.port_rows.shape[0]
    port_flux = np.zeros((nports, 2 * n))
    port_momentum = np.zeros((nports, 2 * n))
    port_flux[:, q] = lag.port_rows
    port_momentum[:, p] = lag.port_rows

    qlabel = "Phi" if lag.mode is AnalysisMode.NODE_FLUX else "Q"
    plabel = "Pi" if lag.mode is AnalysisMode.NODE_FLUX else "pi"
    coord_labels = []
    for name in lag.coord_labels:
        coord_labels += [f"{qlabel}_{name}", f"{plabel}_{name}"]

    return HamiltonianSystem(
        h=h, j=sp.symplectic_form(n), port_flux=port_flux,
        port_momentum=port_momentum, port_names=lag.port_names,
        coord_labels=tuple(coord_labels), mode=lag.mode, hbar=hbar)


# --- resistor expansion ------------------------------------------------------

def expand_resistors(net: Netlist, n_modes: int, delta_omega: float) -> Netlist:
    """Replace each ground-referenced resistor by n_modes LC strands.

    Every strand hangs an inductor L_n from the resistor node to an internal
    node and a capacitor C_n from there to ground.
    """
    elements: list[Element] = []
    for e in net.elements:
        if e.kind != "R":
            elements.append(e)
            continue
        a, b = e.nodes
        if b != "0" and a != "0":
            raise ModeUnsupportedElement(
                f"bath expansion supports ground-referenced resistors only; "
                f"{e.name!r} connects {a!r} to {b!r}")
        node = a if b == "0" else b
        g = e.value if e.siemens else 1.0 / e.value
        from .correlator import bath_discretize
        for n, (c_n, l_n) in enumerate(bath_discretize(g, delta_omega, n_modes),
                                       start=1):
            internal = f"{e.name}__bath{n}"
            elements.append(Element("L", f"{e.name}__L{n}", (node, internal), l_n))
            elements.append(Element("C", f"{e.name}__C{n}", (internal, "0"), c_n))
    return Netlist(tuple(elements), net.ports, net.default_rref)


# --- rational port responses -------------------------------------------------

def port_response(system: HamiltonianSystem, rows: np.ndarray) -> RatMatrix:
    """Rational response seen through the given phase-space rows."""
    nums, den = sp.port_response_rational(system.h, system.j, rows)
    p = rows.shape[0]
    return RatMatrix([[RatFunc(nums[i][j], den) for j in range(p)]
                      for i in range(p)])


def port_impedance(system: HamiltonianSystem) -> RatMatrix:
    """Z(s) of a node-flux system (V = dPhi/dt response to port currents)."""
    if system.mode is not AnalysisMode.NODE_FLUX:
        raise ModeUnsupportedElement("impedance requires node-flux coordinates")
    if system.port_flux.shape[0] == 0:
        raise NetlistSemanticError("netlist declares no ports")
    return port_response(system, system.port_flux)


def port_admittance(system: HamiltonianSystem) -> RatMatrix:
    """Y(s) of a loop-charge system (I = dQ/dt response to port voltages)."""
    if system.mode is not AnalysisMode.LOOP_CHARGE:
        raise ModeUnsupportedElement("direct admittance requires loop-charge "
                                     "coordinates; or invert an impedance")
    if system.port_flux.shape[0] == 0:
        raise NetlistSemanticError("netlist declares no ports")
    return port_response(system, system.port_flux)


def port_impedance_mna(net: Netlist) -> RatMatrix:
    """Z(s) by polynomial nodal analysis; resistors allowed.

    Solves (s^2 C + s(G_gyr + G_R) + M) Phi = I for current injections at the
    ports: Z = s P (.)^-1 P^T. The polynomial-matrix inverse goes through the
    adjugate, so this route is limited to small node counts; use the
    discretized-bath route for anything bigger.
    """
    if not net.ports:
        raise NetlistSemanticError("netlist declares no ports")
    lossless_elements = tuple(e for e in net.elements if e.kind != "R")
    lag = build_lagrangian(Netlist(lossless_elements, net.ports,
                                   net.default_rref))
    n = lag.n
    if n > 8:
        raise ModeUnsupportedElement(
            "polynomial nodal analysis limited to 8 coordinates; expand the "
            "resistors into a bath instead")
    gres = np.zeros((n, n))
    index = {nm: i for i, nm in enumerate(lag.coord_labels)}
    for e in net.elements:
        if e.kind != "R":
            continue
        for node in e.nodes:
            if node != "0" and node not in index:
                raise ModeUnsupportedElement(
                    f"resistor {e.name!r} hangs on node {node!r} that no "
                    "reactive element or port touches")
        g = e.value if e.siemens else 1.0 / e.value
        p = _pattern(index, *e.nodes, n)
        gres += g * np.outer(p, p)
    from .ratmat import _poly_det  # adjugate over polynomial entries
    from .ratmat import Poly

    pm = [[Poly([lag.mmat[i][j], lag.gmat[i][j] + gres[i][j], lag.cmat[i][j]])
           for j in range(n)] for i in range(n)]
    det = _poly_det(pm)
    if det.is_zero:
        raise SingularKinetic("nodal matrix is identically singular")
    nports = len(net.ports)
    out = [[None] * nports for _ in range(nports)]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[pm[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            cof = _poly_det(minor) if n > 1 else Poly.one()
            adj[j][i] = cof * ((-1.0) ** (i + j))
    rows = lag.port_rows
    for a in range(nports):
        for b in range(nports):
            acc = Poly.zero()
            for i in range(n):
                for j in range(n):
                    if rows[a, i] == 0.0 or rows[b, j] == 0.0:
                        continue
                    acc = acc + adj[i][j] * (rows[a, i] * rows[b, j])
            out[a][b] = RatFunc(acc.shift_up(1), det)  # the extra s of Z = s(.)^-1
    return RatMatrix(out)
