"""Command-line front end.

Subcommands: analyze (netlist -> Z/Y/S + diagnostics), foster (decomposition),
correlate (netlist or Foster JSON -> correlator series), bath (element
sequences), verify (identity suite). Exit codes: 0 success, 2 usage error,
3 parse error, 4 numerical/model error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import correlator as co
from . import foster as fo
from . import network as nw
from . import symplectic as sp
from .errors import NetlistError, NetlistSemanticError, QfluctError
from .ratmat import is_lossless_positive_real

EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_MODEL = 4


@dataclass
class RunConfig:
    """Resolved correlate-pipeline options."""

    mode: nw.AnalysisMode
    state: co.ThermalState
    times: np.ndarray
    hbar: float
    fmt: str
    output: str | None
    bath_modes: int | None
    delta_omega: float | None
    lossy_quadrature: bool
    omega_max: float | None
    omega_floor: float
    quad_points: int
    tol: float
    seed: int


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit_error(exc: Exception) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    if isinstance(exc, NetlistError):
        return EXIT_PARSE
    return EXIT_MODEL


def _parse_times(spec: str) -> np.ndarray:
    try:
        start_s, stop_s, count_s = spec.split(":")
        start, stop, count = float(start_s), float(stop_s), int(count_s)
    except ValueError:
        raise argparse.ArgumentTypeError("--times must be start:stop:count")
    if count < 1:
        raise argparse.ArgumentTypeError("time grid needs at least one point")
    return np.linspace(start, stop, count)


def _parse_beta(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _thermal_state(args) -> co.ThermalState:
    hbar = 1.0 if args.natural_units else (args.hbar or nw.HBAR_SI)
    if args.beta is not None and args.temp is not None:
        raise argparse.ArgumentTypeError("give either --beta or --temp, not both")
    if args.temp is not None:
        return co.ThermalState.from_temperature(args.temp, hbar=hbar)
    beta = args.beta if args.beta is not None else math.inf
    return co.ThermalState(beta=beta, hbar=hbar)


def _write(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


# --- analyze -----------------------------------------------------------------

def cmd_analyze(args) -> int:
    net = nw.parse_netlist(_read_input(args.netlist))
    if not net.ports:
        raise NetlistSemanticError("NoPorts: netlist declares no ports")
    rref = net.port_rrefs()
    has_resistor = any(e.kind == "R" for e in net.elements)
    if has_resistor:
        z = nw.port_impedance_mna(net)
    else:
        system = nw.legendre(nw.build_lagrangian(net))
        z = nw.port_impedance(system)
    report = is_lossless_positive_real(z, args.tol)
    out = {
        "Z": z.to_dict(),
        "lossless_positive_real": {
            "ok": report.ok,
            "failures": list(report.failures),
            "poles": [[p.real, p.imag] for p in report.pole_locations],
        },
    }
    try:
        out["Y"] = fo.y_from_z(z).to_dict()
    except (ZeroDivisionError, ValueError) as exc:
        out["Y"] = {"error": str(exc)}
    try:
        s_mat = fo.z_to_s(z, rref)
        out["S"] = s_mat.to_dict()
        try:
            red = fo.reduce_singular_scattering(s_mat, args.tol)
            out["reduction"] = {
                "k_open": red.k_open,
                "T": red.t.tolist(),
                "P": red.p.tolist(),
                "S_reduced": red.s_reduced.to_dict(),
            }
        except QfluctError:
            pass
    except QfluctError as exc:
        out["S"] = {"error": str(exc)}
    _write(json.dumps(out, sort_keys=True, indent=2), args.output)
    return 0


# --- foster ------------------------------------------------------------------

def cmd_foster(args) -> int:
    text = _read_input(args.input)
    if args.impedance_json:
        from .ratmat import RatMatrix
        z = RatMatrix.from_json(text)
    else:
        net = nw.parse_netlist(text)
        if not net.ports:
            raise NetlistSemanticError("NoPorts: netlist declares no ports")
        system = nw.legendre(nw.build_lagrangian(net))
        z = nw.port_impedance(system)
    form = fo.foster_decompose(z, args.tol)
    _write(form.to_json(indent=2), args.output)
    return 0


# --- correlate ---------------------------------------------------------------

def _correlate_config(args) -> RunConfig:
    state = _thermal_state(args)
    return RunConfig(
        mode=nw.AnalysisMode(args.mode),
        state=state,
        times=args.times,
        hbar=state.hbar,
        fmt=args.format,
        output=args.output,
        bath_modes=args.bath,
        delta_omega=args.delta_omega,
        lossy_quadrature=args.lossy_quadrature,
        omega_max=args.omega_max,
        omega_floor=args.omega_floor,
        quad_points=args.quad_points,
        tol=args.tol,
        seed=args.seed,
    )


def _port_measure_from_netlist(net: nw.Netlist, cfg: RunConfig):
    system = nw.legendre(nw.build_lagrangian(net, cfg.mode), hbar=cfg.hbar)
    measure = sp.w_hermitian_measure(system.h, system.j)
    return measure.project(system.port_flux.T), system


def cmd_correlate(args) -> int:
    cfg = _correlate_config(args)
    text = _read_input(args.input)
    if args.foster:
        form = fo.FosterForm.from_json(text)
        measure = fo.port_hermitian_measure(form)
        series = co.correlate_lossless(measure, cfg.state, cfg.times)
    else:
        net = nw.parse_netlist(text)
        if not net.ports:
            raise NetlistSemanticError("NoPorts: netlist declares no ports")
        has_resistor = any(e.kind == "R" for e in net.elements)
        if has_resistor and cfg.bath_modes:
            if not cfg.delta_omega:
                raise argparse.ArgumentTypeError("--bath needs --delta-omega")
            net = nw.expand_resistors(net, cfg.bath_modes, cfg.delta_omega)
            measure, _ = _port_measure_from_netlist(net, cfg)
            series = co.correlate_lossless(measure, cfg.state, cfg.times)
        elif has_resistor and cfg.lossy_quadrature:
            z = nw.port_impedance_mna(net)
            if cfg.mode is nw.AnalysisMode.LOOP_CHARGE:
                z = fo.y_from_z(z)
            measure = fo.response_measure(z, cfg.tol)
            if measure.density is None:
                series = co.correlate_lossless(measure, cfg.state, cfg.times)
            else:
                omega_max = cfg.omega_max or _default_omega_max(measure)
                spec = co.QuadratureSpec(
                    omega_max=omega_max, n_points=cfg.quad_points,
                    omega_floor=cfg.omega_floor)
                series = co.correlate_lossy(measure, cfg.state, cfg.times, spec)
        elif has_resistor:
            raise argparse.ArgumentTypeError(
                "lossy netlist: pass --bath N --delta-omega X or --lossy-quadrature")
        else:
            measure, _ = _port_measure_from_netlist(net, cfg)
            series = co.correlate_lossless(measure, cfg.state, cfg.times)

    payload = series.to_csv() if cfg.fmt == "csv" else series.to_json(indent=2)
    _write(payload, cfg.output)
    _print_summary(series)
    return 0


def _default_omega_max(measure) -> float:
    if measure.peaks:
        return max(c + 40 * w for c, w in measure.peaks if w > 0) * 1.0
    return 10.0


def _print_summary(series: co.CorrelatorSeries) -> None:
    t0 = series.values[0]
    diag = [f"{t0[i, i].real:.6g}{t0[i, i].imag:+.3g}j" for i in range(series.dim)]
    freqs = []
    if series.measure is not None:
        freqs = sorted({round(a.omega, 9) for a in series.measure.atoms})
    print(f"t0 diagonal: {diag}", file=sys.stderr)
    if freqs:
        shown = ", ".join(f"{f:.6g}" for f in freqs[:8])
        more = "" if len(freqs) <= 8 else f" (+{len(freqs) - 8} more)"
        print(f"atom frequencies: {shown}{more}", file=sys.stderr)


# --- bath --------------------------------------------------------------------

def cmd_bath(args) -> int:
    seq = co.bath_discretize(args.conductance, args.delta_omega, args.modes)
    out = {"C": [c for c, _ in seq], "L": [l for _, l in seq],
           "frequencies": [n * args.delta_omega for n in range(1, args.modes + 1)]}
    _write(json.dumps(out, sort_keys=True, indent=2), args.output)
    return 0


# --- verify ------------------------------------------------------------------

def _nrho_netlist(c: float = 1.0, r: float = 1.0) -> str:
    return (f"C c1 1 0 {c}\nC c2 2 0 {c}\nG g1 1 0 2 0 {r}\n"
            "port P1 1\nport P2 2\n")


def _lc_netlist(l: float = 1.0, c: float = 1.0) -> str:
    return f"C c1 1 0 {c}\nL l1 1 0 {l}\nport P1 1\n"


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    ok_all = True

    def record(name: str, dev: float, tol: float) -> None:
        nonlocal ok_all
        ok = dev <= tol
        ok_all &= ok
        rows.append((name, dev, tol, "pass" if ok else "FAIL"))

    # fundamental identity on random positive definite h
    for size in args.sizes:
        dim = 2 * ((size + 1) // 2)
        m = rng.normal(size=(dim, dim))
        h = m @ m.T + 0.5 * np.eye(dim)
        if args.corrupt:
            h = h + np.triu(rng.normal(size=(dim, dim)), 1) * 0.1
        times = rng.uniform(-10.0, 10.0, size=args.times_count)
        try:
            rep = sp.verify_fundamental_identity(h, None, times)
            record(f"fundamental identity dim={dim}", rep.max_deviation, 1e-9)
        except QfluctError as exc:
            ok_all = False
            rows.append((f"fundamental identity dim={dim}", math.nan, 1e-9,
                         f"FAIL ({type(exc).__name__})"))

    # route equivalence on the canonical circuits
    state = co.ThermalState(beta=2.0, hbar=1.0)
    times = np.linspace(0.0, 12.0, 40)
    for name, text in (("gyrator 2-port", _nrho_netlist()),
                       ("LC 1-port", _lc_netlist())):
        net = nw.parse_netlist(text)
        system = nw.legendre(nw.build_lagrangian(net), hbar=1.0)
        phase = co.correlate_phase_space(system.h, system.j, state, times)
        port_phase = co.project_series(phase, system.port_flux)
        z = nw.port_impedance(system)
        measure = fo.port_hermitian_measure(fo.foster_decompose(z))
        port_foster = co.correlate_lossless(measure, state, times)
        dev = float(np.max(np.abs(port_phase.values - port_foster.values)))
        scale = float(np.max(np.abs(port_foster.values)))
        record(f"route equivalence {name}", dev / scale, 1e-8)

    width = max(len(r[0]) for r in rows)
    for name, dev, tol, status in rows:
        print(f"{name:<{width}}  dev={dev:.3e}  tol={tol:.1e}  {status}")
    return 0 if ok_all else EXIT_MODEL


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qfluct",
        description="Quantum thermal fluctuations of multiport linear networks")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp_):
        sp_.add_argument("--output", default=None, help="output path (default stdout)")
        sp_.add_argument("--tol", type=float, default=1e-8)

    pa = sub.add_parser("analyze", help="netlist -> Z/Y/S + diagnostics")
    pa.add_argument("netlist", help="netlist path or - for stdin")
    common(pa)
    pa.set_defaults(func=cmd_analyze)

    pf = sub.add_parser("foster", help="decompose an impedance")
    pf.add_argument("input", help="netlist path, - for stdin")
    pf.add_argument("--impedance-json", action="store_true",
                    help="input is a rational-matrix JSON, not a netlist")
    common(pf)
    pf.set_defaults(func=cmd_foster)

    pc = sub.add_parser("correlate", help="compute port correlators")
    pc.add_argument("input", help="netlist path, - for stdin")
    pc.add_argument("--foster", action="store_true",
                    help="input is a Foster-form JSON")
    pc.add_argument("--mode", choices=["flux", "charge"], default="flux")
    pc.add_argument("--beta", type=_parse_beta, default=None,
                    help="inverse energy 1/J ('inf' for the ground state)")
    pc.add_argument("--temp", type=float, default=None, help="temperature in K")
    pc.add_argument("--hbar", type=float, default=None)
    pc.add_argument("--natural-units", action="store_true", help="set hbar = 1")
    pc.add_argument("--times", type=_parse_times, default=_parse_times("0:10:101"),
                    help="time grid start:stop:count")
    pc.add_argument("--bath", type=int, default=None, metavar="N",
                    help="expand resistors into N bath modes")
    pc.add_argument("--delta-omega", type=float, default=None)
    pc.add_argument("--lossy-quadrature", action="store_true",
                    help="integrate the smooth density instead of discretizing")
    pc.add_argument("--omega-max", type=float, default=None)
    pc.add_argument("--omega-floor", type=float, default=0.0)
    pc.add_argument("--quad-points", type=int, default=24)
    pc.add_argument("--format", choices=["json", "csv"], default="json")
    pc.add_argument("--seed", type=int, default=0)
    common(pc)
    pc.set_defaults(func=cmd_correlate)

    pb = sub.add_parser("bath", help="discretized-bath element sequences")
    pb.add_argument("--conductance", type=float, required=True)
    pb.add_argument("--delta-omega", type=float, required=True)
    pb.add_argument("--modes", type=int, required=True)
    common(pb)
    pb.set_defaults(func=cmd_bath)

    pv = sub.add_parser("verify", help="run the identity suite")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--sizes", type=int, nargs="*", default=[2, 4, 6])
    pv.add_argument("--times-count", type=int, default=25)
    pv.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    pv.set_defaults(func=cmd_verify)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except argparse.ArgumentTypeError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except QfluctError as exc:
        return _emit_error(exc)
    except (OSError, ValueError, ZeroDivisionError) as exc:
        return _emit_error(exc)


if __name__ == "__main__":
    sys.exit(main())
