"""Command-line front end.

Subcommands: equilibrium, critical, hopf, simulate, lyapunov, bifurcation,
region, refuge, figure. Every run is deterministic (no seeds anywhere).

Configuration: a JSON file of flat keys mirroring the CLI flags can be passed
via --config; explicit flags override file values; unknown keys are rejected.
--dump-config writes the fully resolved configuration and exits, and the dump
re-parses to an identical configuration.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
Output files are written atomically (temp file + rename). CSV numbers carry
17 significant digits. REFUGIA_THREADS caps the sweep worker pool.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from . import sweep as sweep_mod
from .diagnostics import DiagnosticsSettings, lyapunov_spectrum
from .hopf import DegenerateNormalizationError, SingularSystemError, classify, critical_context
from .model import (InfeasibleEquilibriumError, ModelParams, boundary_equilibria,
                    interior_equilibrium, nondelay_stability_conditions,
                    persistence_conditions)
from .solver import (NegativeStateError, NonFiniteStateError, StepTooLargeError,
                     Trajectory, integrate)
from .stability import (NewtonDivergenceError, NoHopfError, case2_critical,
                        case3_critical, case4_critical, case5_critical,
                        char_coefficients)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

NUMERICAL_ERRORS = (InfeasibleEquilibriumError, NoHopfError, NewtonDivergenceError,
                    DegenerateNormalizationError, SingularSystemError,
                    NonFiniteStateError, NegativeStateError, ArithmeticError)

_SENTINEL = object()

PARAM_FLAGS = [
    ("r", 2.65), ("k", 898.0), ("alpha", 0.045), ("m", 0.45),
    ("h", 0.0437), ("theta", 0.215), ("d", 1.06), ("tau1", 0.0), ("tau2", 0.0),
]


def fmt(v) -> str:
    """17 significant digits (round-trips doubles)."""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".refugia-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    write_atomic(path, "\n".join(lines) + "\n")


class _Command:
    """One subcommand: records (dest, default, type) so JSON configs can be resolved."""

    def __init__(self, name: str, help_text: str):
        self.name = name
        self.help = help_text
        self.specs: list[tuple[str, object, type | None, dict]] = []

    def add(self, flag: str, default, type_=float, **kw):
        dest = flag.lstrip("-").replace("-", "_")
        self.specs.append((dest, default, type_, {"flag": flag, **kw}))

    def defaults(self) -> dict:
        return {dest: default for dest, default, _, _ in self.specs}


def _commands() -> dict[str, _Command]:
    cmds: dict[str, _Command] = {}

    def new(name, help_text, with_params=True):
        c = _Command(name, help_text)
        if with_params:
            for pname, pdefault in PARAM_FLAGS:
                c.add("--" + pname, pdefault)
        cmds[name] = c
        return c

    c = new("equilibrium", "coexistence point, feasibility, persistence, non-delay stability")
    c.add("--out", None, str)

    c = new("critical", "critical delays and frequencies for delay cases 2-5")
    c.add("--case", 2, int, choices=[2, 3, 4, 5])
    c.add("--n-max", 3, int)
    c.add("--out", None, str)

    c = new("hopf", "normal-form classification at the case III critical point")
    c.add("--tau2-fixed", 0.18)
    c.add("--out", None, str)

    c = new("simulate", "integrate the delay system and emit t,x,y CSV")
    c.add("--horizon", 500.0)
    c.add("--step", 0.005)
    c.add("--keep-from", 0.0)
    c.add("--phi-x", 30.0)
    c.add("--phi-y", 5.83)
    c.add("--out", "simulate.csv", str)

    c = new("lyapunov", "Lyapunov spectrum estimate, CSV index,exponent")
    c.add("--n-exp", 3, int)
    c.add("--step", 0.005)
    c.add("--transient", 500.0)
    c.add("--window", 2000.0)
    c.add("--ortho-interval", 1.0)
    c.add("--phi-x", 30.0)
    c.add("--phi-y", 5.83)
    c.add("--out", "lyapunov.csv", str)

    c = new("bifurcation", "1-D peak-map scan, CSV axis_value,peak_y,verdict,clusters,lle")
    c.add("--axis", "tau2", str, choices=list(sweep_mod.AXIS_NAMES))
    c.add("--lo", 0.25)
    c.add("--hi", 0.70)
    c.add("--n", sweep_mod.DEFAULT_SCAN_N, int)
    c.add("--continuation", False, bool, action="store_true")
    c.add("--transient", 500.0)
    c.add("--record", 1000.0)
    c.add("--step", 0.005)
    c.add("--lyap-window", 2000.0)
    c.add("--phi-x", 30.0)
    c.add("--phi-y", 5.83)
    c.add("--out", "bifurcation.csv", str)

    c = new("region", "2-D (tau1, tau2) verdict map, CSV tau1,tau2,verdict,clusters,lle")
    c.add("--tau1-lo", 0.0)
    c.add("--tau1-hi", 1.0)
    c.add("--tau1-n", sweep_mod.DEFAULT_REGION_N, int)
    c.add("--tau2-lo", 0.0)
    c.add("--tau2-hi", 1.0)
    c.add("--tau2-n", sweep_mod.DEFAULT_REGION_N, int)
    c.add("--transient", 500.0)
    c.add("--record", 1000.0)
    c.add("--step", 0.005)
    c.add("--lyap-window", 2000.0)
    c.add("--phi-x", 30.0)
    c.add("--phi-y", 5.83)
    c.add("--out", "region.csv", str)

    c = new("refuge", "critical delays vs refuge strength m, CSV per-m rows")
    c.add("--lo", 0.0)
    c.add("--hi", 0.8)
    c.add("--n", 33, int)
    c.add("--out", "refuge.csv", str)

    c = new("figure", "reproduce one of the study figures 1-10 (CSV + plot script)")
    c.add("figure_n", 1, int, positional=True, choices=list(range(1, 11)))
    c.add("--out-dir", ".", str)
    return cmds


def _build_parser(cmds: dict[str, _Command], sentinel: bool) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="refugia", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for c in cmds.values():
        sp = sub.add_parser(c.name, help=c.help)
        sp.add_argument("--config", type=str, default=None,
                        help="JSON file of flat keys mirroring the flags")
        sp.add_argument("--dump-config", type=str, default=None,
                        help="write the resolved configuration to this path and exit")
        for dest, default, type_, extra in c.specs:
            kw: dict = {}
            if extra.get("choices"):
                kw["choices"] = extra["choices"]
            default_used = _SENTINEL if sentinel else default
            if extra.get("positional"):
                sp.add_argument(dest, type=type_, choices=kw.get("choices"),
                                nargs="?" if sentinel else None,
                                default=default_used if sentinel else None)
            elif extra.get("action") == "store_true":
                if sentinel:
                    sp.add_argument(extra["flag"], dest=dest, action="store_const",
                                    const=True, default=_SENTINEL)
                else:
                    sp.add_argument(extra["flag"], dest=dest, action="store_true")
            else:
                sp.add_argument(extra["flag"], dest=dest, type=type_,
                                default=default_used, **kw)
    return parser


def resolve_config(argv: list[str]) -> dict:
    """Merge defaults < config file < explicit flags into one flat dict.

    Raises ValueError on unknown config keys (reported with the key name).
    """
    cmds = _commands()
    ns = _build_parser(cmds, sentinel=True).parse_args(argv)
    command = ns.command
    spec = cmds[command]
    explicit = {k: v for k, v in vars(ns).items()
                if v is not _SENTINEL and k not in ("command", "config", "dump_config")}
    resolved = dict(spec.defaults())
    if ns.config is not None:
        try:
            with open(ns.config) as fh:
                file_vals = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ValueError(f"cannot read config {ns.config!r}: {err}") from err
        if not isinstance(file_vals, dict):
            raise ValueError("config file must hold a JSON object of flat keys")
        known = set(resolved) | {"command"}
        for key, value in file_vals.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r} for command {command!r}")
            if key == "command":
                if value != command:
                    raise ValueError(f"config is for command {value!r}, not {command!r}")
                continue
            resolved[key] = value
    resolved.update(explicit)
    resolved["command"] = command
    resolved["_dump_config"] = ns.dump_config
    # validate types by round-tripping through the declared converters
    for dest, default, type_, extra in spec.specs:
        v = resolved[dest]
        if v is None or type_ is None or isinstance(v, bool):
            continue
        try:
            resolved[dest] = type_(v)
        except (TypeError, ValueError) as err:
            raise ValueError(f"bad value for {dest!r}: {v!r} ({err})") from err
        if extra.get("choices") and resolved[dest] not in extra["choices"]:
            raise ValueError(f"{dest!r} must be one of {extra['choices']}, got {v!r}")
    return resolved


def params_from(cfg: dict) -> ModelParams:
    return ModelParams(**{name: cfg[name] for name, _ in PARAM_FLAGS})


def _settings_from(cfg: dict) -> DiagnosticsSettings:
    return DiagnosticsSettings(transient=cfg["transient"], record=cfg["record"],
                               step=cfg["step"], lyap_window=cfg["lyap_window"])


# ---------------------------------------------------------------- commands

def _run_equilibrium(cfg: dict) -> int:
    params = params_from(cfg)
    lines = []
    for b in boundary_equilibria(params):
        lines.append(f"boundary {b.kind.value}: ({fmt(b.x_star)}, {fmt(b.y_star)})")
    eq = interior_equilibrium(params)  # raises -> exit 3
    lines.append(f"interior: x* = {fmt(eq.x_star)}, y* = {fmt(eq.y_star)}")
    pers = persistence_conditions(params)
    lines.append(f"persistence: holds = {pers.holds} (m bound {pers.feasible_m_bound}, "
                 f"theta bound {pers.theta_bound})")
    nd = nondelay_stability_conditions(params)
    lines.append(f"non-delay stability: stable = {nd.stable} (alpha {nd.alpha_cond}, "
                 f"theta {nd.theta_cond}, m window {nd.m_window}: "
                 f"({fmt(nd.m_window_lo)}, {fmt(nd.m_window_hi)}))")
    coeffs = char_coefficients(params, eq)
    lines.append(f"characteristic coefficients: A = {fmt(coeffs.A)}, B = {fmt(coeffs.B)}, "
                 f"C = {fmt(coeffs.C)}")
    text = "\n".join(lines)
    print(text)
    if cfg["out"]:
        write_atomic(cfg["out"], text + "\n")
    return EXIT_OK


def _run_critical(cfg: dict) -> int:
    params = params_from(cfg)
    eq = interior_equilibrium(params)
    coeffs = char_coefficients(params, eq)
    case = cfg["case"]
    n_max = cfg["n_max"]
    if case == 2:
        res = case2_critical(coeffs, n_max)
    elif case == 3:
        res = case3_critical(coeffs, params.tau2, n_max)
    elif case == 4:
        res = case4_critical(coeffs, n_max)
    else:
        res = case5_critical(coeffs, params.tau1, n_max)
    print(f"case {res.case_id} fixed {res.fixed_delay}: tau* = "
          f"{fmt(res.tau_star) if res.tau_star is not None else 'none'}")
    for rt in sorted(res.roots, key=lambda r: (r.omega, r.branch_index)):
        print(f"  omega = {fmt(rt.omega)}  tau[{rt.branch_index}] = {fmt(rt.tau_critical)}"
              f"  transversality {rt.transversality_sign:+d}"
              + ("  (degenerate)" if rt.degenerate else ""))
    if cfg["out"]:
        write_csv(cfg["out"], ["omega", "tau_critical", "branch_index", "transversality_sign"],
                  [(rt.omega, rt.tau_critical, rt.branch_index, rt.transversality_sign)
                   for rt in res.roots])
    return EXIT_OK


def _run_hopf(cfg: dict) -> int:
    params = params_from(cfg)
    ctx = critical_context(params, cfg["tau2_fixed"])
    rep = classify(ctx)
    lines = [
        f"critical point: tau1~ = {fmt(ctx.tau1_crit)}, tau2~ = {fmt(ctx.tau2_fixed)}, "
        f"omega~ = {fmt(ctx.omega)}",
        f"lambda'(tau1~) = {rep.lambda_prime}",
        f"q1 = {rep.q1}", f"q1* = {rep.q1_star}", f"Dbar = {rep.D_bar}",
        f"g20 = {rep.g20}", f"g11 = {rep.g11}", f"g02 = {rep.g02}", f"g21 = {rep.g21}",
        f"E1 = {rep.E1}", f"E2 = {rep.E2}",
        f"c1(0) = {rep.c1_0}",
        f"mu2 = {fmt(rep.mu2)}  beta2 = {fmt(rep.beta2)}  T2 = {fmt(rep.T2)}",
        f"direction: {rep.direction.value}, orbit: {rep.orbit_stability.value}, "
        f"period: {rep.period_trend.value}",
    ]
    text = "\n".join(lines)
    print(text)
    if cfg["out"]:
        write_atomic(cfg["out"], text + "\n")
    return EXIT_OK


def _trajectory_rows(traj: Trajectory):
    for t, (x, y) in zip(traj.times, traj.states):
        yield (float(t), float(x), float(y))


def _run_simulate(cfg: dict) -> int:
    params = params_from(cfg)
    traj = integrate(params, (cfg["phi_x"], cfg["phi_y"]), cfg["horizon"], cfg["step"],
                     keep_from=cfg["keep_from"])
    write_csv(cfg["out"], ["t", "x", "y"], _trajectory_rows(traj))
    print(f"wrote {cfg['out']} ({len(traj.times)} samples, t in "
          f"[{fmt(traj.t_start)}, {fmt(traj.t_end)}])")
    return EXIT_OK


def _run_lyapunov(cfg: dict) -> int:
    params = params_from(cfg)
    settings = DiagnosticsSettings(step=cfg["step"], lyap_transient=cfg["transient"],
                                   lyap_window=cfg["window"],
                                   ortho_interval=cfg["ortho_interval"])
    spec = lyapunov_spectrum(params, (cfg["phi_x"], cfg["phi_y"]), cfg["n_exp"], settings)
    write_csv(cfg["out"], ["index", "exponent"],
              [(i, lam) for i, lam in enumerate(spec.exponents)])
    print("exponents: " + ", ".join(fmt(v) for v in spec.exponents))
    return EXIT_OK


def _bifurcation_csv(path: str, result) -> None:
    rows = []
    for row in result.rows:
        peaks = row.peaks if row.peaks else (math.nan,)
        for pk in peaks:
            rows.append((row.axis1_value, pk, row.verdict, row.clusters, row.lle))
    write_csv(path, ["axis_value", "peak_y", "verdict", "clusters", "lle"], rows)


def _run_bifurcation(cfg: dict) -> int:
    params = params_from(cfg)
    grid = sweep_mod.ScanGrid(
        axis1=sweep_mod.ScanAxis(cfg["axis"], cfg["lo"], cfg["hi"], cfg["n"]),
        fixed=params, phi=_phi(cfg), settings=_settings_from(cfg),
        continuation=bool(cfg["continuation"]))
    result = sweep_mod.bifurcation_scan(grid)
    _bifurcation_csv(cfg["out"], result)
    n_err = sum(1 for r in result.rows if r.error)
    print(f"wrote {cfg['out']} ({len(result.rows)} scan points, {n_err} errors)")
    return EXIT_OK


def _region_csv(base: str, result) -> str:
    write_csv(base, ["tau1", "tau2", "verdict", "clusters", "lle"],
              [(r.axis1_value, r.axis2_value, r.verdict, r.clusters, r.lle)
               for r in result.rows])
    curves = os.path.splitext(base)[0] + "_curves.csv"
    write_csv(curves, ["case", "tau1", "tau2"],
              [(c.case_id, c.tau1, c.tau2) for c in result.overlay or []])
    return curves


def _run_region(cfg: dict) -> int:
    params = params_from(cfg)
    grid = sweep_mod.ScanGrid(
        axis1=sweep_mod.ScanAxis("tau1", cfg["tau1_lo"], cfg["tau1_hi"], cfg["tau1_n"]),
        axis2=sweep_mod.ScanAxis("tau2", cfg["tau2_lo"], cfg["tau2_hi"], cfg["tau2_n"]),
        fixed=params, phi=_phi(cfg), settings=_settings_from(cfg))
    result = sweep_mod.region_scan(grid)
    curves = _region_csv(cfg["out"], result)
    print(f"wrote {cfg['out']} and {curves}")
    return EXIT_OK


def _run_refuge(cfg: dict) -> int:
    params = params_from(cfg)
    res = sweep_mod.refuge_sweep(sweep_mod.ScanAxis("m", cfg["lo"], cfg["hi"], cfg["n"]), params)
    write_csv(cfg["out"], ["m", "feasible", "x_star", "y_star", "tau2_case2", "tau1_case4"],
              [(r.m, r.feasible, r.x_star, r.y_star, r.tau2_case2, r.tau1_case4)
               for r in res.rows])
    print(f"wrote {cfg['out']}; tau2_0 trend vs m: {res.tau2_trend}, "
          f"tau1_0 trend vs m: {res.tau1_trend}")
    return EXIT_OK


def _phi(cfg: dict):
    return (cfg["phi_x"], cfg["phi_y"])


def _dispatch(cfg: dict) -> int:
    return {
        "equilibrium": _run_equilibrium,
        "critical": _run_critical,
        "hopf": _run_hopf,
        "simulate": _run_simulate,
        "lyapunov": _run_lyapunov,
        "bifurcation": _run_bifurcation,
        "region": _run_region,
        "refuge": _run_refuge,
        "figure": _run_figure,
    }[cfg["command"]](cfg)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = resolve_config(argv)
    except SystemExit as err:  # argparse error or --help
        return err.code if isinstance(err.code, int) else EXIT_CONFIG
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    dump = cfg.pop("_dump_config", None)
    if dump:
        write_atomic(dump, json.dumps(cfg, indent=2, sort_keys=True) + "\n")
        print(f"wrote resolved config to {dump}")
        return EXIT_OK
    try:
        return _dispatch(cfg)
    except NUMERICAL_ERRORS as err:
        print(f"numerical failure ({type(err).__name__}): {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, StepTooLargeError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG


# ---------------------------------------------------------------- figures

_PLOT_LOADER = '''\
import csv

def load(path):
    with open(path) as fh:
        rd = csv.DictReader(fh)
        cols = {name: [] for name in rd.fieldnames}
        for row in rd:
            for key, val in row.items():
                try:
                    cols[key].append(float(val))
                except ValueError:
                    cols[key].append(val)
    return cols
'''


def _plot_script(title: str, body: str) -> str:
    return (f'#!/usr/bin/env python3\n"""{title}"""\n'
            "import matplotlib\nmatplotlib.use('Agg')\n"
            "import matplotlib.pyplot as plt\n\n" + _PLOT_LOADER + "\n" + body)


def _sim_to(params: ModelParams, phi, horizon, step, keep_from, path):
    traj = integrate(params, phi, horizon, step, keep_from=keep_from)
    write_csv(path, ["t", "x", "y"], _trajectory_rows(traj))


def _run_figure(cfg: dict) -> int:
    n = cfg["figure_n"]
    out = cfg["out_dir"]
    os.makedirs(out, exist_ok=True)
    params = params_from(cfg)
    phi = (30.0, 5.83)
    step = 0.005
    path = lambda name: os.path.join(out, name)
    scan_settings = DiagnosticsSettings(lyap_window=600.0)

    def emit(script_name, title, body):
        write_atomic(path(script_name), _plot_script(title, body))

    if n == 1:
        _sim_to(params.with_delays(0.0, 0.0), phi, 500.0, step, 0.0, path("fig1_timeseries.csv"))
        emit("fig1_plot.py", "Stable coexistence at tau1 = tau2 = 0", _FIG1_BODY)
    elif n in (2, 3):
        if n == 2:
            axis, lo, hi = "tau2", 0.15, 0.30
            base = params.with_delays(0.0, 0.0)
            sims = [(0.0, 0.18, "stable"), (0.0, 0.23, "unstable")]
        else:
            axis, lo, hi = "tau1", 0.10, 0.45
            base = params.with_delays(0.0, 0.18)
            sims = [(0.24, 0.18, "stable"), (0.30, 0.18, "unstable")]
        grid = sweep_mod.ScanGrid(
            axis1=sweep_mod.ScanAxis(axis, lo, hi, 60),
            fixed=base, phi=phi, settings=scan_settings)
        _bifurcation_csv(path(f"fig{n}_bifurcation.csv"), sweep_mod.bifurcation_scan(grid))
        for t1, t2, tag in sims:
            _sim_to(params.with_delays(t1, t2), phi, 600.0, step, 0.0,
                    path(f"fig{n}_{tag}.csv"))
        emit(f"fig{n}_plot.py", f"Hopf crossing in {axis}",
             _FIG23_BODY.replace("FIGN", f"fig{n}"))
    elif n == 4:
        _sim_to(params.with_delays(0.7, 0.8), phi, 1500.0, step, 500.0,
                path("fig4_timeseries.csv"))
        emit("fig4_plot.py", "Irregular dynamics at tau1 = 0.7, tau2 = 0.8", _FIG4_BODY)
    elif n == 5:
        rows = []
        for t2 in [0.6 + 0.05 * i for i in range(9)]:
            settings = DiagnosticsSettings(lyap_window=1000.0)
            spec = lyapunov_spectrum(params.with_delays(0.7, t2), phi, 4, settings)
            rows.append((t2, *spec.exponents))
        write_csv(path("fig5_lyapunov.csv"),
                  ["tau2", "lambda1", "lambda2", "lambda3", "lambda4"], rows)
        emit("fig5_plot.py", "Leading Lyapunov exponents vs tau2 at tau1 = 0.7", _FIG5_BODY)
    elif n == 6:
        grid = sweep_mod.ScanGrid(
            axis1=sweep_mod.ScanAxis("tau2", 0.25, 0.70, 300),
            fixed=params.with_delays(0.5, 0.0), phi=phi, settings=scan_settings)
        _bifurcation_csv(path("fig6_bifurcation.csv"), sweep_mod.bifurcation_scan(grid))
        emit("fig6_plot.py", "Predator peak map vs tau2 at tau1 = 0.5", _FIG6_BODY)
    elif n == 7:
        grid = sweep_mod.ScanGrid(
            axis1=sweep_mod.ScanAxis("tau1", 0.0, 1.0, 41),
            axis2=sweep_mod.ScanAxis("tau2", 0.0, 1.0, 41),
            fixed=params, phi=phi, settings=scan_settings)
        result = sweep_mod.region_scan(grid)
        _region_csv(path("fig7_region.csv"), result)
        emit("fig7_plot.py", "Verdict map in the (tau1, tau2) plane", _FIG7_BODY)
    elif n == 8:
        for t2 in (0.56, 0.60, 0.626):
            _sim_to(params.with_delays(0.5, t2), phi, 1500.0, step, 1000.0,
                    path(f"fig8_tau2_{t2}.csv"))
        emit("fig8_plot.py", "nT-periodic orbits at tau1 = 0.5", _FIG8_BODY)
    elif n == 9:
        for t2 in (0.626, 0.66):
            _sim_to(params.with_delays(0.5, t2), phi, 1500.0, step, 1000.0,
                    path(f"fig9_tau2_{t2}.csv"))
        emit("fig9_plot.py", "Chaotic orbits at tau1 = 0.5", _FIG9_BODY)
    elif n == 10:
        for lo, hi, tag in ((0.618, 0.623, "zoom1"), (0.645, 0.655, "zoom2")):
            grid = sweep_mod.ScanGrid(
                axis1=sweep_mod.ScanAxis("tau2", lo, hi, 40),
                fixed=params.with_delays(0.5, 0.0), phi=phi, settings=scan_settings)
            _bifurcation_csv(path(f"fig10_{tag}.csv"), sweep_mod.bifurcation_scan(grid))
        for t2, tag in ((0.62, "6T"), (0.65, "5T")):
            _sim_to(params.with_delays(0.5, t2), phi, 1500.0, step, 1000.0,
                    path(f"fig10_{tag}.csv"))
        emit("fig10_plot.py", "Periodic windows inside the chaotic band", _FIG10_BODY)
    print(f"figure {n} artifacts written to {out}")
    return EXIT_OK


_FIG1_BODY = '''\
d = load("fig1_timeseries.csv")
fig, ax = plt.subplots(1, 3, figsize=(12, 3.2))
ax[0].plot(d["t"], d["x"]); ax[0].set_xlabel("t"); ax[0].set_ylabel("prey x")
ax[1].plot(d["t"], d["y"]); ax[1].set_xlabel("t"); ax[1].set_ylabel("predator y")
ax[2].plot(d["x"], d["y"], lw=0.6); ax[2].set_xlabel("x"); ax[2].set_ylabel("y")
fig.tight_layout(); fig.savefig("fig1.png", dpi=150)
'''

_FIG23_BODY = '''\
b = load("FIGN_bifurcation.csv")
s = load("FIGN_stable.csv")
u = load("FIGN_unstable.csv")
fig, ax = plt.subplots(1, 3, figsize=(12, 3.2))
ax[0].plot(b["axis_value"], b["peak_y"], "k.", ms=1.5)
ax[0].set_xlabel("delay"); ax[0].set_ylabel("predator peaks")
ax[1].plot(s["t"], s["x"], label="x"); ax[1].plot(s["t"], s["y"], label="y")
ax[1].set_title("below critical"); ax[1].legend()
ax[2].plot(u["t"], u["x"], label="x"); ax[2].plot(u["t"], u["y"], label="y")
ax[2].set_title("above critical"); ax[2].legend()
fig.tight_layout(); fig.savefig("FIGN.png", dpi=150)
'''

_FIG4_BODY = '''\
d = load("fig4_timeseries.csv")
fig, ax = plt.subplots(1, 3, figsize=(12, 3.2))
ax[0].plot(d["t"], d["x"], lw=0.5); ax[0].set_xlabel("t"); ax[0].set_ylabel("prey x")
ax[1].plot(d["t"], d["y"], lw=0.5); ax[1].set_xlabel("t"); ax[1].set_ylabel("predator y")
ax[2].plot(d["x"], d["y"], lw=0.3); ax[2].set_xlabel("x"); ax[2].set_ylabel("y")
fig.tight_layout(); fig.savefig("fig4.png", dpi=150)
'''

_FIG5_BODY = '''\
d = load("fig5_lyapunov.csv")
fig, ax = plt.subplots(figsize=(6, 4))
for name in ("lambda1", "lambda2", "lambda3", "lambda4"):
    ax.plot(d["tau2"], d[name], "o-", label=name)
ax.axhline(0.0, color="k", lw=0.5)
ax.set_xlabel("tau2"); ax.set_ylabel("Lyapunov exponent"); ax.legend()
fig.tight_layout(); fig.savefig("fig5.png", dpi=150)
'''

_FIG6_BODY = '''\
d = load("fig6_bifurcation.csv")
fig, ax = plt.subplots(figsize=(8, 4.5))
ax.plot(d["axis_value"], d["peak_y"], "k.", ms=1.0)
ax.set_xlabel("tau2"); ax.set_ylabel("predator peaks (tau1 = 0.5)")
fig.tight_layout(); fig.savefig("fig6.png", dpi=150)
'''

_FIG7_BODY = '''\
d = load("fig7_region.csv")
c = load("fig7_region_curves.csv")
order = ["FixedPoint", "Periodic1", "Periodic2", "Periodic4", "PeriodicN",
         "Chaotic", "Undetermined"]
def code(v):
    if v.startswith("Periodic"):
        k = int(v[len("Periodic"):])
        return 1 + min(k, 5)
    return {"FixedPoint": 0, "Chaotic": 7, "Undetermined": 8, "Error": 9}.get(v, 9)
import math
n1 = len(sorted(set(d["tau1"]))); n2 = len(sorted(set(d["tau2"])))
grid = [[0.0] * n2 for _ in range(n1)]
t1s = sorted(set(d["tau1"])); t2s = sorted(set(d["tau2"]))
for t1, t2, v in zip(d["tau1"], d["tau2"], d["verdict"]):
    grid[t1s.index(t1)][t2s.index(t2)] = code(v)
fig, ax = plt.subplots(figsize=(6, 5))
im = ax.imshow(grid, origin="lower", aspect="auto",
               extent=[t2s[0], t2s[-1], t1s[0], t1s[-1]], cmap="viridis")
for case in ("II", "III", "IV", "V"):
    xs = [b for a, b in zip(c["case"], c["tau2"]) if a == case]
    ys = [b for a, b in zip(c["case"], c["tau1"]) if a == case]
    ax.plot(xs, ys, "w.", ms=3)
ax.set_xlabel("tau2"); ax.set_ylabel("tau1")
fig.colorbar(im, ax=ax, label="verdict code")
fig.tight_layout(); fig.savefig("fig7.png", dpi=150)
'''

_FIG8_BODY = '''\
fig, ax = plt.subplots(1, 3, figsize=(12, 3.2))
for i, t2 in enumerate(("0.56", "0.6", "0.626")):
    d = load(f"fig8_tau2_{t2}.csv")
    ax[i].plot(d["x"], d["y"], lw=0.5)
    ax[i].set_title(f"tau2 = {t2}"); ax[i].set_xlabel("x"); ax[i].set_ylabel("y")
fig.tight_layout(); fig.savefig("fig8.png", dpi=150)
'''

_FIG9_BODY = '''\
fig, ax = plt.subplots(1, 2, figsize=(9, 3.6))
for i, t2 in enumerate(("0.626", "0.66")):
    d = load(f"fig9_tau2_{t2}.csv")
    ax[i].plot(d["x"], d["y"], lw=0.3)
    ax[i].set_title(f"tau2 = {t2}"); ax[i].set_xlabel("x"); ax[i].set_ylabel("y")
fig.tight_layout(); fig.savefig("fig9.png", dpi=150)
'''

_FIG10_BODY = '''\
fig, ax = plt.subplots(2, 2, figsize=(9, 7))
for i, tag in enumerate(("zoom1", "zoom2")):
    d = load(f"fig10_{tag}.csv")
    ax[0][i].plot(d["axis_value"], d["peak_y"], "k.", ms=2)
    ax[0][i].set_xlabel("tau2"); ax[0][i].set_ylabel("predator peaks")
for i, tag in enumerate(("6T", "5T")):
    d = load(f"fig10_{tag}.csv")
    ax[1][i].plot(d["x"], d["y"], lw=0.5); ax[1][i].set_title(tag)
fig.tight_layout(); fig.savefig("fig10.png", dpi=150)
'''


if __name__ == "__main__":
    sys.exit(main())
