"""Batch front-end: parse a run configuration, execute one command, emit CSV
artifacts plus a human-readable report.

Commands
--------
check             hypothesis checklist + discrete constants; exit 3 on failure
simulate          time integration, trajectory CSV
dispersion        branch CSV over the sampled wavenumbers + band-gap list
korn              Korn-type constant per refinement level
contraction-demo  per-sweep fixed-point ratios against the theoretical bound

Exit codes: 0 ok, 2 configuration error, 3 hypothesis failure, 4 solver
failure.  Every CSV starts with comment lines carrying the resolved
configuration (hash plus full key = value listing) and the column schema;
floats are printed with 17 significant digits, so identical configurations
produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import sys as _sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import dispersion_curves, korn_curl_constant, well_posedness_report
from .assembly import assemble_gram, assemble_load, assemble_w1, assemble_w2
from .config import (
    RunConfig,
    config_digest,
    initial_field_callable,
    load_from_config,
    material_from_config,
    mesh_from_config,
    parse_config,
    serialize_config,
)
from .dynamics import DynamicState, newmark_integrate, picard_integrate, picard_interval
from .errors import ConfigError, HypothesisError, MicromorphError, SolverError
from .fespace import build_fe_system, interpolate_p, interpolate_u
from .mesh import build_box_mesh

COMMANDS = ("check", "simulate", "dispersion", "korn", "contraction-demo")

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_HYPOTHESIS = 3
_EXIT_SOLVER = 4


def _fmt(x: float, precision: int = 17) -> str:
    return f"{float(x):.{precision}g}"


def _header_lines(cfg: RunConfig, columns: list[str]) -> list[str]:
    lines = [f"# micromorph {__version__}", f"# config-sha256: {config_digest(cfg)}"]
    for raw in serialize_config(cfg).splitlines():
        if raw:
            lines.append(f"# cfg {raw}")
    lines.append("# columns: " + ",".join(columns))
    return lines


def _write_csv(path: Path, cfg: RunConfig, columns: list[str], rows) -> None:
    precision = cfg.output.precision
    text = "\n".join(_header_lines(cfg, columns))
    text += "\n" + ",".join(columns) + "\n"
    for row in rows:
        text += ",".join(
            _fmt(v, precision) if isinstance(v, (float, np.floating)) else str(v)
            for v in row
        ) + "\n"
    path.write_text(text)


def _initial_state(cfg: RunConfig, sys_) -> DynamicState:
    sim = cfg.simulation
    dims = cfg.mesh.dims
    layout_t = (sys_.n_u_dofs, sys_.n_p_dofs)

    def u_part(spec):
        f = initial_field_callable(spec, dims, (3,))
        return np.zeros(layout_t[0]) if f is None else interpolate_u(sys_, f)

    def p_part(spec):
        f = initial_field_callable(spec, dims, (3, 3))
        return np.zeros(layout_t[1]) if f is None else interpolate_p(sys_, f)

    return DynamicState(
        t=0.0,
        u=u_part(sim.initial_u),
        p=p_part(sim.initial_p),
        ut=u_part(sim.initial_ut),
        pt=p_part(sim.initial_pt),
    )


def _report_text(report) -> str:
    lines = [f"model variant: {report.variant.value}", "", "hypothesis checklist:"]
    for c in report.checks:
        status = "pass" if c.passed else "FAIL"
        detail = f"  [{c.detail}]" if c.detail else ""
        lines.append(f"  ({c.item}) {c.description}: {status}{detail}")
    lines.append("")
    lines.append("tensor definiteness (min / max modulus):")
    for name, r in report.tensor_reports.items():
        lines.append(
            f"  {name}: {r.classification.value}  "
            f"{r.min_modulus:.9g} / {r.max_modulus:.9g}"
        )
    lines.append("")
    if report.coercivity is not None:
        lines.append(f"discrete coercivity constant m1 = {report.coercivity:.12g}")
        lines.append(f"discrete boundedness constant M2 = {report.boundedness:.12g}")
        if report.constant_map:
            lines.append("potential form vanishes: fixed-point map is constant")
        elif report.contraction is not None:
            lines.append(f"contraction constant c = {report.contraction:.12g}")
            lines.append(f"fixed-point interval delta = {report.interval:.12g}")
    verdict = (
        "well-posed (existence hypotheses satisfied)"
        if report.well_posed
        else "NOT well-posed: failed items " + ", ".join(report.failed_items())
    )
    lines.append("")
    lines.append(f"verdict: {verdict}")
    return "\n".join(lines) + "\n"


def _cmd_check(cfg: RunConfig, out: Path) -> int:
    params = material_from_config(cfg)
    sys_ = build_fe_system(mesh_from_config(cfg))
    report = well_posedness_report(params, sys_)
    (out / "report.txt").write_text(_report_text(report))
    rows = [
        (name, r.classification.value, r.min_modulus, r.max_modulus)
        for name, r in report.tensor_reports.items()
    ]
    rows.append(("coercivity_m1", "", report.coercivity, report.coercivity))
    rows.append(("boundedness_m2", "", report.boundedness, report.boundedness))
    _write_csv(
        out / "moduli.csv", cfg,
        ["tensor", "classification", "min_modulus", "max_modulus"], rows,
    )
    print(_report_text(report), end="")
    return _EXIT_OK if report.well_posed else _EXIT_HYPOTHESIS


def _simulate_trajectory(cfg: RunConfig, params, sys_):
    sim = cfg.simulation
    w1 = assemble_w1(params, sys_)
    w2 = assemble_w2(params, sys_)
    gram = assemble_gram(sys_)
    load = load_from_config(cfg)
    state0 = _initial_state(cfg, sys_)
    load_fn = lambda t: assemble_load(load, sys_, t)

    if sim.integrator == "newmark":
        n_steps = max(1, round(sim.t_final / sim.dt))
        return newmark_integrate(state0, w1, w2, load_fn, sim.dt, n_steps), None
    report = well_posedness_report(params, sys_)
    if not report.well_posed:
        raise HypothesisError(
            "cannot integrate: failed items " + ", ".join(report.failed_items())
        )
    traj = picard_integrate(
        state0, w1, w2, load_fn, sim.t_final, report.contraction or 0.0,
        n_t=sim.nodes_per_interval, fixed_tol=sim.fixed_tol, gram=gram,
    )
    return traj, report


def _cmd_simulate(cfg: RunConfig, out: Path) -> int:
    params = material_from_config(cfg)
    sys_ = build_fe_system(mesh_from_config(cfg))
    traj, _ = _simulate_trajectory(cfg, params, sys_)
    samples = [d for d in cfg.simulation.sample_dofs if d < sys_.n_dofs]
    columns = ["t", "kinetic", "potential"] + [f"dof{d}" for d in samples]
    columns += ["picard_iterations"]
    iters = traj.diagnostics.get("picard_iterations", [])
    n_int = max(len(iters), 1)
    rows = []
    for i in range(traj.n_nodes):
        # nodes map to subintervals; node 0 belongs to the first
        interval = min((i - 1) // max((traj.n_nodes - 1) // n_int, 1), n_int - 1)
        it = iters[max(interval, 0)] if iters else 0
        rows.append(
            (traj.times[i], traj.kinetic[i], traj.potential[i])
            + tuple(traj.positions[i, d] for d in samples)
            + (it,)
        )
    _write_csv(out / "trajectory.csv", cfg, columns, rows)
    print(f"simulate: {traj.n_nodes} nodes -> {out / 'trajectory.csv'}")
    return _EXIT_OK


def _cmd_dispersion(cfg: RunConfig, out: Path) -> int:
    params = material_from_config(cfg)
    ana = cfg.analysis
    result = dispersion_curves(params, ana.direction, ana.k_samples)
    columns = ["k"] + [f"omega{j + 1}" for j in range(result.n_branches)]
    rows = [
        (result.k_samples[s],) + tuple(result.frequencies[s])
        for s in range(result.k_samples.size)
    ]
    _write_csv(out / "dispersion.csv", cfg, columns, rows)
    gaps = result.gaps
    d_text = " ".join(_fmt(x) for x in result.direction)
    lines = [
        f"band gaps along direction ({d_text}) "
        f"({result.k_samples.size} samples):"
    ]
    if gaps:
        for g in gaps:
            lines.append(
                f"  ({_fmt(g.lower)}, {_fmt(g.upper)})  width {_fmt(g.width)}  "
                f"[sampling resolution {_fmt(g.k_resolution)}]"
            )
    else:
        lines.append("  none detected at this sampling")
    (out / "gaps.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return _EXIT_OK


def _cmd_korn(cfg: RunConfig, out: Path) -> int:
    rows = []
    res = np.array(cfg.mesh.resolution)
    for level in range(cfg.analysis.korn_levels):
        r = tuple(int(x) for x in res * 2**level)
        sys_ = build_fe_system(build_box_mesh(cfg.mesh.dims, r))
        c = korn_curl_constant(sys_)
        rows.append((level, r[0], r[1], r[2], c))
        print(f"korn level {level} resolution {r}: C = {c:.9g}")
    _write_csv(out / "korn.csv", cfg, ["level", "nx", "ny", "nz", "c_est"], rows)
    return _EXIT_OK


def _cmd_contraction_demo(cfg: RunConfig, out: Path) -> int:
    params = material_from_config(cfg)
    sys_ = build_fe_system(mesh_from_config(cfg))
    report = well_posedness_report(params, sys_)
    if not report.well_posed or report.contraction is None:
        raise HypothesisError("contraction demo needs a well-posed material")
    w1 = assemble_w1(params, sys_)
    w2 = assemble_w2(params, sys_)
    gram = assemble_gram(sys_)
    load = load_from_config(cfg)
    state0 = _initial_state(cfg, sys_)
    if not np.any(state0.position) and not np.any(state0.velocity):
        # a visible fixed point even for an all-zero config
        rng = np.random.default_rng(2024)
        state0 = DynamicState.from_vectors(
            w1.layout, 0.0,
            rng.standard_normal(sys_.n_dofs), rng.standard_normal(sys_.n_dofs),
        )
    delta = report.interval
    bound = delta**2 * report.contraction
    _, ratios = picard_interval(
        state0, w1, w2, lambda t: assemble_load(load, sys_, t), delta,
        n_t=cfg.simulation.nodes_per_interval, fixed_tol=cfg.simulation.fixed_tol,
        gram=gram,
    )
    rows = [(i + 1, r, bound) for i, r in enumerate(ratios)]
    _write_csv(out / "contraction.csv", cfg, ["sweep", "ratio", "bound"], rows)
    print(
        f"contraction demo: delta = {_fmt(delta)}, theoretical bound "
        f"{_fmt(bound)}, measured max ratio "
        f"{_fmt(max(ratios)) if ratios else 'n/a'}"
    )
    return _EXIT_OK


_HANDLERS = {
    "check": _cmd_check,
    "simulate": _cmd_simulate,
    "dispersion": _cmd_dispersion,
    "korn": _cmd_korn,
    "contraction-demo": _cmd_contraction_demo,
}


def run(command: str, cfg: RunConfig, out_dir=None) -> int:
    """Execute one command; returns the process exit status."""
    if command not in _HANDLERS:
        raise ValueError(f"unknown command {command!r}")
    out = Path(out_dir) if out_dir is not None else Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return _HANDLERS[command](cfg, out)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="micromorph",
        description="Relaxed micromorphic elastodynamics: certification, "
        "simulation, and dispersion analysis.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="run configuration file")
    parser.add_argument("--out", default=None, help="output directory")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"MICROMORPH-ERROR config: {exc}", file=_sys.stderr)
        return _EXIT_CONFIG
    try:
        cfg = parse_config(text)
        return run(args.command, cfg, args.out)
    except ConfigError as exc:
        print(f"MICROMORPH-ERROR config: {exc}", file=_sys.stderr)
        return _EXIT_CONFIG
    except HypothesisError as exc:
        print(f"MICROMORPH-ERROR hypothesis: {exc}", file=_sys.stderr)
        return _EXIT_HYPOTHESIS
    except SolverError as exc:
        print(f"MICROMORPH-ERROR solver: {exc}", file=_sys.stderr)
        return _EXIT_SOLVER
    except MicromorphError as exc:
        print(f"MICROMORPH-ERROR internal: {exc}", file=_sys.stderr)
        return _EXIT_SOLVER
    except ValueError as exc:
        # parameter/range errors surfacing from the library (bad table range,
        # invalid dimensions) trace back to the configuration
        print(f"MICROMORPH-ERROR config: {exc}", file=_sys.stderr)
        return _EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
