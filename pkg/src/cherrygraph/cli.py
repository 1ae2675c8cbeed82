"""Command line harness: analytic reports, runs, campaigns, oracle dumps.

Subcommands share a small flag vocabulary (--params, --seed, --steps,
--tmax, --reps, --stride, --imax, --out) and exit with 0 on success,
1 on configuration errors, 2 when growth-rate analysis is requested for
a subcritical instance (the report is still emitted, with nulls), and
3 when the recursion truncation is too coarse for the requested
comparison.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import analytic, genfun, model, montecarlo, oracle, sim

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SUBCRITICAL = 2
EXIT_TRUNCATION = 3

TAIL_MASS_LIMIT = 1e-8
_COMPARISON_GRID = [round(0.1 * j, 1) for j in range(11)]


class ConfigError(Exception):
    """Bad invocation or malformed parameter file."""


def _load_params(path: str) -> model.ModelParams:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read params file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"params file {path} is not valid JSON: {exc}") from exc
    try:
        return model.ModelParams.from_json_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad params in {path}: {exc}") from exc


def _out_dir(args) -> Optional[Path]:
    if args.out is None:
        return None
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit(doc: dict, outdir: Optional[Path], filename: str) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if outdir is not None:
        (outdir / filename).write_text(text)


def analyze_dict(params: model.ModelParams) -> tuple[dict, int]:
    """Full deterministic report; returns (document, exit code)."""
    out: dict = {"params": params.to_json_dict()}
    out["criticality_index"] = analytic.criticality_index(params)
    ext = genfun.extinction_probability(params)
    out["extinction"] = {
        "probability": ext.value,
        "iterations": ext.iterations,
        "residual": ext.residual,
    }
    out["isolation"] = {
        kind: genfun.isolation_probability(params, kind)
        for kind in ("cherry", "semi", "generic")
    }
    residuals: dict = {
        "pgf_xi_at_0": genfun.pgf_xi_lambda(params, 0.0)
        - params.b / (1.0 + params.b),
        "pgf_xi_at_1": genfun.pgf_xi_lambda(params, 1.0) - 1.0,
        "malthusian": None,
        "degree": None,
    }
    code = EXIT_OK
    try:
        summary = analytic.ratios(params)
    except analytic.SubcriticalError:
        summary = None
        code = EXIT_SUBCRITICAL
    if summary is None:
        out["alpha"] = None
        out["alpha_reason"] = "subcritical"
        out["beta"] = None
        out["beta_reason"] = "subcritical"
        out["ratios"] = None
    else:
        out["alpha"] = summary.alpha
        out["alpha_reason"] = None
        out["beta"] = summary.beta
        out["beta_reason"] = None if summary.beta is not None else "degree-subcritical"
        out["ratios"] = summary.to_json_dict()
        residuals["malthusian"] = analytic.mean_intensity(params, summary.alpha) - 1.0
        if summary.beta is not None:
            residuals["degree"] = analytic.mean_intensity(params, summary.beta) - 2.0
    out["residuals"] = residuals
    return out, code


def cmd_analyze(args) -> int:
    params = _load_params(args.params)
    doc, code = analyze_dict(params)
    _emit(doc, _out_dir(args), "analysis.json")
    return code


def _stats_dict(final: sim.RunStats) -> dict:
    return {
        "steps": final.steps,
        "time": final.time,
        "living_edges": final.living_edges,
        "vertices": final.vertices,
        "childless_edges": final.childless_edges,
        "reproduction_events": final.reproduction_events,
        "edges_created": final.edges_created,
        "deletions": final.deletions,
        "jn": final.jn,
        "jt": final.jt,
        "status": final.status,
        "extinct_step": final.extinct_step,
        "trackers": [
            {
                "selection": t.selection,
                "vertex": t.vertex,
                "bind_step": t.bind_step,
                "isolation_step": t.isolation_step,
                "isolation_time": t.isolation_time,
            }
            for t in final.trackers
        ],
    }


def cmd_simulate(args) -> int:
    params = _load_params(args.params)
    if args.steps is None and args.tmax is None:
        raise ConfigError("simulate needs --steps and/or --tmax")
    stride = args.stride
    if stride is None:
        stride = max(1, args.steps // 1000) if args.steps else 1
    trackers = (args.track,) if args.track else ()
    traj = sim.run(
        params,
        n_max=args.steps,
        t_max=args.tmax,
        seed=args.seed,
        trackers=trackers,
        stride=stride,
        clock=True if (args.clock or args.tmax is not None) else None,
    )
    outdir = _out_dir(args)
    if outdir is not None:
        traj.to_csv(outdir / "trajectory.csv")
    doc = {
        "seed": args.seed,
        "stride": stride,
        "status": traj.status,
        "extinct_step": traj.extinct_step,
        "final": _stats_dict(traj.final),
    }
    _emit(doc, outdir, "run.json")
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    params = _load_params(args.params)
    if args.steps is None and args.tmax is None:
        raise ConfigError("montecarlo needs --steps and/or --tmax")
    if args.reps < 1:
        raise ConfigError("--reps must be at least 1")
    report, trajs = montecarlo.run_campaign(
        params,
        args.reps,
        args.seed,
        n_max=args.steps,
        t_max=args.tmax,
        clock=True if (args.clock or args.tmax is not None) else None,
        tracker=args.track,
    )
    outdir = _out_dir(args)
    if outdir is not None:
        montecarlo.write_runs_csv(trajs, outdir / "runs.csv")
    _emit(report.to_json_dict(), outdir, "report.json")
    return EXIT_OK


def cmd_oracle(args) -> int:
    params = _load_params(args.params)
    if args.imax < 1:
        raise ConfigError("--imax must be at least 1")
    pmf = oracle.v_recursion(params, args.imax)
    outdir = _out_dir(args)
    if outdir is not None:
        pmf.to_csv(outdir / "joint_pmf.csv")

    rows = []
    max_xi = 0.0
    max_eta = 0.0
    for z in _COMPARISON_GRID:
        xi_q = genfun.pgf_xi_lambda(params, z)
        xi_o = pmf.pgf_xi(z)
        eta_q = genfun.pgf_eta_lambda(params, z)
        eta_o = pmf.eta_transform(z)
        max_xi = max(max_xi, abs(xi_q - xi_o))
        max_eta = max(max_eta, abs(eta_q - eta_o))
        rows.append((z, xi_q, xi_o, eta_q, eta_o))
    if outdir is not None:
        with open(outdir / "comparison.csv", "w") as fh:
            fh.write("z,pgf_xi_quadrature,pgf_xi_recursion,"
                     "pgf_eta_quadrature,pgf_eta_recursion\n")
            for z, xi_q, xi_o, eta_q, eta_o in rows:
                fh.write(f"{z!r},{xi_q!r},{xi_o!r},{eta_q!r},{eta_o!r}\n")

    doc: dict = {
        "i_max": args.imax,
        "tail_mass": pmf.tail_mass,
        "max_abs_diff": {"pgf_xi": max_xi, "pgf_eta": max_eta},
    }
    code = EXIT_OK
    fixed = genfun.extinction_probability(params)
    try:
        bracket = oracle.gw_extinction(pmf.xi_marginal())
        doc["extinction"] = {
            "fixed_point": fixed.value,
            "bracket_lower": bracket.lower,
            "bracket_upper": bracket.upper,
            "bracket_width": bracket.width,
            # the bracket tracks truncation only; both paths carry ~1e-11
            # of quadrature and arithmetic error, hence the allowance
            "contained": bool(bracket.lower - 1e-9 <= fixed.value <= bracket.upper + 1e-9),
        }
    except oracle.RefinementError as exc:
        doc["extinction"] = {"fixed_point": fixed.value, "error": str(exc)}
        code = EXIT_TRUNCATION
    if pmf.tail_mass > TAIL_MASS_LIMIT:
        doc["truncation_error"] = (
            f"tail mass {pmf.tail_mass:.3e} above {TAIL_MASS_LIMIT:.0e}; raise --imax"
        )
        code = EXIT_TRUNCATION
    _emit(doc, outdir, "oracle.json")
    if code == EXIT_TRUNCATION:
        print("truncation too coarse: raise --imax", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cherrygraph",
        description="Simulation and analysis of the weighted cherry-tree graph process.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, reps=False, imax=False, horizon=False):
        p.add_argument("--params", required=True,
                       help="JSON file with b, c, p and the litter distribution")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--out", default=None, help="output directory")
        if horizon:
            p.add_argument("--steps", type=int, default=None, help="step horizon")
            p.add_argument("--tmax", type=float, default=None, help="time horizon")
            p.add_argument("--stride", type=int, default=None,
                           help="trajectory sampling stride in steps")
            p.add_argument("--clock", action="store_true",
                           help="draw exponential holding times")
            p.add_argument("--track", choices=("any", "semi", "cherry"),
                           default=None, help="track the first matching vertex")
        if reps:
            p.add_argument("--reps", type=int, default=100,
                           help="number of replications")
        if imax:
            p.add_argument("--imax", type=int, default=400,
                           help="truncation index of the life-table recursion")

    common(sub.add_parser("analyze", help="deterministic analytic report"))
    common(sub.add_parser("simulate", help="single run"), horizon=True)
    common(sub.add_parser("montecarlo", help="replication campaign"),
           horizon=True, reps=True)
    common(sub.add_parser("oracle", help="life-table recursion dump and cross-check"),
           imax=True)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "analyze": cmd_analyze,
        "simulate": cmd_simulate,
        "montecarlo": cmd_montecarlo,
        "oracle": cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
