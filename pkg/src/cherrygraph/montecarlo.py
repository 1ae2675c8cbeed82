"""Sequential Monte Carlo campaigns and their aggregated reports.

A campaign runs independent replications whose seeds are split from one
master seed, then compares end-of-horizon statistics against the
analytic limits.  Ratio statistics are conditioned on survival to the
horizon (the observable stand-in for non-extinction); the report always
carries the survival fraction so the conditioning bias stays visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import analytic, genfun, model, sim

_ISOLATION_KIND = {"any": "generic", "semi": "semi", "cherry": "cherry"}


@dataclass(frozen=True)
class StatRow:
    """One line of a campaign report."""

    name: str
    analytic: Optional[float]
    estimate: Optional[float]
    std_error: Optional[float]
    z_score: Optional[float]
    conditional: bool
    count: int

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "analytic": self.analytic,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "z_score": self.z_score,
            "conditional": self.conditional,
            "count": self.count,
        }


@dataclass
class McReport:
    params: model.ModelParams
    master_seed: int
    replications: int
    surviving: int
    horizon_n: Optional[int]
    horizon_t: Optional[float]
    clock: bool
    tracker: Optional[str]
    rows: list[StatRow] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def row(self, name: str) -> StatRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json_dict(self) -> dict:
        return {
            "params": self.params.to_json_dict(),
            "master_seed": self.master_seed,
            "replications": self.replications,
            "surviving": self.surviving,
            "horizon": {"n_max": self.horizon_n, "t_max": self.horizon_t},
            "clock": self.clock,
            "tracker": self.tracker,
            "statistics": [r.to_json_dict() for r in self.rows],
            "warnings": list(self.warnings),
        }


def simulate_many(params: model.ModelParams, reps: int, master_seed: int, *,
                  n_max: Optional[int] = None, t_max: Optional[float] = None,
                  clock: Optional[bool] = None, trackers: Sequence[str] = (),
                  stride: int = 0,
                  initial_capacity: Optional[int] = None) -> list[sim.Trajectory]:
    """Run reps independent replications, one state at a time."""
    if reps < 1:
        raise ValueError("reps must be at least 1")
    return [
        sim.run(params, n_max=n_max, t_max=t_max, seed=master_seed,
                run_index=i, trackers=trackers, stride=stride, clock=clock,
                initial_capacity=initial_capacity)
        for i in range(int(reps))
    ]


def _mean_row(name: str, values: list[float], target: Optional[float],
              conditional: bool = True) -> StatRow:
    k = len(values)
    if k == 0:
        return StatRow(name, target, None, None, None, conditional, 0)
    arr = np.asarray(values, dtype=np.float64)
    est = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(k)) if k > 1 else None
    z = (est - target) / se if (target is not None and se is not None and se > 0) else None
    return StatRow(name, target, est, se, z, conditional, k)


def build_report(params: model.ModelParams, trajectories: Sequence[sim.Trajectory], *,
                 master_seed: int, n_max: Optional[int] = None,
                 t_max: Optional[float] = None, clock: bool = False,
                 tracker: Optional[str] = None) -> McReport:
    """Aggregate per-run final statistics into the standard report.

    The schema is fixed: every statistic appears in every report, with
    nulls where a regime (subcritical, no clock, no tracker) leaves it
    undefined.
    """
    total = len(trajectories)
    finals = [t.final for t in trajectories]
    if any(f is None for f in finals):
        raise ValueError("trajectories must carry final statistics")
    survivors = [f for t, f in zip(trajectories, finals) if t.status == "completed"]
    surviving = len(survivors)

    report = McReport(params=params, master_seed=int(master_seed),
                      replications=total, surviving=surviving,
                      horizon_n=n_max, horizon_t=t_max, clock=bool(clock),
                      tracker=tracker)

    try:
        summary = analytic.ratios(params)
    except analytic.SubcriticalError:
        summary = None
        report.warnings.append("subcritical parameters: ratio limits undefined")

    ext = genfun.extinction_probability(params)
    q = ext.value
    extinct_frac = sum(t.status == "extinct" for t in trajectories) / total
    se_q = math.sqrt(q * (1.0 - q) / total)
    z_q = (extinct_frac - q) / se_q if se_q > 0 else None
    report.rows.append(StatRow("extinction_frequency", q, extinct_frac, se_q,
                               z_q, False, total))

    def ratio(name, num, target):
        report.rows.append(_mean_row(name, [num(f) for f in survivors], target))

    ratio("edges_per_step", lambda f: f.living_edges / f.steps,
          summary.edges_per_step if summary else None)
    ratio("vertices_per_step", lambda f: f.vertices / f.steps,
          summary.vertices_per_step if summary else None)
    ratio("childless_fraction", lambda f: f.childless_edges / f.living_edges,
          summary.childless_fraction if summary else None)
    ratio("litters_per_edge", lambda f: f.reproduction_events / f.edges_created,
          summary.litters_per_edge if summary else None)
    ratio("jn_coefficient", lambda f: f.jn / f.steps ** 2,
          summary.jn_coefficient if summary else None)
    ratio("jn_step_ratio", lambda f: f.jn / (f.steps * f.living_edges), 0.5)

    if clock:
        lam_target = summary.lifetime_est_censored if summary else None
        report.rows.append(_mean_row(
            "lifetime_est_censored",
            [f.jt / f.edges_created for f in survivors], lam_target))
    else:
        report.rows.append(StatRow("lifetime_est_censored",
                                   summary.lifetime_est_censored if summary else None,
                                   None, None, None, True, 0))

    if tracker is not None:
        iso_target = genfun.isolation_probability(params, _ISOLATION_KIND[tracker])
        bound = [f for f in finals
                 if f.trackers and f.trackers[0].vertex is not None]
        k = len(bound)
        if k:
            frac = sum(f.trackers[0].isolation_step is not None for f in bound) / k
            se = math.sqrt(iso_target * (1.0 - iso_target) / k)
            z = (frac - iso_target) / se if se > 0 else None
            report.rows.append(StatRow("isolation_frequency", iso_target, frac,
                                       se, z, False, k))
        else:
            report.rows.append(StatRow("isolation_frequency", iso_target, None,
                                       None, None, False, 0))
            report.warnings.append("tracker never bound: no isolation estimate")
    else:
        report.rows.append(StatRow("isolation_frequency", None, None, None,
                                   None, False, 0))

    if surviving == 0:
        report.warnings.append("no surviving runs: conditional statistics absent")
    return report


def run_campaign(params: model.ModelParams, reps: int, master_seed: int, *,
                 n_max: Optional[int] = None, t_max: Optional[float] = None,
                 clock: Optional[bool] = None, tracker: Optional[str] = None,
                 initial_capacity: Optional[int] = None
                 ) -> tuple[McReport, list[sim.Trajectory]]:
    """Campaign entry point: replications plus the aggregated report."""
    use_clock = bool(clock) if clock is not None else t_max is not None
    trackers = (tracker,) if tracker is not None else ()
    trajs = simulate_many(params, reps, master_seed, n_max=n_max, t_max=t_max,
                          clock=use_clock, trackers=trackers,
                          initial_capacity=initial_capacity)
    report = build_report(params, trajs, master_seed=master_seed, n_max=n_max,
                          t_max=t_max, clock=use_clock, tracker=tracker)
    return report, trajs


def write_runs_csv(trajectories: Sequence[sim.Trajectory], path) -> None:
    """Raw per-run terminal statistics, one row per replication."""
    header = ("run_index,status,steps,time,E,V,O,B,T,D,Jn,Jt,"
              "lambda1,lambda2,tracker_vertex,tracker_bind_step,"
              "tracker_isolation_step")
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for t in trajectories:
            f = t.final
            clocked = f.time > 0.0
            lam1 = repr(f.jt / f.edges_created) if clocked else ""
            lam2 = (repr(f.dead_lifetime_sum / f.deletions)
                    if clocked and f.deletions > 0 else "")
            if f.trackers and f.trackers[0].vertex is not None:
                tv = str(f.trackers[0].vertex)
                tb = str(f.trackers[0].bind_step)
                ti = (str(f.trackers[0].isolation_step)
                      if f.trackers[0].isolation_step is not None else "")
            else:
                tv = tb = ti = ""
            fh.write(",".join([
                str(t.run_index if t.run_index is not None else 0),
                t.status, str(f.steps), repr(f.time), str(f.living_edges),
                str(f.vertices), str(f.childless_edges),
                str(f.reproduction_events), str(f.edges_created),
                str(f.deletions), str(f.jn), repr(f.jt), lam1, lam2,
                tv, tb, ti,
            ]) + "\n")
