"""Event-driven simulator of the evolving edge-weighted graph.

A step selects a living edge with probability proportional to its
weight 1 + b + c*xi, deletes it with probability 1 - 1/weight, and
otherwise lets it reproduce: each of kappa new vertices attaches to
both endpoints (a cherry, probability p) or to one uniformly chosen
endpoint.  The optional continuous clock draws Exp(total weight)
between events, which realises the branching-process embedding without
changing the jump chain: clock draws consume a separate stream, so a
discrete and a continuous run with the same seed traverse identical
event sequences.

The mutable state lives in flat numpy arrays driven by the compiled
loop in engine.py; this module owns allocation, array growth, random
number refills, and the user-facing records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import engine, model

TRAJECTORY_COLUMNS = ("n", "t", "E", "V", "O", "B", "T", "D", "Jn", "Jt", "deg_tracked")

_TRACK_KINDS = {"any": engine.KIND_ANY, "semi": engine.KIND_SEMI, "cherry": engine.KIND_CHERRY}
_KIND_NAMES = {v: k for k, v in _TRACK_KINDS.items()}

_NO_STEP_LIMIT = 1 << 62
_FEED_SIZE = 1 << 16


class _Feed:
    """Buffered stream of draws from one generator.

    Refills compact the unread tail to the front before appending fresh
    draws, so the values seen downstream do not depend on buffer size or
    refill timing.
    """

    __slots__ = ("gen", "exponential", "buf", "pos")

    def __init__(self, gen: np.random.Generator, exponential: bool = False,
                 size: int = _FEED_SIZE):
        self.gen = gen
        self.exponential = exponential
        self.buf = np.empty(size, dtype=np.float64)
        self.pos = np.zeros(1, dtype=np.int64)
        self._draw_into(self.buf)

    def _draw_into(self, out: np.ndarray) -> None:
        if self.exponential:
            self.gen.standard_exponential(out=out)
        else:
            self.gen.random(out=out)

    def refill(self) -> None:
        pos = int(self.pos[0])
        if pos == 0:
            raise RuntimeError("feed buffer too small for a single step")
        keep = self.buf.size - pos
        if keep:
            self.buf[:keep] = self.buf[pos:]
        self._draw_into(self.buf[keep:])
        self.pos[0] = 0

    def take(self) -> float:
        if int(self.pos[0]) >= self.buf.size:
            self.refill()
        value = float(self.buf[int(self.pos[0])])
        self.pos[0] += 1
        return value


def rng_streams(master_seed: int,
                run_index: Optional[int] = None) -> tuple[np.random.Generator, np.random.Generator]:
    """Derive the (topology, clock) generator pair for one run.

    Replications are keyed through ``spawn_key`` so per-run seeds are
    splittable rather than additive.
    """
    if run_index is None:
        root = np.random.SeedSequence(master_seed)
    else:
        root = np.random.SeedSequence(master_seed, spawn_key=(int(run_index),))
    topo_ss, clk_ss = root.spawn(2)
    return (np.random.Generator(np.random.PCG64(topo_ss)),
            np.random.Generator(np.random.PCG64(clk_ss)))


def _encode_kappa(dist: model.OffspringDist) -> tuple[int, float, np.ndarray, np.ndarray, int]:
    """Pack a litter-size distribution into the engine's sampler table."""
    empty_f = np.zeros(0, dtype=np.float64)
    empty_i = np.zeros(0, dtype=np.int64)
    if isinstance(dist, model.Constant):
        return 0, float(dist.k), empty_f, empty_i, int(dist.k)
    if isinstance(dist, model.ShiftedPoisson):
        return 1, math.exp(-dist.rate), empty_f, empty_i, dist.max_draw(1e-20) + 2
    if isinstance(dist, model.ShiftedGeometric):
        a = math.log1p(-dist.q) if dist.q < 1.0 else -math.inf
        return 2, a, empty_f, empty_i, dist.max_draw(1e-20) + 2
    if isinstance(dist, model.Explicit):
        cdf = np.cumsum(np.asarray(dist.probs, dtype=np.float64))
        cdf[-1] = 2.0
        vals = np.asarray(dist.values, dtype=np.int64)
        return 3, 0.0, cdf, vals, int(vals.max())
    raise TypeError(f"unsupported offspring distribution: {type(dist).__name__}")


@dataclass(frozen=True)
class EdgeRecord:
    id: int
    endpoints: tuple[int, int]
    xi: int
    litters: int
    alive: bool
    birth_step: int
    birth_time: float
    death_step: Optional[int] = None
    death_time: Optional[float] = None


@dataclass(frozen=True)
class TrackerOutcome:
    selection: str
    vertex: Optional[int]
    bind_step: Optional[int]
    isolation_step: Optional[int]
    isolation_time: Optional[float]


@dataclass(frozen=True)
class RunStats:
    steps: int
    time: float
    living_edges: int
    vertices: int
    childless_edges: int
    reproduction_events: int
    edges_created: int
    deletions: int
    jn: int
    jt: float
    dead_lifetime_sum: float
    clamped_litters: int
    status: str
    extinct_step: Optional[int]
    trackers: tuple[TrackerOutcome, ...]


class EventDescriptor(NamedTuple):
    kind: str
    edge_id: int
    kappa: int
    cherries: int


class GraphState:
    """Mutable simulator state backed by flat arrays.

    Single-threaded by construction: a state owns its rng streams and is
    mutated in place during a run.  Independent runs use independent
    states.
    """

    def __init__(self, params: model.ModelParams, seed: int = 0,
                 run_index: Optional[int] = None, retain_history: bool = False,
                 max_trackers: int = 8, initial_capacity: Optional[int] = None):
        self.params = params
        self.seed = int(seed)
        self.run_index = run_index
        kind, a, cdf, vals, safe = _encode_kappa(params.kappa)
        self.kdist_kind = kind
        self.kdist_a = a
        self.kdist_cdf = cdf
        self.kdist_vals = vals
        self.kappa_safe = max(1, int(safe))

        cap = 4096
        floor = max(8 * self.kappa_safe + 64, initial_capacity or 0)
        while cap < floor:
            cap *= 2
        self.cap = cap
        self.tree = np.zeros(2 * cap, dtype=np.float64)
        self.ep0 = np.zeros(cap, dtype=np.int64)
        self.ep1 = np.zeros(cap, dtype=np.int64)
        self.xi = np.zeros(cap, dtype=np.int64)
        self.litters = np.zeros(cap, dtype=np.int64)
        self.eid = np.zeros(cap, dtype=np.int64)
        self.birth_step = np.zeros(cap, dtype=np.int64)
        self.birth_time = np.zeros(cap, dtype=np.float64)
        if retain_history:
            self.death_step = np.full(cap, -1, dtype=np.int64)
            self.death_time = np.full(cap, -1.0, dtype=np.float64)
        else:
            self.death_step = np.zeros(cap, dtype=np.int64)
            self.death_time = np.zeros(cap, dtype=np.float64)
        self.freelist = np.zeros(cap, dtype=np.int64)
        self.deg = np.zeros(max(4096, cap), dtype=np.int64)

        nt = int(max_trackers)
        self.trk_kind = np.zeros(nt, dtype=np.int64)
        self.trk_vid = np.full(nt, -1, dtype=np.int64)
        self.trk_bind_step = np.full(nt, -1, dtype=np.int64)
        self.trk_iso_step = np.full(nt, -1, dtype=np.int64)
        self.trk_iso_time = np.full(nt, -1.0, dtype=np.float64)

        self.IC = np.zeros(engine.IC_LEN, dtype=np.int64)
        self.FC = np.zeros(engine.FC_LEN, dtype=np.float64)
        self.IC[engine.IC_E] = 1
        self.IC[engine.IC_V] = 2
        self.IC[engine.IC_O] = 1
        self.IC[engine.IC_T] = 1
        self.IC[engine.IC_NEXT] = 1
        self.IC[engine.IC_JN] = 1
        self.IC[engine.IC_RETAIN] = 1 if retain_history else 0
        self.IC[engine.IC_STATUS] = -1

        self.ep0[0] = 0
        self.ep1[0] = 1
        self.deg[0] = 1
        self.deg[1] = 1
        self.tree[cap] = 1.0 + params.b
        engine._tree_rebuild(self.tree, cap)

        self.stride = 0
        self.rows = np.zeros((1, 11), dtype=np.float64)
        self.row_pos = np.zeros(1, dtype=np.int64)
        self.evt = np.zeros(4, dtype=np.int64)

        topo_gen, clk_gen = rng_streams(self.seed, run_index)
        self.topo = _Feed(topo_gen)
        self.clk = _Feed(clk_gen, exponential=True)

    # -- convenience views -------------------------------------------------

    @property
    def n(self) -> int:
        return int(self.IC[engine.IC_N])

    @property
    def t(self) -> float:
        return float(self.FC[engine.FC_T])

    @property
    def living_edge_count(self) -> int:
        return int(self.IC[engine.IC_E])

    @property
    def extinct(self) -> bool:
        return self.IC[engine.IC_E] == 0

    @property
    def total_weight(self) -> float:
        return float(self.tree[1])

    def counters(self) -> dict[str, int]:
        ic = self.IC
        return {
            "n": int(ic[engine.IC_N]),
            "E": int(ic[engine.IC_E]),
            "V": int(ic[engine.IC_V]),
            "O": int(ic[engine.IC_O]),
            "B": int(ic[engine.IC_B]),
            "T": int(ic[engine.IC_T]),
            "D": int(ic[engine.IC_D]),
            "Jn": int(ic[engine.IC_JN]),
        }

    def living_edges(self) -> list[EdgeRecord]:
        out = []
        used = int(self.IC[engine.IC_NEXT])
        for s in range(used):
            if self.tree[self.cap + s] > 0.0:
                out.append(EdgeRecord(
                    id=int(self.eid[s]),
                    endpoints=(int(self.ep0[s]), int(self.ep1[s])),
                    xi=int(self.xi[s]),
                    litters=int(self.litters[s]),
                    alive=True,
                    birth_step=int(self.birth_step[s]),
                    birth_time=float(self.birth_time[s]),
                ))
        return out

    def tracker_outcome(self, handle: int) -> TrackerOutcome:
        if not (0 <= handle < int(self.IC[engine.IC_NTRACK])):
            raise IndexError(f"no tracker with handle {handle}")
        vid = int(self.trk_vid[handle])
        iso = int(self.trk_iso_step[handle])
        return TrackerOutcome(
            selection=_KIND_NAMES[int(self.trk_kind[handle])],
            vertex=vid if vid >= 0 else None,
            bind_step=int(self.trk_bind_step[handle]) if vid >= 0 else None,
            isolation_step=iso if iso >= 0 else None,
            isolation_time=float(self.trk_iso_time[handle]) if iso >= 0 else None,
        )

    def advance(self, n_max: Optional[int] = None, t_max: Optional[float] = None,
                clock: bool = False) -> str:
        """Drive the chain in place until a horizon or extinction.

        `n_max` is an absolute step count, not an increment.  Returns the
        stop reason: "n_horizon", "t_horizon", or "extinct".
        """
        eff_n = _NO_STEP_LIMIT if n_max is None else int(n_max)
        eff_t = -1.0 if t_max is None else float(t_max)
        status = self._drive(eff_n, eff_t, bool(clock) or t_max is not None)
        return {
            engine.ST_N_HORIZON: "n_horizon",
            engine.ST_T_HORIZON: "t_horizon",
            engine.ST_EXTINCT: "extinct",
        }[status]

    # -- growth and dispatch ----------------------------------------------

    def _grow_slots(self) -> None:
        old = self.cap
        new = 2 * old
        used = int(self.IC[engine.IC_NEXT])
        tree = np.zeros(2 * new, dtype=np.float64)
        tree[new:new + used] = self.tree[old:old + used]
        engine._tree_rebuild(tree, new)
        self.tree = tree
        for name in ("ep0", "ep1", "xi", "litters", "eid", "birth_step", "death_step"):
            arr = getattr(self, name)
            grown = np.full(new, -1, dtype=np.int64) if name == "death_step" else np.zeros(new, dtype=np.int64)
            grown[:used] = arr[:used]
            setattr(self, name, grown)
        grown_t = np.zeros(new, dtype=np.float64)
        grown_t[:used] = self.birth_time[:used]
        self.birth_time = grown_t
        grown_d = np.full(new, -1.0, dtype=np.float64)
        grown_d[:used] = self.death_time[:used]
        self.death_time = grown_d
        fl = np.zeros(new, dtype=np.int64)
        nfree = int(self.IC[engine.IC_FREE])
        fl[:nfree] = self.freelist[:nfree]
        self.freelist = fl
        self.cap = new
        self.IC[engine.IC_REBUILD] = 0

    def _grow_vertices(self) -> None:
        grown = np.zeros(2 * self.deg.size, dtype=np.int64)
        grown[:self.deg.size] = self.deg
        self.deg = grown

    def _grow_rows(self) -> None:
        grown = np.zeros((2 * self.rows.shape[0], 11), dtype=np.float64)
        grown[:self.rows.shape[0]] = self.rows
        self.rows = grown

    def _drive(self, n_max: int, t_max: float, use_clock: bool) -> int:
        while True:
            status = engine.run_chunk(
                self.topo.buf, self.topo.pos, self.clk.buf, self.clk.pos,
                self.tree, self.ep0, self.ep1, self.xi, self.litters, self.eid,
                self.birth_step, self.birth_time, self.death_step, self.death_time,
                self.freelist, self.deg,
                self.trk_kind, self.trk_vid, self.trk_bind_step,
                self.trk_iso_step, self.trk_iso_time,
                self.IC, self.FC,
                self.kdist_kind, self.kdist_a, self.kdist_cdf, self.kdist_vals,
                self.kappa_safe,
                self.params.b, self.params.c, self.params.p,
                n_max, t_max, use_clock,
                self.stride, self.rows, self.row_pos, self.evt,
            )
            if status in (engine.ST_N_HORIZON, engine.ST_EXTINCT, engine.ST_T_HORIZON):
                return status
            if status == engine.ST_NEED_TOPO:
                self.topo.refill()
            elif status == engine.ST_NEED_CLOCK:
                self.clk.refill()
            elif status == engine.ST_NEED_SLOTS:
                self._grow_slots()
            elif status == engine.ST_NEED_VERTICES:
                self._grow_vertices()
            elif status == engine.ST_NEED_ROWS:
                self._grow_rows()
            else:
                raise RuntimeError("weight index lost all mass while edges remain")


def init(params: model.ModelParams, seed: int = 0, run_index: Optional[int] = None,
         retain_history: bool = False) -> GraphState:
    """Fresh state: one edge of weight 1+b joining vertices 0 and 1."""
    return GraphState(params, seed=seed, run_index=run_index,
                      retain_history=retain_history)


def step(state: GraphState) -> EventDescriptor:
    """Advance the jump chain by one event."""
    if state.IC[engine.IC_E] == 0:
        raise RuntimeError("cannot step an extinct graph")
    state._drive(int(state.IC[engine.IC_N]) + 1, -1.0, False)
    evt = state.evt
    if evt[0] == 0:
        return EventDescriptor("delete", int(evt[1]), 0, 0)
    return EventDescriptor("reproduce", int(evt[1]), int(evt[2]), int(evt[3]))


def advance_clock(state: GraphState) -> float:
    """Draw the Exp(total weight) holding time before the next event.

    Mirrors the compiled loop's arithmetic exactly, so interleaving
    advance_clock/step from Python reproduces an engine-driven
    continuous run bit for bit.
    """
    if state.IC[engine.IC_E] == 0:
        raise RuntimeError("cannot advance the clock of an extinct graph")
    elapsed = state.clk.take() / state.tree[1]
    state.FC[engine.FC_JT] += state.IC[engine.IC_E] * elapsed
    state.FC[engine.FC_T] += elapsed
    return float(elapsed)


def track_vertex(state: GraphState, selection: str) -> int:
    """Register a tracker that binds to the first matching birth.

    selection: "any", "semi" (first vertex born with a single edge) or
    "cherry" (first vertex born with edges to both parent endpoints).
    """
    if selection not in _TRACK_KINDS:
        raise ValueError(f"unknown tracker selection {selection!r}")
    i = int(state.IC[engine.IC_NTRACK])
    if i >= state.trk_kind.shape[0]:
        raise ValueError("tracker capacity exhausted")
    state.trk_kind[i] = _TRACK_KINDS[selection]
    state.trk_vid[i] = -1
    state.trk_bind_step[i] = -1
    state.trk_iso_step[i] = -1
    state.trk_iso_time[i] = -1.0
    state.IC[engine.IC_NTRACK] = i + 1
    return i


def lifetime_estimators(state: GraphState) -> tuple[float, Optional[float]]:
    """Edge-lifetime estimators from a continuous-clock run.

    First estimator: accumulated edge-time J(t) over edges ever born T
    (censored lifetimes included).  Second: mean observed lifetime of
    dead edges, absent while nothing has died.
    """
    lam1 = float(state.FC[engine.FC_JT]) / float(state.IC[engine.IC_T])
    deaths = int(state.IC[engine.IC_D])
    lam2 = float(state.FC[engine.FC_DEADLIFE]) / deaths if deaths > 0 else None
    return lam1, lam2


def stats(state: GraphState) -> RunStats:
    extinct = state.IC[engine.IC_E] == 0
    trackers = tuple(state.tracker_outcome(i)
                     for i in range(int(state.IC[engine.IC_NTRACK])))
    return RunStats(
        steps=int(state.IC[engine.IC_N]),
        time=float(state.FC[engine.FC_T]),
        living_edges=int(state.IC[engine.IC_E]),
        vertices=int(state.IC[engine.IC_V]),
        childless_edges=int(state.IC[engine.IC_O]),
        reproduction_events=int(state.IC[engine.IC_B]),
        edges_created=int(state.IC[engine.IC_T]),
        deletions=int(state.IC[engine.IC_D]),
        jn=int(state.IC[engine.IC_JN]),
        jt=float(state.FC[engine.FC_JT]),
        dead_lifetime_sum=float(state.FC[engine.FC_DEADLIFE]),
        clamped_litters=int(state.IC[engine.IC_CLAMPS]),
        status="extinct" if extinct else "alive",
        extinct_step=int(state.IC[engine.IC_N]) if extinct else None,
        trackers=trackers,
    )


def check_invariants(state: GraphState, rel_tol: float = 1e-9) -> dict[str, float]:
    """Verify the structural bookkeeping; raises ValueError on any breach."""
    cap = state.cap
    used = int(state.IC[engine.IC_NEXT])
    leaf = state.tree[cap:cap + used]
    alive = leaf > 0.0
    params = state.params
    ic = state.IC
    problems = []

    E = int(ic[engine.IC_E])
    T = int(ic[engine.IC_T])
    D = int(ic[engine.IC_D])
    V = int(ic[engine.IC_V])
    O = int(ic[engine.IC_O])
    if int(alive.sum()) != E:
        problems.append(f"living slot count {int(alive.sum())} != E {E}")
    if E != T - D:
        problems.append(f"E {E} != T-D {T - D}")
    if V != 2 + int(ic[engine.IC_SUMK]):
        problems.append(f"V {V} != 2+sum(kappa) {2 + int(ic[engine.IC_SUMK])}")
    degs = state.deg[:V]
    if int(degs.min(initial=0)) < 0:
        problems.append("negative vertex degree")
    if int(degs.sum()) != 2 * E:
        problems.append(f"degree sum {int(degs.sum())} != 2E {2 * E}")
    if int((alive & (state.litters[:used] == 0)).sum()) != O:
        problems.append("childless-edge counter mismatch")

    expected = 1.0 + params.b + params.c * state.xi[:used].astype(np.float64)
    drift = np.abs(leaf - expected)[alive]
    wmax = float(drift.max(initial=0.0))
    if wmax > rel_tol * (1.0 + params.b + params.c * float(state.xi[:used].max(initial=0))):
        problems.append(f"leaf weight drift {wmax:.3e}")
    exact_total = float(expected[alive].sum())
    root = float(state.tree[1])
    if abs(root - exact_total) > rel_tol * max(1.0, exact_total):
        problems.append(f"weight index total {root} vs exact {exact_total}")

    a = state.ep0[:used][alive]
    b_ = state.ep1[:used][alive]
    if a.size and bool((a == b_).any()):
        problems.append("self-loop present")
    lo = np.minimum(a, b_)
    hi = np.maximum(a, b_)
    code = lo * np.int64(V + 1) + hi
    if np.unique(code).size != E:
        problems.append("parallel edges present")
    ids = state.eid[:used][alive]
    if np.unique(ids).size != E or (ids >= T).any():
        problems.append("edge id bookkeeping broken")

    for i in range(int(ic[engine.IC_NTRACK])):
        vid = int(state.trk_vid[i])
        if vid >= 0 and int(state.trk_iso_step[i]) >= 0 and int(state.deg[vid]) != 0:
            problems.append(f"tracker {i} marked isolated but degree > 0")

    if problems:
        raise ValueError("invariant violation: " + "; ".join(problems))
    return {
        "E": E, "V": V, "O": O, "T": T, "D": D,
        "total_weight": root,
        "weight_drift": wmax,
    }


# -- full runs --------------------------------------------------------------


@dataclass
class Trajectory:
    """Sampled counter rows of one run plus its terminal status."""

    rows: np.ndarray
    status: str
    extinct_step: Optional[int]
    params: Optional[model.ModelParams] = None
    seed: Optional[int] = None
    run_index: Optional[int] = None
    stride: int = 0
    final: Optional[RunStats] = None

    def status_line(self) -> str:
        if self.status == "extinct":
            return f"# status=extinct@{self.extinct_step}"
        return "# status=completed"

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(TRAJECTORY_COLUMNS) + "\n")
            for row in self.rows:
                fh.write(_format_row(row) + "\n")
            fh.write(self.status_line() + "\n")

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        rows = []
        status = None
        extinct_step = None
        with open(path) as fh:
            header = fh.readline().strip()
            if header != ",".join(TRAJECTORY_COLUMNS):
                raise ValueError(f"unexpected trajectory header: {header!r}")
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#"):
                    tag = line[1:].strip()
                    if not tag.startswith("status="):
                        raise ValueError(f"unexpected trailer: {line!r}")
                    tag = tag[len("status="):]
                    if tag.startswith("extinct@"):
                        status = "extinct"
                        extinct_step = int(tag[len("extinct@"):])
                    else:
                        status = tag
                    continue
                parts = line.split(",")
                if len(parts) != 11:
                    raise ValueError(f"malformed trajectory row: {line!r}")
                vals = [float(parts[j]) if parts[j] != "" else math.nan
                        for j in range(11)]
                rows.append(vals)
        if status is None:
            raise ValueError("trajectory file is missing its status trailer")
        arr = np.asarray(rows, dtype=np.float64).reshape(len(rows), 11)
        return cls(rows=arr, status=status, extinct_step=extinct_step)


def _format_row(row: np.ndarray) -> str:
    parts = []
    for j in range(11):
        v = row[j]
        if j == 10:
            parts.append("" if math.isnan(v) else str(int(v)))
        elif j in (1, 9):
            parts.append(repr(float(v)))
        else:
            parts.append(str(int(v)))
    return ",".join(parts)


def run(params: model.ModelParams, *, n_max: Optional[int] = None,
        t_max: Optional[float] = None, seed: int = 0,
        run_index: Optional[int] = None, trackers: Sequence[str] = (),
        stride: int = 0, clock: Optional[bool] = None,
        retain_history: bool = False,
        initial_capacity: Optional[int] = None) -> Trajectory:
    """Simulate one run to a step or time horizon.

    The run is a deterministic function of (seed, run_index).  With
    stride > 0 the trajectory samples every stride-th step plus the
    terminal step; stride 0 keeps only final statistics.
    """
    if n_max is None and t_max is None:
        raise ValueError("a horizon is required: n_max and/or t_max")
    if n_max is not None and n_max < 1:
        raise ValueError("n_max must be at least 1")
    if t_max is not None and not t_max > 0:
        raise ValueError("t_max must be positive")
    use_clock = bool(clock) if clock is not None else t_max is not None
    if t_max is not None and not use_clock:
        raise ValueError("a time horizon requires the continuous clock")
    if stride < 0:
        raise ValueError("stride must be nonnegative")

    state = GraphState(params, seed=seed, run_index=run_index,
                       retain_history=retain_history,
                       initial_capacity=initial_capacity)
    for sel in trackers:
        track_vertex(state, sel)

    eff_n = _NO_STEP_LIMIT if n_max is None else int(n_max)
    eff_t = -1.0 if t_max is None else float(t_max)
    if stride > 0:
        state.stride = int(stride)
        guess = 1024 if n_max is None else eff_n // int(stride) + 16
        state.rows = np.zeros((guess, 11), dtype=np.float64)
        state.rows[0] = (0, 0.0, 1, 2, 1, 0, 1, 0, 1, 0.0, math.nan)
        state.row_pos[0] = 1

    status = state._drive(eff_n, eff_t, use_clock)
    rows = state.rows[:int(state.row_pos[0])].copy()
    extinct = status == engine.ST_EXTINCT
    return Trajectory(
        rows=rows,
        status="extinct" if extinct else "completed",
        extinct_step=int(state.IC[engine.IC_N]) if extinct else None,
        params=params,
        seed=int(seed),
        run_index=run_index,
        stride=int(stride),
        final=stats(state),
    )
