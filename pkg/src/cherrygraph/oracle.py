"""Independent cross-checks for the generating-function layer.

The joint law of (vertices added, edges added) over one edge's life obeys
a pure birth-death recursion on integer states: with v(i, s) the expected
discounted occupation of state (i children-vertices, s child-edges),

    (1 + b + c s) v(i, s) = sum_{l,k} v(i-l, s-l-k) P(kappa=l, eps=l+k),
    v(0, 0) = 1 / (1 + b),

and P(life totals = (i, s)) = (b + c s) v(i, s).  Everything here is
derived from that recursion or from direct simulation of a single edge,
with no quadrature involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import model

__all__ = [
    "JointLifePmf",
    "GwExtinctionBracket",
    "RefinementError",
    "SingleEdgeSample",
    "v_recursion",
    "eta_transform",
    "gw_extinction",
    "single_edge_life_mc",
    "tv_distance",
]


class RefinementError(RuntimeError):
    """Truncation too coarse for the requested tolerance; raise i_max."""


@dataclass
class JointLifePmf:
    """Truncated joint pmf of (vertices added, edges added) over a life.

    probs[i, k] = P(i vertices and k edges in total), nonzero only for
    i <= k <= 2 i (each vertex brings one or two edges); tail_mass is the
    probability not captured by i <= i_max.
    """

    i_max: int
    probs: np.ndarray = field(repr=False)
    tail_mass: float

    def prob(self, i: int, k: int) -> float:
        if 0 <= i <= self.i_max and 0 <= k <= 2 * self.i_max:
            return float(self.probs[i, k])
        return 0.0

    def items(self):
        """Yield (i, k, probability) for stored entries with mass, sorted."""
        nz = np.argwhere(self.probs > 0.0)
        for i, k in nz:
            yield int(i), int(k), float(self.probs[i, k])

    def xi_marginal(self) -> np.ndarray:
        """Marginal pmf of the edge total, indexed by edge count."""
        return self.probs.sum(axis=0)

    def pgf_xi(self, z: float) -> float:
        """pgf of the truncated edge-total marginal (tail mass omitted)."""
        return float(np.polynomial.polynomial.polyval(z, self.xi_marginal()))

    def eta_transform(self, z: float) -> float:
        return eta_transform(self, z)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("i,k,probability\n")
            for i, k, q in self.items():
                fh.write(f"{i},{k},{q!r}\n")

    @classmethod
    def from_csv(cls, path) -> "JointLifePmf":
        entries = []
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().strip()
            if header != "i,k,probability":
                raise ValueError(f"unexpected joint pmf header {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                i_s, k_s, q_s = line.split(",")
                entries.append((int(i_s), int(k_s), float(q_s)))
        if not entries:
            raise ValueError("empty joint pmf file")
        i_max = max(i for i, _, _ in entries)
        probs = np.zeros((i_max + 1, 2 * i_max + 1))
        for i, k, q in entries:
            probs[i, k] = q
        return cls(i_max=i_max, probs=probs, tail_mass=1.0 - float(probs.sum()))


def _litter_joint_pmf(params: model.ModelParams, tol: float) -> np.ndarray:
    """Q[l, k] = P(kappa = l, cherries = k), truncated to tail mass <= tol."""
    head = params.kappa.pmf_head(tol)
    kmax = len(head) - 1
    q = np.zeros((kmax + 1, kmax + 1))
    for l in range(1, kmax + 1):
        if head[l] == 0.0:
            continue
        for k in range(l + 1):
            q[l, k] = head[l] * math.comb(l, k) * params.p**k * (1.0 - params.p) ** (l - k)
    return q


def v_recursion(params: model.ModelParams, i_max: int, kappa_tol: float = 1e-12) -> JointLifePmf:
    """Joint life pmf up to i_max vertices via the occupation recursion."""
    if i_max < 0:
        raise ValueError("i_max must be nonnegative")
    b, c = params.b, params.c
    q = _litter_joint_pmf(params, kappa_tol)
    kmax = q.shape[0] - 1
    width = 2 * i_max + 1
    v = np.zeros((i_max + 1, width))
    v[0, 0] = 1.0 / (1.0 + b)
    s_grid = np.arange(width, dtype=float)
    for i in range(1, i_max + 1):
        acc = np.zeros(width)
        for l in range(1, min(i, kmax) + 1):
            lo, hi = i - l, 2 * (i - l)
            row = v[i - l, lo : hi + 1]
            for k in range(l + 1):
                if q[l, k] == 0.0:
                    continue
                acc[lo + l + k : hi + l + k + 1] += q[l, k] * row
        v[i] = acc / (1.0 + b + c * s_grid)
    probs = v * (b + c * s_grid)[None, :]
    return JointLifePmf(i_max=i_max, probs=probs, tail_mass=1.0 - float(probs.sum()))


def eta_transform(pmf: JointLifePmf, z: float) -> float:
    """E[z^(degree contribution)] from the joint life pmf.

    Given totals (i, k), the litter history had k - i cherries (degree +1
    each) and 2i - k semi-cherries (degree +1 with probability 1/2), so
    the conditional transform is z^(k-i) ((1+z)/2)^(2i-k).
    """
    idx = np.argwhere(pmf.probs > 0.0)
    if idx.size == 0:
        return 0.0
    i = idx[:, 0].astype(float)
    k = idx[:, 1].astype(float)
    vals = pmf.probs[idx[:, 0], idx[:, 1]]
    return float(np.sum(vals * z ** (k - i) * (0.5 * (1.0 + z)) ** (2.0 * i - k)))


@dataclass(frozen=True)
class GwExtinctionBracket:
    value: float
    lower: float
    upper: float
    width: float


def _pmf_to_coeffs(pmf) -> np.ndarray:
    if isinstance(pmf, dict):
        kmax = max(pmf)
        coeffs = np.zeros(kmax + 1)
        for k, q in pmf.items():
            if k < 0:
                raise ValueError("offspring counts must be nonnegative")
            coeffs[k] = q
    else:
        coeffs = np.asarray(pmf, dtype=float).copy()
    if np.any(coeffs < -1e-15):
        raise ValueError("offspring pmf has negative entries")
    coeffs = np.clip(coeffs, 0.0, None)
    if coeffs.sum() > 1.0 + 1e-9:
        raise ValueError(f"offspring pmf sums to {coeffs.sum()}, above 1")
    return coeffs


def gw_extinction(pmf, width_tol: float = 1e-6) -> GwExtinctionBracket:
    """Smallest root of g(z) = z for an offspring pmf with truncation tail.

    The missing tail mass is assigned once to the largest tracked count
    (lower bound) and once to zero offspring (upper bound); both variants
    are iterated from 0 and must agree to width_tol.
    """
    coeffs = _pmf_to_coeffs(pmf)
    tail = max(0.0, 1.0 - float(coeffs.sum()))
    low_coeffs = coeffs.copy()
    low_coeffs[-1] += tail
    up_coeffs = coeffs.copy()
    up_coeffs[0] += tail

    def smallest_root(cs):
        z = 0.0
        for _ in range(10**6):
            z_next = float(np.polynomial.polynomial.polyval(z, cs))
            if z_next - z < 1e-14:
                return min(z_next, 1.0)
            z = z_next
        return min(z, 1.0)

    lower = smallest_root(low_coeffs)
    upper = smallest_root(up_coeffs)
    width = upper - lower
    if width > width_tol:
        raise RefinementError(
            f"extinction bracket width {width} exceeds {width_tol}; raise i_max of the source pmf"
        )
    return GwExtinctionBracket(value=0.5 * (lower + upper), lower=lower, upper=upper, width=width)


@dataclass
class SingleEdgeSample:
    """Empirical life statistics of independent single edges."""

    reps: int
    time_grid: Optional[np.ndarray]
    survival_curve: Optional[np.ndarray]
    joint_counts: dict
    mean_lifetime: float
    mean_vertices: float
    mean_edges: float

    def joint_freq(self, i: int, k: int) -> float:
        return self.joint_counts.get((i, k), 0) / self.reps


_MC_BLOCK = 1 << 18


def single_edge_life_mc(
    params: model.ModelParams,
    reps: int,
    seed: int,
    time_grid=None,
) -> SingleEdgeSample:
    """Simulate whole lives of independent edges; no shared machinery.

    Work is split into blocks with seeds derived from the master seed, and
    block results are merged by summation, so the outcome does not depend
    on the block size.
    """
    if reps <= 0:
        raise ValueError("reps must be positive")
    grid = None if time_grid is None else np.asarray(time_grid, dtype=float)
    b, c, p = params.b, params.c, params.p
    n_blocks = (reps + _MC_BLOCK - 1) // _MC_BLOCK
    seeds = np.random.SeedSequence(seed).spawn(n_blocks)
    gt_counts = None if grid is None else np.zeros(len(grid), dtype=np.int64)
    joint_counts: dict = {}
    life_sum = 0.0
    ver_sum = 0
    edge_sum = 0
    for blk in range(n_blocks):
        nb = min(_MC_BLOCK, reps - blk * _MC_BLOCK)
        rng = np.random.default_rng(seeds[blk])
        xi = np.zeros(nb, dtype=np.int64)
        nver = np.zeros(nb, dtype=np.int64)
        t = np.zeros(nb)
        idx = np.arange(nb)
        for _round in range(10**6):
            if idx.size == 0:
                break
            rate = 1.0 + b + c * xi[idx]
            t[idx] += rng.standard_exponential(idx.size) / rate
            dies = rng.random(idx.size) < (b + c * xi[idx]) / rate
            idx = idx[~dies]
            if idx.size:
                kap = params.kappa.sample(rng, idx.size)
                ch = rng.binomial(kap, p)
                xi[idx] += kap + ch
                nver[idx] += kap
        else:
            raise RuntimeError("single edge failed to die within the round budget")
        if grid is not None:
            gt_counts += (t[:, None] > grid[None, :]).sum(axis=0)
        keys = nver << np.int64(32) | xi
        uniq, counts = np.unique(keys, return_counts=True)
        for key, cnt in zip(uniq, counts):
            ik = (int(key >> np.int64(32)), int(key & np.int64(0xFFFFFFFF)))
            joint_counts[ik] = joint_counts.get(ik, 0) + int(cnt)
        life_sum += float(t.sum())
        ver_sum += int(nver.sum())
        edge_sum += int(xi.sum())
    return SingleEdgeSample(
        reps=reps,
        time_grid=grid,
        survival_curve=None if grid is None else gt_counts / reps,
        joint_counts=joint_counts,
        mean_lifetime=life_sum / reps,
        mean_vertices=ver_sum / reps,
        mean_edges=edge_sum / reps,
    )


def tv_distance(sample: SingleEdgeSample, pmf: JointLifePmf) -> float:
    """Total variation between empirical and recursion joint laws."""
    keys = set(sample.joint_counts)
    keys.update((i, k) for i, k, _ in pmf.items())
    acc = 0.0
    for i, k in keys:
        acc += abs(sample.joint_counts.get((i, k), 0) / sample.reps - pmf.prob(i, k))
    return 0.5 * acc
