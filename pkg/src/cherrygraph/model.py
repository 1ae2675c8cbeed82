"""Model parameters and offspring distributions for the cherry graph process.

An edge reproduces in litters: kappa new vertices, each independently a
cherry (probability p, attaches to both endpoints, two new edges) or a
semi-cherry (one new edge to a uniformly chosen endpoint).  The litter
edge count is eps = kappa + #cherries.  Edge weight is 1 + b + c * xi
where xi is the cumulative number of child edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "OffspringDist",
    "Constant",
    "ShiftedPoisson",
    "ShiftedGeometric",
    "Explicit",
    "ModelParams",
    "Litter",
    "pgf_kappa",
    "pgf_eps",
    "joint_pgf_kappa_eps",
    "mean_eps",
    "sample_litter",
    "dist_from_json_dict",
]

_PMF_SUM_TOL = 1e-12


def _check_unit_interval(s, what: str) -> None:
    arr = np.asarray(s, dtype=float)
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise ValueError(f"{what} must lie in [0, 1], got {s!r}")


class OffspringDist:
    """Distribution of the litter vertex count kappa (support in {1, 2, ...})."""

    def pgf(self, s):
        """Probability generating function E[s^kappa], s in [0, 1]."""
        _check_unit_interval(s, "pgf argument")
        return self._pgf_unchecked(s)

    def _pgf_unchecked(self, s):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def pmf_head(self, tol: float = 1e-12) -> np.ndarray:
        """Array h with h[k] = P(kappa = k) for k = 0..K, 1 - sum(h) <= tol."""
        raise NotImplementedError

    def max_draw(self, tail: float = 1e-18) -> int:
        """A bound K with P(kappa > K) <= tail, used to size buffers."""
        raise NotImplementedError

    def to_json_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(OffspringDist):
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"constant litter size must be an integer >= 1, got {self.k!r}")

    def _pgf_unchecked(self, s):
        return np.asarray(s, dtype=float) ** self.k if np.ndim(s) else float(s) ** self.k

    def mean(self) -> float:
        return float(self.k)

    def sample(self, rng, size=None):
        if size is None:
            return self.k
        return np.full(size, self.k, dtype=np.int64)

    def pmf_head(self, tol=1e-12):
        h = np.zeros(self.k + 1)
        h[self.k] = 1.0
        return h

    def max_draw(self, tail=1e-18):
        return self.k

    def to_json_dict(self):
        return {"type": "constant", "k": self.k}


@dataclass(frozen=True)
class ShiftedPoisson(OffspringDist):
    """kappa = 1 + Poisson(rate)."""

    rate: float

    def __post_init__(self):
        if not (self.rate > 0.0) or not math.isfinite(self.rate):
            raise ValueError(f"rate must be positive and finite, got {self.rate!r}")

    def _pgf_unchecked(self, s):
        return s * np.exp(self.rate * (np.asarray(s, dtype=float) - 1.0)) if np.ndim(s) \
            else float(s) * math.exp(self.rate * (float(s) - 1.0))

    def mean(self) -> float:
        return 1.0 + self.rate

    def sample(self, rng, size=None):
        if size is None:
            return 1 + int(rng.poisson(self.rate))
        return 1 + rng.poisson(self.rate, size=size).astype(np.int64)

    def pmf_head(self, tol=1e-12):
        probs = [0.0, math.exp(-self.rate)]
        mass = probs[1]
        term = probs[1]
        j = 0
        while 1.0 - mass > tol:
            j += 1
            term *= self.rate / j
            probs.append(term)
            mass += term
        return np.array(probs)

    def max_draw(self, tail=1e-18):
        return len(self.pmf_head(tol=tail)) + 8

    def to_json_dict(self):
        return {"type": "shifted_poisson", "rate": self.rate}


@dataclass(frozen=True)
class ShiftedGeometric(OffspringDist):
    """P(kappa = k) = q (1-q)^(k-1) for k >= 1 (trials until first success)."""

    q: float

    def __post_init__(self):
        if not (0.0 < self.q <= 1.0):
            raise ValueError(f"q must lie in (0, 1], got {self.q!r}")

    def _pgf_unchecked(self, s):
        # finite only for s < 1/(1-q); callers stay inside [0, 1]
        s = np.asarray(s, dtype=float) if np.ndim(s) else float(s)
        return self.q * s / (1.0 - (1.0 - self.q) * s)

    def mean(self) -> float:
        return 1.0 / self.q

    def sample(self, rng, size=None):
        if size is None:
            return int(rng.geometric(self.q))
        return rng.geometric(self.q, size=size).astype(np.int64)

    def pmf_head(self, tol=1e-12):
        if self.q == 1.0:
            return np.array([0.0, 1.0])
        kmax = max(1, math.ceil(math.log(tol) / math.log1p(-self.q)))
        k = np.arange(kmax + 1, dtype=float)
        h = self.q * (1.0 - self.q) ** (k - 1.0)
        h[0] = 0.0
        return h

    def max_draw(self, tail=1e-18):
        if self.q == 1.0:
            return 1
        return max(1, math.ceil(math.log(tail) / math.log1p(-self.q))) + 8

    def to_json_dict(self):
        return {"type": "shifted_geometric", "q": self.q}


@dataclass(frozen=True)
class Explicit(OffspringDist):
    """Finite pmf given as (value, probability) pairs; values >= 1."""

    values: tuple
    probs: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        prs = tuple(float(q) for q in self.probs)
        if len(vals) != len(prs) or not vals:
            raise ValueError("values and probs must be nonempty and of equal length")
        if any(v < 1 for v in vals):
            raise ValueError("litter sizes must be >= 1")
        if len(set(vals)) != len(vals):
            raise ValueError("duplicate litter sizes in pmf")
        if any(q < 0.0 for q in prs):
            raise ValueError("probabilities must be nonnegative")
        if abs(sum(prs) - 1.0) > _PMF_SUM_TOL:
            raise ValueError(f"pmf sums to {sum(prs)!r}, not 1 within {_PMF_SUM_TOL}")
        order = np.argsort(vals)
        object.__setattr__(self, "values", tuple(vals[i] for i in order))
        object.__setattr__(self, "probs", tuple(prs[i] for i in order))

    def _pgf_unchecked(self, s):
        s = np.asarray(s, dtype=float) if np.ndim(s) else float(s)
        out = 0.0
        for v, q in zip(self.values, self.probs):
            out = out + q * s**v
        return out

    def mean(self) -> float:
        return float(sum(v * q for v, q in zip(self.values, self.probs)))

    def sample(self, rng, size=None):
        vals = np.array(self.values, dtype=np.int64)
        if size is None:
            return int(vals[rng.choice(len(vals), p=self.probs)])
        return vals[rng.choice(len(vals), p=self.probs, size=size)]

    def pmf_head(self, tol=1e-12):
        h = np.zeros(max(self.values) + 1)
        for v, q in zip(self.values, self.probs):
            h[v] = q
        return h

    def max_draw(self, tail=1e-18):
        return max(self.values)

    def to_json_dict(self):
        return {"type": "explicit", "pmf": [[v, q] for v, q in zip(self.values, self.probs)]}


def dist_from_json_dict(d: dict) -> OffspringDist:
    kind = d.get("type")
    if kind == "constant":
        return Constant(int(d["k"]))
    if kind == "shifted_poisson":
        return ShiftedPoisson(float(d["rate"]))
    if kind == "shifted_geometric":
        return ShiftedGeometric(float(d["q"]))
    if kind == "explicit":
        pairs = d["pmf"]
        return Explicit(tuple(int(v) for v, _ in pairs), tuple(float(q) for _, q in pairs))
    raise ValueError(f"unknown offspring distribution type {kind!r}")


@dataclass(frozen=True)
class ModelParams:
    """Static parameters of the process.

    b, c > 0 control the death hazard b + c * xi of an edge with xi child
    edges; p is the cherry probability; kappa the litter vertex count.
    """

    b: float
    c: float
    p: float
    kappa: OffspringDist

    def __post_init__(self):
        if not (self.b > 0.0) or not math.isfinite(self.b):
            raise ValueError(f"b must be positive and finite, got {self.b!r}")
        if not (self.c > 0.0) or not math.isfinite(self.c):
            raise ValueError(f"c must be positive and finite, got {self.c!r}")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p must lie in [0, 1], got {self.p!r}")
        if not isinstance(self.kappa, OffspringDist):
            raise ValueError("kappa must be an OffspringDist")

    def to_json_dict(self) -> dict:
        return {"b": self.b, "c": self.c, "p": self.p, "kappa": self.kappa.to_json_dict()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "ModelParams":
        try:
            return cls(
                b=float(d["b"]),
                c=float(d["c"]),
                p=float(d["p"]),
                kappa=dist_from_json_dict(d["kappa"]),
            )
        except KeyError as exc:
            raise ValueError(f"missing model parameter {exc}") from exc


class Litter(NamedTuple):
    kappa: int
    cherries: int
    eps: int


def pgf_kappa(dist: OffspringDist, s):
    return dist.pgf(s)


def pgf_eps(params: ModelParams, z):
    """E[z^eps] = g_kappa(p z^2 + (1-p) z) for z in [0, 1]."""
    _check_unit_interval(z, "pgf argument")
    return _pgf_eps_unchecked(params, z)


def _pgf_eps_unchecked(params: ModelParams, z):
    z = np.asarray(z, dtype=float) if np.ndim(z) else float(z)
    return params.kappa._pgf_unchecked(params.p * z * z + (1.0 - params.p) * z)


def joint_pgf_kappa_eps(params: ModelParams, x, y):
    """E[x^kappa y^eps] = g_kappa(x y (p y + 1 - p)).

    x and y may lie outside [0, 1] individually as long as the composite
    argument x y (p y + 1 - p) stays inside [0, 1].
    """
    x = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    y = np.asarray(y, dtype=float) if np.ndim(y) else float(y)
    w = x * y * (params.p * y + 1.0 - params.p)
    _check_unit_interval(w, "composite pgf argument")
    return params.kappa._pgf_unchecked(w)


def mean_eps(params: ModelParams) -> float:
    """E(eps) = (1 + p) E(kappa)."""
    return (1.0 + params.p) * params.kappa.mean()


def sample_litter(params: ModelParams, rng: np.random.Generator) -> Litter:
    """Draw one litter: kappa vertices, Binomial(kappa, p) of them cherries."""
    kappa = int(params.kappa.sample(rng))
    cherries = int(rng.binomial(kappa, params.p))
    return Litter(kappa, cherries, kappa + cherries)
