"""Generating functions of an edge's total progeny and of a vertex's degree.

The joint transform of (vertices added, edges added) over an edge's whole
life has the closed integral form

    G(x, y) = (1/c) int_0^1 u^((1+b)/c - 1)
                  exp( (1/c) int_u^1 g_ke(x/y, s y) ds/s ) du

with g_ke the joint litter pgf (the integrand extends continuously to
s = 0 because litters are nonempty); extinction and isolation
probabilities are smallest fixed points of the derived one-variable pgfs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import model, numerics
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec

__all__ = [
    "FixedPointResult",
    "big_g",
    "pgf_xi_lambda",
    "pgf_eta_lambda",
    "extinction_probability",
    "degree_extinction",
    "isolation_probability",
]

_S_NODES, _S_WEIGHTS = np.polynomial.legendre.leggauss(64)

_FIXED_POINT_TOL = 1e-13
_MAX_FIXED_POINT_ITER = 10**6


@dataclass(frozen=True)
class FixedPointResult:
    value: float
    iterations: int
    residual: float


def _litter_pgf_on_grid(params: model.ModelParams, x: float, y: float, s):
    """g_ke(x/y, s y) written as g_kappa(x s (p s y + 1 - p)); s is an array."""
    arg = x * s * (params.p * s * y + (1.0 - params.p))
    hi = float(np.max(arg)) if arg.size else 0.0
    lo = float(np.min(arg)) if arg.size else 0.0
    if lo < -1e-12 or hi > 1.0 + 1e-9:
        raise ValueError(f"composite pgf argument escapes [0, 1]: range [{lo}, {hi}]")
    return params.kappa._pgf_unchecked(np.clip(arg, 0.0, 1.0))


def _weighted_exp_integral(params: model.ModelParams, x: float, y: float, spec: QuadratureSpec) -> float:
    """(1/c) int_0^1 u^((1+b)/c-1) exp( (1/c) int_u^1 g_ke(x/y, s y) ds/s ) du.

    The inner integrand g_ke(x/y, s y)/s is smooth on [0, 1] and is
    evaluated with a fixed 64-node Gauss rule per outer node.
    """

    def f(u):
        half = 0.5 * (1.0 - u)
        mid = 0.5 * (1.0 + u)
        s = mid[:, None] + half[:, None] * _S_NODES[None, :]
        vals = _litter_pgf_on_grid(params, x, y, s) / s
        return np.exp(half * (vals @ _S_WEIGHTS) / params.c)

    theta = (1.0 + params.b) / params.c
    return numerics.integrate_power_weighted(f, theta, spec) / params.c


def big_g(params: model.ModelParams, x: float, y: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """The transform G(x, y); requires the composite argument to stay in [0, 1]."""
    if x < 0.0 or y < 0.0:
        raise ValueError("transform arguments must be nonnegative")
    return _weighted_exp_integral(params, x, y, spec)


def pgf_xi_lambda(params: model.ModelParams, z: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """pgf of the total number of child edges over an edge's whole life.

    Equals 1 - (1 - g_eps(z)) G(z, z); at z = 0 this reduces to b/(1+b),
    the probability of dying before any reproduction.
    """
    if not (0.0 <= z <= 1.0):
        raise ValueError(f"pgf argument must lie in [0, 1], got {z!r}")
    ge = float(model.pgf_eps(params, z))
    return 1.0 - (1.0 - ge) * _weighted_exp_integral(params, z, z, spec)


def _f_joint(params: model.ModelParams, x: float, y: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Joint transform f(x, y) = 1 - (1 - g_ke(x, y)) G(x y, y)."""
    gj = float(model.joint_pgf_kappa_eps(params, x, y))
    return 1.0 - (1.0 - gj) * _weighted_exp_integral(params, x * y, y, spec)


def pgf_eta_lambda(params: model.ModelParams, z: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """pgf of the lifetime degree contribution of one edge at a fixed vertex.

    Each cherry child attaches to the vertex; each semi-cherry child does
    so with probability 1/2.  Obtained from the joint transform at
    x = (1+z)^2 / (4z), y = 2z / (1+z), written so z = 0 is regular:
    the composite argument is a(s, z) = s (2 p s z + (1-p)(1+z)) / 2.
    """
    if not (0.0 <= z <= 1.0):
        raise ValueError(f"pgf argument must lie in [0, 1], got {z!r}")
    a1 = 0.5 * (2.0 * params.p * z + (1.0 - params.p) * (1.0 + z))
    gj = float(params.kappa._pgf_unchecked(min(a1, 1.0)))
    x_times_y = 0.5 * (1.0 + z)
    y = 2.0 * z / (1.0 + z)
    return 1.0 - (1.0 - gj) * _weighted_exp_integral(params, x_times_y, y, spec)


def _smallest_fixed_point(g, max_iter: int = _MAX_FIXED_POINT_ITER) -> FixedPointResult:
    """Monotone iteration z <- g(z) from 0; converges to the smallest root."""
    z = 0.0
    for k in range(1, max_iter + 1):
        z_next = g(z)
        step = z_next - z
        z = z_next
        if step < _FIXED_POINT_TOL:
            return FixedPointResult(value=min(z, 1.0), iterations=k, residual=abs(step))
    return FixedPointResult(value=min(z, 1.0), iterations=max_iter, residual=abs(step))


@functools.lru_cache(maxsize=128)
def extinction_probability(params: model.ModelParams, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> FixedPointResult:
    """Probability that the progeny of a single edge dies out."""
    return _smallest_fixed_point(lambda z: pgf_xi_lambda(params, z, spec))


@functools.lru_cache(maxsize=128)
def degree_extinction(params: model.ModelParams, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> FixedPointResult:
    """Smallest fixed point of the degree-offspring pgf (one founding edge)."""
    return _smallest_fixed_point(lambda z: pgf_eta_lambda(params, z, spec))


def isolation_probability(
    params: model.ModelParams,
    kind: str = "generic",
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Probability that a newborn vertex is eventually isolated.

    A cherry vertex starts with two edges whose degree contributions are
    independent, a semi-cherry vertex with one; "generic" mixes the two
    with weights (p, 1-p).
    """
    z = degree_extinction(params, spec).value
    if kind == "cherry":
        return z * z
    if kind == "semi":
        return z
    if kind == "generic":
        return params.p * z * z + (1.0 - params.p) * z
    raise ValueError(f"unknown attachment kind {kind!r}")
