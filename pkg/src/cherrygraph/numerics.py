"""Quadrature and root finding for the analytic layer.

The survival and criticality integrals all reduce to weighted integrals
of smooth factors over (0, 1].  The u^(theta-1) endpoint weight is removed
by the substitution u = w^(1/theta) before adaptive integration; the
Gauss rules never evaluate at interval endpoints, so integrable endpoint
singularities (such as a -ln u factor) are handled by subdivision.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadratureSpec",
    "ConvergenceError",
    "BracketError",
    "adaptive_quadrature",
    "integrate_power_weighted",
    "integrate_inner_exponent",
    "find_root",
]


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 2000


DEFAULT_QUADRATURE = QuadratureSpec()


class ConvergenceError(RuntimeError):
    """Tolerance not met; carries the best estimate and its error bound."""

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(f"{message} (estimate={estimate!r}, error_bound={error_bound!r})")
        self.estimate = estimate
        self.error_bound = error_bound


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


_COARSE_X, _COARSE_W = np.polynomial.legendre.leggauss(10)
_FINE_X, _FINE_W = np.polynomial.legendre.leggauss(21)


def _panel(f, a: float, b: float):
    """Integral estimate on [a, b] from the fine rule, error from the pair."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = np.concatenate((mid + half * _COARSE_X, mid + half * _FINE_X))
    vals = np.asarray(f(nodes), dtype=float)
    if vals.shape != nodes.shape or not np.all(np.isfinite(vals)):
        raise ValueError(f"integrand returned invalid values on [{a}, {b}]")
    coarse = half * float(_COARSE_W @ vals[:10])
    fine = half * float(_FINE_W @ vals[10:])
    return fine, abs(fine - coarse)


def adaptive_quadrature(f, a: float, b: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Integrate a vectorized integrand over [a, b] to the given tolerance.

    Subdivides the interval with the largest error estimate until the
    summed error is below max(abs_tol, rel_tol * |integral|), then returns
    the integral.  Raises ConvergenceError when the subdivision budget is
    exhausted.
    """
    if not (b > a):
        raise ValueError(f"empty integration interval [{a}, {b}]")
    val, err = _panel(f, a, b)
    # heap entries: (-err, a, b, val, err); total tracked incrementally
    heap = [(-err, a, b, val, err)]
    total = val
    total_err = err
    for _ in range(spec.max_subdivisions):
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            return total
        neg, lo, hi, val, err = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # interval at floating point resolution; keep its estimate
            heapq.heappush(heap, (0.0, lo, hi, val, err))
            total_err -= err
            continue
        lval, lerr = _panel(f, lo, mid)
        rval, rerr = _panel(f, mid, hi)
        total += lval + rval - val
        total_err += lerr + rerr - err
        heapq.heappush(heap, (-lerr, lo, mid, lval, lerr))
        heapq.heappush(heap, (-rerr, mid, hi, rval, rerr))
    if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
        return total
    raise ConvergenceError("quadrature did not converge", total, total_err)


def integrate_power_weighted(f, theta: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Compute int_0^1 u^(theta-1) f(u) du for theta > 0.

    For theta >= 1 the weight u^(theta-1) is continuous and the product is
    integrated directly.  For theta < 1 the weight is singular at 0, so the
    substitution u = w^(1/theta) absorbs it, leaving (1/theta) times the
    integral of f(w^(1/theta)) over (0, 1).  f must accept numpy arrays with
    entries in (0, 1).
    """
    if not (theta > 0.0) or not math.isfinite(theta):
        raise ValueError(f"theta must be positive and finite, got {theta!r}")
    if theta >= 1.0:

        def g(u):
            return np.power(u, theta - 1.0) * f(u)

        return adaptive_quadrature(g, 0.0, 1.0, spec)

    inv = 1.0 / theta

    def h(w):
        return f(np.power(w, inv))

    return adaptive_quadrature(h, 0.0, 1.0, spec) / theta


def integrate_inner_exponent(params, u: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Compute (1/c) int_u^1 g_eps(v) / v dv for u in [0, 1].

    The integrand extends continuously to v = 0 (its limit there is
    P(eps = 1)), so u = 0 is admissible and needs no special handling:
    the quadrature only evaluates at interior nodes.
    """
    from . import model

    if not (0.0 <= u <= 1.0):
        raise ValueError(f"u must lie in [0, 1], got {u!r}")
    if u == 1.0:
        return 0.0

    def h(v):
        return model.pgf_eps(params, v) / v

    return adaptive_quadrature(h, u, 1.0, spec) / params.c


def find_root(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Locate a sign change of f in [lo, hi] to within tol.

    Bisection with a secant step whenever the secant candidate falls
    safely inside the current bracket; raises BracketError when
    f(lo) and f(hi) have the same sign.
    """
    if not (lo < hi):
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketError(f"f({lo}) = {flo} and f({hi}) = {fhi} have the same sign")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        x = None
        if fhi != flo:
            cand = (lo * fhi - hi * flo) / (fhi - flo)
            margin = 0.01 * (hi - lo)
            if lo + margin < cand < hi - margin:
                x = cand
        if x is None:
            x = 0.5 * (lo + hi)
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0.0) == (flo > 0.0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
    return lo if abs(flo) <= abs(fhi) else hi
