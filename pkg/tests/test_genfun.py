import math

import numpy as np
import pytest

from cherrygraph import analytic, genfun, model, oracle


ONE = model.Constant(1)
FULL = model.ModelParams(b=0.1, c=0.1, p=1.0, kappa=ONE)
MILD = model.ModelParams(b=1.0, c=1.0, p=0.5, kappa=ONE)
POISSON = model.ModelParams(b=0.5, c=0.5, p=0.3, kappa=model.ShiftedPoisson(1.0))
MID = model.ModelParams(b=1.0, c=1.0, p=1.0, kappa=ONE)
SUB = model.ModelParams(b=2.0, c=0.5, p=0.0, kappa=ONE)

INSTANCES = [FULL, MILD, POISSON]
IDS = ["full", "mild", "poisson"]


def one_sided_derivative_at_one(f, h=1e-4):
    return (3.0 * f(1.0) - 4.0 * f(1.0 - h) + f(1.0 - 2.0 * h)) / (2.0 * h)


# -- the transform G ----------------------------------------------------------

@pytest.mark.parametrize("params", INSTANCES, ids=IDS)
def test_big_g_at_x_zero_is_mean_lifetime_lower_bound(params):
    # with x = 0 the exponent vanishes and only the bare decay remains
    for y in (0.0, 0.5, 1.0):
        assert genfun.big_g(params, 0.0, y) == pytest.approx(1.0 / (1.0 + params.b), rel=1e-10)


@pytest.mark.parametrize("params", INSTANCES, ids=IDS)
def test_big_g_at_one_one_is_mean_lifetime(params):
    # G(1,1) = E(lambda) = m / E(eps), and the death rate is at least b
    want = analytic.criticality_index(params) / model.mean_eps(params)
    got = genfun.big_g(params, 1.0, 1.0)
    assert got == pytest.approx(want, rel=1e-9)
    assert got < 1.0 + 1.0 / params.b


def test_big_g_closed_form_without_cherries():
    # p = 0, kappa = 1, b = c = 1: G(x, y) = int_0^1 u e^{x(1-u)} du, free of y;
    # at x = 1/2 this is 4 sqrt(e) - 6
    params = model.ModelParams(b=1.0, c=1.0, p=0.0, kappa=ONE)
    want = 4.0 * math.sqrt(math.e) - 6.0
    assert genfun.big_g(params, 0.5, 0.5) == pytest.approx(want, abs=1e-10)
    assert genfun.big_g(params, 0.5, 1.0) == pytest.approx(want, abs=1e-10)


def test_big_g_rejects_negative_arguments():
    with pytest.raises(ValueError):
        genfun.big_g(FULL, -0.1, 0.5)
    with pytest.raises(ValueError):
        genfun.big_g(FULL, 2.0, 1.0)


# -- whole-life pgfs ----------------------------------------------------------

@pytest.mark.parametrize("params", INSTANCES, ids=IDS)
def test_pgf_anchors(params):
    assert genfun.pgf_xi_lambda(params, 1.0) == pytest.approx(1.0, abs=1e-10)
    assert genfun.pgf_eta_lambda(params, 1.0) == pytest.approx(1.0, abs=1e-10)
    assert genfun.pgf_xi_lambda(params, 0.0) == pytest.approx(
        params.b / (1.0 + params.b), abs=1e-10)


def test_pgf_eta_at_zero_all_cherries():
    # every child contributes degree, so eta = 0 means no children at all
    assert genfun.pgf_eta_lambda(FULL, 0.0) == pytest.approx(
        FULL.b / (1.0 + FULL.b), abs=1e-10)


@pytest.mark.parametrize("params", INSTANCES, ids=IDS)
def test_pgf_xi_matches_factorised_form(params):
    for z in np.linspace(0.0, 1.0, 7):
        direct = 1.0 - (1.0 - float(model.pgf_eps(params, z))) * genfun.big_g(params, z, z)
        assert genfun.pgf_xi_lambda(params, z) == pytest.approx(direct, abs=1e-12)


@pytest.mark.parametrize("params", INSTANCES, ids=IDS)
def test_pgf_eta_matches_literal_substitution(params):
    # away from z = 0 the change of variables is regular and can be composed
    # from public pieces
    for z in np.linspace(0.1, 1.0, 7):
        x = (1.0 + z) ** 2 / (4.0 * z)
        y = 2.0 * z / (1.0 + z)
        gj = float(model.joint_pgf_kappa_eps(params, x, y))
        literal = 1.0 - (1.0 - gj) * genfun.big_g(params, x * y, y)
        assert genfun.pgf_eta_lambda(params, z) == pytest.approx(literal, abs=1e-10)


@pytest.mark.parametrize("params", INSTANCES, ids=IDS)
@pytest.mark.parametrize("pgf", [genfun.pgf_xi_lambda, genfun.pgf_eta_lambda],
                         ids=["xi", "eta"])
def test_pgfs_convex_and_nondecreasing(params, pgf):
    grid = np.linspace(0.0, 1.0, 101)
    vals = np.array([pgf(params, z) for z in grid])
    assert np.all(np.diff(vals) >= -1e-9)
    assert np.all(np.diff(vals, 2) >= -1e-9)
    assert np.all((vals >= 0.0) & (vals <= 1.0 + 1e-12))


@pytest.mark.parametrize("z", [-0.01, 1.01])
def test_pgfs_reject_arguments_outside_unit_interval(z):
    with pytest.raises(ValueError):
        genfun.pgf_xi_lambda(FULL, z)
    with pytest.raises(ValueError):
        genfun.pgf_eta_lambda(FULL, z)


@pytest.mark.parametrize("params,i_max", [(FULL, 200), (MILD, 120), (POISSON, 400)],
                         ids=IDS)
def test_pgfs_match_recursion_oracle(params, i_max):
    pmf = oracle.v_recursion(params, i_max)
    for z in np.linspace(0.0, 1.0, 11):
        assert abs(genfun.pgf_xi_lambda(params, z) - pmf.pgf_xi(z)) <= 1e-8 + pmf.tail_mass
        assert abs(genfun.pgf_eta_lambda(params, z) - pmf.eta_transform(z)) <= 1e-8 + pmf.tail_mass


@pytest.mark.parametrize("params", INSTANCES, ids=IDS)
def test_derivatives_at_one_recover_means(params):
    m = analytic.criticality_index(params)
    dxi = one_sided_derivative_at_one(lambda z: genfun.pgf_xi_lambda(params, z))
    deta = one_sided_derivative_at_one(lambda z: genfun.pgf_eta_lambda(params, z))
    assert dxi == pytest.approx(m, rel=1e-5)
    assert deta == pytest.approx(m / 2.0, rel=1e-5)


# -- extinction and isolation --------------------------------------------------

def test_extinction_subcritical_is_certain():
    res = genfun.extinction_probability(SUB)
    assert res.value == pytest.approx(1.0, abs=1e-9)


def test_extinction_frozen_values():
    res = genfun.extinction_probability(FULL)
    assert res.value == pytest.approx(0.09273042103105378, rel=1e-9)
    assert res.residual < 1e-12
    mild = genfun.extinction_probability(MILD)
    assert mild.value == pytest.approx(0.9721607202711063, rel=1e-9)


@pytest.mark.parametrize("params", INSTANCES, ids=IDS)
def test_extinction_is_smallest_fixed_point(params):
    res = genfun.extinction_probability(params)
    assert 0.0 < res.value < 1.0
    assert genfun.pgf_xi_lambda(params, res.value) == pytest.approx(res.value, abs=1e-9)
    # monotone iteration from zero stays below the fixed point
    z = 0.0
    for _ in range(20):
        z_next = genfun.pgf_xi_lambda(params, z)
        assert z_next >= z - 1e-15
        assert z_next <= res.value + 1e-9
        z = z_next


def test_degree_extinction_certain_when_halved_mean_below_one():
    assert 1.0 < analytic.criticality_index(MID) < 2.0
    assert genfun.degree_extinction(MID).value == pytest.approx(1.0, abs=1e-9)
    for kind in ("cherry", "semi", "generic"):
        assert genfun.isolation_probability(MID, kind) == pytest.approx(1.0, abs=1e-9)


def test_isolation_frozen_values():
    z = genfun.degree_extinction(FULL).value
    assert z == pytest.approx(0.11972584295185773, rel=1e-9)
    assert genfun.isolation_probability(FULL, "semi") == pytest.approx(z, rel=1e-12)
    assert genfun.isolation_probability(FULL, "cherry") == pytest.approx(
        0.014334277470532902, rel=1e-9)
    assert genfun.isolation_probability(FULL, "cherry") == pytest.approx(z * z, rel=1e-12)


@pytest.mark.parametrize("params", INSTANCES, ids=IDS)
def test_isolation_kind_mixture(params):
    z = genfun.degree_extinction(params).value
    want = params.p * z * z + (1.0 - params.p) * z
    assert genfun.isolation_probability(params, "generic") == pytest.approx(want, rel=1e-12)


def test_isolation_rejects_unknown_kind():
    with pytest.raises(ValueError):
        genfun.isolation_probability(FULL, "stem")
