"""End-to-end acceptance checks.

Each test prints one labelled pass/fail line per criterion (run with
``pytest tests/test_acceptance.py -v -s`` to see them).  The shared
campaign fixture simulates 10^4 replications of 10^5 steps and takes a
few minutes; everything else is fast.
"""

import math

import numpy as np
import pytest

from cherrygraph import analytic, genfun, model, montecarlo, numerics, oracle, sim


ONE = model.Constant(1)
FULL = model.ModelParams(b=0.1, c=0.1, p=1.0, kappa=ONE)
MILD = model.ModelParams(b=1.0, c=1.0, p=0.5, kappa=ONE)
POISSON = model.ModelParams(b=0.5, c=0.5, p=0.3, kappa=model.ShiftedPoisson(1.0))

INSTANCES = [FULL, MILD, POISSON]
IDS = ["full", "mild", "poisson"]
I_MAX = {FULL: 200, MILD: 120, POISSON: 400}

MASTER_SEED = 20260814
REPS = 10_000
HORIZON = 100_000


def report(criterion: str, ok: bool, detail: str) -> None:
    line = f"[acceptance] {criterion}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def campaign():
    return montecarlo.simulate_many(
        FULL, REPS, MASTER_SEED, n_max=HORIZON, clock=True,
        trackers=("any",), initial_capacity=1 << 18)


@pytest.fixture(scope="module")
def survivors(campaign):
    finals = [t.final for t in campaign if t.status == "completed"]
    assert len(finals) >= 500
    return finals


# -- criterion 1: dual-path pgf agreement ---------------------------------------

@pytest.mark.parametrize("params", INSTANCES, ids=IDS)
def test_criterion_1_dual_path_pgf(params):
    pmf = oracle.v_recursion(params, I_MAX[params])
    diff = max(abs(genfun.pgf_xi_lambda(params, z) - pmf.pgf_xi(z))
               for z in np.linspace(0.0, 1.0, 11))
    tol = 1e-6 + pmf.tail_mass
    report("criterion-1 dual-path pgf", diff <= tol,
           f"b={params.b} c={params.c} p={params.p}: max diff {diff:.2e} <= {tol:.2e}")


# -- criterion 2: closed-form anchors --------------------------------------------

def test_criterion_2_closed_form_anchors():
    worst_zero = worst_one = worst_m = 0.0
    for params in INSTANCES:
        worst_zero = max(worst_zero, abs(
            genfun.pgf_xi_lambda(params, 0.0) - params.b / (1.0 + params.b)))
        for val in (genfun.pgf_xi_lambda(params, 1.0),
                    genfun.pgf_eta_lambda(params, 1.0),
                    float(model.pgf_eps(params, 1.0)),
                    float(model.pgf_kappa(params.kappa, 1.0))):
            worst_one = max(worst_one, abs(val - 1.0))
        t = np.linspace(0.0, 200.0, 400_001)
        td = model.mean_eps(params) * float(np.trapezoid(analytic.survival(params, t), t))
        worst_m = max(worst_m, abs(analytic.criticality_index(params) / td - 1.0))
    ok = worst_zero <= 1e-10 and worst_one <= 1e-10 and worst_m <= 1e-6
    report("criterion-2 closed-form anchors", ok,
           f"pgf(0) err {worst_zero:.1e} <= 1e-10, pgf(1) err {worst_one:.1e} <= 1e-10, "
           f"time-domain m rel err {worst_m:.1e} <= 1e-6")


# -- criterion 3: Malthusian self-consistency -------------------------------------

def test_criterion_3_malthusian_self_consistency():
    worst_lhs = worst_td = worst_beta = 0.0
    beta_below = True
    for params in INSTANCES:
        alpha = analytic.malthusian_alpha(params)
        worst_lhs = max(worst_lhs, abs(analytic.mean_intensity(params, alpha) - 1.0))
        t = np.linspace(0.0, 200.0, 400_001)
        td = model.mean_eps(params) * float(
            np.trapezoid(np.exp(-alpha * t) * analytic.survival(params, t), t))
        worst_td = max(worst_td, abs(td - 1.0))
    for params in (FULL, POISSON):
        beta = analytic.degree_beta(params)
        worst_beta = max(worst_beta, abs(analytic.mean_intensity(params, beta) - 2.0))
        beta_below = beta_below and beta < analytic.malthusian_alpha(params)
    ok = worst_lhs <= 1e-9 and worst_td <= 1e-6 and worst_beta <= 1e-9 and beta_below
    report("criterion-3 growth exponents", ok,
           f"|LHS(alpha)-1| {worst_lhs:.1e} <= 1e-9, time-domain {worst_td:.1e} <= 1e-6, "
           f"|LHS(beta)-2| {worst_beta:.1e} <= 1e-9, beta<alpha {beta_below}")


# -- criterion 4: extinction triangulation ------------------------------------------

def test_criterion_4_extinction_triangulation(campaign):
    q = genfun.extinction_probability(FULL).value
    pmf = oracle.v_recursion(FULL, I_MAX[FULL])
    bracket = oracle.gw_extinction(pmf.xi_marginal())
    # the bracket carries truncation error only; allow for the ~1e-11 of
    # quadrature and arithmetic error in the two computed paths
    contained = (bracket.width < 1e-6
                 and bracket.lower - 1e-9 <= q <= bracket.upper + 1e-9)

    steps = np.array([t.extinct_step if t.extinct_step is not None else -1
                      for t in campaign])
    freq = float(((steps >= 0) & (steps <= 10_000)).mean())
    freq_doubled = float(((steps >= 0) & (steps <= 20_000)).mean())
    sigma = math.sqrt(q * (1.0 - q) / len(campaign))
    z = (freq - q) / sigma
    stable = abs(freq_doubled - freq) < sigma

    ok = contained and abs(z) < 4.0 and stable
    report("criterion-4 extinction triangulation", ok,
           f"fixed point {q:.6f} in [{bracket.lower:.6f}, {bracket.upper:.6f}] "
           f"(width {bracket.width:.1e}): {contained}; MC z {z:+.2f} (|z|<4); "
           f"horizon doubling shift {abs(freq_doubled - freq):.2e} < sigma {sigma:.2e}")


# -- criterion 5: ratio limits --------------------------------------------------------

def test_criterion_5_ratio_limits(survivors):
    s = analytic.ratios(FULL)
    checks = [
        ("E_n/n", [f.living_edges / f.steps for f in survivors], s.edges_per_step, 0.05),
        ("V_n/n", [f.vertices / f.steps for f in survivors], s.vertices_per_step, 0.05),
        ("O_n/E_n", [f.childless_edges / f.living_edges for f in survivors],
         s.childless_fraction, 0.05),
        ("B_n/T_n", [f.reproduction_events / f.edges_created for f in survivors],
         s.litters_per_edge, 0.05),
        ("J_n/n^2", [f.jn / f.steps**2 for f in survivors], s.jn_coefficient, 0.10),
        ("J_n/(n E_n)", [f.jn / (f.steps * f.living_edges) for f in survivors], 0.5, 0.05),
    ]
    details = []
    ok = True
    for name, vals, target, tol in checks:
        rel = abs(float(np.mean(vals)) / target - 1.0)
        ok = ok and rel <= tol
        details.append(f"{name} {rel:.4f}<={tol}")
    report("criterion-5 ratio limits", ok,
           f"{len(survivors)} surviving runs: " + ", ".join(details))


# -- criterion 6: continuous-time statistics --------------------------------------------

def test_criterion_6_continuous_time(survivors):
    target = 1.0 / model.mean_eps(FULL)
    lam1 = float(np.mean([f.jt / f.edges_created for f in survivors]))
    rel = abs(lam1 / target - 1.0)

    t_hi = numerics.find_root(lambda t: analytic.survival(FULL, t) - 1e-3, 0.01, 50.0)
    grid = np.linspace(t_hi / 50.0, t_hi, 50)
    sample = oracle.single_edge_life_mc(FULL, 1_000_000, seed=MASTER_SEED + 1,
                                        time_grid=grid)
    s = analytic.survival(FULL, grid)
    sigma = np.sqrt(s * (1.0 - s) / sample.reps)
    excess = float(np.max(np.abs(sample.survival_curve - s) / (4.0 * sigma)))

    ok = rel <= 0.05 and excess <= 1.0
    report("criterion-6 continuous time", ok,
           f"lambda1 rel err {rel:.4f} <= 0.05; survival curve worst "
           f"|diff|/4sigma {excess:.3f} <= 1 on 50 points")


# -- criterion 7: isolation probability ----------------------------------------------

def test_criterion_7_isolation(campaign):
    outcomes = [t.final.trackers[0] for t in campaign]
    bound = [o for o in outcomes if o.vertex is not None]
    target = genfun.isolation_probability(FULL, "generic")
    sigma = math.sqrt(target * (1.0 - target) / len(bound))

    def freq(h):
        return sum(o.isolation_step is not None and o.isolation_step <= h
                   for o in bound) / len(bound)

    f3, f4, f5 = freq(1_000), freq(10_000), freq(100_000)
    ok = f5 <= target + 3.0 * sigma and f3 <= f4 <= f5
    report("criterion-7 isolation", ok,
           f"{len(bound)} bound trackers: freq(1e3..1e5) {f3:.5f} <= {f4:.5f} <= {f5:.5f}, "
           f"bound {target + 3 * sigma:.5f} (analytic {target:.5f})")


# -- criterion 8: mean identities ------------------------------------------------------

def test_criterion_8_mean_identities():
    h = 1e-4
    worst = 0.0
    for params in INSTANCES:
        def deriv(pgf):
            return (3.0 * pgf(params, 1.0) - 4.0 * pgf(params, 1.0 - h)
                    + pgf(params, 1.0 - 2.0 * h)) / (2.0 * h)
        dxi = deriv(genfun.pgf_xi_lambda)
        deta = deriv(genfun.pgf_eta_lambda)
        worst = max(worst, abs(deta - 0.5 * dxi) / (0.5 * dxi))

    rng = np.random.default_rng(MASTER_SEED)
    n = 1_000_000
    eps = np.empty(n)
    for i in range(n):
        eps[i] = model.sample_litter(POISSON, rng).eps
    se = float(eps.std(ddof=1)) / math.sqrt(n)
    gap = abs(float(eps.mean()) - (1.0 + POISSON.p) * POISSON.kappa.mean())

    ok = worst <= 1e-4 and gap <= 4.0 * se
    report("criterion-8 mean identities", ok,
           f"|eta'-xi'/2| rel {worst:.2e} <= 1e-4; litter mean gap {gap:.2e} "
           f"<= 4se {4 * se:.2e} over 1e6 draws")


# -- criterion 9: structural invariants -------------------------------------------------

def test_criterion_9_structural_invariants():
    for attempt in range(20):
        st = sim.init(FULL, seed=MASTER_SEED + attempt)
        sim.track_vertex(st, "any")
        done = True
        for k in range(1, 101):
            reason = st.advance(n_max=10_000 * k)
            sim.check_invariants(st)
            if reason == "extinct":
                done = False
                break
        if done:
            c = st.counters()
            report("criterion-9 structural invariants", c["n"] == 1_000_000,
                   f"checked every 10^4 steps of a 10^6-step run "
                   f"(E={c['E']}, V={c['V']}, seed {MASTER_SEED + attempt})")
            return
    pytest.fail("twenty consecutive runs went extinct; simulator is implausible")
