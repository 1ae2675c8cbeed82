import json

import numpy as np
import pytest

from cherrygraph import model, montecarlo, sim


ONE = model.Constant(1)
FULL = model.ModelParams(b=0.1, c=0.1, p=1.0, kappa=ONE)
SUB = model.ModelParams(b=2.0, c=0.5, p=0.0, kappa=ONE)

STAT_NAMES = [
    "extinction_frequency", "edges_per_step", "vertices_per_step",
    "childless_fraction", "litters_per_edge", "jn_coefficient",
    "jn_step_ratio", "lifetime_est_censored", "isolation_frequency",
]


@pytest.fixture(scope="module")
def small_campaign():
    return montecarlo.run_campaign(FULL, 200, 424242, n_max=2000,
                                   clock=True, tracker="any")


def test_simulate_many_is_deterministic():
    a = montecarlo.simulate_many(FULL, 5, 99, n_max=300, clock=True)
    b = montecarlo.simulate_many(FULL, 5, 99, n_max=300, clock=True)
    assert [t.final for t in a] == [t.final for t in b]
    assert [t.run_index for t in a] == [0, 1, 2, 3, 4]
    finals = {t.final.jn for t in a}
    assert len(finals) == 5


def test_report_schema_is_fixed(small_campaign):
    report, trajs = small_campaign
    assert len(trajs) == report.replications == 200
    assert [r.name for r in report.rows] == STAT_NAMES
    assert report.surviving == sum(t.status == "completed" for t in trajs)
    doc = report.to_json_dict()
    assert set(doc) == {"params", "master_seed", "replications", "surviving",
                        "horizon", "clock", "tracker", "statistics", "warnings"}
    assert doc["horizon"] == {"n_max": 2000, "t_max": None}
    json.dumps(doc)  # must be serializable as-is


def test_report_statistics_are_sane(small_campaign):
    report, _ = small_campaign
    ext = report.row("extinction_frequency")
    assert ext.count == 200 and not ext.conditional
    assert abs(ext.z_score) < 6.0
    for name in ("edges_per_step", "vertices_per_step", "childless_fraction",
                 "jn_coefficient", "jn_step_ratio", "lifetime_est_censored"):
        row = report.row(name)
        assert row.conditional and row.count == report.surviving
        assert abs(row.z_score) < 6.0
    iso = report.row("isolation_frequency")
    assert iso.count > 0
    assert 0.0 <= iso.estimate <= 1.0


def test_subcritical_report_has_nulls_and_warning():
    report, trajs = montecarlo.run_campaign(SUB, 50, 7, n_max=10_000)
    assert all(t.status == "extinct" for t in trajs)
    assert report.surviving == 0
    assert report.row("extinction_frequency").estimate == 1.0
    assert report.row("edges_per_step").analytic is None
    assert report.row("edges_per_step").estimate is None
    assert report.row("lifetime_est_censored").estimate is None
    assert any("subcritical" in w for w in report.warnings)
    assert any("no surviving" in w for w in report.warnings)


def test_row_lookup_rejects_unknown_name(small_campaign):
    report, _ = small_campaign
    with pytest.raises(KeyError):
        report.row("edge_velocity")


def test_runs_csv_layout(tmp_path, small_campaign):
    _, trajs = small_campaign
    path = tmp_path / "runs.csv"
    montecarlo.write_runs_csv(trajs, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("run_index,status,steps,time,")
    assert len(lines) == 1 + len(trajs)
    first = lines[1].split(",")
    assert first[0] == "0"
    assert first[1] in ("completed", "extinct")
    # clocked campaign: the rate estimator column is populated
    assert first[12] != ""


def test_runs_csv_without_clock_leaves_rate_columns_empty(tmp_path):
    trajs = montecarlo.simulate_many(FULL, 3, 5, n_max=200, clock=False)
    path = tmp_path / "runs.csv"
    montecarlo.write_runs_csv(trajs, path)
    row = path.read_text().splitlines()[1].split(",")
    assert row[3] == "0.0"
    assert row[12] == "" and row[13] == ""
