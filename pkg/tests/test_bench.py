import csv
import xml.etree.ElementTree as ET
from math import inf

import numpy as np
import pytest

from natr.bench import (ProfileCurve, RunRecord, export_csv,
                        export_curves_csv, export_records_csv, export_svg,
                        load_records_csv, performance_profile, run_suite)
from natr.solver import TrustRegionConfig

SMALL_SUITE = [("SROSENBR", 10), ("TRIDIA", 10)]
TWO_SOLVERS = [("natr", TrustRegionConfig(policy="natr")),
               ("iatr", TrustRegionConfig(policy="iatr"))]


def record(problem, solver, fevals, status="converged", iters=1, time=0.1):
    return RunRecord(problem, 10, solver, status, iters, fevals, time)


def hand_example():
    # two solvers, two problems, costs A: (1, 4), B: (2, 2)
    return [
        record("P1", "A", 1), record("P2", "A", 4),
        record("P1", "B", 2), record("P2", "B", 2),
    ]


def test_grid_cardinality():
    records = run_suite(SMALL_SUITE, TWO_SOLVERS)
    assert len(records) == 4
    keys = {(r.problem, r.solver) for r in records}
    assert keys == {("SROSENBR", "natr"), ("SROSENBR", "iatr"),
                    ("TRIDIA", "natr"), ("TRIDIA", "iatr")}


def test_budget_exhaustion_recorded_as_failure():
    records = run_suite(SMALL_SUITE, TWO_SOLVERS, max_fevals=3)
    assert all(r.status == "max-fevals" for r in records)
    assert all(r.failed for r in records)
    curves = performance_profile(records, "fevals")
    assert all(c.points == () for c in curves)


def test_parallel_matches_serial():
    serial = run_suite(SMALL_SUITE, TWO_SOLVERS, parallelism=1)
    parallel = run_suite(SMALL_SUITE, TWO_SOLVERS, parallelism=4)
    for a, b in zip(serial, parallel):
        assert (a.problem, a.dim, a.solver) == (b.problem, b.dim, b.solver)
        assert a.status == b.status
        assert a.iters == b.iters
        assert a.fevals == b.fevals


def test_hand_computed_profile():
    # ratios: P1 -> A 1, B 2; P2 -> A 2, B 1; pooled taus (1, 2)
    curves = {c.solver: c.points for c in
              performance_profile(hand_example(), "fevals")}
    assert curves["A"] == ((1.0, 0.5), (2.0, 1.0))
    assert curves["B"] == ((1.0, 0.5), (2.0, 1.0))


def test_failed_solver_never_reaches_one():
    records = hand_example()
    records[1] = record("P2", "A", 4, status="max-fevals")
    curves = {c.solver: c for c in performance_profile(records, "fevals")}
    rho_a = [rho for _, rho in curves["A"].points]
    assert max(rho_a) == 0.5
    assert curves["B"].points[-1][1] == 1.0


def test_single_solver_profile():
    records = [record("P1", "A", 3), record("P2", "A", 7),
               record("P3", "A", 2, status="numerical-failure")]
    (curve,) = performance_profile(records, "fevals")
    assert curve.points[0] == (1.0, pytest.approx(2.0 / 3.0))


def test_all_failed_problems_dropped():
    records = hand_example() + [
        record("P3", "A", 9, status="max-iters"),
        record("P3", "B", 9, status="numerical-failure"),
    ]
    curves = {c.solver: c.points for c in
              performance_profile(records, "fevals")}
    # P3 is dropped from the denominator entirely
    assert curves["A"] == ((1.0, 0.5), (2.0, 1.0))


def test_profile_validation_errors():
    records = hand_example()
    with pytest.raises(ValueError):
        performance_profile(records + [record("P1", "A", 5)], "fevals")
    with pytest.raises(ValueError):
        performance_profile(records[:3], "fevals")
    with pytest.raises(ValueError):
        performance_profile(records, "nonsense")


def test_profile_properties_on_random_tables():
    # monotone, bounded, at least one winner at tau = 1, and invariant
    # under uniform positive scaling of all costs
    rng = np.random.default_rng(42)
    for _ in range(100):
        n_prob = int(rng.integers(2, 7))
        n_solv = int(rng.integers(2, 5))
        costs = rng.uniform(1.0, 100.0, size=(n_prob, n_solv))
        failed = rng.random(size=costs.shape) < 0.15
        records, scaled = [], []
        for i in range(n_prob):
            for j in range(n_solv):
                status = "max-fevals" if failed[i, j] else "converged"
                records.append(RunRecord(f"P{i}", 5, f"s{j}", status, 1,
                                         int(costs[i, j]), 1.0))
                scaled.append(RunRecord(f"P{i}", 5, f"s{j}", status, 1,
                                        int(costs[i, j]) * 7, 1.0))
        if all(failed[i].all() for i in range(n_prob)):
            continue
        curves = performance_profile(records, "fevals")
        for c in curves:
            rhos = [rho for _, rho in c.points]
            assert all(b >= a for a, b in zip(rhos, rhos[1:]))
            assert all(0.0 <= r <= 1.0 for r in rhos)
            denom = sum(1 for i in range(n_prob) if not failed[i].all())
            for r in rhos:
                assert abs(r * denom - round(r * denom)) < 1e-9
        if curves[0].points:
            at_one = sum(c.points[0][1] for c in curves
                         if c.points and c.points[0][0] == 1.0)
            assert at_one >= 1.0 - 1e-12
        assert performance_profile(scaled, "fevals") == curves


def test_records_csv_round_trip(tmp_path):
    records = run_suite(SMALL_SUITE, TWO_SOLVERS)
    path = tmp_path / "records.csv"
    export_records_csv(records, path)
    text = path.read_text()
    assert text.splitlines()[0] == "problem,dim,solver,status,iters,fevals,time_s"
    assert "\r" not in text
    back = load_records_csv(path)
    for a, b in zip(records, back):
        assert (a.problem, a.dim, a.solver, a.status, a.iters, a.fevals) == \
               (b.problem, b.dim, b.solver, b.status, b.iters, b.fevals)
        assert a.wall_time == b.wall_time


def test_curves_csv(tmp_path):
    path = tmp_path / "curves.csv"
    export_curves_csv([], path)
    assert path.read_text() == "solver,tau,rho\n"
    curves = performance_profile(hand_example(), "fevals")
    export_csv(curves, path)
    rows = list(csv.reader(path.read_text().splitlines()))
    assert rows[0] == ["solver", "tau", "rho"]
    assert len(rows) - 1 == 4  # 2 solvers x 2 pooled ratio points


def test_export_csv_dispatches_on_records(tmp_path):
    path = tmp_path / "auto.csv"
    export_csv(hand_example(), path)
    assert path.read_text().startswith("problem,dim,solver")


def test_svg_step_chart(tmp_path):
    curves = performance_profile(hand_example(), "fevals")
    for log2_axis in (False, True):
        path = tmp_path / f"profile_{log2_axis}.svg"
        export_svg(curves, path, log2_axis=log2_axis)
        root = ET.fromstring(path.read_text())
        assert root.tag.endswith("svg")
        assert root.attrib["version"] == "1.1"
        polylines = [el for el in root.iter()
                     if el.tag.endswith("polyline")]
        assert len(polylines) == len(curves)
        labels = {el.text for el in root.iter() if el.tag.endswith("text")}
        assert {"A", "B"} <= labels


def test_svg_write_error_has_path_context(tmp_path):
    curves = performance_profile(hand_example(), "fevals")
    bad = tmp_path / "missing-dir" / "out.svg"
    with pytest.raises(OSError) as err:
        export_svg(curves, bad)
    assert "out.svg" in str(err.value)


def test_time_index_uses_wall_time():
    records = [record("P1", "A", 1, time=0.5), record("P1", "B", 1, time=1.0)]
    curves = {c.solver: c.points for c in
              performance_profile(records, "time")}
    assert curves["A"][0] == (1.0, 1.0)
    assert curves["B"] == ((1.0, 0.0), (2.0, 1.0))


def test_run_suite_rejects_empty_and_duplicate_labels():
    with pytest.raises(ValueError):
        run_suite([], TWO_SOLVERS)
    with pytest.raises(ValueError):
        run_suite(SMALL_SUITE, [])
    dup = [("x", TrustRegionConfig()), ("x", TrustRegionConfig())]
    with pytest.raises(ValueError):
        run_suite(SMALL_SUITE, dup)
