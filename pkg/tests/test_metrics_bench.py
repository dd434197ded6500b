import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cutmatch import bench
from cutmatch.metrics import cut_accuracy, inlier_accuracy, matching_accuracy


def test_cut_accuracy_examples():
    gt = np.array([1, 1, -1, -1])
    assert cut_accuracy(gt, gt) == 1.0
    assert cut_accuracy(-gt, gt) == 1.0
    gt40 = np.r_[np.ones(20), -np.ones(20)]
    lab = gt40.copy()
    lab[:10] *= -1
    assert cut_accuracy(lab, gt40) == 0.75
    with pytest.raises(ValueError):
        cut_accuracy([1], [1, 1])


@given(st.lists(st.sampled_from([-1, 1]), min_size=2, max_size=50), st.integers(0, 1000))
def test_cut_accuracy_flip_invariant(labels, seed):
    labels = np.array(labels)
    gt = np.random.default_rng(seed).choice([-1, 1], size=len(labels))
    a = cut_accuracy(labels, gt)
    assert a == cut_accuracy(-labels, gt) and 0.5 <= a <= 1


def test_matching_accuracy_examples():
    pi = np.r_[np.arange(20, 40), np.arange(20)]
    assert matching_accuracy(pi, pi) == 1.0
    assert matching_accuracy(np.roll(pi, 1), pi) == 0.0
    s = pi.copy()
    s[16:] = np.roll(s[16:], 1)
    assert matching_accuracy(s, pi) == 0.4
    with pytest.raises(ValueError):
        matching_accuracy([0], [0, 1])
    assert inlier_accuracy([0, 1, 2], [0, 2, -1]) == 0.5


def test_grid_sizes():
    assert len(bench.grid("5.2")) == 20
    assert len(bench.grid("5.1")) == 9 + 6 + 5
    with pytest.raises(ValueError):
        bench.grid("6.0")


def test_seeds_deterministic():
    a = bench.trial_seeds(1, 3, 4)
    assert a == bench.trial_seeds(1, 3, 4)
    assert len({s for row in a for s in row}) == 12
    assert a != bench.trial_seeds(2, 3, 4)


def test_sweep_rows_and_noiseless_cell(tmp_path):
    cells = [{"axis": "gamma", "gamma": -1.0, "sigma": 0.0, "mu": 1.0, "rho": 0.0}]
    res = bench.run_sweep("5.2", trials=2, seed=3, cells=cells)
    solvers = bench.solver_names("5.2")
    metrics_per_solver = {s: len(bench._metrics_for("5.2", s)) for s in solvers}
    assert len(res.rows) == sum(metrics_per_solver.values())
    row = {(r["solver"], r["metric"]): r for r in res.rows}
    assert row[("cutmatch_200_50", "matching_accuracy")]["mean"] == 1.0
    res.write_csv(tmp_path / "s.csv")
    res.write_json(tmp_path / "s.json")
    header = (tmp_path / "s.csv").read_text().splitlines()[0]
    assert header.endswith("solver,metric,mean,std,n_trials,mean_runtime_ms")


def test_sweep_parallel_equals_serial():
    cells = bench.gm_grid()[:3]
    a = bench.run_sweep("5.1", trials=2, seed=7, cells=cells, jobs=1)
    b = bench.run_sweep("5.1", trials=2, seed=7, cells=cells, jobs=2)
    strip = lambda rows: [{k: v for k, v in r.items() if k != "mean_runtime_ms"} for r in rows]
    assert strip(a.rows) == strip(b.rows)


def test_sweep_records_failures(monkeypatch):
    def boom(params, seed, lambdas=None, cfg=None):
        raise RuntimeError("boom")

    monkeypatch.setattr(bench, "joint_trial", boom)
    res = bench.run_sweep("5.2", trials=1, cells=bench.joint_grid()[:1])
    assert all(np.isnan(r["mean"]) for r in res.rows)
    assert "boom" in res.trials[0]["results"][0]["error"]
