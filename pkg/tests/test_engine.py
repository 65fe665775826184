from __future__ import annotations

import numpy as np
import pytest
from ridgesearch.core.algorithms import make_algorithm
from ridgesearch.engine import RidgeSearchEngine
from ridgesearch.engine.statistics import STATISTICS, ConvergedCount, PointCount, Runtime


def test_default_config():
    engine = RidgeSearchEngine()
    assert engine.config["algorithm"] == "lcrs"
    assert engine.config["n_workers"] == 1


def test_unknown_config_key_warns():
    with pytest.warns(UserWarning, match="Invalid config key 'bandwidth'"):
        engine = RidgeSearchEngine({"bandwidth": 0.3, "algorithm": "scms"})
    assert engine.config["algorithm"] == "scms"
    assert "bandwidth" not in engine.config


@pytest.mark.parametrize(
    ("config", "message"),
    [
        ({"algorithm": "principal_curve"}, "Invalid algorithm"),
        ({"n_workers": 0}, "Invalid number of workers"),
        ({"statistics": ["runtime", "memory"]}, "Invalid statistic"),
    ],
)
def test_invalid_config(config, message):
    with pytest.raises(ValueError, match=message):
        RidgeSearchEngine(config)


def test_statistic_ranks():
    assert STATISTICS["runtime"] == (Runtime, 0)
    assert STATISTICS["n_points"] == (PointCount, 1)
    assert STATISTICS["n_converged"] == (ConvergedCount, 1)


def test_run_on_starting_grid(circle_cloud):
    engine = RidgeSearchEngine({"algorithm": "scms", "grid_spacing": 0.5, "grid_max_dist": 0.5})
    run = engine.run(circle_cloud, 0.3)
    starts = engine.starting_points(circle_cloud)

    assert run.h == 0.3
    assert len(run.results) == starts.shape[0] > 0
    np.testing.assert_array_equal(np.array([r.start for r in run.results]), starts)
    assert run.statistics["n_points"] == len(run.results)
    assert run.statistics["n_converged"] == sum(r.converged for r in run.results)
    assert run.statistics["runtime"] >= 0


def test_selected_statistics_only(circle_cloud):
    engine = RidgeSearchEngine({"algorithm": "mean_shift", "statistics": ["n_points"]})
    run = engine.run(circle_cloud, 0.3, starts=np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert run.statistics == {"n_points": 2}


def test_thread_pool_matches_sequential(circle_cloud):
    starts = np.array([[0.8, 0.1], [-0.9, 0.4], [0.1, -1.2], [0.6, 0.6], [-0.5, -0.7]])
    config = {"algorithm": "lcrs", "algorithm_config": {"rel_tol": 1e-4}, "trace": True}
    sequential = RidgeSearchEngine(config).run(circle_cloud, 0.3, starts=starts)
    pooled = RidgeSearchEngine({**config, "n_workers": 3}).run(circle_cloud, 0.3, starts=starts)

    for a, b in zip(sequential.results, pooled.results, strict=True):
        np.testing.assert_array_equal(a.start, b.start)
        np.testing.assert_array_equal(a.point, b.point)
        np.testing.assert_array_equal(a.trace, b.trace)
        assert a.iterations == b.iterations
    assert sequential.statistics["n_converged"] == pooled.statistics["n_converged"]


def test_engine_matches_direct_search(circle_cloud):
    start = np.array([0.9, -0.3])
    run = RidgeSearchEngine({"algorithm": "scms"}).run(circle_cloud, 0.25, starts=start)
    direct = make_algorithm("scms", 0.25, 2).search(circle_cloud.points, start)
    np.testing.assert_array_equal(run.results[0].point, direct.point)


def test_algorithm_config_is_forwarded():
    engine = RidgeSearchEngine({"algorithm": "mean_shift", "algorithm_config": {"rel_tol": 1e-2, "max_iter": 3}})
    algorithm = engine.make_algorithm(0.5, 2)
    assert algorithm.config.tol == pytest.approx(5e-3)
    assert algorithm.config.max_iter == 3
    assert algorithm.config.record_trace is False
