from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from hydra import compose, initialize_config_dir
from omegaconf import OmegaConf
from ridgesearch import run_ridgesearch
from ridgesearch.cli import (
    plot_ridges,
    read_results,
    result_columns,
    ridge_intervals,
    ridge_points,
    uncertainty_segments,
    write_evaluation,
    write_results,
    write_trace,
)
from ridgesearch.core.algorithms import RidgeResult, starting_grid
from ridgesearch.core.bandwidth import emst_bandwidth
from ridgesearch.core.errors import DataFormatError, DomainError
from ridgesearch.core.point_cloud import BoxFilter, ingest

CONFIGS = Path(__file__).parents[1] / "configs"
BASE = OmegaConf.load(CONFIGS / "base.yaml")
SVG = "{http://www.w3.org/2000/svg}"


def _config(**overrides):
    return OmegaConf.merge(BASE, overrides)


def _result(start, point, interval=None, trace=None, converged=True):
    lo, hi = (None, None) if interval is None else (np.asarray(interval[0]), np.asarray(interval[1]))
    return RidgeResult(
        start=np.asarray(start, dtype=float),
        point=np.asarray(point, dtype=float),
        iterations=3,
        converged=converged,
        interval_lo=lo,
        interval_hi=hi,
        trace=None if trace is None else np.asarray(trace, dtype=float),
    )


def _group(path, gid):
    root = ET.parse(path).getroot()
    return next((g for g in root.iter(f"{SVG}g") if g.get("id") == gid), None)


@pytest.fixture
def circle_csv(tmp_path):
    path = tmp_path / "circle.csv"
    run_ridgesearch(_config(command="generate-circle", output=str(path), circle={"n": 100}))
    return path


# results files


def test_result_columns():
    assert result_columns(2) == [
        "start_1",
        "start_2",
        "point_1",
        "point_2",
        "iterations",
        "converged",
        "int_lo_1",
        "int_lo_2",
        "int_hi_1",
        "int_hi_2",
        "flat_top",
    ]
    assert result_columns(2, with_ci=True)[-4:] == ["ci_lo_1", "ci_lo_2", "ci_hi_1", "ci_hi_2"]


def test_missing_interval_is_empty(tmp_path):
    path = tmp_path / "results.csv"
    write_results([_result([0.0, 1.0], [0.5, 0.25])], 2, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(result_columns(2))
    assert lines[1] == "0,1,0.5,0.25,3,1,,,,,0"


def test_results_round_trip(tmp_path):
    path = tmp_path / "results.csv"
    results = [
        _result([0.0, 0.0], [0.1 + 0.2, 1 / 3], interval=([0.0, 1.0], [0.0, 2.0])),
        _result([1.0, 0.0], [np.pi, np.e], converged=False),
    ]
    write_results(results, 2, path)
    frame = read_results(path)

    np.testing.assert_array_equal(ridge_points(frame), [[0.1 + 0.2, 1 / 3], [np.pi, np.e]])
    lo, hi = ridge_intervals(frame)
    np.testing.assert_array_equal(lo, [[0.0, 1.0]])
    np.testing.assert_array_equal(hi, [[0.0, 2.0]])
    assert frame["converged"].tolist() == [1.0, 0.0]


def test_read_results_checks_header(tmp_path):
    path = tmp_path / "points.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(DataFormatError, match="no point columns"):
        read_results(path)
    path.write_text("point_1,point_2\n1,2\n")
    with pytest.raises(DataFormatError, match="unexpected results header"):
        read_results(path)


def test_trace_file(tmp_path):
    path = tmp_path / "trace.csv"
    results = [_result([0.0, 0.0], [1.0, 1.0], trace=[[0.0, 0.0], [1.0, 1.0]]), _result([2.0, 2.0], [2.0, 2.0])]
    write_trace(results, 2, path)
    assert path.read_text().splitlines() == ["start_index,iteration,x_1,x_2", "0,0,0,0", "0,1,1,1"]


def test_evaluation_file(tmp_path):
    path = tmp_path / "evaluation.csv"
    write_evaluation(0.125, 0.99, 0.5, 12, path)
    assert path.read_text().splitlines() == ["hausdorff,mean_radius,radial_std,n_points", "0.125,0.98999999999999999,0.5,12"]


# plotting


def test_plot_without_ridge_points(tmp_path, rng):
    path = tmp_path / "plot.svg"
    plot_ridges(rng.normal(size=(30, 2)), np.empty((0, 2)), np.empty((0, 2)), np.empty((0, 2)), path)
    assert _group(path, "data-points") is not None
    assert _group(path, "ridge-points") is None
    assert _group(path, "ridge-intervals") is None
    assert _group(path, "ridge-uncertainty") is None


def test_plot_single_interval(tmp_path, rng):
    path = tmp_path / "plot.svg"
    plot_ridges(rng.normal(size=(30, 2)), [[0.0, 1.0]], [[0.0, 0.9]], [[0.0, 1.1]], path)
    group = _group(path, "ridge-intervals")
    assert group is not None
    assert len([e for e in group.iter() if e.tag in (f"{SVG}path", f"{SVG}use")]) == 1
    assert _group(path, "ridge-points") is not None


def test_plot_uncertainty_segment(tmp_path, rng):
    path = tmp_path / "plot.svg"
    plot_ridges(rng.normal(size=(30, 2)), [[0.0, 1.0]], [[0.0, 0.9]], [[0.0, 1.1]], path, ci_lo=[[0.0, 0.8]], ci_hi=[[0.0, 1.2]])
    group = _group(path, "ridge-uncertainty")
    assert group is not None
    assert len([e for e in group.iter() if e.tag in (f"{SVG}path", f"{SVG}use")]) == 1


def test_plot_rejects_mismatched_segments(tmp_path):
    with pytest.raises(DomainError):
        plot_ridges(np.zeros((3, 2)), [], [], [], tmp_path / "plot.svg", ci_lo=[[0.0, 0.0]], ci_hi=np.empty((0, 2)))


def test_plot_is_deterministic(tmp_path, rng):
    data = rng.normal(size=(50, 2))
    for name in ("a.svg", "b.svg"):
        plot_ridges(data, data[:5], data[:3], data[3:6], tmp_path / name, labels=("ra", "dec"))
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_plot_needs_two_coordinates(tmp_path):
    with pytest.raises(DomainError):
        plot_ridges(np.zeros((3, 1)), [], [], [], tmp_path / "plot.svg")


# pipeline commands


def test_generate_circle(circle_csv):
    cloud = ingest(circle_csv)
    assert cloud.n == 100
    assert cloud.labels == ("x_1", "x_2")


def test_bandwidth_command(circle_csv, tmp_path, capsys):
    output = tmp_path / "bandwidth.csv"
    summary = run_ridgesearch(_config(command="bandwidth", input=str(circle_csv), output=str(output)))
    assert summary["emst"] == emst_bandwidth(ingest(circle_csv))
    assert capsys.readouterr().out.startswith("silverman=")
    assert pd.read_csv(output).columns.tolist() == ["silverman", "emst"]


def test_ridge_one_row_per_start(circle_csv, tmp_path):
    output = tmp_path / "ridges.csv"
    summary = run_ridgesearch(
        _config(command="ridge", input=str(circle_csv), output=str(output), algorithm="scms", bandwidth={"source": "explicit", "h": 0.3})
    )
    n_starts = starting_grid(ingest(circle_csv), 0.5, 0.5).shape[0]
    assert len(read_results(output)) == n_starts == summary["n_points"]
    assert summary["h"] == 0.3
    assert 0 <= summary["n_converged"] <= n_starts


def test_ridge_is_byte_identical(circle_csv, tmp_path):
    for name in ("a.csv", "b.csv"):
        run_ridgesearch(
            _config(command="ridge", input=str(circle_csv), output=str(tmp_path / name), bandwidth={"source": "explicit", "h": 0.3})
        )
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_ridge_with_emst_bandwidth_and_trace(circle_csv, tmp_path):
    trace = tmp_path / "trace.csv"
    summary = run_ridgesearch(
        _config(
            command="ridge",
            input=str(circle_csv),
            output=str(tmp_path / "ridges.csv"),
            algorithm="mean_shift",
            bandwidth={"source": "emst"},
            trace=True,
            trace_output=str(trace),
        )
    )
    assert summary["h"] == emst_bandwidth(ingest(circle_csv))
    assert trace.read_text().splitlines()[0] == "start_index,iteration,x_1,x_2"


def test_ridge_uncertainty_columns(circle_csv, tmp_path):
    output = tmp_path / "ridges.csv"
    run_ridgesearch(
        _config(
            command="ridge",
            input=str(circle_csv),
            output=str(output),
            bandwidth={"source": "explicit", "h": 0.3},
            grid={"spacing": 1.0, "max_dist": 0.5},
            algorithm_config={"ci_alpha": 0.1, "ci_reps": 200},
        )
    )
    frame = read_results(output)
    assert frame.columns[-4:].tolist() == ["ci_lo_1", "ci_lo_2", "ci_hi_1", "ci_hi_2"]

    svg = tmp_path / "ridges.svg"
    summary = run_ridgesearch(_config(command="plot", input=str(circle_csv), results=str(output), output=str(svg)))
    assert summary["n_segments"] == uncertainty_segments(frame)[0].shape[0] > 0
    assert _group(svg, "ridge-uncertainty") is not None


def test_galaxy_slice_pipeline(galaxy_slice, tmp_path):
    output = tmp_path / "ridges.csv"
    config = _config(
        command="ridge",
        input=str(galaxy_slice),
        output=str(output),
        columns=["ra", "dec"],
        filter=["ra:130:180", "dec:0:50"],
        algorithm="mean_shift",
        algorithm_config={"max_iter": 50},
        bandwidth={"source": "emst"},
        grid={"spacing": 5.0, "max_dist": 5.0},
    )
    summary = run_ridgesearch(config)
    box = ingest(galaxy_slice, [BoxFilter.parse("ra:130:180"), BoxFilter.parse("dec:0:50")], ["ra", "dec"])
    assert box.n == 226
    assert summary["h"] == emst_bandwidth(box)
    assert len(read_results(output)) == summary["n_points"]


def test_evaluate_and_plot(circle_csv, tmp_path, capsys):
    results = tmp_path / "ridges.csv"
    run_ridgesearch(
        _config(command="ridge", input=str(circle_csv), output=str(results), algorithm="scms", bandwidth={"source": "explicit", "h": 0.3})
    )
    evaluation = tmp_path / "evaluation.csv"
    summary = run_ridgesearch(_config(command="evaluate", results=str(results), output=str(evaluation)))
    assert summary["n_points"] == len(read_results(results))
    assert 0 < summary["hausdorff"] < 1
    assert "hausdorff=" in capsys.readouterr().out
    assert pd.read_csv(evaluation).columns.tolist() == ["hausdorff", "mean_radius", "radial_std", "n_points"]

    svg = tmp_path / "ridges.svg"
    summary = run_ridgesearch(_config(command="plot", input=str(circle_csv), results=str(results), output=str(svg)))
    assert summary["n_points"] == len(read_results(results))
    assert _group(svg, "ridge-points") is not None


def test_evaluate_against_oracle_file(tmp_path):
    results = tmp_path / "ridges.csv"
    write_results([_result([0.0, 0.0], [1.0, 0.0]), _result([0.0, 0.0], [0.0, 1.0])], 2, results)
    oracle = tmp_path / "oracle.csv"
    oracle.write_text("x_1,x_2\n1,0\n0,2\n")
    summary = run_ridgesearch(_config(command="evaluate", results=str(results), oracle={"input": str(oracle)}))
    assert summary["hausdorff"] == pytest.approx(1.0)
    assert summary["mean_radius"] == pytest.approx(1.0)


def test_true_ridge(tmp_path, capsys):
    output = tmp_path / "oracle.csv"
    summary = run_ridgesearch(_config(command="true-ridge", output=str(output), oracle={"n_points": 10}))
    assert summary["radius"] == pytest.approx(0.995, abs=1e-3)
    assert capsys.readouterr().out.startswith("radius=0.99")
    assert ingest(output).n == 10


def test_invalid_command():
    with pytest.raises(ValueError, match="Invalid command"):
        run_ridgesearch(_config(command="filaments"))


def test_bandwidth_sources(circle_csv, tmp_path):
    config = _config(command="ridge", input=str(circle_csv), output=str(tmp_path / "ridges.csv"))
    with pytest.raises(DomainError):
        run_ridgesearch(OmegaConf.merge(config, {"bandwidth": {"source": "explicit"}}))
    with pytest.raises(ValueError, match="Invalid bandwidth source"):
        run_ridgesearch(OmegaConf.merge(config, {"bandwidth": {"source": "scott"}}))


def test_config_logging(caplog):
    logger = logging.getLogger("ridgesearch.tests")
    with caplog.at_level(logging.INFO, logger="ridgesearch.tests"):
        run_ridgesearch(_config(command="true-ridge"), logger=logger)
    assert "Your ridge search config is:" in caplog.text
    assert "Command 'true-ridge' finished" in caplog.text


def test_hydra_composition():
    with initialize_config_dir(config_dir=str(CONFIGS), version_base=None):
        cfg = compose(config_name="base", overrides=["command=true-ridge", "circle.sigma=1.0"])
    assert run_ridgesearch(cfg) == {"radius": 0.0}
