"""This module provides a function to run a ridge search pipeline step using a given config."""
from __future__ import annotations

import sys
import time
from logging import Logger
from typing import Any

from omegaconf import DictConfig, OmegaConf

from .cli import (
    plot_ridges,
    read_results,
    ridge_intervals,
    ridge_points,
    uncertainty_segments,
    write_evaluation,
    write_results,
    write_trace,
)
from .core.bandwidth import emst_bandwidth, silverman_bandwidth
from .core.circle_oracle import CircleModel, hausdorff, radial_summary, ridge_oracle_points, sample_circle, true_ridge_radius
from .core.errors import DomainError
from .core.point_cloud import BoxFilter, PointCloud, emit, ingest, make_cloud
from .engine import RidgeSearchEngine

COMMANDS = ("generate-circle", "bandwidth", "ridge", "true-ridge", "evaluate", "plot")
BANDWIDTH_SOURCES = ("explicit", "silverman", "emst")


def _filters(cfg: DictConfig) -> list[BoxFilter]:
    return [BoxFilter.parse(f) for f in (cfg.get("filter") or [])]


def _load(cfg: DictConfig, path: str | None = None) -> PointCloud:
    columns = list(cfg.get("columns") or []) or None
    return ingest(path or cfg.input, _filters(cfg), columns)


def _circle(cfg: DictConfig) -> CircleModel:
    return CircleModel(r=float(cfg.circle.r), sigma=float(cfg.circle.sigma))


def resolve_bandwidth(bandwidth: DictConfig | dict, cloud: PointCloud) -> float:
    """Returns the bandwidth from its configured source.

    Args:
        bandwidth (DictConfig | dict): Keys source (explicit | silverman | emst), h and A0.
        cloud (PointCloud): Sample.

    Returns:
        float: Bandwidth.
    """
    source = bandwidth["source"]
    if source == "explicit":
        if bandwidth.get("h") is None:
            raise DomainError("Bandwidth source 'explicit' needs bandwidth.h.")
        return float(bandwidth["h"])
    if source == "silverman":
        return silverman_bandwidth(cloud, float(bandwidth.get("A0", 1.0)))
    if source == "emst":
        return emst_bandwidth(cloud)
    raise ValueError(f"Invalid bandwidth source: {source}")


def _generate_circle(cfg: DictConfig, logger: Logger | None) -> dict[str, Any]:
    cloud = sample_circle(_circle(cfg), int(cfg.circle.n), int(cfg.seed))
    emit(cloud, cfg.output)
    if logger:
        logger.info(f"Wrote {cloud.n} circle points to {cfg.output}.")
    return {"n_points": cloud.n}


def _bandwidth(cfg: DictConfig, logger: Logger | None) -> dict[str, Any]:
    cloud = _load(cfg)
    selectors = {
        "silverman": silverman_bandwidth(cloud, float(cfg.bandwidth.A0)),
        "emst": emst_bandwidth(cloud),
    }
    print(f"silverman={selectors['silverman']:.17g} emst={selectors['emst']:.17g}")
    if cfg.get("output"):
        emit(make_cloud([[selectors["silverman"], selectors["emst"]]], ["silverman", "emst"]), cfg.output)
    return selectors


def _ridge(cfg: DictConfig, logger: Logger | None) -> dict[str, Any]:
    cloud = _load(cfg)
    h = resolve_bandwidth(cfg.bandwidth, cloud)
    algorithm_config = dict(OmegaConf.to_container(cfg.algorithm_config, resolve=True) or {})
    if cfg.get("tol") is not None:
        algorithm_config["rel_tol"] = float(cfg.tol) / h
    if cfg.get("tau") is not None:
        algorithm_config["tau"] = float(cfg.tau)

    engine = RidgeSearchEngine(
        {
            "algorithm": cfg.algorithm,
            "algorithm_config": algorithm_config,
            "n_workers": int(cfg.n_workers),
            "grid_spacing": float(cfg.grid.spacing),
            "grid_max_dist": float(cfg.grid.max_dist),
            "trace": bool(cfg.trace),
        }
    )
    run = engine.run(cloud, h)
    with_ci = float(algorithm_config.get("ci_alpha", 0.0)) > 0
    write_results(run.results, cloud.d, cfg.output, with_ci=with_ci)
    if cfg.trace:
        write_trace(run.results, cloud.d, cfg.trace_output)

    summary = {"h": h, **run.statistics}
    print(
        f"points={summary.get('n_points', len(run.results))} converged={summary.get('n_converged', '-')} "
        f"h={h:.17g} wall_time={summary.get('runtime', float('nan')):.3f}s",
        file=sys.stderr,
    )
    if logger:
        logger.info(f"Run summary: {summary}")
    return summary


def _true_ridge(cfg: DictConfig, logger: Logger | None) -> dict[str, Any]:
    model = _circle(cfg)
    radius = true_ridge_radius(model)
    print(f"radius={radius:.17g}")
    if cfg.get("output"):
        oracle = ridge_oracle_points(model, int(cfg.oracle.n_points))
        emit(make_cloud(oracle), cfg.output)
    return {"radius": radius}


def _evaluate(cfg: DictConfig, logger: Logger | None) -> dict[str, Any]:
    points = ridge_points(read_results(cfg.results))
    if points.shape[0] == 0:
        raise DomainError(f"No ridge points in {cfg.results}.")
    if cfg.oracle.get("input"):
        oracle = ingest(cfg.oracle.input).points
    else:
        oracle = ridge_oracle_points(_circle(cfg), int(cfg.oracle.n_points))
    distance = hausdorff(points, oracle)
    mean_radius, radial_std = radial_summary(points)
    if cfg.get("output"):
        write_evaluation(distance, mean_radius, radial_std, points.shape[0], cfg.output)
    print(f"hausdorff={distance:.17g} mean_radius={mean_radius:.17g} radial_std={radial_std:.17g} n_points={points.shape[0]}")
    return {"hausdorff": distance, "mean_radius": mean_radius, "radial_std": radial_std, "n_points": points.shape[0]}


def _plot(cfg: DictConfig, logger: Logger | None) -> dict[str, Any]:
    cloud = _load(cfg)
    frame = read_results(cfg.results)
    points = ridge_points(frame)
    lo, hi = ridge_intervals(frame)
    ci_lo, ci_hi = uncertainty_segments(frame)
    labels = cloud.labels or ("x_1", "x_2")
    plot_ridges(cloud.points, points, lo, hi, cfg.output, labels=(labels[0], labels[1]), ci_lo=ci_lo, ci_hi=ci_hi)
    return {"n_points": int(points.shape[0]), "n_intervals": int(lo.shape[0]), "n_segments": int(ci_lo.shape[0])}


_DISPATCH = {
    "generate-circle": _generate_circle,
    "bandwidth": _bandwidth,
    "ridge": _ridge,
    "true-ridge": _true_ridge,
    "evaluate": _evaluate,
    "plot": _plot,
}


def run_ridgesearch(cfg: DictConfig, logger: Logger | None = None) -> dict[str, Any]:
    """Run one pipeline command of the given config and return its summary.

    Args:
        cfg (DictConfig): Configuration, see configs/base.yaml.
        logger (Logger | None, optional): Logger for the run. Defaults to None.

    Returns:
        dict[str, Any]: Summary values of the command.
    """
    if cfg.command not in _DISPATCH:
        raise ValueError(f"Invalid command: {cfg.command}")
    if logger:
        logger.info("Your ridge search config is:")
        logger.info(OmegaConf.to_yaml(cfg))
    start_time = time.time()
    summary = _DISPATCH[cfg.command](cfg, logger)
    if logger:
        logger.info(f"Command '{cfg.command}' finished in {time.time() - start_time:.3f}s.")
    return summary
