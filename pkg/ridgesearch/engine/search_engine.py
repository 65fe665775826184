"""Concurrent ridge search over a grid of starting points."""
from __future__ import annotations

import logging
import warnings
from typing import TYPE_CHECKING, Any, NamedTuple

import numpy as np
from pathos.pools import ThreadPool

from ridgesearch.core.algorithms import ALGORITHMS, RidgeAlgorithm, RidgeResult, make_algorithm, starting_grid
from ridgesearch.core.point_cloud import PointCloud, as_points

from .statistics import STATISTICS, Statistic

if TYPE_CHECKING:
    from ridgesearch.core.kernels import Kernel

logger = logging.getLogger(__name__)

DEFAULT_ENGINE_CONFIG = {
    "algorithm": "lcrs",
    "algorithm_config": {},
    "n_workers": 1,
    "grid_spacing": 0.5,
    "grid_max_dist": 0.5,
    "trace": False,
    "debug": False,
    "statistics": ["runtime", "n_points", "n_converged"],
}


class SearchRun(NamedTuple):
    """Results of one engine run. Consists of (results, statistics, h)."""

    results: list[RidgeResult]
    statistics: dict[str, float]
    h: float


class RidgeSearchEngine:
    """Runs one ridge search algorithm from many starting points.

    Searches are independent and share the immutable sample, so they run on a thread
    pool. Results are returned sorted by the index of their starting point.
    """

    def __init__(self, config: dict | None = None) -> None:
        """Creates a new search engine.

        Args:
            config (dict | None, optional): Configuration containing keys of DEFAULT_ENGINE_CONFIG.
            If no configuration keys are provided, default configuration is used. Defaults to None.
        """
        self._config = DEFAULT_ENGINE_CONFIG.copy()

        if config:
            for k, v in config.items():
                if k in DEFAULT_ENGINE_CONFIG:
                    self._config[k] = v
                else:
                    warnings.warn(f"Invalid config key '{k}'. This item will be ignored.")

        if self._config["algorithm"] not in ALGORITHMS:
            raise ValueError(f"Invalid algorithm: {self._config['algorithm']}")
        if int(self._config["n_workers"]) < 1:
            raise ValueError(f"Invalid number of workers: {self._config['n_workers']}")
        self._statistics = self._get_statistics()

    @property
    def config(self) -> dict[str, Any]:
        """The resolved engine configuration."""
        return dict(self._config)

    def _get_statistics(self) -> list[type[Statistic]]:
        """Maps the statistics as list of strings to a sorted list of the statistic classes.

        Returns:
            list[type[Statistic]]: Statistic classes in the order they are wrapped around the search.
        """
        statistics = []
        for s in dict.fromkeys(self._config["statistics"]):
            if s not in STATISTICS:
                raise ValueError(f"Invalid statistic: {s}")
            statistics += [STATISTICS[s]]

        # runtime is wrapped first
        statistics = sorted(statistics, key=lambda s: s[1])
        return [s[0] for s in statistics]

    def starting_points(self, data: PointCloud | np.ndarray) -> np.ndarray:
        """The starting grid for the configured spacing and max_dist."""
        return starting_grid(data, float(self._config["grid_spacing"]), float(self._config["grid_max_dist"]))

    def make_algorithm(self, h: float, dimension: int, kernel: Kernel | None = None) -> RidgeAlgorithm:
        """Instantiates the configured algorithm for bandwidth h.

        Args:
            h (float): Bandwidth.
            dimension (int): Data dimension.
            kernel (Kernel | None, optional): Kernel, Gaussian if None. Defaults to None.

        Returns:
            RidgeAlgorithm: Algorithm.
        """
        return make_algorithm(
            self._config["algorithm"],
            h,
            dimension,
            dict(self._config["algorithm_config"]) or None,
            kernel=kernel,
            record_trace=bool(self._config["trace"]),
            debug=bool(self._config["debug"]),
        )

    def run(
        self,
        data: PointCloud | np.ndarray,
        h: float,
        starts: np.ndarray | None = None,
        kernel: Kernel | None = None,
    ) -> SearchRun:
        """Runs the configured algorithm from every starting point.

        Args:
            data (PointCloud | np.ndarray): Sample.
            h (float): Bandwidth.
            starts (np.ndarray | None, optional): Starting points, the starting grid if None. Defaults to None.
            kernel (Kernel | None, optional): Kernel, Gaussian if None. Defaults to None.

        Returns:
            SearchRun: Results sorted by starting point and the configured statistics.
        """
        points = as_points(data)
        algorithm = self.make_algorithm(h, points.shape[1], kernel)
        starts = self.starting_points(points) if starts is None else np.atleast_2d(np.asarray(starts, dtype=np.float64))
        logger.info(f"Running {algorithm.name} from {starts.shape[0]} starting points with h={h}.")

        statistics: dict[str, float] = {}
        search_func = self._search_all
        for s in self._statistics:
            search_func = s(search_func, statistics)
        results = search_func(algorithm, points, starts)
        return SearchRun(results=results, statistics=statistics, h=float(h))

    def _search_all(self, algorithm: RidgeAlgorithm, points: np.ndarray, starts: np.ndarray) -> list[RidgeResult]:
        def task(item: tuple[int, np.ndarray]) -> tuple[int, RidgeResult]:
            index, start = item
            return index, algorithm.search(points, start)

        items = list(enumerate(starts))
        n_workers = int(self._config["n_workers"])
        if n_workers > 1 and len(items) > 1:
            pool = ThreadPool(nodes=n_workers)
            try:
                collected = pool.map(task, items)
            finally:
                pool.close()
                pool.join()
                pool.clear()
        else:
            collected = [task(item) for item in items]
        return [result for _, result in sorted(collected, key=lambda t: t[0])]
