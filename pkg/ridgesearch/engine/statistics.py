"""Run statistics of the search engine."""
from __future__ import annotations

import time
from abc import ABC, abstractmethod
from collections.abc import Callable
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from ridgesearch.core.algorithms import RidgeResult

SearchFunc = Callable[..., list["RidgeResult"]]

# These are the ranks we are using for sorting:
# Runtime = 0
# PointCount = 1
# ConvergedCount = 1
# The runtime wrapper sits closest to the search so that counting does not add to it.


class Statistic(ABC):
    """A statistic of a ridge search run.

    It is wrapped around the search function. Overriding __new__() lets a statistic
    behave like a plain function while keeping the advantages of a static class.
    """

    KEY: str  # Unique identifier
    RANK: int  # Sorting rank

    def __new__(cls, *args, **kwargs) -> SearchFunc:
        """Creates a new instance of this statistic and directly wraps the search function.

        Returns:
            SearchFunc: Wrapped search function.
        """
        instance = super().__new__(cls)
        return instance.__call__(*args, **kwargs)

    @staticmethod
    @abstractmethod
    def __call__(search_func: SearchFunc, statistics: dict) -> SearchFunc:
        """Wraps the search function with the computation of the statistic.

        Args:
            search_func (SearchFunc): Search function to wrap.
            statistics (dict): Dictionary to store the statistic.

        Returns:
            SearchFunc: Search function.
        """
        raise NotImplementedError

    def __lt__(self, other: Statistic) -> bool:
        """Orders statistics by rank."""
        return self.RANK < other.RANK


class Runtime(Statistic):
    """Wall time of the search in seconds."""

    KEY = "runtime"
    RANK = 0

    @staticmethod
    def __call__(search_func: SearchFunc, statistics: dict) -> SearchFunc:
        """Wraps the search function with the runtime measurement."""

        def wrapper(*args, **kwargs):
            start_time = time.time()
            results = search_func(*args, **kwargs)
            statistics["runtime"] = time.time() - start_time
            return results

        return wrapper


class PointCount(Statistic):
    """Number of searches, one per starting point."""

    KEY = "n_points"
    RANK = 1

    @staticmethod
    def __call__(search_func: SearchFunc, statistics: dict) -> SearchFunc:
        """Wraps the search function with the point count."""

        def wrapper(*args, **kwargs):
            results = search_func(*args, **kwargs)
            statistics["n_points"] = len(results)
            return results

        return wrapper


class ConvergedCount(Statistic):
    """Number of searches that met their tolerance."""

    KEY = "n_converged"
    RANK = 1

    @staticmethod
    def __call__(search_func: SearchFunc, statistics: dict) -> SearchFunc:
        """Wraps the search function with the converged count."""

        def wrapper(*args, **kwargs):
            results = search_func(*args, **kwargs)
            statistics["n_converged"] = sum(bool(r.converged) for r in results)
            return results

        return wrapper


STATISTICS = {s.KEY: (s, s.RANK) for s in [Runtime, PointCount, ConvergedCount]}
