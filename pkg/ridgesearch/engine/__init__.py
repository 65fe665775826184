from .search_engine import DEFAULT_ENGINE_CONFIG, RidgeSearchEngine, SearchRun
from .statistics import STATISTICS, ConvergedCount, PointCount, Runtime, Statistic

__all__ = [
    "DEFAULT_ENGINE_CONFIG",
    "STATISTICS",
    "ConvergedCount",
    "PointCount",
    "RidgeSearchEngine",
    "Runtime",
    "SearchRun",
    "Statistic",
]
