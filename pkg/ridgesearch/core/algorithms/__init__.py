"""Ridge search algorithms."""
from __future__ import annotations

from collections.abc import Mapping
from typing import TYPE_CHECKING, Any

from .algorithm import RidgeAlgorithm
from .common import (
    SEARCH_CONFIG_DEFAULTS,
    MeanShiftVector,
    RidgeResult,
    SearchConfig,
    Variant,
    mean_shift_step,
    starting_grid,
)
from .lcrs import LCRS, SLCRS, lcrs, slcrs
from .mean_shift import MeanShift, mean_shift
from .scms import SCMS, scms

if TYPE_CHECKING:
    from ConfigSpace import Configuration

ALGORITHMS: dict[str, type[RidgeAlgorithm]] = {
    "mean_shift": MeanShift,
    "scms": SCMS,
    "lcrs": LCRS,
    "slcrs": SLCRS,
}


def make_algorithm(
    name: str,
    h: float,
    dimension: int,
    configuration: Configuration | Mapping[str, Any] | None = None,
    **kwargs: Any,
) -> RidgeAlgorithm:
    """Creates a ridge search algorithm by name.

    Args:
        name (str): One of the keys of ALGORITHMS.
        h (float): Bandwidth.
        dimension (int): Data dimension.
        configuration (Configuration | Mapping[str, Any] | None, optional): Hyperparameters, the algorithm's defaults with ridge_dim = d - 1 if None. Defaults to None.
        **kwargs: Further SearchConfig fields.

    Returns:
        RidgeAlgorithm: Algorithm instance.
    """
    if name not in ALGORITHMS:
        raise ValueError(f"Invalid algorithm: {name}")
    algorithm_cls = ALGORITHMS[name]
    if configuration is None:
        # ridge_dim then follows the data dimension
        configuration = {k: v for k, v in dict(algorithm_cls.get_default_config()).items() if k != "ridge_dim"}
    config = SearchConfig.from_configuration(h, configuration, algorithm_cls.variant, dimension, **kwargs)
    return algorithm_cls(config)


__all__ = [
    "ALGORITHMS",
    "LCRS",
    "SCMS",
    "SEARCH_CONFIG_DEFAULTS",
    "SLCRS",
    "MeanShift",
    "MeanShiftVector",
    "RidgeAlgorithm",
    "RidgeResult",
    "SearchConfig",
    "Variant",
    "lcrs",
    "make_algorithm",
    "mean_shift",
    "mean_shift_step",
    "scms",
    "slcrs",
    "starting_grid",
]
