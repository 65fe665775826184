"""Abstract base class for a ridge search algorithm. Contains functionality that is shared among the different variants."""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

import numpy as np

from ridgesearch.core.errors import DomainError

from .common import RidgeResult, SearchConfig, Variant

if TYPE_CHECKING:
    from ConfigSpace import Configuration, ConfigurationSpace

    from ridgesearch.core.point_cloud import PointCloud


class RidgeAlgorithm(ABC):
    """Abstract base class for a ridge search algorithm started from single points."""

    name: str
    variant: Variant

    def __init__(self, config: SearchConfig) -> None:
        """Algorithm super-class constructor, is only called by sub-classes.

        Args:
            config (SearchConfig): Search configuration, its variant has to match the algorithm.
        """
        super().__init__()
        if config.variant != self.variant:
            raise DomainError(f"Algorithm '{self.name}' cannot run a {config.variant.value} configuration.")
        self.config = config

    @staticmethod
    @abstractmethod
    def get_config_space(seed: int | None = None) -> ConfigurationSpace:
        """Returns the hyperparameter configuration space of the algorithm.

        Args:
            seed (int | None, optional): Random generator seed that is used to sample configurations. Defaults to None.

        Returns:
            ConfigurationSpace: Hyperparameter configuration space of the algorithm.
        """

    @staticmethod
    @abstractmethod
    def get_default_config() -> Configuration:
        """Returns the default hyperparameter configuration of the algorithm.

        Returns:
            Configuration: Default hyperparameter configuration.
        """

    @abstractmethod
    def search(self, data: PointCloud | np.ndarray, start: np.ndarray) -> RidgeResult:
        """Runs the search from one starting point.

        Args:
            data (PointCloud | np.ndarray): Sample.
            start (np.ndarray): Starting point.

        Returns:
            RidgeResult: Final point and diagnostics.
        """

    def update_config(self, config: SearchConfig) -> None:
        """Replaces the search configuration.

        Args:
            config (SearchConfig): Search configuration.
        """
        if config.variant != self.variant:
            raise DomainError(f"Algorithm '{self.name}' cannot run a {config.variant.value} configuration.")
        self.config = config
