"""Exceptions raised by the ridge search toolkit."""
from __future__ import annotations


class RidgeSearchError(ValueError):
    """Base class of all errors raised by ridgesearch."""


class DomainError(RidgeSearchError):
    """An argument is outside the domain of an operation (non-finite, out of range, wrong shape)."""


class EmptyNeighborhoodError(RidgeSearchError):
    """The kernel-weighted neighborhood of a query point carries (numerically) no mass."""

    def __init__(self, x: object, h: float, s: float, floor: float) -> None:
        """Creates the error for query point x and bandwidth h.

        Args:
            x (object): Query point.
            h (float): Bandwidth.
            s (float): Zeroth local moment that fell below the floor.
            floor (float): Moment floor.
        """
        super().__init__(
            f"Empty neighborhood at x={x} with h={h}: s={s:.3e} is below the floor {floor:.1e}."
        )
        self.x = x
        self.h = h
        self.s = s


class DegenerateSampleError(RidgeSearchError):
    """A sample has fewer distinct points than an estimator needs."""


class QuadratureError(RidgeSearchError):
    """Numerical integration did not reach the requested tolerance."""


class DataFormatError(RidgeSearchError):
    """A data file could not be parsed."""

    def __init__(self, path: str, line: int | None, message: str) -> None:
        """Creates the error naming file and line.

        Args:
            path (str): File that failed to parse.
            line (int | None): 1-based line number of the offending row, if known.
            message (str): What went wrong.
        """
        location = f"{path}:{line}" if line is not None else path
        super().__init__(f"{location}: {message}")
        self.path = path
        self.line = line
