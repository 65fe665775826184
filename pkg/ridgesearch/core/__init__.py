from .bandwidth import EmstResult, emst, emst_bandwidth, silverman_bandwidth
from .circle_oracle import CircleModel, hausdorff, ridge_oracle_points, sample_circle, true_ridge_radius
from .errors import (
    DataFormatError,
    DegenerateSampleError,
    DomainError,
    EmptyNeighborhoodError,
    QuadratureError,
    RidgeSearchError,
)
from .kernels import Kernel, ShadowKernel
from .point_cloud import BoxFilter, PointCloud, emit, ingest, make_cloud

__all__ = [
    "BoxFilter",
    "CircleModel",
    "DataFormatError",
    "DegenerateSampleError",
    "DomainError",
    "EmptyNeighborhoodError",
    "EmstResult",
    "Kernel",
    "PointCloud",
    "QuadratureError",
    "RidgeSearchError",
    "ShadowKernel",
    "emit",
    "emst",
    "emst_bandwidth",
    "hausdorff",
    "ingest",
    "make_cloud",
    "ridge_oracle_points",
    "sample_circle",
    "silverman_bandwidth",
    "true_ridge_radius",
]
