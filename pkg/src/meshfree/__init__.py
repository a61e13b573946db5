"""Mesh-free scattered-data interpolation: radial basis functions and the
gravity (inverse distance squared) model, with a convergence benchmark and
a station-to-contour case-study pipeline."""

from .geometry import Point2D, PolygonBoundary, TriangleMesh
from .gravity import IdwConfig, idw_interpolate, idw_interpolate_many
from .kernels import KernelKind, evaluate_kernel
from .rbf import RbfModel, ScatterSet, fit, predict, predict_many

__version__ = "0.1.0"

__all__ = [
    "Point2D",
    "PolygonBoundary",
    "TriangleMesh",
    "KernelKind",
    "evaluate_kernel",
    "ScatterSet",
    "RbfModel",
    "fit",
    "predict",
    "predict_many",
    "IdwConfig",
    "idw_interpolate",
    "idw_interpolate_many",
]
