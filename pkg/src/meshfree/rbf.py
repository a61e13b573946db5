"""Radial basis function interpolation without polynomial augmentation.

Fitting solves ``Phi w = h`` where ``Phi[i, j] = phi(|x_j - x_i|)``; the
interpolant at ``x`` is ``sum_j w_j phi(|x_j - x|)``.

Coordinates are first mapped into the unit square by a uniform
:class:`~meshfree.geometry.BoxNormalization` of the centers, and the shape
parameter acts in that space. With the default ``epsilon = 1`` the smooth
kernels are very flat there, and ``Phi`` is numerically singular in double
precision beyond a few dozen centers (reciprocal condition numbers of
1e-20 are routine). Systems up to ``EXTENDED_PRECISION_MAX_N`` centers are
therefore factored in double-double arithmetic, which keeps the fit
residual near 1e-20. Larger systems use LAPACK in double precision and
warn when the residual exceeds the interpolation tolerance.
"""
from __future__ import annotations

import logging
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from . import _ddla
from .geometry import BoxNormalization, DuplicatePointError, as_xy, check_distinct
from .kernels import DEFAULT_EPSILON, DEFAULT_KERNEL, KernelKind, check_epsilon, parse_kernel

__all__ = [
    "ScatterSet",
    "EmptyDataError",
    "RbfModel",
    "SingularMatrixError",
    "MemoryBudgetError",
    "IllConditionedFitWarning",
    "assemble_interpolation_matrix",
    "fit",
    "predict",
    "predict_many",
    "residual_tolerance",
]

logger = logging.getLogger(__name__)

EXTENDED_PRECISION_MAX_N = 1000
DEFAULT_MEMORY_BUDGET = 4 * 2**30
CONDITION_WARN = 1e10


class SingularMatrixError(np.linalg.LinAlgError):
    """The interpolation matrix could not be solved.

    ``cause`` is ``"thin-plate-spline"`` when the kernel is the unaugmented
    thin plate spline (whose matrix can be singular for distinct centers),
    otherwise ``"degenerate-geometry"``.
    """

    def __init__(self, message: str, cause: str):
        super().__init__(message)
        self.cause = cause


class EmptyDataError(ValueError):
    pass


class MemoryBudgetError(MemoryError):
    pass


class IllConditionedFitWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class ScatterSet:
    """Distinct sample points with one finite value each."""

    points: np.ndarray
    values: np.ndarray
    units: str = ""

    def __post_init__(self):
        pts = as_xy(self.points)
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if len(pts) == 0:
            raise EmptyDataError("a scatter set needs at least one point")
        if len(pts) != len(vals):
            raise ValueError(f"{len(pts)} points but {len(vals)} values")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        check_distinct(pts)
        pts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class RbfModel:
    centers: np.ndarray
    weights: np.ndarray
    kernel: KernelKind
    epsilon: float
    normalization: BoxNormalization
    #: low-order parts of double-double weights (zeros for double solves)
    weights_lo: np.ndarray = field(repr=False, default=None)
    residual: float = 0.0
    condition_estimate: float = float("nan")
    precision: str = "double"
    fit_seconds: float = 0.0

    def __post_init__(self):
        if self.weights_lo is None:
            object.__setattr__(self, "weights_lo", np.zeros_like(self.weights))

    def __len__(self) -> int:
        return len(self.weights)


def residual_tolerance(values: np.ndarray) -> float:
    return 1e-6 * (1.0 + float(np.max(np.abs(values))))


def _check_budget(n: int, budget: int) -> None:
    need = 8 * n * n
    if need > budget:
        raise MemoryBudgetError(
            f"{n} centers need a {need / 2**30:.2f} GiB matrix, over the {budget / 2**30:.2f} GiB budget"
        )


def assemble_interpolation_matrix(centers, kernel: KernelKind | str = DEFAULT_KERNEL,
                                  epsilon: float = DEFAULT_EPSILON, *,
                                  memory_budget: int = DEFAULT_MEMORY_BUDGET) -> np.ndarray:
    """Dense symmetric matrix of kernel values between all center pairs.

    ``centers`` are used as given; :func:`fit` passes normalized coordinates.
    """
    xy = as_xy(centers, name="centers")
    kind = parse_kernel(kernel)
    eps = check_epsilon(epsilon)
    check_distinct(xy, what="centers")
    _check_budget(len(xy), memory_budget)
    return _ddla.kernel_matrix(np.ascontiguousarray(xy), kind.code, eps)


def _condition_estimate(lu: np.ndarray, anorm: float) -> float:
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or rcond <= 0.0:
        return float("inf")
    return 1.0 / rcond


def _singular(kind: KernelKind, detail: str) -> SingularMatrixError:
    if kind is KernelKind.THIN_PLATE_SPLINE:
        return SingularMatrixError(
            f"interpolation matrix is singular ({detail}); the thin plate spline "
            "without a polynomial term is not guaranteed solvable, try another kernel",
            "thin-plate-spline",
        )
    return SingularMatrixError(
        f"interpolation matrix is singular ({detail}); centers are degenerate "
        "or the shape parameter is far too small",
        "degenerate-geometry",
    )


def fit(data: ScatterSet, kernel: KernelKind | str = DEFAULT_KERNEL,
        epsilon: float = DEFAULT_EPSILON, *, precision: str = "auto",
        extended_max_n: int = EXTENDED_PRECISION_MAX_N,
        memory_budget: int = DEFAULT_MEMORY_BUDGET) -> RbfModel:
    """Solve for the RBF weights reproducing ``data`` at its points.

    ``precision`` is ``"auto"`` (double-double up to ``extended_max_n``
    centers, double above), ``"extended"`` or ``"double"``.

    Raises SingularMatrixError on a zero pivot, non-finite weights, or an
    extended-precision solve that still misses the residual tolerance.
    """
    if precision not in ("auto", "extended", "double"):
        raise ValueError(f"unknown precision {precision!r}")
    kind = parse_kernel(kernel)
    eps = check_epsilon(epsilon)
    norm = BoxNormalization.fit(data.points)
    xy = np.ascontiguousarray(norm.apply(data.points))
    h = np.ascontiguousarray(data.values, dtype=float)
    n = len(h)
    try:
        A = assemble_interpolation_matrix(xy, kind, eps, memory_budget=memory_budget)
    except DuplicatePointError as exc:
        raise _singular(kind, str(exc)) from exc

    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    cond = _condition_estimate(lu, float(np.abs(A).sum(axis=0).max()))
    use_extended = precision == "extended" or (precision == "auto" and n <= extended_max_n)

    if use_extended:
        hi, lo, perm, ok = _ddla.lu_factor_dd(A)
        if not ok:
            raise _singular(kind, "zero pivot in extended precision")
        w_hi, w_lo = _ddla.lu_solve_dd(hi, lo, perm, h)
        mode = "double-double"
    else:
        if np.any(np.diag(lu) == 0.0):
            raise _singular(kind, "zero pivot")
        w_hi = scipy.linalg.lu_solve((lu, piv), h, check_finite=False)
        w_lo = np.zeros(n)
        mode = "double"
    elapsed = time.perf_counter() - t0

    if not (np.all(np.isfinite(w_hi)) and np.all(np.isfinite(w_lo))):
        raise _singular(kind, "non-finite weights")
    res = float(np.max(np.abs(_ddla.residual_dd(A, w_hi, w_lo, h))))
    tol = residual_tolerance(h)
    if res > tol:
        if use_extended:
            raise _singular(kind, f"residual {res:.3g} exceeds {tol:.3g} in extended precision")
        warnings.warn(
            f"fit residual {res:.3g} exceeds tolerance {tol:.3g} (N={n}, condition ~{cond:.2g}); "
            "interpolation is not exact at the nodes",
            IllConditionedFitWarning,
            stacklevel=2,
        )
    if cond > CONDITION_WARN:
        logger.warning("interpolation matrix condition estimate %.3g (N=%d, %s, eps=%g)",
                       cond, n, kind.value, eps)
    logger.debug("fit N=%d kernel=%s eps=%g precision=%s residual=%.3g cond=%.3g in %.3fs",
                 n, kind.value, eps, mode, res, cond, elapsed)
    w_hi.setflags(write=False)
    w_lo.setflags(write=False)
    return RbfModel(
        centers=data.points,
        weights=w_hi,
        kernel=kind,
        epsilon=eps,
        normalization=norm,
        weights_lo=w_lo,
        residual=res,
        condition_estimate=cond,
        precision=mode,
        fit_seconds=elapsed,
    )


def predict_many(model: RbfModel, queries) -> np.ndarray:
    q = as_xy(queries, name="queries")
    if len(q) == 0:
        return np.empty(0)
    norm = model.normalization
    return _ddla.expand(
        np.ascontiguousarray(norm.apply(model.centers)),
        model.weights,
        model.weights_lo,
        np.ascontiguousarray(norm.apply(q)),
        model.kernel.code,
        model.epsilon,
    )


def predict(model: RbfModel, query) -> float:
    return float(predict_many(model, [query])[0])
