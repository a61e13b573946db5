"""Convergence study on the analytic cosine field.

Random scatters of growing size are interpolated onto a fixed 9 x 9 grid
over the unit square by both methods, and the RMS error against the exact
field is recorded per size.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import gravity, rbf
from .geometry import DUPLICATE_TOL
from .kernels import DEFAULT_EPSILON, DEFAULT_KERNEL, KernelKind, check_epsilon, parse_kernel

__all__ = [
    "ConvergenceRow",
    "CSV_HEADER",
    "METHODS",
    "analytic_field",
    "make_eval_grid",
    "sample_random_scatter",
    "rms_error",
    "sweep_sizes",
    "run_convergence_study",
    "format_csv",
]

logger = logging.getLogger(__name__)

GRID_SPACING = 0.125
DESK_SWEEP = (300, 3000, 300)
FULL_SWEEP = (300, 15000, 300)
METHODS = ("rbf", "gravity")
CSV_HEADER = ("n_points", "rms_rbf", "rms_gravity", "fit_seconds", "eval_seconds",
              "seed", "kernel", "epsilon")


def analytic_field(x, y):
    return 2.0 + 0.2 * np.cos(2.0 * np.pi * x) * np.cos(2.0 * np.pi * y)


def make_eval_grid() -> tuple[np.ndarray, np.ndarray]:
    """The 81 grid nodes {0, 0.125, ..., 1}^2 (y outer, x inner) and exact values."""
    ticks = np.arange(9) * GRID_SPACING
    gx, gy = np.meshgrid(ticks, ticks)
    xy = np.column_stack([gx.ravel(), gy.ravel()])
    return xy, analytic_field(xy[:, 0], xy[:, 1])


def sample_random_scatter(n: int, seed: int) -> rbf.ScatterSet:
    """``n`` uniform points on the unit square with exact field values."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    xy = rng.random((n, 2))
    while n > 1:
        pairs = cKDTree(xy).query_pairs(DUPLICATE_TOL, output_type="ndarray")
        if not len(pairs):
            break
        redo = np.unique(pairs[:, 1])
        xy[redo] = rng.random((len(redo), 2))
    return rbf.ScatterSet(xy, analytic_field(xy[:, 0], xy[:, 1]))


def rms_error(predicted: Sequence[float], truth: Sequence[float]) -> float:
    p = np.asarray(predicted, dtype=float)
    t = np.asarray(truth, dtype=float)
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.shape} predicted vs {t.shape} truth")
    if p.size == 0:
        raise ValueError("rms_error of empty sequences")
    return math.sqrt(float(np.mean((p - t) ** 2)))


def sweep_sizes(n_start: int, n_end: int, step: int) -> list[int]:
    if not (1 <= n_start <= n_end):
        raise ValueError(f"need 1 <= n_start <= n_end, got {n_start}, {n_end}")
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    return list(range(n_start, n_end + 1, step))


@dataclass(frozen=True)
class ConvergenceRow:
    n_points: int
    rms_rbf: Optional[float]
    rms_gravity: Optional[float]
    fit_seconds: Optional[float]
    eval_seconds: float
    seed: int
    kernel: KernelKind
    epsilon: float
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def _run_row(n: int, seed: int, kernel: KernelKind, epsilon: float, methods: frozenset,
             idw: gravity.IdwConfig, precision: str, grid, truth) -> ConvergenceRow:
    row_seed = seed ^ n
    data = sample_random_scatter(n, row_seed)
    rms_r = rms_g = fit_s = error = None
    eval_s = 0.0
    if "rbf" in methods:
        try:
            t0 = time.perf_counter()
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", rbf.IllConditionedFitWarning)
                model = rbf.fit(data, kernel, epsilon, precision=precision)
            t1 = time.perf_counter()
            rms_r = rms_error(rbf.predict_many(model, grid), truth)
            fit_s = t1 - t0
            eval_s += time.perf_counter() - t1
        except (np.linalg.LinAlgError, MemoryError) as exc:
            logger.error("row N=%d: rbf fit failed: %s", n, exc)
            error = f"rbf: {exc}"
    if "gravity" in methods:
        t0 = time.perf_counter()
        rms_g = rms_error(gravity.idw_interpolate_many(data, grid, idw), truth)
        eval_s += time.perf_counter() - t0
    return ConvergenceRow(n, rms_r, rms_g, fit_s, eval_s, row_seed, kernel, epsilon, error)


def run_convergence_study(n_start: int = FULL_SWEEP[0], n_end: int = FULL_SWEEP[1],
                          step: int = FULL_SWEEP[2], seed: int = 42,
                          kernel: KernelKind | str = DEFAULT_KERNEL,
                          epsilon: float = DEFAULT_EPSILON,
                          methods: Iterable[str] = METHODS,
                          idw: gravity.IdwConfig = gravity.IdwConfig(),
                          threads: int = 1, precision: str = "auto") -> list[ConvergenceRow]:
    """One row per N in ``range(n_start, n_end + 1, step)``, ordered by N.

    Row N draws its scatter with seed ``seed ^ N``. A failed fit marks its
    row and the sweep continues. ``precision`` is passed to :func:`rbf.fit`.
    """
    sizes = sweep_sizes(n_start, n_end, step)
    kind = parse_kernel(kernel)
    eps = check_epsilon(epsilon)
    chosen = frozenset(methods)
    unknown = chosen - set(METHODS)
    if unknown or not chosen:
        raise ValueError(f"methods must be a non-empty subset of {METHODS}, got {sorted(chosen)}")
    grid, truth = make_eval_grid()

    def one(n):
        return _run_row(n, seed, kind, eps, chosen, idw, precision, grid, truth)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, sizes))
    return [one(n) for n in sizes]


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def format_csv(rows: Iterable[ConvergenceRow], *, timings: bool = True) -> str:
    """CSV text with LF endings and shortest round-trip floats.

    ``timings=False`` blanks the two timing columns, which is what makes
    reruns byte-comparable.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([
            r.n_points,
            _fmt(r.rms_rbf),
            _fmt(r.rms_gravity),
            _fmt(r.fit_seconds) if timings else "",
            _fmt(r.eval_seconds) if timings else "",
            r.seed,
            r.kernel.value,
            _fmt(r.epsilon),
        ])
    return buf.getvalue()
