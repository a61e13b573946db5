"""Radial basis functions.

==========================  =============================
kind                        phi(r)
==========================  =============================
gaussian                    exp(-eps * r**2)
multiquadric                sqrt(1 + (eps * r)**2)
inverse-multiquadric        1 / sqrt(1 + (eps * r)**2)
thin-plate-spline           r**2 * ln(r), 0 at r = 0
==========================  =============================

The thin plate spline has no shape parameter; ``eps`` is accepted and
ignored so every kind shares one call signature.
"""
from __future__ import annotations

import enum
import math

import numba
import numpy as np

__all__ = [
    "KernelKind",
    "DEFAULT_KERNEL",
    "DEFAULT_EPSILON",
    "check_epsilon",
    "evaluate_kernel",
    "parse_kernel",
]


class KernelKind(enum.Enum):
    GAUSSIAN = "gaussian"
    MULTIQUADRIC = "multiquadric"
    INVERSE_MULTIQUADRIC = "inverse-multiquadric"
    THIN_PLATE_SPLINE = "thin-plate-spline"

    @property
    def code(self) -> int:
        return _CODES[self]

    def __str__(self) -> str:
        return self.value


_CODES = {kind: i for i, kind in enumerate(KernelKind)}

DEFAULT_KERNEL = KernelKind.MULTIQUADRIC
DEFAULT_EPSILON = 1.0


def parse_kernel(name: str | KernelKind) -> KernelKind:
    if isinstance(name, KernelKind):
        return name
    try:
        return KernelKind(name.strip().lower())
    except ValueError:
        valid = " | ".join(k.value for k in KernelKind)
        raise ValueError(f"unknown kernel {name!r}; choose one of: {valid}") from None


def check_epsilon(epsilon: float) -> float:
    eps = float(epsilon)
    if not (math.isfinite(eps) and eps > 0.0):
        raise ValueError(f"shape parameter must be positive and finite, got {epsilon!r}")
    return eps


@numba.njit(cache=True, nogil=True)
def phi(code, eps, r):
    if code == 0:
        return math.exp(-eps * r * r)
    if code == 1:
        er = eps * r
        return math.sqrt(1.0 + er * er)
    if code == 2:
        er = eps * r
        return 1.0 / math.sqrt(1.0 + er * er)
    if r == 0.0:
        return 0.0
    return r * r * math.log(r)


@numba.njit(cache=True, nogil=True)
def _phi_array(code, eps, r):
    out = np.empty(r.size)
    flat = r.ravel()
    for i in range(flat.size):
        out[i] = phi(code, eps, flat[i])
    return out


def evaluate_kernel(kind: KernelKind | str, epsilon: float, r):
    """Evaluate phi(r); scalar in, float out, array in, array out."""
    kind = parse_kernel(kind)
    eps = check_epsilon(epsilon)
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("r must be finite and non-negative")
    out = _phi_array(kind.code, eps, np.ascontiguousarray(arr)).reshape(arr.shape)
    if arr.ndim == 0:
        return float(out)
    return out
