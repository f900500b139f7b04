"""Vector preorders on nonnegative real vectors.

All relations depend only on the multiset of entries: both arguments are
sorted ascending before partial sums are compared.  Sums are compared with
an absolute slack of ``SUM_SLACK`` so that exact small rationals entered as
floats behave as exact values.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import InvalidInput

SUM_SLACK = 1e-12


def _vector(v: Iterable[float], name: str = "vector") -> np.ndarray:
    arr = np.asarray(list(v) if not isinstance(v, np.ndarray) else v, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidInput(f"{name} must have at least one entry")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise InvalidInput(f"{name} entries must be finite and nonnegative")
    return arr


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = order_coordinates(x), order_coordinates(y)
    if xs.size != ys.size:
        raise InvalidInput(f"length mismatch: {xs.size} vs {ys.size}")
    return xs, ys


def order_coordinates(v: Iterable[float]) -> np.ndarray:
    """Entries sorted ascending, ``x_{1:n} <= ... <= x_{n:n}``."""
    return np.sort(_vector(v), kind="stable")


def majorizes(x, y) -> bool:
    """``x`` majorizes ``y``: equal totals and every prefix sum of ``y`` dominates."""
    xs, ys = _pair(x, y)
    if abs(xs.sum() - ys.sum()) > SUM_SLACK:
        return False
    return bool(np.all(np.cumsum(ys)[:-1] >= np.cumsum(xs)[:-1] - SUM_SLACK))


def weakly_submajorizes(x, y) -> bool:
    """``x`` weakly submajorizes ``y``: every upper tail sum of ``x`` dominates."""
    xs, ys = _pair(x, y)
    tail_x = np.cumsum(xs[::-1])
    tail_y = np.cumsum(ys[::-1])
    return bool(np.all(tail_y <= tail_x + SUM_SLACK))


def weakly_supermajorizes(x, y) -> bool:
    """``x`` weakly supermajorizes ``y``: every prefix sum of ``y`` dominates."""
    xs, ys = _pair(x, y)
    return bool(np.all(np.cumsum(ys) >= np.cumsum(xs) - SUM_SLACK))


def expand_outlier_vector(a: float, b: float, n1: int, n2: int) -> np.ndarray:
    """``(a, ..., a, b, ..., b)`` with ``n1`` copies of ``a`` then ``n2`` of ``b``."""
    for n in (n1, n2):
        if int(n) != n or n < 1:
            raise InvalidInput("multiplicities must be integers >= 1")
    _vector([a, b], "outlier values")
    return np.concatenate((np.full(int(n1), float(a)), np.full(int(n2), float(b))))


def in_increasing_cone(v) -> bool:
    """Membership in ``0 < x_1 <= ... <= x_n``."""
    arr = np.asarray(v, dtype=float).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        return False
    return bool(arr[0] > 0 and np.all(np.diff(arr) >= 0))


def in_decreasing_cone(v) -> bool:
    """Membership in ``x_1 >= ... >= x_n > 0``."""
    arr = np.asarray(v, dtype=float).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        return False
    return bool(arr[-1] > 0 and np.all(np.diff(arr) <= 0))
