"""Bijective mapping between 2-D grid cells and 1-D Hilbert curve indices.

A curve of order ``n`` fills a ``2^n x 2^n`` grid of cells, visiting each
exactly once; indices run over ``[0, 4^n - 1]``.  Coordinates are image-style:
``x`` grows rightward, ``y`` grows downward, and the order-1 curve visits
``(0,0) -> (0,1) -> (1,1) -> (1,0)``.  Higher orders follow the standard
recursive rotate/reflect construction; the iterative bit-manipulation form
below is an exact implementation of it.  The orientation is part of the
persisted-file contract and must never change.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

MAX_ORDER = 31  # 4^31 fits in 62 bits


def check_order(order: int) -> int:
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_ORDER:
        raise DomainError(f"curve order must be an integer in [1, {MAX_ORDER}], got {order!r}")
    return int(order)


def grid_side(order: int) -> int:
    """Number of cells along each grid axis at this order."""
    return 1 << check_order(order)


def index_count(order: int) -> int:
    """Size of the index space at this order (``4^order``)."""
    return 1 << (2 * check_order(order))


def order_for_image(width: int, height: int) -> int:
    """Smallest order whose grid covers a ``width x height`` pixel image."""
    if width < 1 or height < 1:
        raise DomainError(f"image dimensions must be positive, got {width}x{height}")
    order = max(1, (max(width, height) - 1).bit_length())
    return check_order(order)


def index_to_xy(order: int, h: int) -> tuple[int, int]:
    """Cell ``(x, y)`` visited at curve position ``h``."""
    side = grid_side(order)
    h = int(h)
    if not 0 <= h < side * side:
        raise DomainError(f"index {h} out of range for order {order}")
    t, x, y, s = h, 0, 0, 1
    while s < side:
        rx = 1 & (t >> 1)
        ry = 1 & (t ^ rx)
        if ry == 0:
            if rx == 1:
                x = s - 1 - x
                y = s - 1 - y
            x, y = y, x
        x += s * rx
        y += s * ry
        t >>= 2
        s <<= 1
    return x, y


def xy_to_index(order: int, x: int, y: int) -> int:
    """Curve position at which cell ``(x, y)`` is visited; inverse of index_to_xy."""
    side = grid_side(order)
    x, y = int(x), int(y)
    if not (0 <= x < side and 0 <= y < side):
        raise DomainError(f"cell ({x}, {y}) outside the order-{order} grid")
    d = 0
    s = side >> 1
    while s > 0:
        rx = 1 if x & s else 0
        ry = 1 if y & s else 0
        d += s * s * ((3 * rx) ^ ry)
        if ry == 0:
            if rx == 1:
                x = side - 1 - x
                y = side - 1 - y
            x, y = y, x
        s >>= 1
    return d


def parent_index(h: int) -> int:
    """Index of the containing cell one order coarser (``floor(h / 4)``)."""
    h = int(h)
    if h < 0:
        raise DomainError(f"index must be non-negative, got {h}")
    return h >> 2


def index_to_xy_array(order: int, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized index_to_xy over an integer array of curve positions."""
    side = grid_side(order)
    t = np.asarray(h, dtype=np.int64).copy()
    if t.size and (t.min() < 0 or t.max() >= side * side):
        raise DomainError(f"index out of range for order {order}")
    x = np.zeros_like(t)
    y = np.zeros_like(t)
    s = 1
    while s < side:
        rx = 1 & (t >> 1)
        ry = 1 & (t ^ rx)
        swap = ry == 0
        flip = swap & (rx == 1)
        x = np.where(flip, s - 1 - x, x)
        y = np.where(flip, s - 1 - y, y)
        x, y = np.where(swap, y, x), np.where(swap, x, y)
        x += s * rx
        y += s * ry
        t >>= 2
        s <<= 1
    return x, y


def xy_to_index_array(order: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized xy_to_index over coordinate arrays."""
    side = grid_side(order)
    x = np.asarray(x, dtype=np.int64).copy()
    y = np.asarray(y, dtype=np.int64).copy()
    if x.size and not (
        0 <= x.min() and x.max() < side and 0 <= y.min() and y.max() < side
    ):
        raise DomainError(f"cell outside the order-{order} grid")
    d = np.zeros_like(x)
    s = side >> 1
    while s > 0:
        rx = ((x & s) > 0).astype(np.int64)
        ry = ((y & s) > 0).astype(np.int64)
        d += s * s * ((3 * rx) ^ ry)
        swap = ry == 0
        flip = swap & (rx == 1)
        x = np.where(flip, side - 1 - x, x)
        y = np.where(flip, side - 1 - y, y)
        x, y = np.where(swap, y, x), np.where(swap, x, y)
        s >>= 1
    return d
