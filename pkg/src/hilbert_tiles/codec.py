"""Interval-set codec: masks and rectangles to curve index ranges and back.

An interval set is the canonical stored form of a region: the sorted, merged
list of inclusive [lo, hi] curve-index ranges whose cells the region covers.
Runs of consecutive indices can only start or end at cells that have an
uncovered 4-neighbor, so every conversion works from boundary cells alone.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from .curve import check_order, grid_side, index_count, index_to_xy_array, xy_to_index_array
from .errors import DomainError, EmptyGeometryError, ValidationError
from .geometry import CellMask, VertexPolygon, mask_to_polygon, polygon_to_mask

Range = tuple[int, int]


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, merged, non-adjacent inclusive index ranges at a fixed order."""

    ranges: tuple[Range, ...]
    order: int

    def __post_init__(self):
        check_order(self.order)
        hmax = index_count(self.order) - 1
        prev_hi = None
        for lo, hi in self.ranges:
            if lo > hi:
                raise ValidationError(f"range [{lo}, {hi}] has lo > hi")
            if lo < 0 or hi > hmax:
                raise ValidationError(f"range [{lo}, {hi}] outside order-{self.order} index space")
            if prev_hi is not None and lo <= prev_hi + 1:
                raise ValidationError("ranges must be sorted, non-overlapping, non-adjacent")
            prev_hi = hi

    @classmethod
    def empty(cls, order: int) -> "IntervalSet":
        return cls((), order)

    def is_empty(self) -> bool:
        return not self.ranges

    @property
    def cell_count(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.ranges)

    def contains_index(self, h: int) -> bool:
        i = bisect.bisect_right(self.ranges, (h, index_count(self.order)))
        return i > 0 and self.ranges[i - 1][1] >= h

    def index_arrays(self) -> np.ndarray:
        """All covered indices, ascending."""
        if not self.ranges:
            return np.zeros(0, dtype=np.int64)
        parts = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in self.ranges]
        return np.concatenate(parts)

    def clip(self, lo: int, hi: int) -> "IntervalSet":
        """Restrict to the query window [lo, hi]."""
        out = []
        for a, b in self.ranges:
            if b < lo:
                continue
            if a > hi:
                break
            out.append((max(a, lo), min(b, hi)))
        return IntervalSet(tuple(out), self.order)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        if self.order != other.order:
            raise DomainError("interval sets have different orders")
        out = []
        i = j = 0
        a, b = self.ranges, other.ranges
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return normalize(out, self.order)

    def overlaps(self, lo: int, hi: int) -> bool:
        return not self.clip(lo, hi).is_empty()


@dataclass(frozen=True)
class Rect:
    """Inclusive cell-coordinate rectangle."""

    minx: int
    miny: int
    maxx: int
    maxy: int

    def __post_init__(self):
        if self.minx > self.maxx or self.miny > self.maxy:
            raise DomainError("rectangle has inverted bounds")

    @property
    def width(self) -> int:
        return self.maxx - self.minx + 1

    @property
    def height(self) -> int:
        return self.maxy - self.miny + 1

    def contains(self, x: int, y: int) -> bool:
        return self.minx <= x <= self.maxx and self.miny <= y <= self.maxy


@dataclass(frozen=True)
class HilbertPolygon:
    """A stored region: identifier, class code, certainty, and its interval set."""

    id: str
    class_code: str
    certainty: float
    intervals: IntervalSet
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.intervals.is_empty():
            raise ValidationError(f"polygon {self.id!r} has no covered cells")
        if not 0.0 <= self.certainty <= 1.0:
            raise ValidationError(f"certainty {self.certainty} outside [0, 1]")


def normalize(ranges, order: int) -> IntervalSet:
    """Sort arbitrary lo<=hi pairs and merge overlaps and adjacencies."""
    check_order(order)
    pairs = [(int(lo), int(hi)) for lo, hi in ranges]
    for lo, hi in pairs:
        if lo > hi:
            raise DomainError(f"range [{lo}, {hi}] has lo > hi")
    pairs.sort()
    merged: list[list[int]] = []
    for lo, hi in pairs:
        if merged and lo <= merged[-1][1] + 1:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return IntervalSet(tuple((lo, hi) for lo, hi in merged), order)


def _runs_from_candidates(
    hs: np.ndarray, order: int, pred_covered: np.ndarray, succ_covered: np.ndarray
) -> tuple[Range, ...]:
    """Pair run starts with run ends.

    ``hs`` are the candidate cell indices (every run boundary is among them);
    ``pred_covered``/``succ_covered`` say whether cells hs-1 / hs+1 are
    covered.  Starts and ends sorted ascending pair up one-to-one because
    maximal runs are disjoint.
    """
    hmax = index_count(order) - 1
    starts = np.sort(hs[(hs == 0) | ~pred_covered])
    ends = np.sort(hs[(hs == hmax) | ~succ_covered])
    if starts.shape != ends.shape:
        raise AssertionError("unbalanced run boundaries")
    return tuple(zip(starts.tolist(), ends.tolist()))


def mask_to_intervals(m: CellMask) -> IntervalSet:
    """Exact interval decomposition of a mask's covered cells.

    Only boundary cells are examined: a run starts at h iff cell(h) is
    covered and cell(h-1) is not (or h = 0), and cell(h-1) is always a
    4-neighbor of cell(h), so interior cells can never open or close a run.
    """
    if m.is_empty():
        return IntervalSet.empty(m.order)
    bx, by = m.boundary_cell_arrays()
    hs = xy_to_index_array(m.order, bx, by)
    px, py = index_to_xy_array(m.order, np.maximum(hs - 1, 0))
    sx, sy = index_to_xy_array(m.order, np.minimum(hs + 1, index_count(m.order) - 1))
    ranges = _runs_from_candidates(hs, m.order, m.covered_array(px, py), m.covered_array(sx, sy))
    return IntervalSet(ranges, m.order)


def _perimeter_cells(r: Rect) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = [], []
    top = np.arange(r.minx, r.maxx + 1, dtype=np.int64)
    xs.append(top)
    ys.append(np.full(top.shape, r.miny, dtype=np.int64))
    if r.maxy > r.miny:
        xs.append(top)
        ys.append(np.full(top.shape, r.maxy, dtype=np.int64))
    if r.maxy > r.miny + 1:
        mid = np.arange(r.miny + 1, r.maxy, dtype=np.int64)
        xs.append(np.full(mid.shape, r.minx, dtype=np.int64))
        ys.append(mid)
        if r.maxx > r.minx:
            xs.append(np.full(mid.shape, r.maxx, dtype=np.int64))
            ys.append(mid)
    return np.concatenate(xs), np.concatenate(ys)


def rect_to_intervals(r: Rect, order: int, counter: list[int] | None = None) -> IntervalSet:
    """Exact cover of a rectangle, computed from its perimeter ring only.

    The optional ``counter`` receives the number of cells examined (one
    entry, incremented); interior cells are never enumerated, so the count
    is at most the perimeter length 2*(w+h) - 4.
    """
    side = grid_side(order)
    if not (0 <= r.minx and 0 <= r.miny and r.maxx < side and r.maxy < side):
        raise DomainError(f"rectangle outside the order-{order} grid")
    xs, ys = _perimeter_cells(r)
    if counter is not None:
        counter[0] += len(xs)
    hs = xy_to_index_array(order, xs, ys)
    hmax = index_count(order) - 1
    px, py = index_to_xy_array(order, np.maximum(hs - 1, 0))
    sx, sy = index_to_xy_array(order, np.minimum(hs + 1, hmax))
    pred_in = (r.minx <= px) & (px <= r.maxx) & (r.miny <= py) & (py <= r.maxy)
    succ_in = (r.minx <= sx) & (sx <= r.maxx) & (r.miny <= sy) & (sy <= r.maxy)
    ranges = _runs_from_candidates(hs, order, pred_in, succ_in)
    return IntervalSet(ranges, order)


def intervals_to_mask(intervals: IntervalSet) -> CellMask:
    hs = intervals.index_arrays()
    xs, ys = index_to_xy_array(intervals.order, hs)
    return CellMask.from_cell_arrays(intervals.order, xs, ys)


def polygon_to_hilbert(
    p: VertexPolygon,
    order: int,
    id: str,
    class_code: str,
    certainty: float,
    name: str | None = None,
) -> HilbertPolygon:
    """Rasterize and encode a vertex polygon with its metadata."""
    mask = polygon_to_mask(p, order)
    if mask.is_empty():
        raise EmptyGeometryError(
            f"polygon {id!r} is thinner than one cell at order {order}"
        )
    return HilbertPolygon(id, class_code, certainty, mask_to_intervals(mask), name)


def hilbert_to_polygon(hp: HilbertPolygon) -> list[VertexPolygon]:
    """Reconstruct cartesian rings from the stored intervals."""
    return mask_to_polygon(intervals_to_mask(hp.intervals))


def downscale(intervals: IntervalSet) -> IntervalSet:
    """Map an interval set to the next coarser order.

    Each index h maps to its parent h >> 2; the image of a contiguous range
    is [lo >> 2, hi >> 2], again contiguous, so no cell expansion is needed.
    """
    if intervals.order < 2:
        raise DomainError("cannot downscale below order 1")
    return normalize(((lo >> 2, hi >> 2) for lo, hi in intervals.ranges), intervals.order - 1)
