"""Flat sorted range table and the union-of-ranges query engine.

Every polygon contributes one row per interval; rows are kept in three
parallel arrays sorted by start so queries can binary-search both ends of
the candidate window instead of scanning the table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import HilbertPolygon, IntervalSet, Rect, rect_to_intervals
from .errors import DomainError, ValidationError

Range = tuple[int, int]


@dataclass(frozen=True)
class QueryResult:
    """Distinct matched polygon ids (ascending) with the rows that matched."""

    polygon_ids: tuple[str, ...]
    matched: dict[str, tuple[Range, ...]]

    def __contains__(self, polygon_id: str) -> bool:
        return polygon_id in self.matched


class FeatureTable:
    """Immutable columnar table of (start, end, polygonId) rows plus a
    sidecar of per-polygon metadata (classCode, certainty, display name)."""

    __slots__ = ("order", "starts", "ends", "pid_idx", "ids", "sidecar", "_max_end_prefix")

    def __init__(
        self,
        order: int,
        starts: np.ndarray,
        ends: np.ndarray,
        pid_idx: np.ndarray,
        ids: tuple[str, ...],
        sidecar: dict[str, tuple[str, float, str | None]],
    ):
        self.order = order
        self.starts = starts
        self.ends = ends
        self.pid_idx = pid_idx
        self.ids = ids
        self.sidecar = sidecar
        # running maximum of ends: non-decreasing, so the earliest row that
        # can still overlap a query window is found by binary search
        self._max_end_prefix = np.maximum.accumulate(ends) if len(ends) else ends

    def __len__(self) -> int:
        return len(self.starts)

    def __eq__(self, other):
        if not isinstance(other, FeatureTable):
            return NotImplemented
        return (
            self.order == other.order
            and np.array_equal(self.starts, other.starts)
            and np.array_equal(self.ends, other.ends)
            and self.ids == other.ids
            and np.array_equal(self.pid_idx, other.pid_idx)
            and self.sidecar == other.sidecar
        )

    def row_tuples(self) -> list[tuple[int, int, str]]:
        return [
            (int(s), int(e), self.ids[int(i)])
            for s, e, i in zip(self.starts, self.ends, self.pid_idx)
        ]

    def intervals_for(self, polygon_id: str) -> IntervalSet:
        try:
            idx = self.ids.index(polygon_id)
        except ValueError:
            raise DomainError(f"unknown polygon id {polygon_id!r}") from None
        mask = self.pid_idx == idx
        ranges = tuple(zip(self.starts[mask].tolist(), self.ends[mask].tolist()))
        return IntervalSet(ranges, self.order)

    def to_polygons(self) -> list[HilbertPolygon]:
        """Reassemble one polygon per id, grouping all rows in a single pass."""
        order = np.argsort(self.pid_idx, kind="stable")
        bounds = np.searchsorted(self.pid_idx[order], np.arange(len(self.ids) + 1))
        polygons = []
        for i, pid in enumerate(self.ids):
            rows = order[bounds[i] : bounds[i + 1]]
            rows = rows[np.argsort(self.starts[rows], kind="stable")]
            ranges = tuple(zip(self.starts[rows].tolist(), self.ends[rows].tolist()))
            class_code, certainty, name = self.sidecar[pid]
            polygons.append(
                HilbertPolygon(pid, class_code, certainty, IntervalSet(ranges, self.order), name)
            )
        return polygons


def build_table(polygons: list[HilbertPolygon], order: int | None = None) -> FeatureTable:
    """Flatten polygons into the sorted range table.

    Rows are stably ordered by (start, end, id); ``order`` is only needed
    when ``polygons`` is empty.
    """
    if not polygons:
        if order is None:
            raise ValidationError("an empty table needs an explicit order")
        empty = np.zeros(0, dtype=np.int64)
        return FeatureTable(order, empty, empty.copy(), empty.copy(), (), {})
    orders = {p.intervals.order for p in polygons}
    if len(orders) > 1:
        raise ValidationError(f"polygons at mixed orders {sorted(orders)}")
    table_order = orders.pop()
    if order is not None and order != table_order:
        raise ValidationError(f"polygons are at order {table_order}, not {order}")
    ids = [p.id for p in polygons]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate polygon ids")

    id_list = tuple(sorted(ids))
    id_rank = {pid: i for i, pid in enumerate(id_list)}
    starts, ends, pid_idx = [], [], []
    for p in polygons:
        for lo, hi in p.intervals.ranges:
            starts.append(lo)
            ends.append(hi)
            pid_idx.append(id_rank[p.id])
    starts = np.asarray(starts, dtype=np.int64)
    ends = np.asarray(ends, dtype=np.int64)
    pid_idx = np.asarray(pid_idx, dtype=np.int64)
    perm = np.lexsort((pid_idx, ends, starts))
    sidecar = {p.id: (p.class_code, float(p.certainty), p.name) for p in polygons}
    return FeatureTable(table_order, starts[perm], ends[perm], pid_idx[perm], id_list, sidecar)


def query_intervals(t: FeatureTable, q: IntervalSet) -> QueryResult:
    """Union of per-range overlap queries.

    A row (s, e) overlaps a query range [b, qe] iff s <= qe and e >= b.
    The candidate window is bounded on the right by binary search on the
    sorted starts and on the left by binary search on the running maximum
    of ends; only rows inside the window are touched.
    """
    if t.order != q.order:
        raise DomainError(f"query at order {q.order} against table at order {t.order}")
    hit_rows = np.zeros(len(t), dtype=bool)
    for b, qe in q.ranges:
        hi = int(np.searchsorted(t.starts, qe, side="right"))
        if hi == 0:
            continue
        lo = int(np.searchsorted(t._max_end_prefix[:hi], b, side="left"))
        window = slice(lo, hi)
        hit_rows[window] |= t.ends[window] >= b
    matched: dict[str, list[Range]] = {}
    for row in np.nonzero(hit_rows)[0]:
        pid = t.ids[int(t.pid_idx[row])]
        matched.setdefault(pid, []).append((int(t.starts[row]), int(t.ends[row])))
    ordered = {pid: tuple(matched[pid]) for pid in sorted(matched)}
    return QueryResult(tuple(ordered), ordered)


def query_rect(t: FeatureTable, r: Rect) -> QueryResult:
    """Every polygon whose covered cells intersect the rectangle."""
    return query_intervals(t, rect_to_intervals(r, t.order))
