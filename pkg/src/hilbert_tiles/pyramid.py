"""Multi-resolution feature pyramid: one range table per scale level.

Level k holds the base polygons downscaled k times; polygons whose cover
shrinks below the drop threshold disappear from that level onward, so
coarse levels stay small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .codec import HilbertPolygon, Rect, downscale
from .errors import DomainError
from .table import FeatureTable, QueryResult, build_table, query_rect


@dataclass(frozen=True)
class FeaturePyramid:
    levels: tuple[FeatureTable, ...]
    base_order: int
    min_order: int
    drop_threshold: int

    @property
    def max_level(self) -> int:
        return len(self.levels) - 1

    def order_at(self, level: int) -> int:
        return self.base_order - level

    def table_at(self, level: int) -> FeatureTable:
        if not 0 <= level <= self.max_level:
            raise DomainError(f"level {level} outside 0..{self.max_level}")
        return self.levels[level]


def build_pyramid(
    base: list[HilbertPolygon],
    base_order: int,
    min_order: int = 1,
    drop_threshold: int = 1,
) -> FeaturePyramid:
    """Cascade the base polygons down to ``min_order``.

    A polygon is dropped at the first level where its downscaled cover has
    fewer than ``drop_threshold`` cells, and stays absent from all coarser
    levels.
    """
    if min_order < 1:
        raise DomainError("min_order must be at least 1")
    if min_order > base_order:
        raise DomainError(f"min_order {min_order} exceeds base order {base_order}")
    if drop_threshold < 1:
        raise DomainError("drop_threshold must be at least 1")
    for p in base:
        if p.intervals.order != base_order:
            raise DomainError(f"polygon {p.id!r} is not at the base order")

    levels = [build_table(base, base_order)]
    current = list(base)
    for level in range(1, base_order - min_order + 1):
        survivors = []
        for p in current:
            scaled = downscale(p.intervals)
            if scaled.cell_count < drop_threshold:
                continue
            survivors.append(HilbertPolygon(p.id, p.class_code, p.certainty, scaled, p.name))
        current = survivors
        levels.append(build_table(current, base_order - level))
    return FeaturePyramid(tuple(levels), base_order, min_order, drop_threshold)


def select_level(p: FeaturePyramid, region_w: int, region_h: int, out_w: int, out_h: int) -> int:
    """Coarsest level at which one output pixel still spans less than two
    cells along the tighter axis."""
    if region_w < 1 or region_h < 1:
        raise DomainError("degenerate region")
    if out_w < 1 or out_h < 1:
        raise DomainError("degenerate output size")
    scale = min(region_w / out_w, region_h / out_h)
    if scale <= 1.0:
        return 0
    return min(max(int(math.floor(math.log2(scale))), 0), p.max_level)


def query_pyramid(p: FeaturePyramid, region: Rect, level: int) -> QueryResult:
    """Query a base-pixel region against the table at ``level``.

    The region is mapped to level cells by flooring both corners: the
    parent of an inclusive max coordinate is its floor as well.
    """
    table = p.table_at(level)
    scale = 1 << level
    scaled = Rect(
        region.minx // scale, region.miny // scale, region.maxx // scale, region.maxy // scale
    )
    return query_rect(table, scaled)
