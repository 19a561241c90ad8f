"""Representation statistics over crate contents.

Compares the two encodings of the same geometry: vertex points (counted
from the rings reconstructed out of level-0 interval data) versus stored
Hilbert ranges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .codec import hilbert_to_polygon
from .crate import Manifest
from .pyramid import FeaturePyramid


@dataclass(frozen=True)
class StatsReport:
    """Corpus totals and per-polygon ratios for one crate."""

    polygon_count: int
    total_vertex_points: int
    total_hilbert_ranges: int
    base_order: int

    @property
    def points_per_polygon(self) -> float | None:
        if self.polygon_count == 0:
            return None
        return self.total_vertex_points / self.polygon_count

    @property
    def ranges_per_polygon(self) -> float | None:
        if self.polygon_count == 0:
            return None
        return self.total_hilbert_ranges / self.polygon_count


def compute_stats(manifest: Manifest, pyramids: dict[str, FeaturePyramid]) -> StatsReport:
    """Totals across every layer, taken from the full-resolution level."""
    polygon_count = total_points = total_ranges = 0
    for name in sorted(pyramids):
        base = pyramids[name].levels[0]
        for hp in base.to_polygons():
            polygon_count += 1
            total_ranges += len(hp.intervals.ranges)
            total_points += sum(
                vp.distinct_vertex_count() for vp in hilbert_to_polygon(hp)
            )
    return StatsReport(polygon_count, total_points, total_ranges, manifest.base_order)


def report_json(report: StatsReport) -> str:
    """Stable-keyed JSON rendering; undefined ratios print as "n/a"."""
    points = report.points_per_polygon
    ranges = report.ranges_per_polygon
    doc = {
        "polygonCount": report.polygon_count,
        "totalVertexPoints": report.total_vertex_points,
        "totalHilbertRanges": report.total_hilbert_ranges,
        "pointsPerPolygon": "n/a" if points is None else points,
        "rangesPerPolygon": "n/a" if ranges is None else ranges,
        "baseOrder": report.base_order,
    }
    return json.dumps(doc, indent=2) + "\n"
