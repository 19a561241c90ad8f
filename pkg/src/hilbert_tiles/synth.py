"""Synthetic polygon corpora: jittered ellipses for benchmarks and demos.

Real slide annotations cannot be bundled, so benchmarks run against
generated nucleus-like blobs: random ellipses with radially jittered
boundaries.  Each blob is star-shaped around its center (the radius is a
single-valued function of the angle), so the rings never self-intersect.
Generation is deterministic for a given seed.
"""

from __future__ import annotations

import math
from collections.abc import Iterator

import numpy as np

from .errors import ValidationError
from .geometry import VertexPolygon, polygon_to_wkt

DEFAULT_CLASSES = ("nucleus", "cytoplasm", "stroma")


def jittered_ellipse(
    rng: np.random.Generator,
    cx: float,
    cy: float,
    rx: float,
    ry: float,
    angle: float,
    vertex_count: int,
    jitter: float,
) -> VertexPolygon:
    """One ellipse outline with per-vertex radial noise, integer vertices."""
    theta = np.linspace(0.0, 2.0 * math.pi, vertex_count, endpoint=False)
    radial = 1.0 + rng.uniform(-jitter, jitter, vertex_count)
    ex = rx * radial * np.cos(theta)
    ey = ry * radial * np.sin(theta)
    ca, sa = math.cos(angle), math.sin(angle)
    xs = np.rint(cx + ca * ex - sa * ey).astype(int)
    ys = np.rint(cy + sa * ex + ca * ey).astype(int)
    points: list[tuple[int, int]] = []
    for x, y in zip(xs.tolist(), ys.tolist()):
        if not points or (x, y) != points[-1]:
            points.append((x, y))
    if len(points) > 1 and points[0] == points[-1]:
        points.pop()
    return VertexPolygon.from_rings([points])


def generate_records(
    count: int,
    width: int,
    height: int,
    seed: int = 0,
    *,
    min_radius: float = 4.0,
    max_radius: float = 24.0,
    jitter: float = 0.25,
    vertex_count: int = 20,
    classes: tuple[str, ...] = DEFAULT_CLASSES,
) -> Iterator[str]:
    """Yield ``count`` tab-separated record lines: WKT, class, certainty."""
    if count < 0:
        raise ValidationError("count must be non-negative")
    if not 3.0 <= min_radius <= max_radius:
        raise ValidationError("need 3 <= min-radius <= max-radius")
    if not 0.0 <= jitter < 1.0:
        raise ValidationError("jitter must be in [0, 1)")
    if vertex_count < 8:
        raise ValidationError("vertex count must be at least 8")
    if not classes:
        raise ValidationError("need at least one class code")
    margin = max_radius * (1.0 + jitter) + 2.0
    if width < 2 * margin or height < 2 * margin:
        raise ValidationError(
            f"image {width}x{height} too small for radius {max_radius} blobs"
        )
    rng = np.random.default_rng(seed)
    for _ in range(count):
        cx = rng.uniform(margin, width - margin)
        cy = rng.uniform(margin, height - margin)
        rx = rng.uniform(min_radius, max_radius)
        ry = rng.uniform(min_radius, max_radius)
        angle = rng.uniform(0.0, math.pi)
        polygon = jittered_ellipse(rng, cx, cy, rx, ry, angle, vertex_count, jitter)
        class_code = classes[int(rng.integers(0, len(classes)))]
        certainty = round(float(rng.uniform(0.05, 1.0)), 4)
        yield f"{polygon_to_wkt(polygon)}\t{class_code}\t{certainty}"
