"""Feature tile rendering: RGBA rasters and JSON polygon payloads.

Pixel channels: red carries the class code's configured value (1..255,
0 reserved for background), green the quantized certainty, blue is always
0, and alpha is 255 exactly where a matched polygon covers the pixel's
cell at the selected pyramid level.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .codec import Rect, intervals_to_mask
from .curve import grid_side, xy_to_index_array
from .errors import DomainError, ValidationError
from .geometry import mask_to_polygon
from .protocol import TileRequest
from .pyramid import FeaturePyramid, query_pyramid, select_level

PNG_COMPRESS_LEVEL = 6
JPEG_QUALITY = 85


@dataclass(frozen=True)
class LayerStyle:
    """Red-channel assignment per class code plus display hints for viewers."""

    red_values: dict[str, int]
    display_colors: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for code, red in self.red_values.items():
            if not 1 <= int(red) <= 255:
                raise ValidationError(
                    f"class {code!r} red value {red} outside 1..255 (0 is reserved)"
                )

    @classmethod
    def from_json(cls, text: str) -> "LayerStyle":
        doc = json.loads(text)
        reds, colors = {}, {}
        for code, value in doc.items():
            if isinstance(value, dict):
                reds[code] = int(value["red"])
                if "color" in value:
                    colors[code] = str(value["color"])
            else:
                reds[code] = int(value)
        return cls(reds, colors)

    @classmethod
    def auto(cls, class_codes) -> "LayerStyle":
        """Spread distinct codes evenly over 1..255."""
        codes = sorted(set(class_codes))
        if not codes:
            return cls({})
        step = max(1, 255 // len(codes))
        return cls({code: min(255, 1 + i * step) for i, code in enumerate(codes)})

    def red_for(self, class_code: str) -> int:
        try:
            return int(self.red_values[class_code])
        except KeyError:
            raise ValidationError(f"no style entry for class {class_code!r}") from None


def quantize_probability(p: float) -> int:
    """Map [0,1] to 0..255 in 1/255 steps, rounding half away from zero."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability {p} outside [0, 1]")
    return int(p * 255.0 + 0.5)


def _validate_region(req: TileRequest, width: int, height: int) -> Rect:
    if req.x + req.w > width or req.y + req.h > height:
        raise DomainError(
            f"region {req.region} exceeds the {width}x{height} image"
        )
    return Rect(req.x, req.y, req.x + req.w - 1, req.y + req.h - 1)


def _pixel_cell_indices(req: TileRequest, level: int, order: int) -> np.ndarray:
    """Curve index of the level cell under each output pixel's center
    (nearest-neighbor sampling), shape (out_h, out_w)."""
    scale = 1 << level
    xs = np.floor((req.x + (np.arange(req.out_w) + 0.5) * (req.w / req.out_w)) / scale)
    ys = np.floor((req.y + (np.arange(req.out_h) + 0.5) * (req.h / req.out_h)) / scale)
    side = grid_side(order)
    xs = np.clip(xs.astype(np.int64), 0, side - 1)
    ys = np.clip(ys.astype(np.int64), 0, side - 1)
    cx = np.broadcast_to(xs[None, :], (req.out_h, req.out_w)).ravel()
    cy = np.broadcast_to(ys[:, None], (req.out_h, req.out_w)).ravel()
    return xy_to_index_array(order, cx, cy).reshape(req.out_h, req.out_w)


def render_feature_tile(
    pyramid: FeaturePyramid,
    style: LayerStyle,
    req: TileRequest,
    image_width: int | None = None,
    image_height: int | None = None,
) -> np.ndarray:
    """RGBA array (out_h, out_w, 4) for the requested region.

    Overlaps are deterministic: the polygon with the higher certainty wins
    a pixel; equal certainties fall to the ascending-id polygon.
    """
    side = grid_side(pyramid.base_order)
    region = _validate_region(req, image_width or side, image_height or side)
    level = select_level(pyramid, req.w, req.h, req.out_w, req.out_h)
    result = query_pyramid(pyramid, region, level)
    tile = np.zeros((req.out_h, req.out_w, 4), dtype=np.uint8)
    if not result.polygon_ids:
        return tile

    table = pyramid.table_at(level)
    order = pyramid.order_at(level)
    cell_idx = _pixel_cell_indices(req, level, order)

    # paint in (certainty asc, id desc) order with overwrite, so the last
    # writer of a pixel is the highest-certainty, lowest-id polygon
    ordered = sorted(result.polygon_ids, reverse=True)
    ordered.sort(key=lambda pid: table.sidecar[pid][1])
    for pid in ordered:
        class_code, certainty, _ = table.sidecar[pid]
        intervals = table.intervals_for(pid)
        bounds = np.fromiter(
            (v for lo, hi in intervals.ranges for v in (lo, hi + 1)),
            dtype=np.int64,
            count=2 * len(intervals.ranges),
        )
        covered = (np.searchsorted(bounds, cell_idx.ravel(), side="right") % 2).astype(bool)
        covered = covered.reshape(req.out_h, req.out_w)
        tile[covered] = (
            style.red_for(class_code),
            quantize_probability(certainty),
            0,
            255,
        )
    return tile


def feature_tile_json(
    pyramid: FeaturePyramid,
    req: TileRequest,
    image_width: int | None = None,
    image_height: int | None = None,
) -> str:
    """Polygon payload for the region: full rings of every matched polygon
    at the selected level, scaled back to base pixels."""
    side = grid_side(pyramid.base_order)
    region = _validate_region(req, image_width or side, image_height or side)
    level = select_level(pyramid, req.w, req.h, req.out_w, req.out_h)
    result = query_pyramid(pyramid, region, level)
    table = pyramid.table_at(level)
    scale = 1 << level
    polygons = []
    for pid in result.polygon_ids:
        class_code, certainty, _ = table.sidecar[pid]
        rings = []
        for poly in mask_to_polygon(intervals_to_mask(table.intervals_for(pid))):
            for ring in poly.rings:
                rings.append([[int(x) * scale, int(y) * scale] for x, y in ring[:-1]])
        polygons.append(
            {"id": pid, "class": class_code, "certainty": certainty, "rings": rings}
        )
    doc = {
        "image": req.identifier,
        "region": [req.x, req.y, req.w, req.h],
        "level": level,
        "polygons": polygons,
    }
    return json.dumps(doc, indent=2) + "\n"


def encode_png(tile: np.ndarray) -> bytes:
    """Byte-deterministic RGBA PNG encoding (fixed filter/compression, no
    ancillary chunks)."""
    image = Image.fromarray(tile, "RGBA")
    buf = io.BytesIO()
    image.save(buf, format="PNG", optimize=False, compress_level=PNG_COMPRESS_LEVEL)
    return buf.getvalue()
