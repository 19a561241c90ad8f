"""Base-image tile sources: directory pyramids of fixed-size tiles and
procedural synthetic images for tests and demos."""

from __future__ import annotations

import io
import json
import math
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DomainError, ParseError, UnknownIdentifierError, ValidationError
from .protocol import TileRequest
from .render import JPEG_QUALITY, PNG_COMPRESS_LEVEL

DESCRIPTOR_NAME = "image.json"
TILE_SIZE = 256


class ImageSource:
    """Interface: dimensions plus region reads at any pyramid level."""

    width: int
    height: int
    level_count: int

    def level_size(self, level: int) -> tuple[int, int]:
        scale = 1 << level
        return (
            max(1, math.ceil(self.width / scale)),
            max(1, math.ceil(self.height / scale)),
        )

    def read_region(self, level: int, x: int, y: int, w: int, h: int) -> Image.Image:
        raise NotImplementedError

    def fingerprint(self) -> str:
        raise NotImplementedError


class CheckerboardSource(ImageSource):
    """Procedural checkerboard: base pixel (bx, by) takes color
    ``colors[(bx // cell + by // cell) % 2]``, at every level computed in
    closed form from the top-left base pixel of each level cell."""

    def __init__(
        self,
        width: int,
        height: int,
        cell: int = 256,
        colors=((235, 235, 235), (70, 100, 140)),
        level_count: int | None = None,
    ):
        if width < 1 or height < 1 or cell < 1:
            raise ValidationError("checkerboard needs positive dimensions and cell size")
        self.width = width
        self.height = height
        self.cell = cell
        self.colors = (tuple(colors[0]), tuple(colors[1]))
        if level_count is None:
            level_count = max(1, (max(width, height) - 1).bit_length() - 7)
        self.level_count = level_count

    def read_region(self, level: int, x: int, y: int, w: int, h: int) -> Image.Image:
        scale = 1 << level
        bx = (np.arange(x, x + w, dtype=np.int64) * scale) // self.cell
        by = (np.arange(y, y + h, dtype=np.int64) * scale) // self.cell
        parity = (bx[None, :] + by[:, None]) % 2
        palette = np.array(self.colors, dtype=np.uint8)
        return Image.fromarray(palette[parity])

    def fingerprint(self) -> str:
        return f"checkerboard:{self.width}x{self.height}:{self.cell}:{self.colors}"


class DirectoryPyramidSource(ImageSource):
    """Image stored as ``level-<k>/<col>_<row>.<ext>`` tile files plus a JSON
    descriptor with dimensions, tile size, level count, and tile format."""

    def __init__(self, root):
        self.root = Path(root)
        descriptor_path = self.root / DESCRIPTOR_NAME
        try:
            doc = json.loads(descriptor_path.read_text())
        except OSError as exc:
            raise UnknownIdentifierError(f"no image descriptor at {descriptor_path}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"{descriptor_path}: {exc.msg}", offset=exc.pos) from exc
        try:
            self.width = int(doc["width"])
            self.height = int(doc["height"])
            self.tile_size = int(doc.get("tileSize", TILE_SIZE))
            self.level_count = int(doc["levels"])
            self.tile_format = str(doc.get("format", "png"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{descriptor_path}: missing or bad field {exc}") from exc
        if self.width < 1 or self.height < 1 or self.level_count < 1:
            raise ValidationError(f"{descriptor_path}: dimensions and levels must be positive")

    def _tile(self, level: int, col: int, row: int) -> Image.Image:
        path = self.root / f"level-{level}" / f"{col}_{row}.{self.tile_format}"
        with Image.open(path) as img:
            return img.convert("RGB")

    def read_region(self, level: int, x: int, y: int, w: int, h: int) -> Image.Image:
        level_w, level_h = self.level_size(level)
        if x < 0 or y < 0 or x + w > level_w or y + h > level_h:
            raise DomainError(f"region outside level {level} ({level_w}x{level_h})")
        ts = self.tile_size
        out = np.zeros((h, w, 3), dtype=np.uint8)
        for row in range(y // ts, (y + h - 1) // ts + 1):
            for col in range(x // ts, (x + w - 1) // ts + 1):
                tile = np.asarray(self._tile(level, col, row))
                tx0, ty0 = col * ts, row * ts
                sx0, sy0 = max(x, tx0), max(y, ty0)
                sx1 = min(x + w, tx0 + tile.shape[1])
                sy1 = min(y + h, ty0 + tile.shape[0])
                if sx1 <= sx0 or sy1 <= sy0:
                    continue
                out[sy0 - y : sy1 - y, sx0 - x : sx1 - x] = tile[
                    sy0 - ty0 : sy1 - ty0, sx0 - tx0 : sx1 - tx0
                ]
        return Image.fromarray(out)

    def fingerprint(self) -> str:
        return f"directory:{self.root}:{self.width}x{self.height}:{self.level_count}"


def write_directory_pyramid(base: np.ndarray, out_dir, tile_size: int = TILE_SIZE) -> None:
    """Materialize a directory pyramid from a base RGB array (tests/demos)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    height, width = base.shape[:2]
    levels = max(1, (max(width, height) - 1).bit_length() - (tile_size - 1).bit_length() + 1)
    doc = {
        "width": width,
        "height": height,
        "tileSize": tile_size,
        "levels": levels,
        "format": "png",
    }
    (out / DESCRIPTOR_NAME).write_text(json.dumps(doc, indent=2) + "\n")
    image = Image.fromarray(base).convert("RGB")
    for level in range(levels):
        level_dir = out / f"level-{level}"
        level_dir.mkdir(exist_ok=True)
        scale = 1 << level
        lw = max(1, math.ceil(width / scale))
        lh = max(1, math.ceil(height / scale))
        scaled = image.resize((lw, lh), Image.BILINEAR) if level else image
        for row in range((lh - 1) // tile_size + 1):
            for col in range((lw - 1) // tile_size + 1):
                box = (
                    col * tile_size,
                    row * tile_size,
                    min(lw, (col + 1) * tile_size),
                    min(lh, (row + 1) * tile_size),
                )
                scaled.crop(box).save(level_dir / f"{col}_{row}.png", format="PNG")


def select_image_level(source: ImageSource, req: TileRequest) -> int:
    scale = min(req.w / req.out_w, req.h / req.out_h)
    if scale <= 1.0:
        return 0
    return min(max(int(math.floor(math.log2(scale))), 0), source.level_count - 1)


def serve_image_tile(source: ImageSource, req: TileRequest) -> bytes:
    """Crop the region from the best pyramid level, scale to the requested
    size, and encode as the requested format."""
    if req.format not in ("jpg", "png"):
        raise ValidationError(f"image tiles cannot be served as {req.format!r}")
    if req.x + req.w > source.width or req.y + req.h > source.height:
        raise DomainError(
            f"region {req.region} exceeds the {source.width}x{source.height} image"
        )
    level = select_image_level(source, req)
    scale = 1 << level
    left = req.x // scale
    top = req.y // scale
    right = min(math.ceil((req.x + req.w) / scale), source.level_size(level)[0])
    bottom = min(math.ceil((req.y + req.h) / scale), source.level_size(level)[1])
    crop = source.read_region(level, left, top, max(1, right - left), max(1, bottom - top))
    resized = crop.resize((req.out_w, req.out_h), Image.BILINEAR)
    buf = io.BytesIO()
    if req.format == "jpg":
        resized.save(buf, format="JPEG", quality=JPEG_QUALITY)
    else:
        resized.save(buf, format="PNG", optimize=False, compress_level=PNG_COMPRESS_LEVEL)
    return buf.getvalue()
