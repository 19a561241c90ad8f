"""Tile request URL grammar.

A request path ends in five segments:
``{identifier}/{x},{y},{w},{h}/{outW},{outH}/{rotation}/{quality}.{format}``
Anything before them (scheme, host, mount prefix) is ignored.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, RotationUnsupportedError, UnsupportedFormatError

FORMATS = ("jpg", "png", "json")


@dataclass(frozen=True)
class TileRequest:
    identifier: str
    x: int
    y: int
    w: int
    h: int
    out_w: int
    out_h: int
    rotation: int
    quality: str
    format: str

    @property
    def region(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.w, self.h)

    @property
    def size(self) -> tuple[int, int]:
        return (self.out_w, self.out_h)

    def path(self) -> str:
        return (
            f"{self.identifier}/{self.x},{self.y},{self.w},{self.h}/"
            f"{self.out_w},{self.out_h}/{self.rotation}/{self.quality}.{self.format}"
        )


def _int_list(text: str, expect: int, what: str) -> list[int]:
    parts = text.split(",")
    if len(parts) != expect:
        raise ParseError(f"{what} needs {expect} comma-separated integers, got {text!r}")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"{what} has a non-integer component in {text!r}") from None
    return values


def parse_tile_url(path_text: str) -> TileRequest:
    """Decompose a tile request path (or full URL) into its components."""
    segments = [s for s in path_text.strip().split("/") if s != ""]
    if len(segments) < 5:
        raise ParseError(f"need identifier/region/size/rotation/quality.format, got {path_text!r}")
    identifier, region_text, size_text, rotation_text, quality_text = segments[-5:]

    x, y, w, h = _int_list(region_text, 4, "region")
    if x < 0 or y < 0:
        raise ParseError(f"region origin must be non-negative in {region_text!r}")
    if w < 1 or h < 1:
        raise ParseError(f"region size must be positive in {region_text!r}")
    out_w, out_h = _int_list(size_text, 2, "size")
    if out_w < 1 or out_h < 1:
        raise ParseError(f"output size must be positive in {size_text!r}")
    try:
        rotation = int(rotation_text)
    except ValueError:
        raise ParseError(f"rotation must be an integer, got {rotation_text!r}") from None
    if rotation != 0:
        raise RotationUnsupportedError(f"rotation {rotation} is not supported (only 0)")
    if "." not in quality_text:
        raise ParseError(f"final segment needs quality.format, got {quality_text!r}")
    quality, format_name = quality_text.rsplit(".", 1)
    if not quality:
        raise ParseError(f"empty quality in {quality_text!r}")
    if format_name not in FORMATS:
        raise UnsupportedFormatError(
            f"format {format_name!r} not one of {', '.join(FORMATS)}"
        )
    return TileRequest(identifier, x, y, w, h, out_w, out_h, rotation, quality, format_name)
