"""Polygon interchange formats and cell-mask conversion.

Vertex polygons are the interchange form (WKT, GeoJSON-style JSON, SVG point
lists, newline-delimited record files); cell masks are the raster form on the
curve grid.  Coordinates are pixels of the source image, y growing downward.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .curve import check_order, grid_side
from .errors import DomainError, ParseError, UnsupportedGeometryError, ValidationError

Point = tuple[float, float]

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)


def _close_ring(points: list[Point]) -> tuple[Point, ...]:
    """Normalize closure: the stored ring always repeats the first vertex last."""
    if not points:
        raise ValidationError("ring has no vertices")
    if points[0] != points[-1]:
        points = points + [points[0]]
    distinct = len(set(points[:-1]))
    if distinct < 3:
        raise ValidationError(f"ring needs >= 3 distinct vertices, got {distinct}")
    return tuple(points)


@dataclass(frozen=True)
class VertexPolygon:
    """Cartesian polygon as one or more closed rings; rings[0] is the outer
    boundary, further rings are holes (kept for interchange, ignored by
    rasterization)."""

    rings: tuple[tuple[Point, ...], ...]

    @classmethod
    def from_rings(cls, rings) -> "VertexPolygon":
        if not rings:
            raise ValidationError("polygon has no rings")
        return cls(tuple(_close_ring([(float(x), float(y)) for x, y in ring]) for ring in rings))

    @property
    def outer(self) -> tuple[Point, ...]:
        return self.rings[0]

    def distinct_vertex_count(self) -> int:
        """Vertices across all rings, not counting each ring's closing repeat."""
        return sum(len(r) - 1 for r in self.rings)


class CellMask:
    """Set of covered cells on an order-n grid, stored as a bounding-box bitmap."""

    __slots__ = ("order", "x0", "y0", "bits")

    def __init__(self, order: int, x0: int = 0, y0: int = 0, bits: np.ndarray | None = None):
        self.order = check_order(order)
        if bits is None:
            bits = np.zeros((0, 0), dtype=bool)
        side = grid_side(order)
        if bits.size:
            if not (0 <= x0 and 0 <= y0 and x0 + bits.shape[1] <= side and y0 + bits.shape[0] <= side):
                raise DomainError("mask bounding box outside the grid")
        self.x0 = x0
        self.y0 = y0
        self.bits = bits

    @classmethod
    def from_cells(cls, order: int, cells) -> "CellMask":
        cells = list(cells)
        if not cells:
            return cls(order)
        side = grid_side(order)
        xs = np.fromiter((c[0] for c in cells), dtype=np.int64, count=len(cells))
        ys = np.fromiter((c[1] for c in cells), dtype=np.int64, count=len(cells))
        if xs.min() < 0 or ys.min() < 0 or xs.max() >= side or ys.max() >= side:
            raise DomainError(f"cell outside the order-{order} grid")
        x0, y0 = int(xs.min()), int(ys.min())
        bits = np.zeros((int(ys.max()) - y0 + 1, int(xs.max()) - x0 + 1), dtype=bool)
        bits[ys - y0, xs - x0] = True
        return cls(order, x0, y0, bits)

    @classmethod
    def from_cell_arrays(cls, order: int, xs: np.ndarray, ys: np.ndarray) -> "CellMask":
        if xs.size == 0:
            return cls(order)
        side = grid_side(order)
        if xs.min() < 0 or ys.min() < 0 or xs.max() >= side or ys.max() >= side:
            raise DomainError(f"cell outside the order-{order} grid")
        x0, y0 = int(xs.min()), int(ys.min())
        bits = np.zeros((int(ys.max()) - y0 + 1, int(xs.max()) - x0 + 1), dtype=bool)
        bits[ys - y0, xs - x0] = True
        return cls(order, x0, y0, bits)

    def covered_array(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Vectorized coverage lookup; out-of-box coordinates read as uncovered."""
        cx = xs - self.x0
        cy = ys - self.y0
        ok = (cx >= 0) & (cy >= 0) & (cx < self.bits.shape[1]) & (cy < self.bits.shape[0])
        out = np.zeros(xs.shape, dtype=bool)
        if ok.any():
            out[ok] = self.bits[cy[ok], cx[ok]]
        return out

    def boundary_cell_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Covered cells with at least one uncovered 4-neighbor (cells beyond
        the bounding box and the grid edge count as uncovered)."""
        if not self.bits.size:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        padded = np.zeros((self.bits.shape[0] + 2, self.bits.shape[1] + 2), dtype=bool)
        padded[1:-1, 1:-1] = self.bits
        interior = (
            padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
        )
        ys, xs = np.nonzero(self.bits & ~interior)
        return xs.astype(np.int64) + self.x0, ys.astype(np.int64) + self.y0

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    def is_empty(self) -> bool:
        return not self.bits.any()

    def covers(self, x: int, y: int) -> bool:
        cx, cy = x - self.x0, y - self.y0
        if 0 <= cy < self.bits.shape[0] and 0 <= cx < self.bits.shape[1]:
            return bool(self.bits[cy, cx])
        return False

    def cells(self) -> set[tuple[int, int]]:
        ys, xs = np.nonzero(self.bits)
        return {(int(x) + self.x0, int(y) + self.y0) for x, y in zip(xs, ys)}

    def cell_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        ys, xs = np.nonzero(self.bits)
        return xs.astype(np.int64) + self.x0, ys.astype(np.int64) + self.y0

    def __eq__(self, other):
        if not isinstance(other, CellMask):
            return NotImplemented
        return self.order == other.order and self.cells() == other.cells()

    def __repr__(self):
        return f"CellMask(order={self.order}, count={self.count})"


@dataclass(frozen=True)
class RangeDocument:
    """Named interval list in the interchange JSON layout."""

    name: str
    type: str
    ranges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prev_hi = None
        for lo, hi in self.ranges:
            if lo > hi:
                raise ValidationError(f"range [{lo}, {hi}] has lo > hi")
            if prev_hi is not None and lo <= prev_hi:
                raise ValidationError("ranges must be sorted and non-overlapping")
            prev_hi = hi


def serialize_range_document(doc: RangeDocument) -> str:
    payload = {"name": doc.name, "type": doc.type, "Ranges": [[lo, hi] for lo, hi in doc.ranges]}
    return json.dumps(payload, indent=2)


def parse_range_document(text: str) -> RangeDocument:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad range document JSON: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(obj, dict):
        raise ParseError("range document must be a JSON object")
    try:
        ranges = tuple((int(lo), int(hi)) for lo, hi in obj["Ranges"])
        return RangeDocument(name=str(obj["name"]), type=str(obj["type"]), ranges=ranges)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"range document missing or malformed field: {exc}") from exc


_NUMBER_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_WORD_RE = re.compile(r"[A-Za-z]+")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise ParseError(f"expected {ch!r}", offset=self.pos)
        self.pos += 1

    def word(self) -> str:
        self.skip_ws()
        m = _WORD_RE.match(self.text, self.pos)
        if not m:
            raise ParseError("expected geometry tag", offset=self.pos)
        self.pos = m.end()
        return m.group()

    def number(self) -> float:
        self.skip_ws()
        m = _NUMBER_RE.match(self.text, self.pos)
        if not m:
            raise ParseError("expected a number", offset=self.pos)
        self.pos = m.end()
        return float(m.group())


def _wkt_ring(sc: _Scanner) -> list[Point]:
    sc.expect("(")
    if sc.peek() == ")":
        raise ParseError("empty ring", offset=sc.pos)
    points = []
    while True:
        x = sc.number()
        y = sc.number()
        points.append((x, y))
        if sc.peek() == ",":
            sc.expect(",")
        else:
            break
    sc.expect(")")
    return points


def parse_wkt(text: str) -> VertexPolygon:
    """Parse a WKT POLYGON literal.

    Both the bare single-parenthesis coordinate list and the standard
    double-parenthesis ring list are accepted.
    """
    sc = _Scanner(text)
    start = sc.pos
    tag = sc.word()
    if tag.upper() != "POLYGON":
        raise UnsupportedGeometryError(f"unsupported geometry {tag!r}", offset=start)
    sc.expect("(")
    rings = []
    if sc.peek() == "(":
        while True:
            rings.append(_wkt_ring(sc))
            if sc.peek() == ",":
                sc.expect(",")
            else:
                break
    else:
        # single-paren form: the coordinates follow directly
        if sc.peek() == ")":
            raise ParseError("empty ring", offset=sc.pos)
        points = []
        while True:
            x = sc.number()
            y = sc.number()
            points.append((x, y))
            if sc.peek() == ",":
                sc.expect(",")
            else:
                break
        rings.append(points)
    sc.expect(")")
    sc.skip_ws()
    if sc.pos != len(sc.text):
        raise ParseError("trailing characters after polygon", offset=sc.pos)
    return VertexPolygon.from_rings(rings)


def polygon_to_wkt(p: VertexPolygon) -> str:
    def fmt(v: float) -> str:
        return str(int(v)) if float(v).is_integer() else repr(v)

    rings = ", ".join(
        "(" + ", ".join(f"{fmt(x)} {fmt(y)}" for x, y in ring) + ")" for ring in p.rings
    )
    return f"POLYGON ({rings})"


def parse_geojson_polygon(text: str) -> VertexPolygon:
    """Parse a GeoJSON-style polygon object; the type key is matched
    case-insensitively."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON: {exc.msg}", offset=exc.pos) from exc
    return geojson_object_to_polygon(obj)


def geojson_object_to_polygon(obj) -> VertexPolygon:
    if not isinstance(obj, dict):
        raise ParseError("polygon JSON must be an object")
    type_value = None
    for key, value in obj.items():
        if key.lower() == "type":
            type_value = value
    if type_value is not None and str(type_value).lower() != "polygon":
        raise UnsupportedGeometryError(f"unsupported geometry type {type_value!r}")
    if "coordinates" not in obj:
        raise ParseError("polygon JSON lacks a coordinates field")
    coords = obj["coordinates"]
    if not isinstance(coords, list) or not coords:
        raise ParseError("coordinates must be a non-empty array of rings")
    rings = []
    for ring in coords:
        if not isinstance(ring, list):
            raise ParseError("each ring must be an array of [x, y] pairs")
        points = []
        for pair in ring:
            if not isinstance(pair, (list, tuple)) or len(pair) < 2:
                raise ParseError(f"bad coordinate pair {pair!r}")
            points.append((float(pair[0]), float(pair[1])))
        rings.append(points)
    return VertexPolygon.from_rings(rings)


def parse_svg_points(text: str) -> VertexPolygon:
    """Parse an SVG polygon points attribute: whitespace-separated x,y pairs."""
    points = []
    for token in text.split():
        parts = token.split(",")
        if len(parts) != 2:
            raise ParseError(f"bad point token {token!r}", offset=text.find(token))
        try:
            points.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ParseError(f"bad coordinate in {token!r}", offset=text.find(token)) from exc
    if not points:
        raise ParseError("no points given")
    return VertexPolygon.from_rings([points])


@dataclass(frozen=True)
class PolygonRecord:
    """One ingested polygon with its optional per-record columns."""

    polygon: VertexPolygon
    class_code: str | None = None
    certainty: float | None = None
    line: int | None = None


def parse_record_line(line: str, lineno: int | None = None) -> PolygonRecord:
    """Parse one newline-delimited record: WKT or JSON geometry, optionally
    followed by tab-separated class-code and certainty columns."""
    parts = line.rstrip("\n").split("\t")
    geometry = parts[0].strip()
    try:
        if geometry.startswith("{"):
            polygon = parse_geojson_polygon(geometry)
        else:
            polygon = parse_wkt(geometry)
    except ParseError as exc:
        raise ParseError(str(exc), line=lineno) from exc
    class_code = parts[1].strip() if len(parts) > 1 and parts[1].strip() else None
    certainty = None
    if len(parts) > 2 and parts[2].strip():
        try:
            certainty = float(parts[2])
        except ValueError as exc:
            raise ParseError(f"bad certainty {parts[2]!r}", line=lineno) from exc
        if not 0.0 <= certainty <= 1.0:
            raise ParseError(f"certainty {certainty} outside [0, 1]", line=lineno)
    return PolygonRecord(polygon, class_code, certainty, lineno)


def load_records(text: str, strict: bool = True) -> tuple[list[PolygonRecord], int]:
    """Load polygon records from file content.

    Accepts newline-delimited WKT/JSON records or a whole-file GeoJSON
    document (FeatureCollection or a single polygon object).  Returns the
    records and, in lenient mode, the number of skipped bad lines.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError:
            obj = None
        if isinstance(obj, dict) and "features" in obj:
            records = []
            for i, feature in enumerate(obj["features"]):
                geom = feature.get("geometry", feature)
                props = feature.get("properties") or {}
                class_code = props.get("classCode") or props.get("class_code") or props.get("class")
                certainty = props.get("certainty")
                records.append(
                    PolygonRecord(
                        geojson_object_to_polygon(geom),
                        str(class_code) if class_code is not None else None,
                        float(certainty) if certainty is not None else None,
                        line=i + 1,
                    )
                )
            return records, 0
    records = []
    skipped = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(parse_record_line(line, lineno))
        except (ParseError, ValidationError):
            if strict:
                raise
            skipped += 1
    return records, skipped


def polygon_to_mask(p: VertexPolygon, order: int) -> CellMask:
    """Rasterize the outer ring: a cell is covered iff its center point
    (x+0.5, y+0.5) lies inside under the even-odd rule.  Hole rings are
    ignored."""
    side = grid_side(order)
    for ring in p.rings:
        for x, y in ring:
            if not (0 <= x <= side and 0 <= y <= side):
                raise DomainError(
                    f"vertex ({x}, {y}) outside the order-{order} grid [0, {side}]"
                )
    ring = p.outer
    ex1 = np.array([a[0] for a in ring[:-1]], dtype=float)
    ey1 = np.array([a[1] for a in ring[:-1]], dtype=float)
    ex2 = np.array([a[0] for a in ring[1:]], dtype=float)
    ey2 = np.array([a[1] for a in ring[1:]], dtype=float)

    y_lo = max(0, math.floor(ey1.min()))
    y_hi = min(side - 1, math.ceil(ey1.max()))
    x_lo = max(0, math.floor(ex1.min()))
    x_hi = min(side - 1, math.ceil(ex1.max()))
    if y_hi < y_lo or x_hi < x_lo:
        return CellMask(order)

    centers = np.arange(y_lo, y_hi + 1, dtype=float) + 0.5
    crossing = (ey1[None, :] > centers[:, None]) != (ey2[None, :] > centers[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (centers[:, None] - ey1[None, :]) / (ey2[None, :] - ey1[None, :])
        xc = ex1[None, :] + t * (ex2[None, :] - ex1[None, :])
    xc = np.where(crossing, xc, np.inf)
    xc.sort(axis=1)
    counts = crossing.sum(axis=1)

    width = x_hi - x_lo + 1
    bits = np.zeros((y_hi - y_lo + 1, width), dtype=bool)
    for r in range(bits.shape[0]):
        k = int(counts[r])
        for j in range(0, k, 2):
            a, b = xc[r, j], xc[r, j + 1]
            c0 = max(x_lo, math.ceil(a - 0.5))
            c1 = min(x_hi, math.ceil(b - 0.5) - 1)
            if c1 >= c0:
                bits[r, c0 - x_lo : c1 - x_lo + 1] = True
    if not bits.any():
        return CellMask(order)
    return CellMask(order, x_lo, y_lo, bits)


_RIGHT_TURNS = {
    (1, 0): ((0, 1), (1, 0), (0, -1)),
    (0, 1): ((-1, 0), (0, 1), (1, 0)),
    (-1, 0): ((0, -1), (-1, 0), (0, 1)),
    (0, -1): ((1, 0), (0, -1), (-1, 0)),
}


def _trace_component(bits: np.ndarray, x0: int, y0: int) -> list[list[tuple[int, int]]]:
    """Stitch a component's boundary edges into loops, taking the rightmost
    turn at pinch vertices so the interior stays on the right-hand side."""
    padded = np.zeros((bits.shape[0] + 2, bits.shape[1] + 2), dtype=bool)
    padded[1:-1, 1:-1] = bits
    core = padded[1:-1, 1:-1]
    north = ~padded[:-2, 1:-1] & core
    south = ~padded[2:, 1:-1] & core
    west = ~padded[1:-1, :-2] & core
    east = ~padded[1:-1, 2:] & core

    out_edges: dict[tuple[int, int], dict[tuple[int, int], tuple[int, int]]] = {}

    def add(sx, sy, dx, dy):
        out_edges.setdefault((sx, sy), {})[(dx, dy)] = (sx + dx, sy + dy)

    for (name, arr) in (("n", north), ("e", east), ("s", south), ("w", west)):
        ys, xs = np.nonzero(arr)
        for cx, cy in zip(xs + x0, ys + y0):
            cx, cy = int(cx), int(cy)
            if name == "n":
                add(cx, cy, 1, 0)
            elif name == "e":
                add(cx + 1, cy, 0, 1)
            elif name == "s":
                add(cx + 1, cy + 1, -1, 0)
            else:
                add(cx, cy + 1, 0, -1)

    loops = []
    remaining = sum(len(v) for v in out_edges.values())
    while remaining:
        start = min(v for v, dirs in out_edges.items() if dirs)
        direction = sorted(out_edges[start])[0]
        loop = [start]
        vertex = start
        while True:
            nxt = out_edges[vertex].pop(direction)
            remaining -= 1
            if nxt == start:
                break
            loop.append(nxt)
            choices = out_edges.get(nxt, {})
            for cand in _RIGHT_TURNS[direction]:
                if cand in choices:
                    direction = cand
                    break
            else:
                raise AssertionError("open boundary loop")
            vertex = nxt
        loops.append(loop)
    return loops


def _simplify_loop(loop: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Merge colinear runs; keeps corners only."""
    n = len(loop)
    corners = []
    for i in range(n):
        prev = loop[i - 1]
        cur = loop[i]
        nxt = loop[(i + 1) % n]
        d1 = (cur[0] - prev[0], cur[1] - prev[1])
        d2 = (nxt[0] - cur[0], nxt[1] - cur[1])
        if d1 != d2:
            corners.append(cur)
    return corners


def _signed_area(loop: list[tuple[int, int]]) -> float:
    area = 0
    for (x1, y1), (x2, y2) in zip(loop, loop[1:] + loop[:1]):
        area += x1 * y2 - x2 * y1
    return area / 2.0


def mask_to_polygon(m: CellMask) -> list[VertexPolygon]:
    """Trace each 4-connected component's outer boundary into a closed ring
    with vertices on the integer cell-corner lattice.

    Hole loops that touch the outer boundary at a corner are traced through
    it (rasterizing the ring reproduces the component exactly); fully
    interior holes are dropped and fill in on rasterization.
    """
    if m.is_empty():
        return []
    labels, n_components = ndimage.label(m.bits, structure=_FOUR_CONNECTED)
    polygons = []
    for comp in range(1, n_components + 1):
        comp_bits = labels == comp
        loops = _trace_component(comp_bits, m.x0, m.y0)
        outer = [lp for lp in loops if _signed_area(lp) > 0]
        # one positive loop per 4-connected component
        ring = _simplify_loop(max(outer, key=_signed_area))
        start = ring.index(min(ring))
        ring = ring[start:] + ring[:start]
        polygons.append(VertexPolygon.from_rings([ring]))
    polygons.sort(key=lambda p: p.outer[0])
    return polygons
