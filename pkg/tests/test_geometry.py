"""Parser, serializer, and mask-conversion tests for the geometry module."""

import json
import math

import numpy as np
import pytest

from hilbert_tiles.errors import (
    DomainError,
    ParseError,
    UnsupportedGeometryError,
    ValidationError,
)
from hilbert_tiles.geometry import (
    CellMask,
    PolygonRecord,
    RangeDocument,
    VertexPolygon,
    load_records,
    mask_to_polygon,
    parse_geojson_polygon,
    parse_range_document,
    parse_record_line,
    parse_svg_points,
    parse_wkt,
    polygon_to_mask,
    polygon_to_wkt,
    serialize_range_document,
)

from . import oracles

PENTAGON_RING = ((1.0, 1.0), (1.0, 4.0), (3.0, 5.0), (5.0, 3.0), (4.0, 1.0), (1.0, 1.0))

PENTAGON_WKT = "POLYGON (1 1, 1 4, 3 5, 5 3, 4 1, 1 1)"
PENTAGON_JSON = '{"coordinates": [[[1,1], [1,4], [3,5], [5,3], [4,1], [1,1]]], "Type": "Polygon"}'
PENTAGON_SVG = "1,1 1,4 3,5 5,3 4,1 1,1"

NUCLEUS_WKT = (
    "POLYGON ((22284 70778, 22281 70781, 22281 70783, 22283\n"
    "70785, 22284 70785, 22286 70787, 22288 70787, 22289 70786, 22291 70786, 22292 70785, 22293\n"
    "70785, 22293 70783, 22291 70781, 22291 70780, 22290 70780, 22289 70779, 22286 70779))"
)


class TestVertexPolygon:
    def test_closure_is_normalized(self):
        open_ring = VertexPolygon.from_rings([[(0, 0), (4, 0), (4, 4)]])
        closed_ring = VertexPolygon.from_rings([[(0, 0), (4, 0), (4, 4), (0, 0)]])
        assert open_ring == closed_ring
        assert open_ring.outer[0] == open_ring.outer[-1]

    def test_distinct_vertex_floor(self):
        with pytest.raises(ValidationError):
            VertexPolygon.from_rings([[(0, 0), (1, 1), (0, 0)]])
        with pytest.raises(ValidationError):
            VertexPolygon.from_rings([[(0, 0), (1, 1)]])
        with pytest.raises(ValidationError):
            VertexPolygon.from_rings([])

    def test_distinct_vertex_count(self):
        p = VertexPolygon.from_rings([PENTAGON_RING])
        assert p.distinct_vertex_count() == 5


class TestFormatAgreement:
    def test_three_formats_one_ring(self):
        parsed = [
            parse_wkt(PENTAGON_WKT),
            parse_geojson_polygon(PENTAGON_JSON),
            parse_svg_points(PENTAGON_SVG),
        ]
        for p in parsed:
            assert p.rings == (PENTAGON_RING,)

    def test_wkt_double_paren_and_hole(self):
        p = parse_wkt("POLYGON ((0 0, 8 0, 8 8, 0 8), (2 2, 6 2, 6 6, 2 6))")
        assert len(p.rings) == 2
        assert p.rings[1][0] == (2.0, 2.0)

    def test_wkt_round_trip(self):
        p = parse_wkt(PENTAGON_WKT)
        text = polygon_to_wkt(p)
        assert text == "POLYGON ((1 1, 1 4, 3 5, 5 3, 4 1, 1 1))"
        assert parse_wkt(text) == p

    def test_nucleus_literal_vertex_count(self):
        p = parse_wkt(NUCLEUS_WKT)
        assert p.distinct_vertex_count() == 17
        assert p.outer[0] == p.outer[-1] == (22284.0, 70778.0)

    def test_json_type_key_case_insensitive(self):
        lower = parse_geojson_polygon('{"coordinates": [[[0,0],[3,0],[3,3]]], "type": "polygon"}')
        upper = parse_geojson_polygon('{"coordinates": [[[0,0],[3,0],[3,3]]], "Type": "Polygon"}')
        assert lower == upper


class TestParseErrors:
    def test_wkt_unsupported_tag(self):
        with pytest.raises(UnsupportedGeometryError):
            parse_wkt("LINESTRING (0 0, 1 1)")

    def test_wkt_offset_points_at_failure(self):
        text = "POLYGON (1 1, 2)"
        with pytest.raises(ParseError) as info:
            parse_wkt(text)
        assert info.value.offset == text.index(")", 9)

    def test_wkt_empty_ring(self):
        with pytest.raises(ParseError):
            parse_wkt("POLYGON ()")

    def test_wkt_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_wkt("POLYGON (0 0, 2 0, 2 2) extra")

    def test_json_unsupported_type(self):
        with pytest.raises(UnsupportedGeometryError):
            parse_geojson_polygon('{"coordinates": [[[0,0],[1,0],[1,1]]], "type": "LineString"}')

    def test_json_bad_syntax_has_offset(self):
        with pytest.raises(ParseError) as info:
            parse_geojson_polygon('{"coordinates": [[[0,0],[1,0],')
        assert info.value.offset is not None

    def test_json_missing_coordinates(self):
        with pytest.raises(ParseError):
            parse_geojson_polygon('{"type": "Polygon"}')

    def test_svg_bad_token(self):
        with pytest.raises(ParseError):
            parse_svg_points("1,1 2 3,3")


class TestRangeDocument:
    FIXTURE = RangeDocument(
        name="Polygon 1",
        type="Nuclear Material",
        ranges=((8, 12), (17, 18), (23, 24), (27, 36), (53, 53)),
    )

    def test_serialized_layout(self):
        text = serialize_range_document(self.FIXTURE)
        obj = json.loads(text)
        assert list(obj) == ["name", "type", "Ranges"]
        assert obj == {
            "name": "Polygon 1",
            "type": "Nuclear Material",
            "Ranges": [[8, 12], [17, 18], [23, 24], [27, 36], [53, 53]],
        }

    def test_round_trip(self):
        assert parse_range_document(serialize_range_document(self.FIXTURE)) == self.FIXTURE

    def test_rejects_disorder(self):
        with pytest.raises(ValidationError):
            RangeDocument(name="x", type="t", ranges=((5, 3),))
        with pytest.raises(ValidationError):
            RangeDocument(name="x", type="t", ranges=((0, 4), (4, 6)))
        with pytest.raises(ValidationError):
            RangeDocument(name="x", type="t", ranges=((10, 12), (0, 2)))

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            parse_range_document("not json")
        with pytest.raises(ParseError):
            parse_range_document('{"name": "x"}')


class TestRecordLines:
    def test_wkt_with_columns(self):
        rec = parse_record_line("POLYGON (0 0, 4 0, 4 4)\ttumor\t0.87", lineno=3)
        assert rec.class_code == "tumor"
        assert rec.certainty == pytest.approx(0.87)
        assert rec.line == 3

    def test_json_geometry_line(self):
        rec = parse_record_line('{"coordinates": [[[0,0],[4,0],[4,4]]], "Type": "Polygon"}')
        assert rec.polygon.distinct_vertex_count() == 3
        assert rec.class_code is None and rec.certainty is None

    def test_certainty_validation(self):
        with pytest.raises(ParseError):
            parse_record_line("POLYGON (0 0, 4 0, 4 4)\tx\tnope", lineno=9)
        with pytest.raises(ParseError) as info:
            parse_record_line("POLYGON (0 0, 4 0, 4 4)\tx\t1.5", lineno=9)
        assert info.value.line == 9

    def test_load_records_strict_and_lenient(self):
        text = "POLYGON (0 0, 4 0, 4 4)\nBOGUS LINE\nPOLYGON (8 8, 9 8, 9 9)\n"
        with pytest.raises(ParseError) as info:
            load_records(text, strict=True)
        assert info.value.line == 2
        records, skipped = load_records(text, strict=False)
        assert len(records) == 2 and skipped == 1

    def test_load_records_feature_collection(self):
        doc = {
            "type": "FeatureCollection",
            "features": [
                {
                    "type": "Feature",
                    "geometry": {"type": "Polygon", "coordinates": [[[0, 0], [4, 0], [4, 4]]]},
                    "properties": {"classCode": "lymphocyte", "certainty": 0.5},
                }
            ],
        }
        records, skipped = load_records(json.dumps(doc))
        assert skipped == 0
        assert records[0].class_code == "lymphocyte"
        assert records[0].certainty == pytest.approx(0.5)


class TestCellMask:
    def test_from_cells_round_trip(self):
        cells = {(3, 4), (3, 5), (7, 1)}
        m = CellMask.from_cells(4, cells)
        assert m.cells() == cells
        assert m.count == 3
        assert m.covers(3, 4) and not m.covers(4, 4)

    def test_equality_ignores_bbox_framing(self):
        a = CellMask.from_cells(3, {(2, 2)})
        bits = np.zeros((4, 4), dtype=bool)
        bits[2, 2] = True
        b = CellMask(3, 0, 0, bits)
        assert a == b

    def test_rejects_out_of_grid(self):
        with pytest.raises(DomainError):
            CellMask.from_cells(2, {(4, 0)})
        with pytest.raises(DomainError):
            CellMask.from_cells(2, {(0, -1)})


class TestPolygonToMask:
    def test_unit_square_covers_one_cell(self):
        p = VertexPolygon.from_rings([[(0, 0), (1, 0), (1, 1), (0, 1)]])
        assert polygon_to_mask(p, 3).cells() == {(0, 0)}

    def test_pentagon_matches_center_oracle(self):
        p = parse_wkt(PENTAGON_WKT)
        expected = oracles.rasterize_ring(PENTAGON_RING, 3)
        assert polygon_to_mask(p, 3).cells() == expected

    def test_boundary_centers_follow_crossing_rule(self):
        # centers exactly on the edge x=2.5 belong to the right-open side
        p = VertexPolygon.from_rings([[(0.5, 0.5), (2.5, 0.5), (2.5, 2.5), (0.5, 2.5)]])
        expected = oracles.rasterize_ring(p.outer, 3)
        assert polygon_to_mask(p, 3).cells() == expected

    def test_sliver_can_be_empty(self):
        p = VertexPolygon.from_rings([[(0, 0.1), (6, 0.2), (6, 0.3)]])
        assert polygon_to_mask(p, 3).is_empty()

    def test_hole_rings_are_ignored(self):
        outer_only = parse_wkt("POLYGON ((0 0, 8 0, 8 8, 0 8))")
        with_hole = parse_wkt("POLYGON ((0 0, 8 0, 8 8, 0 8), (2 2, 6 2, 6 6, 2 6))")
        assert polygon_to_mask(with_hole, 3) == polygon_to_mask(outer_only, 3)

    def test_vertex_outside_grid_rejected(self):
        p = VertexPolygon.from_rings([[(0, 0), (9, 0), (9, 9)]])
        with pytest.raises(DomainError):
            polygon_to_mask(p, 3)

    def test_nucleus_literal_matches_oracle(self):
        p = parse_wkt(NUCLEUS_WKT)
        got = polygon_to_mask(p, 17)
        expected = oracles.rasterize_ring(p.outer, 17)
        assert got.cells() == expected
        assert got.count > 0

    def test_random_rings_match_center_oracle(self):
        rng = np.random.default_rng(2024)
        for _ in range(25):
            n = int(rng.integers(3, 10))
            ring = [(float(x), float(y)) for x, y in rng.uniform(0, 32, size=(n, 2))]
            if len(set(ring)) < 3:
                continue
            p = VertexPolygon.from_rings([ring])
            expected = oracles.rasterize_ring(p.outer, 5)
            assert polygon_to_mask(p, 5).cells() == expected


class TestMaskToPolygon:
    def test_unit_cell_ring(self):
        m = CellMask.from_cells(3, {(0, 0)})
        polys = mask_to_polygon(m)
        assert len(polys) == 1
        assert polys[0].outer == ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0))

    def test_square_block_collapses_to_corners(self):
        m = CellMask.from_cells(3, {(0, 0), (1, 0), (0, 1), (1, 1)})
        polys = mask_to_polygon(m)
        assert polys[0].outer == ((0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0), (0.0, 0.0))

    def test_l_shape_has_six_corners(self):
        m = CellMask.from_cells(3, {(0, 0), (0, 1), (1, 1)})
        polys = mask_to_polygon(m)
        assert len(polys) == 1
        assert polys[0].distinct_vertex_count() == 6

    def test_diagonal_cells_are_two_components(self):
        m = CellMask.from_cells(3, {(0, 0), (1, 1)})
        polys = mask_to_polygon(m)
        assert len(polys) == 2
        starts = [p.outer[0] for p in polys]
        assert starts == sorted(starts)

    def test_empty_mask(self):
        assert mask_to_polygon(CellMask(3)) == []

    def test_round_trip_identity_on_hole_free_blobs(self):
        rng = np.random.default_rng(7)
        for order in (3, 4, 5, 6):
            for _ in range(8):
                cells = oracles.random_blob(rng, order)
                m = CellMask.from_cells(order, cells)
                rebuilt = CellMask(m.order)
                for p in mask_to_polygon(m):
                    part = polygon_to_mask(p, order)
                    for cell in part.cells():
                        assert not rebuilt.covers(*cell), "components overlap"
                    rebuilt = CellMask.from_cells(order, rebuilt.cells() | part.cells())
                assert rebuilt == m

    def test_interior_hole_fills_on_round_trip(self):
        ring_cells = {(x, y) for x in range(3) for y in range(3)} - {(1, 1)}
        m = CellMask.from_cells(3, ring_cells)
        polys = mask_to_polygon(m)
        assert len(polys) == 1
        rebuilt = polygon_to_mask(polys[0], 3)
        assert rebuilt.cells() == ring_cells | {(1, 1)}

    def test_arbitrary_masks_bracketed_by_hole_fill(self):
        rng = np.random.default_rng(99)
        for _ in range(12):
            order = 4
            side = 1 << order
            n = int(rng.integers(1, 60))
            cells = {
                (int(x), int(y))
                for x, y in zip(rng.integers(0, side, n), rng.integers(0, side, n))
            }
            m = CellMask.from_cells(order, cells)
            rebuilt: set = set()
            for p in mask_to_polygon(m):
                rebuilt |= polygon_to_mask(p, order).cells()
            assert cells <= rebuilt
            assert rebuilt <= oracles.fill_holes(cells, order)

    def test_inlet_pinch_round_trips_exactly(self):
        # a C-shape whose mouth is one cell wide: the boundary turns into the
        # inlet through pinch vertices and must come back out
        cells = {(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2)}
        m = CellMask.from_cells(3, cells)
        polys = mask_to_polygon(m)
        assert len(polys) == 1
        assert polygon_to_mask(polys[0], 3).cells() == cells
