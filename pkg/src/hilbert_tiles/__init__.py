"""Feature tiles for whole-slide imagery, stored as Hilbert-curve interval sets.

Region-of-interest polygons are rasterized onto a ``2^n x 2^n`` grid,
linearized along a Hilbert space-filling curve into sorted inclusive
index ranges, stacked into queryable per-level tables, persisted in a
portable crate archive, and served as rendered tiles and polygon JSON
over an HTTP protocol addressed by region/size/rotation/quality URLs.
"""

from .codec import (
    HilbertPolygon,
    IntervalSet,
    Rect,
    downscale,
    hilbert_to_polygon,
    intervals_to_mask,
    mask_to_intervals,
    normalize,
    polygon_to_hilbert,
    rect_to_intervals,
)
from .config import ServiceConfig, load_config
from .crate import LayerInfo, Manifest, manifest_for, read_crate, write_crate
from .curve import (
    grid_side,
    index_count,
    index_to_xy,
    order_for_image,
    parent_index,
    xy_to_index,
)
from .errors import (
    CorruptionError,
    DomainError,
    EmptyGeometryError,
    ParseError,
    RotationUnsupportedError,
    TileEngineError,
    UnknownIdentifierError,
    UnsupportedFormatError,
    UnsupportedGeometryError,
    ValidationError,
)
from .geometry import (
    CellMask,
    RangeDocument,
    VertexPolygon,
    load_records,
    mask_to_polygon,
    parse_geojson_polygon,
    parse_range_document,
    parse_svg_points,
    parse_wkt,
    polygon_to_mask,
    polygon_to_wkt,
    serialize_range_document,
)
from .imagesource import (
    CheckerboardSource,
    DirectoryPyramidSource,
    ImageSource,
    serve_image_tile,
    write_directory_pyramid,
)
from .protocol import TileRequest, parse_tile_url
from .pyramid import FeaturePyramid, build_pyramid, query_pyramid, select_level
from .render import (
    LayerStyle,
    encode_png,
    feature_tile_json,
    quantize_probability,
    render_feature_tile,
)
from .service import create_app
from .stats import StatsReport, compute_stats
from .synth import generate_records
from .table import FeatureTable, QueryResult, build_table, query_intervals, query_rect

__version__ = "0.1.0"

__all__ = [
    "CellMask",
    "CheckerboardSource",
    "CorruptionError",
    "DirectoryPyramidSource",
    "DomainError",
    "EmptyGeometryError",
    "FeaturePyramid",
    "FeatureTable",
    "HilbertPolygon",
    "ImageSource",
    "IntervalSet",
    "LayerInfo",
    "LayerStyle",
    "Manifest",
    "ParseError",
    "QueryResult",
    "RangeDocument",
    "Rect",
    "RotationUnsupportedError",
    "ServiceConfig",
    "StatsReport",
    "TileEngineError",
    "TileRequest",
    "UnknownIdentifierError",
    "UnsupportedFormatError",
    "UnsupportedGeometryError",
    "ValidationError",
    "VertexPolygon",
    "build_pyramid",
    "build_table",
    "compute_stats",
    "create_app",
    "downscale",
    "encode_png",
    "feature_tile_json",
    "generate_records",
    "grid_side",
    "hilbert_to_polygon",
    "index_count",
    "index_to_xy",
    "intervals_to_mask",
    "load_config",
    "load_records",
    "manifest_for",
    "mask_to_intervals",
    "mask_to_polygon",
    "normalize",
    "order_for_image",
    "parent_index",
    "parse_geojson_polygon",
    "parse_range_document",
    "parse_svg_points",
    "parse_tile_url",
    "parse_wkt",
    "polygon_to_hilbert",
    "polygon_to_mask",
    "polygon_to_wkt",
    "quantize_probability",
    "query_intervals",
    "query_pyramid",
    "query_rect",
    "read_crate",
    "rect_to_intervals",
    "render_feature_tile",
    "select_level",
    "serialize_range_document",
    "serve_image_tile",
    "write_crate",
    "write_directory_pyramid",
    "xy_to_index",
]
