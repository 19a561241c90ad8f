"""Self-describing zip container for a dataset: manifest, per-layer polygon
metadata, and one binary interval table per pyramid level.

Writes are byte-deterministic (fixed entry order, fixed timestamps, fixed
compression), so identical inputs hash identically.
"""

from __future__ import annotations

import io
import json
import struct
import warnings
import zipfile
from dataclasses import dataclass

import numpy as np

from .errors import CorruptionError, UnsupportedFormatError, ValidationError
from .pyramid import FeaturePyramid
from .table import FeatureTable

HTBL_MAGIC = b"HTBL"
HTBL_VERSION = 1
_HEADER = struct.Struct("<4sIB7xQ")  # magic, version, order, reserved, rowCount
_ROW_BYTES = 24
_EPOCH = (1980, 1, 1, 0, 0, 0)
METADATA_ENTRY = "crate-metadata.json"


@dataclass(frozen=True)
class LayerInfo:
    name: str
    class_codes: tuple[str, ...]
    polygon_count: int
    level_count: int
    min_order: int
    drop_threshold: int


@dataclass(frozen=True)
class Manifest:
    name: str
    description: str
    creator: str
    date_published: str
    license: str
    keywords: tuple[str, ...]
    image_width: int
    image_height: int
    base_order: int
    layers: tuple[LayerInfo, ...]

    def __post_init__(self):
        if self.image_width < 1 or self.image_height < 1:
            raise ValidationError("image dimensions must be at least 1x1")
        if (1 << self.base_order) < max(self.image_width, self.image_height):
            raise ValidationError(
                f"order {self.base_order} grid cannot hold "
                f"{self.image_width}x{self.image_height} pixels"
            )


def manifest_for(
    pyramids: dict[str, FeaturePyramid],
    *,
    name: str,
    image_width: int,
    image_height: int,
    base_order: int,
    description: str = "",
    creator: str = "",
    date_published: str = "1980-01-01T00:00:00Z",
    license: str = "",
    keywords: tuple[str, ...] = (),
) -> Manifest:
    """Derive the per-layer manifest entries from built pyramids."""
    layers = []
    for layer_name in sorted(pyramids):
        p = pyramids[layer_name]
        base = p.levels[0]
        codes = tuple(sorted({meta[0] for meta in base.sidecar.values()}))
        layers.append(
            LayerInfo(
                layer_name, codes, len(base.ids), len(p.levels), p.min_order, p.drop_threshold
            )
        )
    return Manifest(
        name,
        description,
        creator,
        date_published,
        license,
        tuple(keywords),
        image_width,
        image_height,
        base_order,
        tuple(layers),
    )


def _manifest_to_json(m: Manifest) -> str:
    doc = {
        "name": m.name,
        "description": m.description,
        "creator": m.creator,
        "datePublished": m.date_published,
        "license": m.license,
        "keywords": list(m.keywords),
        "imageWidth": m.image_width,
        "imageHeight": m.image_height,
        "baseOrder": m.base_order,
        "layers": [
            {
                "name": layer.name,
                "classCodes": list(layer.class_codes),
                "polygonCount": layer.polygon_count,
                "levelCount": layer.level_count,
                "minOrder": layer.min_order,
                "dropThreshold": layer.drop_threshold,
            }
            for layer in m.layers
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def _manifest_from_json(text: str) -> Manifest:
    try:
        doc = json.loads(text)
        layers = tuple(
            LayerInfo(
                layer["name"],
                tuple(layer["classCodes"]),
                int(layer["polygonCount"]),
                int(layer["levelCount"]),
                int(layer["minOrder"]),
                int(layer["dropThreshold"]),
            )
            for layer in doc["layers"]
        )
        return Manifest(
            doc["name"],
            doc["description"],
            doc["creator"],
            doc["datePublished"],
            doc["license"],
            tuple(doc["keywords"]),
            int(doc["imageWidth"]),
            int(doc["imageHeight"]),
            int(doc["baseOrder"]),
            layers,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptionError(f"bad {METADATA_ENTRY}: {exc}") from exc


def _polygons_entry(table: FeatureTable) -> str:
    doc = {}
    for pid in table.ids:
        class_code, certainty, display_name = table.sidecar[pid]
        entry = {"classCode": class_code, "certainty": certainty}
        if display_name is not None:
            entry["name"] = display_name
        doc[pid] = entry
    return json.dumps(doc, indent=2) + "\n"


def _table_to_htbl(table: FeatureTable, layer_ids: tuple[str, ...]) -> bytes:
    """Serialize one level; polygon ids become indexes into the layer's
    full (level-0) id list so every level shares one id space."""
    rank = {pid: i for i, pid in enumerate(layer_ids)}
    global_idx = np.array([rank[table.ids[int(i)]] for i in table.pid_idx], dtype=np.uint64)
    header = _HEADER.pack(HTBL_MAGIC, HTBL_VERSION, table.order, len(table))
    rows = np.column_stack(
        [table.starts.astype(np.uint64), table.ends.astype(np.uint64), global_idx]
    )
    return header + rows.astype("<u8").tobytes()


def _table_from_htbl(
    data: bytes,
    entry: str,
    layer_ids: tuple[str, ...],
    sidecar: dict[str, tuple[str, float, str | None]],
) -> FeatureTable:
    if len(data) < _HEADER.size:
        raise CorruptionError(f"{entry}: truncated header")
    magic, version, order, row_count = _HEADER.unpack_from(data)
    if magic != HTBL_MAGIC:
        raise UnsupportedFormatError(f"{entry}: bad magic {magic!r}")
    if version != HTBL_VERSION:
        raise UnsupportedFormatError(f"{entry}: unsupported version {version}")
    body = data[_HEADER.size :]
    if len(body) != row_count * _ROW_BYTES:
        raise CorruptionError(
            f"{entry}: header claims {row_count} rows but body holds "
            f"{len(body) / _ROW_BYTES:g}"
        )
    rows = np.frombuffer(body, dtype="<u8").reshape(-1, 3).astype(np.int64)
    starts, ends, global_idx = rows[:, 0], rows[:, 1], rows[:, 2]
    if np.any(starts > ends):
        raise CorruptionError(f"{entry}: row with start > end")
    if np.any(starts[1:] < starts[:-1]):
        raise CorruptionError(f"{entry}: rows not sorted by start")
    if row_count and int(global_idx.max()) >= len(layer_ids):
        raise CorruptionError(f"{entry}: polygon index beyond the layer id list")
    present = np.unique(global_idx)
    ids = tuple(layer_ids[int(i)] for i in present)
    remap = np.zeros(len(layer_ids) + 1, dtype=np.int64)
    remap[present] = np.arange(len(present))
    pid_idx = remap[global_idx]
    level_sidecar = {pid: sidecar[pid] for pid in ids}
    return FeatureTable(int(order), starts.copy(), ends.copy(), pid_idx, ids, level_sidecar)


def write_crate(path, manifest: Manifest, pyramids: dict[str, FeaturePyramid]) -> None:
    """Write the dataset to ``path`` as a deterministic zip archive."""
    manifest_layers = {layer.name: layer for layer in manifest.layers}
    if set(manifest_layers) != set(pyramids):
        raise ValidationError("manifest layers do not match the pyramids given")
    for layer_name, p in pyramids.items():
        info = manifest_layers[layer_name]
        if info.polygon_count != len(p.levels[0].ids):
            raise ValidationError(f"layer {layer_name!r}: polygon count mismatch")
        if info.level_count != len(p.levels):
            raise ValidationError(f"layer {layer_name!r}: level count mismatch")
        if p.base_order != manifest.base_order:
            raise ValidationError(f"layer {layer_name!r}: base order mismatch")
        if info.min_order != p.min_order or info.drop_threshold != p.drop_threshold:
            raise ValidationError(f"layer {layer_name!r}: pyramid parameter mismatch")

    def entry(zf: zipfile.ZipFile, arcname: str, data) -> None:
        zinfo = zipfile.ZipInfo(arcname, date_time=_EPOCH)
        zinfo.create_system = 3
        zinfo.external_attr = 0o644 << 16
        zf.writestr(zinfo, data, compress_type=zipfile.ZIP_DEFLATED, compresslevel=6)

    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as zf:
        entry(zf, METADATA_ENTRY, _manifest_to_json(manifest))
        for layer_name in sorted(pyramids):
            p = pyramids[layer_name]
            base = p.levels[0]
            entry(zf, f"layers/{layer_name}/polygons.json", _polygons_entry(base))
            for level, table in enumerate(p.levels):
                entry(
                    zf,
                    f"layers/{layer_name}/level-{level}.htbl",
                    _table_to_htbl(table, base.ids),
                )
    with open(path, "wb") as fh:
        fh.write(buffer.getvalue())


def read_crate(path) -> tuple[Manifest, dict[str, FeaturePyramid]]:
    """Read a crate back into memory, validating headers and table bodies."""
    try:
        zf = zipfile.ZipFile(path)
    except (OSError, zipfile.BadZipFile) as exc:
        raise CorruptionError(f"unreadable crate: {exc}") from exc
    with zf:
        names = set(zf.namelist())
        if METADATA_ENTRY not in names:
            raise CorruptionError(f"crate lacks {METADATA_ENTRY}")
        manifest = _manifest_from_json(zf.read(METADATA_ENTRY).decode("utf-8"))

        expected = {METADATA_ENTRY}
        pyramids: dict[str, FeaturePyramid] = {}
        for layer in manifest.layers:
            if layer.level_count != manifest.base_order - layer.min_order + 1:
                raise CorruptionError(
                    f"layer {layer.name!r}: level count disagrees with order span"
                )
            prefix = f"layers/{layer.name}"
            polygons_entry = f"{prefix}/polygons.json"
            expected.add(polygons_entry)
            if polygons_entry not in names:
                raise CorruptionError(f"crate lacks {polygons_entry}")
            try:
                polygon_doc = json.loads(zf.read(polygons_entry).decode("utf-8"))
            except json.JSONDecodeError as exc:
                raise CorruptionError(f"{polygons_entry}: {exc.msg}") from exc
            layer_ids = tuple(sorted(polygon_doc))
            if len(layer_ids) != layer.polygon_count:
                raise CorruptionError(
                    f"{polygons_entry}: {len(layer_ids)} polygons, "
                    f"manifest says {layer.polygon_count}"
                )
            sidecar = {}
            for pid, meta in polygon_doc.items():
                try:
                    sidecar[pid] = (
                        str(meta["classCode"]),
                        float(meta["certainty"]),
                        meta.get("name"),
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    raise CorruptionError(f"{polygons_entry}: bad entry {pid!r}: {exc}") from exc

            levels = []
            for level in range(layer.level_count):
                table_entry = f"{prefix}/level-{level}.htbl"
                expected.add(table_entry)
                if table_entry not in names:
                    raise CorruptionError(f"crate lacks {table_entry}")
                table = _table_from_htbl(zf.read(table_entry), table_entry, layer_ids, sidecar)
                if table.order != manifest.base_order - level:
                    raise CorruptionError(
                        f"{table_entry}: order {table.order}, expected "
                        f"{manifest.base_order - level}"
                    )
                levels.append(table)
            pyramids[layer.name] = FeaturePyramid(
                tuple(levels), manifest.base_order, layer.min_order, layer.drop_threshold
            )

        extras = names - expected
        if extras:
            warnings.warn(f"crate has unrecognized entries: {sorted(extras)}", stacklevel=2)
    return manifest, pyramids
