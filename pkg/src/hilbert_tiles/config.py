"""Service configuration: identifiers mapped to image sources and feature
layers, loaded from a JSON file.

Relative paths inside the file are resolved against the file's directory,
so a config can travel with its data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .crate import Manifest, read_crate
from .errors import ParseError, ValidationError
from .imagesource import CheckerboardSource, DirectoryPyramidSource, ImageSource
from .pyramid import FeaturePyramid
from .render import LayerStyle


@dataclass(frozen=True)
class ImageEntry:
    identifier: str
    source: ImageSource


@dataclass(frozen=True)
class LayerEntry:
    identifier: str
    crate_path: Path
    layer_name: str
    manifest: Manifest
    pyramid: FeaturePyramid
    style: LayerStyle


@dataclass(frozen=True)
class ServiceConfig:
    host: str
    port: int
    images: dict[str, ImageEntry] = field(default_factory=dict)
    layers: dict[str, LayerEntry] = field(default_factory=dict)

    def identifiers(self) -> list[str]:
        return sorted(set(self.images) | set(self.layers))


def _build_image(identifier: str, spec: dict, base_dir: Path) -> ImageEntry:
    kind = spec.get("type")
    if kind == "checkerboard":
        source: ImageSource = CheckerboardSource(
            int(spec["width"]),
            int(spec["height"]),
            cell=int(spec.get("cell", 256)),
        )
    elif kind == "directory":
        source = DirectoryPyramidSource(base_dir / spec["path"])
    else:
        raise ValidationError(f"image {identifier!r}: unknown type {kind!r}")
    return ImageEntry(identifier, source)


def _build_layer(identifier: str, spec: dict, base_dir: Path) -> LayerEntry:
    crate_path = base_dir / spec["crate"]
    manifest, pyramids = read_crate(crate_path)
    layer_name = spec.get("layer", identifier)
    if layer_name not in pyramids:
        raise ValidationError(
            f"layer {identifier!r}: crate has no layer {layer_name!r} "
            f"(available: {sorted(pyramids)})"
        )
    pyramid = pyramids[layer_name]
    style_spec = spec.get("style")
    if style_spec is None:
        codes = {meta[0] for meta in pyramid.levels[0].sidecar.values()}
        style = LayerStyle.auto(codes)
    elif isinstance(style_spec, str):
        style = LayerStyle.from_json((base_dir / style_spec).read_text())
    else:
        style = LayerStyle.from_json(json.dumps(style_spec))
    return LayerEntry(identifier, crate_path, layer_name, manifest, pyramid, style)


def load_config(path) -> ServiceConfig:
    """Load and validate a service config, eagerly opening every crate and
    image source so problems surface at startup."""
    config_path = Path(path)
    try:
        doc = json.loads(config_path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"config {config_path}: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object")
    base_dir = config_path.parent
    try:
        images = {
            identifier: _build_image(identifier, spec, base_dir)
            for identifier, spec in doc.get("images", {}).items()
        }
        layers = {
            identifier: _build_layer(identifier, spec, base_dir)
            for identifier, spec in doc.get("layers", {}).items()
        }
    except KeyError as exc:
        raise ValidationError(f"config entry missing required field {exc}") from exc
    overlap = set(images) & set(layers)
    if overlap:
        raise ValidationError(f"identifiers used for both images and layers: {sorted(overlap)}")
    return ServiceConfig(
        host=str(doc.get("host", "127.0.0.1")),
        port=int(doc.get("port", 8000)),
        images=images,
        layers=layers,
    )
