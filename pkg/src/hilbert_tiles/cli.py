"""Command-line entry points.

Subcommands cover the operator loop: ``synth`` emits demo polygon files,
``ingest`` turns polygon files into a crate, ``stats``/``query``/``render``
read crates offline, and ``serve`` launches the HTTP tile service.  Exit
codes are distinct per failure class: 0 success, 2 usage, 3 parse,
4 I/O, 5 validation.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import sys
from pathlib import Path

import click

from .codec import HilbertPolygon, Rect, polygon_to_hilbert
from .config import load_config
from .crate import manifest_for, read_crate, write_crate
from .curve import order_for_image
from .errors import (
    CorruptionError,
    DomainError,
    EmptyGeometryError,
    ParseError,
    RotationUnsupportedError,
    UnknownIdentifierError,
    UnsupportedFormatError,
    ValidationError,
)
from .geometry import load_records
from .protocol import parse_tile_url
from .pyramid import FeaturePyramid, build_pyramid, query_pyramid
from .render import LayerStyle, encode_png, feature_tile_json, render_feature_tile
from .stats import compute_stats, report_json
from .synth import DEFAULT_CLASSES, generate_records

EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_IO = 4
EXIT_VALIDATION = 5


def _fail(code: int, exc: BaseException) -> None:
    click.echo(f"error: {exc}", err=True)
    raise SystemExit(code)


def _mapped(fn):
    """Translate library exceptions into the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ParseError, CorruptionError, UnsupportedFormatError) as exc:
            _fail(EXIT_PARSE, exc)
        except OSError as exc:
            _fail(EXIT_IO, exc)
        except (
            ValidationError,
            DomainError,
            RotationUnsupportedError,
            UnknownIdentifierError,
        ) as exc:
            _fail(EXIT_VALIDATION, exc)

    return wrapper


@click.group()
def main():
    """Store region polygons as Hilbert-curve interval sets; query, render,
    and serve them as feature tiles."""


@main.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option("--image-width", type=int, required=True, help="Base image width in pixels.")
@click.option("--image-height", type=int, required=True, help="Base image height in pixels.")
@click.option("--out", "out_crate", type=click.Path(path_type=Path), required=True)
@click.option("--layer", "layer_name", default="features", show_default=True)
@click.option("--name", "dataset_name", default=None, help="Dataset name (default: output stem).")
@click.option(
    "--default-class",
    default="urn:class:unspecified",
    show_default=True,
    help="Class code for records that carry none.",
)
@click.option("--default-certainty", type=float, default=1.0, show_default=True)
@click.option("--min-order", type=int, default=1, show_default=True)
@click.option("--drop-threshold", type=int, default=1, show_default=True)
@click.option("--lenient", is_flag=True, help="Skip bad records instead of failing.")
@_mapped
def ingest(
    inputs,
    image_width,
    image_height,
    out_crate,
    layer_name,
    dataset_name,
    default_class,
    default_certainty,
    min_order,
    drop_threshold,
    lenient,
):
    """Encode polygon files (WKT/GeoJSON/record lines) into a crate."""
    order = order_for_image(image_width, image_height)
    records = []
    skipped = 0
    for path in inputs:
        text = Path(path).read_text()
        try:
            recs, file_skipped = load_records(text, strict=not lenient)
        except ParseError as exc:
            raise ParseError(f"{path}: {exc}") from exc
        records.extend(recs)
        skipped += file_skipped

    polygons: list[HilbertPolygon] = []
    for rec in records:
        pid = f"poly-{len(polygons):06d}"
        class_code = rec.class_code or default_class
        certainty = rec.certainty if rec.certainty is not None else default_certainty
        try:
            polygons.append(polygon_to_hilbert(rec.polygon, order, pid, class_code, certainty))
        except (EmptyGeometryError, DomainError) as exc:
            if not lenient:
                where = f" (line {rec.line})" if rec.line is not None else ""
                raise ValidationError(f"record{where}: {exc}") from exc
            skipped += 1

    if not polygons and not lenient:
        raise ValidationError("no polygons in input")

    pyramid = build_pyramid(polygons, order, min_order=min_order, drop_threshold=drop_threshold)
    pyramids = {layer_name: pyramid}
    manifest = manifest_for(
        pyramids,
        name=dataset_name or Path(out_crate).stem,
        image_width=image_width,
        image_height=image_height,
        base_order=order,
    )
    write_crate(out_crate, manifest, pyramids)
    summary = {
        "crate": str(out_crate),
        "name": manifest.name,
        "baseOrder": order,
        "layers": [
            {"name": li.name, "polygonCount": li.polygon_count, "levelCount": li.level_count}
            for li in manifest.layers
        ],
        "skipped": skipped,
    }
    click.echo(json.dumps(summary, indent=2))


@main.command()
@click.argument("crate", type=click.Path(path_type=Path))
@_mapped
def stats(crate):
    """Report polygon/vertex/range totals and per-polygon ratios."""
    manifest, pyramids = read_crate(crate)
    click.echo(report_json(compute_stats(manifest, pyramids)), nl=False)


def _parse_region_arg(region: str) -> tuple[int, int, int, int]:
    parts = region.split(",")
    if len(parts) != 4:
        raise click.UsageError(f"--region needs x,y,w,h, got {region!r}")
    try:
        x, y, w, h = (int(p) for p in parts)
    except ValueError:
        raise click.UsageError(f"--region needs four integers, got {region!r}") from None
    if x < 0 or y < 0 or w < 1 or h < 1:
        raise click.UsageError(f"--region out of range: {region!r}")
    return x, y, w, h


def _layer_pyramid(pyramids: dict[str, FeaturePyramid], layer: str) -> FeaturePyramid:
    if layer not in pyramids:
        raise ValidationError(f"unknown layer {layer!r}; crate has {sorted(pyramids)}")
    return pyramids[layer]


@main.command()
@click.argument("crate", type=click.Path(path_type=Path))
@click.argument("layer")
@click.option("--region", required=True, help='Region "x,y,w,h" in base-image pixels.')
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["ids", "json", "csv"]),
    default="ids",
    show_default=True,
)
@_mapped
def query(crate, layer, region, fmt):
    """List the polygons overlapping a region, at full resolution."""
    x, y, w, h = _parse_region_arg(region)
    manifest, pyramids = read_crate(crate)
    pyramid = _layer_pyramid(pyramids, layer)
    if x + w > manifest.image_width or y + h > manifest.image_height:
        raise DomainError(
            f"region {region} outside image "
            f"{manifest.image_width}x{manifest.image_height}"
        )
    table = pyramid.levels[0]
    result = query_pyramid(pyramid, Rect(x, y, x + w - 1, y + h - 1), 0)
    if fmt == "ids":
        for pid in result.polygon_ids:
            click.echo(pid)
        return
    rows = []
    for pid in result.polygon_ids:
        class_code, certainty, _ = table.sidecar[pid]
        rows.append((pid, class_code, certainty, len(table.intervals_for(pid).ranges)))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", "class", "certainty", "rangeCount"])
        writer.writerows(rows)
        click.echo(buf.getvalue(), nl=False)
    else:
        doc = {
            "layer": layer,
            "region": [x, y, w, h],
            "polygons": [
                {"id": pid, "class": cc, "certainty": ct, "rangeCount": rc}
                for pid, cc, ct, rc in rows
            ],
        }
        click.echo(json.dumps(doc, indent=2))


@main.command()
@click.argument("crate", type=click.Path(path_type=Path))
@click.argument("layer")
@click.argument("request_text")
@click.option("--style", "style_path", type=click.Path(path_type=Path), default=None)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@_mapped
def render(crate, layer, request_text, style_path, out_path):
    """Render one tile request offline, byte-identical to the service.

    REQUEST_TEXT uses the tile URL grammar, e.g.
    "0,0,4096,4096/512,512/0/default.png".
    """
    manifest, pyramids = read_crate(crate)
    pyramid = _layer_pyramid(pyramids, layer)
    try:
        req = parse_tile_url(f"{layer}/{request_text}")
    except ParseError as exc:
        raise click.UsageError(str(exc)) from exc
    if req.quality != "default":
        raise ValidationError(f"unsupported quality {req.quality!r}")
    if style_path is not None:
        style = LayerStyle.from_json(Path(style_path).read_text())
    else:
        layer_info = next(li for li in manifest.layers if li.name == layer)
        style = LayerStyle.auto(layer_info.class_codes)
    if req.format == "png":
        tile = render_feature_tile(
            pyramid, style, req, manifest.image_width, manifest.image_height
        )
        data = encode_png(tile)
    elif req.format == "json":
        data = feature_tile_json(
            pyramid, req, manifest.image_width, manifest.image_height
        ).encode()
    else:
        raise ValidationError("feature layers serve png or json, not jpg")
    Path(out_path).write_bytes(data)
    click.echo(f"wrote {out_path} ({len(data)} bytes)")


@main.command()
@click.argument("config_file", type=click.Path(path_type=Path))
@click.option("--host", default=None, help="Override the configured bind address.")
@click.option("--port", type=int, default=None, help="Override the configured port.")
@_mapped
def serve(config_file, host, port):
    """Validate the config, open every crate, and serve tiles over HTTP."""
    import uvicorn

    from .service import create_app

    config = load_config(config_file)
    app = create_app(config)
    uvicorn.run(app, host=host or config.host, port=port or config.port)


@main.command()
@click.option("--count", type=int, default=1000, show_default=True)
@click.option("--width", type=int, default=16384, show_default=True)
@click.option("--height", type=int, default=16384, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--min-radius", type=float, default=4.0, show_default=True)
@click.option("--max-radius", type=float, default=24.0, show_default=True)
@click.option("--jitter", type=float, default=0.25, show_default=True)
@click.option("--vertices", "vertex_count", type=int, default=20, show_default=True)
@click.option(
    "--classes",
    default=",".join(DEFAULT_CLASSES),
    show_default=True,
    help="Comma-separated class codes to cycle through.",
)
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
@_mapped
def synth(count, width, height, seed, min_radius, max_radius, jitter, vertex_count, classes, out_path):
    """Generate jittered-ellipse polygon records for benchmarks."""
    class_codes = tuple(c.strip() for c in classes.split(",") if c.strip())
    lines = generate_records(
        count,
        width,
        height,
        seed,
        min_radius=min_radius,
        max_radius=max_radius,
        jitter=jitter,
        vertex_count=vertex_count,
        classes=class_codes,
    )
    text = "".join(f"{line}\n" for line in lines)
    if out_path is not None:
        Path(out_path).write_text(text)
        click.echo(f"wrote {count} records to {out_path}", err=True)
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    sys.exit(main())
