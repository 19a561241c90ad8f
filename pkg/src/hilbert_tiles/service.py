"""HTTP tile service: info documents, image tiles, and feature tiles under
one IIIF-style URL grammar."""

from __future__ import annotations

import hashlib

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import LayerEntry, ServiceConfig
from .errors import (
    DomainError,
    ParseError,
    RotationUnsupportedError,
    UnknownIdentifierError,
    UnsupportedFormatError,
    ValidationError,
)
from .imagesource import serve_image_tile
from .protocol import parse_tile_url
from .render import encode_png, feature_tile_json, render_feature_tile

MEDIA_TYPES = {"jpg": "image/jpeg", "png": "image/png", "json": "application/json"}


class ClassStyleInfo(BaseModel):
    code: str
    red: int
    color: str | None = None


class IdentifierInfo(BaseModel):
    identifier: str
    kind: str  # "image" | "features"
    width: int
    height: int
    levels: int
    tileSize: int | None = None
    layerName: str | None = None
    polygonCount: int | None = None
    classes: list[ClassStyleInfo] | None = None


def _layer_info(entry: LayerEntry) -> IdentifierInfo:
    classes = [
        ClassStyleInfo(
            code=code,
            red=entry.style.red_for(code),
            color=entry.style.display_colors.get(code),
        )
        for code in sorted(entry.style.red_values)
    ]
    return IdentifierInfo(
        identifier=entry.identifier,
        kind="features",
        width=entry.manifest.image_width,
        height=entry.manifest.image_height,
        levels=len(entry.pyramid.levels),
        layerName=entry.layer_name,
        polygonCount=len(entry.pyramid.levels[0].ids),
        classes=classes,
    )


def _fingerprints(config: ServiceConfig) -> dict[str, str]:
    prints = {}
    for identifier, entry in config.images.items():
        prints[identifier] = hashlib.sha256(entry.source.fingerprint().encode()).hexdigest()
    for identifier, entry in config.layers.items():
        prints[identifier] = hashlib.sha256(entry.crate_path.read_bytes()).hexdigest()
    return prints


def create_app(config: ServiceConfig) -> FastAPI:
    """Build the service over an already-validated config (crates were
    opened and checked during loading)."""
    app = FastAPI(title="feature tile service", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET"], allow_headers=["*"]
    )
    fingerprints = _fingerprints(config)

    def error_response(status: int, exc: Exception) -> JSONResponse:
        return JSONResponse({"error": str(exc)}, status_code=status)

    @app.exception_handler(ParseError)
    @app.exception_handler(DomainError)
    @app.exception_handler(ValidationError)
    @app.exception_handler(UnsupportedFormatError)
    async def bad_request(request: Request, exc: Exception):
        return error_response(400, exc)

    @app.exception_handler(RotationUnsupportedError)
    async def not_implemented(request: Request, exc: Exception):
        return error_response(501, exc)

    @app.exception_handler(UnknownIdentifierError)
    async def not_found(request: Request, exc: Exception):
        return error_response(404, exc)

    @app.get("/{identifier}/info.json", response_model=IdentifierInfo)
    async def info(identifier: str):
        if identifier in config.layers:
            return _layer_info(config.layers[identifier])
        if identifier in config.images:
            source = config.images[identifier].source
            return IdentifierInfo(
                identifier=identifier,
                kind="image",
                width=source.width,
                height=source.height,
                levels=source.level_count,
                tileSize=getattr(source, "tile_size", None),
            )
        raise UnknownIdentifierError(f"unknown identifier {identifier!r}")

    @app.get("/{identifier}/{region}/{size}/{rotation}/{quality_format}")
    async def tile(
        identifier: str,
        region: str,
        size: str,
        rotation: str,
        quality_format: str,
        request: Request,
    ):
        req = parse_tile_url(f"{identifier}/{region}/{size}/{rotation}/{quality_format}")
        if req.quality != "default":
            raise ValidationError(f"quality {req.quality!r} not supported (only 'default')")
        if identifier not in config.layers and identifier not in config.images:
            raise UnknownIdentifierError(f"unknown identifier {identifier!r}")

        etag = hashlib.sha256(
            (fingerprints[identifier] + ":" + req.path()).encode()
        ).hexdigest()[:32]
        if request.headers.get("if-none-match") == f'"{etag}"':
            return Response(status_code=304, headers={"ETag": f'"{etag}"'})

        if identifier in config.layers:
            entry = config.layers[identifier]
            width = entry.manifest.image_width
            height = entry.manifest.image_height
            if req.format == "png":
                body = encode_png(
                    render_feature_tile(entry.pyramid, entry.style, req, width, height)
                )
            elif req.format == "json":
                body = feature_tile_json(entry.pyramid, req, width, height).encode()
            else:
                raise ValidationError("feature layers serve png or json, not jpg")
        else:
            body = serve_image_tile(config.images[identifier].source, req)

        return Response(
            content=body,
            media_type=MEDIA_TYPES[req.format],
            headers={"ETag": f'"{etag}"', "Cache-Control": "public, max-age=31536000"},
        )

    return app
