"""HTTP service tests over an in-process client."""

import io
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from hilbert_tiles.codec import HilbertPolygon, IntervalSet
from hilbert_tiles.config import load_config
from hilbert_tiles.crate import manifest_for, write_crate
from hilbert_tiles.errors import ValidationError
from hilbert_tiles.protocol import TileRequest
from hilbert_tiles.pyramid import build_pyramid
from hilbert_tiles.render import LayerStyle, encode_png, render_feature_tile
from hilbert_tiles.service import create_app

from .test_table import random_polygons

ORDER = 6


@pytest.fixture(scope="module")
def service_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("service")
    rng = np.random.default_rng(99)
    polygons = random_polygons(rng, ORDER, 20)
    pyramids = {"nuclei": build_pyramid(polygons, ORDER, min_order=2)}
    manifest = manifest_for(
        pyramids, name="scene", image_width=64, image_height=64, base_order=ORDER
    )
    write_crate(root / "scene.crate.zip", manifest, pyramids)
    config = {
        "host": "127.0.0.1",
        "port": 8123,
        "images": {
            "board.svs": {"type": "checkerboard", "width": 4096, "height": 4096, "cell": 256}
        },
        "layers": {
            "nuclei": {"crate": "scene.crate.zip", "layer": "nuclei", "style": {"code": 77}}
        },
    }
    (root / "service.json").write_text(json.dumps(config))
    return root


@pytest.fixture(scope="module")
def client(service_dir):
    config = load_config(service_dir / "service.json")
    return TestClient(create_app(config), raise_server_exceptions=False)


class TestInfo:
    def test_layer_info(self, client):
        response = client.get("/nuclei/info.json")
        assert response.status_code == 200
        doc = response.json()
        assert doc["kind"] == "features"
        assert (doc["width"], doc["height"]) == (64, 64)
        assert doc["levels"] == 5
        assert doc["polygonCount"] == 20
        assert doc["classes"] == [{"code": "code", "red": 77, "color": None}]

    def test_image_info(self, client):
        doc = client.get("/board.svs/info.json").json()
        assert doc["kind"] == "image"
        assert doc["width"] == 4096

    def test_unknown_identifier(self, client):
        assert client.get("/ghost/info.json").status_code == 404


class TestImageTiles:
    def test_jpeg_tile(self, client):
        response = client.get("/board.svs/0,0,1024,1024/256,256/0/default.jpg")
        assert response.status_code == 200
        assert response.headers["content-type"] == "image/jpeg"
        image = Image.open(io.BytesIO(response.content))
        assert image.size == (256, 256)

    def test_png_tile(self, client):
        response = client.get("/board.svs/0,0,256,256/256,256/0/default.png")
        assert response.status_code == 200
        assert Image.open(io.BytesIO(response.content)).format == "PNG"

    def test_region_outside_image(self, client):
        response = client.get("/board.svs/4000,4000,200,200/64,64/0/default.jpg")
        assert response.status_code == 400

    def test_json_rejected_for_image(self, client):
        response = client.get("/board.svs/0,0,256,256/64,64/0/default.json")
        assert response.status_code == 400


class TestFeatureTiles:
    def test_png_tile_matches_direct_render(self, client, service_dir):
        response = client.get("/nuclei/0,0,64,64/128,128/0/default.png")
        assert response.status_code == 200
        from hilbert_tiles.crate import read_crate

        _, pyramids = read_crate(service_dir / "scene.crate.zip")
        expected = encode_png(
            render_feature_tile(
                pyramids["nuclei"],
                LayerStyle({"code": 77}),
                TileRequest("nuclei", 0, 0, 64, 64, 128, 128, 0, "default", "png"),
                64,
                64,
            )
        )
        assert response.content == expected

    def test_json_tile(self, client):
        response = client.get("/nuclei/0,0,64,64/64,64/0/default.json")
        assert response.status_code == 200
        doc = response.json()
        assert doc["image"] == "nuclei"
        assert doc["level"] == 0
        assert len(doc["polygons"]) > 0

    def test_jpg_rejected_for_features(self, client):
        response = client.get("/nuclei/0,0,64,64/64,64/0/default.jpg")
        assert response.status_code == 400

    def test_rotation_not_implemented(self, client):
        response = client.get("/nuclei/0,0,64,64/64,64/90/default.png")
        assert response.status_code == 501

    def test_quality_rejected(self, client):
        response = client.get("/nuclei/0,0,64,64/64,64/0/bitonal.png")
        assert response.status_code == 400

    def test_malformed_region(self, client):
        response = client.get("/nuclei/0,0,64/64,64/0/default.png")
        assert response.status_code == 400

    def test_unknown_identifier_tile(self, client):
        response = client.get("/ghost/0,0,64,64/64,64/0/default.png")
        assert response.status_code == 404

    def test_region_beyond_manifest_dimensions(self, client):
        response = client.get("/nuclei/32,32,64,64/64,64/0/default.png")
        assert response.status_code == 400


class TestCaching:
    def test_etag_and_304(self, client):
        path = "/nuclei/0,0,32,32/32,32/0/default.png"
        first = client.get(path)
        etag = first.headers["etag"]
        assert etag.startswith('"') and etag.endswith('"')
        revalidate = client.get(path, headers={"If-None-Match": etag})
        assert revalidate.status_code == 304
        assert revalidate.headers["etag"] == etag

    def test_identical_requests_identical_bodies(self, client):
        path = "/nuclei/0,0,64,64/96,96/0/default.png"
        assert client.get(path).content == client.get(path).content

    def test_different_paths_different_etags(self, client):
        a = client.get("/nuclei/0,0,32,32/32,32/0/default.png").headers["etag"]
        b = client.get("/nuclei/0,0,32,32/33,33/0/default.png").headers["etag"]
        assert a != b


class TestConfig:
    def test_missing_crate_fails_startup(self, tmp_path):
        (tmp_path / "bad.json").write_text(
            json.dumps({"layers": {"x": {"crate": "missing.zip"}}})
        )
        with pytest.raises(Exception):
            load_config(tmp_path / "bad.json")

    def test_unknown_layer_in_crate(self, service_dir, tmp_path):
        config = {
            "layers": {
                "x": {"crate": str(service_dir / "scene.crate.zip"), "layer": "ghost"}
            }
        }
        (tmp_path / "cfg.json").write_text(json.dumps(config))
        with pytest.raises(ValidationError):
            load_config(tmp_path / "cfg.json")

    def test_identifier_collision(self, service_dir, tmp_path):
        config = {
            "images": {"dup": {"type": "checkerboard", "width": 64, "height": 64}},
            "layers": {"dup": {"crate": str(service_dir / "scene.crate.zip"), "layer": "nuclei"}},
        }
        (tmp_path / "cfg.json").write_text(json.dumps(config))
        with pytest.raises(ValidationError):
            load_config(tmp_path / "cfg.json")

    def test_auto_style_when_unspecified(self, service_dir, tmp_path):
        config = {
            "layers": {"n": {"crate": str(service_dir / "scene.crate.zip"), "layer": "nuclei"}}
        }
        (tmp_path / "cfg.json").write_text(json.dumps(config))
        loaded = load_config(tmp_path / "cfg.json")
        assert loaded.layers["n"].style.red_for("code") >= 1
