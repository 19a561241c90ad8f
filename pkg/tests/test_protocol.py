"""URL grammar tests, anchored on the documented example requests."""

import pytest

from hilbert_tiles.errors import ParseError, RotationUnsupportedError, UnsupportedFormatError
from hilbert_tiles.protocol import TileRequest, parse_tile_url

EXAMPLE_JPG = "http://server.com/iiif/image.svs/25000,25000,10000,10000/512,512/0/default.jpg"
EXAMPLE_PNG = "http://server.com/tiles/v2/image.svs/25000,25000,10000,10000/512,512/0/default.png"


class TestParse:
    def test_example_jpg_request(self):
        req = parse_tile_url(EXAMPLE_JPG)
        assert req.identifier == "image.svs"
        assert req.region == (25000, 25000, 10000, 10000)
        assert req.size == (512, 512)
        assert req.rotation == 0
        assert req.quality == "default"
        assert req.format == "jpg"

    def test_prefix_host_and_scheme_ignored(self):
        bare = parse_tile_url("image.svs/25000,25000,10000,10000/512,512/0/default.jpg")
        assert bare == parse_tile_url(EXAMPLE_JPG)
        assert parse_tile_url(EXAMPLE_PNG).format == "png"

    def test_json_variant(self):
        req = parse_tile_url(EXAMPLE_JPG.replace("default.jpg", "default.json"))
        assert req.format == "json"

    def test_path_round_trip(self):
        req = parse_tile_url(EXAMPLE_JPG)
        assert parse_tile_url(req.path()) == req

    def test_leading_slash_ok(self):
        req = parse_tile_url("/layer/0,0,64,64/64,64/0/default.png")
        assert req.identifier == "layer"


class TestRejections:
    def test_rotation_unsupported(self):
        with pytest.raises(RotationUnsupportedError):
            parse_tile_url("id/0,0,10,10/512,512/90/default.png")

    def test_unknown_format(self):
        with pytest.raises(UnsupportedFormatError):
            parse_tile_url("id/0,0,10,10/512,512/0/default.tiff")

    @pytest.mark.parametrize(
        "path",
        [
            "id/0,0,10/512,512/0/default.png",  # region needs 4 parts
            "id/0,0,10,x/512,512/0/default.png",  # non-integer
            "id/-5,0,10,10/512,512/0/default.png",  # negative origin
            "id/0,0,0,10/512,512/0/default.png",  # zero width
            "id/0,0,10,10/512/0/default.png",  # size needs 2 parts
            "id/0,0,10,10/0,512/0/default.png",  # zero output
            "id/0,0,10,10/512,512/zero/default.png",  # rotation not integer
            "id/0,0,10,10/512,512/0/default",  # no extension
            "id/0,0,10,10/512,512/0/.png",  # empty quality
            "region/size/0",  # too few segments
        ],
    )
    def test_malformed_paths(self, path):
        with pytest.raises(ParseError):
            parse_tile_url(path)


def test_request_path_renders_grammar():
    req = TileRequest("img", 1, 2, 30, 40, 5, 6, 0, "default", "png")
    assert req.path() == "img/1,2,30,40/5,6/0/default.png"
