import { describe, expect, it } from "vitest";

import { TILE_SIZE, infoUrl, tileScaleForZoom, tileUrl, visibleTiles } from "../src/tiles.js";
import type { ImageInfo } from "../src/viewstate.js";

const IMAGE: ImageInfo = { identifier: "slide.svs", width: 4096, height: 4096 };
const BASE = "http://tiles.local/v1";

describe("tileUrl", () => {
  it("follows the region/size/rotation/quality grammar", () => {
    expect(tileUrl(BASE, "slide.svs", 25000, 25000, 10000, 10000, 512, 512, "jpg")).toBe(
      "http://tiles.local/v1/slide.svs/25000,25000,10000,10000/512,512/0/default.jpg",
    );
  });

  it("never emits a rotation other than 0", () => {
    const url = tileUrl(BASE, "x", 0, 0, 1, 1, 1, 1, "png");
    expect(url).toContain("/0/default.png");
  });

  it("strips trailing slashes from the base", () => {
    expect(tileUrl("http://h/", "id", 0, 0, 1, 1, 1, 1, "png")).toBe(
      "http://h/id/0,0,1,1/1,1/0/default.png",
    );
  });
});

describe("infoUrl", () => {
  it("addresses the identifier's info document", () => {
    expect(infoUrl(BASE, "nuclei")).toBe("http://tiles.local/v1/nuclei/info.json");
  });
});

describe("tileScaleForZoom", () => {
  it("is 1 at full resolution and above", () => {
    expect(tileScaleForZoom(1)).toBe(1);
    expect(tileScaleForZoom(4)).toBe(1);
  });

  it("doubles as the view zooms out", () => {
    expect(tileScaleForZoom(0.5)).toBe(2);
    expect(tileScaleForZoom(0.25)).toBe(4);
    expect(tileScaleForZoom(0.26)).toBe(2);
  });
});

describe("visibleTiles", () => {
  const state = { centerX: 2048, centerY: 2048, zoom: 1 };

  it("covers the viewport with the fixed tile grid", () => {
    const tiles = visibleTiles(BASE, IMAGE, state, 512, 512, "jpg");
    expect(tiles).toHaveLength(4); // 512/256 squared at zoom 1
    for (const tile of tiles) {
      expect(tile.w).toBe(TILE_SIZE);
      expect(tile.x % TILE_SIZE).toBe(0);
      expect(tile.y % TILE_SIZE).toBe(0);
    }
  });

  it("is deterministic: equal states give identical URL lists", () => {
    const a = visibleTiles(BASE, IMAGE, { ...state }, 512, 512, "png", "nuclei");
    const b = visibleTiles(BASE, IMAGE, { ...state }, 512, 512, "png", "nuclei");
    expect(a.map((t) => t.url)).toEqual(b.map((t) => t.url));
  });

  it("clips tiles at the image edge", () => {
    const corner = { centerX: 4090, centerY: 4090, zoom: 1 };
    const tiles = visibleTiles(BASE, IMAGE, corner, 512, 512, "jpg");
    expect(tiles.length).toBeGreaterThan(0);
    for (const tile of tiles) {
      expect(tile.x + tile.w).toBeLessThanOrEqual(IMAGE.width);
      expect(tile.y + tile.h).toBeLessThanOrEqual(IMAGE.height);
    }
  });

  it("requests coarser regions when zoomed out", () => {
    const out = { centerX: 2048, centerY: 2048, zoom: 0.25 };
    const tiles = visibleTiles(BASE, IMAGE, out, 512, 512, "jpg");
    for (const tile of tiles) {
      expect(tile.w).toBe(TILE_SIZE * 4);
      expect(tile.outW).toBe(TILE_SIZE);
    }
  });

  it("returns nothing for a region entirely outside the image", () => {
    const away = { centerX: 10000, centerY: 10000, zoom: 1 };
    expect(visibleTiles(BASE, IMAGE, away, 256, 256, "jpg")).toHaveLength(0);
  });
});
