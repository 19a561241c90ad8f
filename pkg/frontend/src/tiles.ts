/**
 * Tile addressing against the service's URL grammar:
 *
 *   {base}/{identifier}/{x},{y},{w},{h}/{outW},{outH}/{rotation}/{quality}.{format}
 *
 * The viewer walks a fixed tile grid in base-image space so that equal view
 * states always produce the identical URL set, and it never requests a
 * rotation other than 0.
 */

import type { ImageInfo, ViewState } from "./viewstate.js";
import { visibleRegion } from "./viewstate.js";

export const TILE_SIZE = 256;

export interface TileAddress {
  /** Base-image region, integer pixels. */
  x: number;
  y: number;
  w: number;
  h: number;
  /** Output size in display pixels. */
  outW: number;
  outH: number;
  url: string;
}

export type TileFormat = "png" | "jpg" | "json";

export function tileUrl(
  baseUrl: string,
  identifier: string,
  x: number,
  y: number,
  w: number,
  h: number,
  outW: number,
  outH: number,
  format: TileFormat,
): string {
  const base = baseUrl.replace(/\/+$/, "");
  return `${base}/${identifier}/${x},${y},${w},${h}/${outW},${outH}/0/default.${format}`;
}

export function infoUrl(baseUrl: string, identifier: string): string {
  return `${baseUrl.replace(/\/+$/, "")}/${identifier}/info.json`;
}

/**
 * Choose the power-of-two downscale the tiles are fetched at: one fetched
 * pixel covers roughly 1/zoom base pixels, snapped so tile regions stay on
 * a stable grid.
 */
export function tileScaleForZoom(zoom: number): number {
  let scale = 1;
  while (scale * 2 <= 1 / zoom && scale < 1 << 16) {
    scale *= 2;
  }
  return scale;
}

/**
 * The deterministic tile set covering a viewport: tiles of TILE_SIZE output
 * pixels on a grid of span TILE_SIZE*scale base pixels, clipped to the
 * image. Identical (state, viewport size, image, format) produce identical
 * URL lists in identical order.
 */
export function visibleTiles(
  baseUrl: string,
  image: ImageInfo,
  state: ViewState,
  viewportW: number,
  viewportH: number,
  format: TileFormat,
  identifier?: string,
): TileAddress[] {
  const region = visibleRegion(state, viewportW, viewportH);
  const scale = tileScaleForZoom(state.zoom);
  const span = TILE_SIZE * scale;
  const id = identifier ?? image.identifier;

  const minCol = Math.max(0, Math.floor(region.x / span));
  const minRow = Math.max(0, Math.floor(region.y / span));
  const maxCol = Math.min(
    Math.ceil(image.width / span) - 1,
    Math.floor((region.x + region.w - 1) / span),
  );
  const maxRow = Math.min(
    Math.ceil(image.height / span) - 1,
    Math.floor((region.y + region.h - 1) / span),
  );

  const tiles: TileAddress[] = [];
  for (let row = minRow; row <= maxRow; row++) {
    for (let col = minCol; col <= maxCol; col++) {
      const x = col * span;
      const y = row * span;
      const w = Math.min(span, image.width - x);
      const h = Math.min(span, image.height - y);
      if (w < 1 || h < 1) {
        continue;
      }
      const outW = Math.max(1, Math.round(w / scale));
      const outH = Math.max(1, Math.round(h / scale));
      tiles.push({
        x,
        y,
        w,
        h,
        outW,
        outH,
        url: tileUrl(baseUrl, id, x, y, w, h, outW, outH, format),
      });
    }
  }
  return tiles;
}
