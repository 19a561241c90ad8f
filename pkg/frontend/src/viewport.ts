/**
 * One viewport of the grid: holds the tile cache, fetch accounting, and
 * the per-viewport layer styles, and composites cached tiles into an RGBA
 * frame. Fetches happen only when the view state changes; style edits
 * recomposite from cache with zero loader calls.
 */

import type { LayerSpec } from "./config.js";
import type { ClassInfo, LayerStyleState } from "./layers.js";
import { UnknownLayerError, compositeOver, recolorTile, resolveStyle } from "./layers.js";
import type { TileAddress } from "./tiles.js";
import { visibleTiles } from "./tiles.js";
import type { ImageInfo, ViewState } from "./viewstate.js";
import { visibleRegion } from "./viewstate.js";

export interface TileLoader {
  /** Resolve a tile URL to raw RGBA bytes (outW*outH*4). */
  load(url: string, signal?: AbortSignal): Promise<Uint8ClampedArray>;
}

export interface LayerRuntime {
  name: string;
  classes: ClassInfo[];
  style: LayerStyleState;
}

export interface StylePatch {
  colorMap?: Record<string, string>;
  valueRange?: [number, number];
  opacity?: number;
  visible?: boolean;
}

/** Failed tiles render as a flat placeholder instead of crashing the frame. */
const PLACEHOLDER_GRAY = 224;

type CachedTile = Uint8ClampedArray | "failed";

export function layerRuntime(spec: LayerSpec, classes: ClassInfo[]): LayerRuntime {
  return {
    name: spec.layerName,
    classes,
    style: {
      colorMap: { ...spec.colorMap },
      valueRange: [...spec.valueRange] as [number, number],
      opacity: spec.initialOpacity,
      visible: spec.initiallyVisible !== false,
    },
  };
}

export class Viewport {
  readonly index: number;
  readonly width: number;
  readonly height: number;
  readonly layers: LayerRuntime[];
  state: ViewState;
  /** Every URL handed to the loader, in order; tests assert against this. */
  readonly requestedUrls: string[] = [];
  /** Settles when the fetches for the latest state change are done. */
  pending: Promise<void> = Promise.resolve();

  private readonly baseUrl: string;
  private readonly image: ImageInfo;
  private readonly loader: TileLoader;
  private readonly cache = new Map<string, CachedTile>();
  private abort: AbortController | null = null;

  constructor(
    index: number,
    width: number,
    height: number,
    baseUrl: string,
    image: ImageInfo,
    layers: LayerRuntime[],
    loader: TileLoader,
    initial: ViewState,
  ) {
    this.index = index;
    this.width = width;
    this.height = height;
    this.baseUrl = baseUrl;
    this.image = image;
    this.layers = layers;
    this.loader = loader;
    this.state = initial;
  }

  /** Tiles the current state needs: the base image plus every visible layer. */
  tileStack(): { layer: LayerRuntime | null; tiles: TileAddress[] }[] {
    const stack: { layer: LayerRuntime | null; tiles: TileAddress[] }[] = [
      {
        layer: null,
        tiles: visibleTiles(this.baseUrl, this.image, this.state, this.width, this.height, "jpg"),
      },
    ];
    for (const layer of this.layers) {
      if (!layer.style.visible) {
        continue;
      }
      stack.push({
        layer,
        tiles: visibleTiles(
          this.baseUrl,
          this.image,
          this.state,
          this.width,
          this.height,
          "png",
          layer.name,
        ),
      });
    }
    return stack;
  }

  /** The URL set the current state resolves to (for convergence checks). */
  visibleUrls(): string[] {
    return this.tileStack().flatMap((entry) => entry.tiles.map((t) => t.url));
  }

  /** Adopt a view state and fetch whatever tiles are not cached yet. */
  applyState(state: ViewState): Promise<void> {
    this.state = state;
    this.abort?.abort();
    this.abort = new AbortController();
    const signal = this.abort.signal;
    const urls = this.visibleUrls().filter((url) => !this.cache.has(url));
    this.pending = Promise.all(urls.map((url) => this.fetchTile(url, signal))).then(() => {});
    return this.pending;
  }

  private async fetchTile(url: string, signal: AbortSignal): Promise<void> {
    this.requestedUrls.push(url);
    try {
      const data = await this.loader.load(url, signal);
      this.cache.set(url, data);
    } catch {
      if (!signal.aborted) {
        this.cache.set(url, "failed");
      }
    }
  }

  /**
   * Update one layer's style. Compositing after this reads only the cache,
   * so the edit costs zero tile requests.
   */
  setLayerStyle(layerName: string, patch: StylePatch): void {
    const layer = this.layers.find((l) => l.name === layerName);
    if (layer === undefined) {
      throw new UnknownLayerError(
        `viewport ${this.index} has no layer "${layerName}"`,
      );
    }
    if (patch.colorMap !== undefined) {
      layer.style.colorMap = { ...layer.style.colorMap, ...patch.colorMap };
    }
    if (patch.valueRange !== undefined) {
      layer.style.valueRange = [...patch.valueRange] as [number, number];
    }
    if (patch.opacity !== undefined) {
      if (patch.opacity < 0 || patch.opacity > 1) {
        throw new RangeError(`opacity ${patch.opacity} outside [0, 1]`);
      }
      layer.style.opacity = patch.opacity;
    }
    if (patch.visible !== undefined) {
      layer.style.visible = patch.visible;
    }
  }

  /** Compose the current frame from cached tiles; never touches the loader. */
  composite(): Uint8ClampedArray {
    const frame = new Uint8ClampedArray(this.width * this.height * 4);
    const region = visibleRegion(this.state, this.width, this.height);
    for (const entry of this.tileStack()) {
      const resolved = entry.layer
        ? resolveStyle(entry.layer.classes, entry.layer.style)
        : null;
      for (const tile of entry.tiles) {
        const cached = this.cache.get(tile.url);
        if (cached === undefined) {
          continue;
        }
        if (cached === "failed") {
          if (entry.layer === null) {
            this.blitPlaceholder(frame, tile, region);
          }
          continue;
        }
        const pixels = resolved ? recolorTile(cached, resolved) : cached;
        this.blitTile(frame, tile, pixels, region, entry.layer !== null);
      }
    }
    return frame;
  }

  private screenRect(
    tile: TileAddress,
    region: { x: number; y: number },
  ): { sx0: number; sy0: number; sx1: number; sy1: number } {
    const zoom = this.state.zoom;
    return {
      sx0: Math.max(0, Math.floor((tile.x - region.x) * zoom)),
      sy0: Math.max(0, Math.floor((tile.y - region.y) * zoom)),
      sx1: Math.min(this.width, Math.ceil((tile.x + tile.w - region.x) * zoom)),
      sy1: Math.min(this.height, Math.ceil((tile.y + tile.h - region.y) * zoom)),
    };
  }

  private blitTile(
    frame: Uint8ClampedArray,
    tile: TileAddress,
    pixels: Uint8ClampedArray,
    region: { x: number; y: number },
    blend: boolean,
  ): void {
    const { sx0, sy0, sx1, sy1 } = this.screenRect(tile, region);
    const zoom = this.state.zoom;
    for (let sy = sy0; sy < sy1; sy++) {
      const baseY = region.y + (sy + 0.5) / zoom;
      const ty = Math.floor(((baseY - tile.y) * tile.outH) / tile.h);
      if (ty < 0 || ty >= tile.outH) {
        continue;
      }
      for (let sx = sx0; sx < sx1; sx++) {
        const baseX = region.x + (sx + 0.5) / zoom;
        const tx = Math.floor(((baseX - tile.x) * tile.outW) / tile.w);
        if (tx < 0 || tx >= tile.outW) {
          continue;
        }
        const src = (ty * tile.outW + tx) * 4;
        const dst = (sy * this.width + sx) * 4;
        const alpha = pixels[src + 3] as number;
        if (alpha === 0) {
          continue;
        }
        if (!blend || alpha === 255) {
          frame[dst] = pixels[src] as number;
          frame[dst + 1] = pixels[src + 1] as number;
          frame[dst + 2] = pixels[src + 2] as number;
          frame[dst + 3] = 255;
        } else {
          const one = new Uint8ClampedArray(4);
          one[0] = pixels[src] as number;
          one[1] = pixels[src + 1] as number;
          one[2] = pixels[src + 2] as number;
          one[3] = alpha;
          const dstView = frame.subarray(dst, dst + 4);
          compositeOver(dstView, one);
        }
      }
    }
  }

  private blitPlaceholder(
    frame: Uint8ClampedArray,
    tile: TileAddress,
    region: { x: number; y: number },
  ): void {
    const { sx0, sy0, sx1, sy1 } = this.screenRect(tile, region);
    for (let sy = sy0; sy < sy1; sy++) {
      for (let sx = sx0; sx < sx1; sx++) {
        const dst = (sy * this.width + sx) * 4;
        frame[dst] = PLACEHOLDER_GRAY;
        frame[dst + 1] = PLACEHOLDER_GRAY;
        frame[dst + 2] = PLACEHOLDER_GRAY;
        frame[dst + 3] = 255;
      }
    }
  }
}
