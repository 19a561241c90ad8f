/**
 * The MxN grid: one SyncHub, rows*cols viewports, and gesture entry
 * points. A gesture lands on one viewport, produces a new shared state,
 * and the hub fans it out — any viewport is the controller of the rest.
 */

import type { ViewerConfig } from "./config.js";
import type { ClassInfo } from "./layers.js";
import { SyncHub } from "./sync.js";
import type { StylePatch, TileLoader } from "./viewport.js";
import { Viewport, layerRuntime } from "./viewport.js";
import type { ImageInfo, ViewState } from "./viewstate.js";
import { fitImage, panBy, zoomAround } from "./viewstate.js";

export class MultiViewer {
  readonly config: ViewerConfig;
  readonly image: ImageInfo;
  readonly hub: SyncHub;
  readonly viewports: Viewport[];

  constructor(
    config: ViewerConfig,
    image: ImageInfo,
    layerClasses: Record<string, ClassInfo[]>,
    loader: TileLoader,
    initial?: ViewState,
  ) {
    this.config = config;
    this.image = image;
    const start = initial ?? fitImage(image, config.viewportWidth, config.viewportHeight);
    this.hub = new SyncHub(start);
    this.viewports = config.viewportLayers.map((specs, index) => {
      const layers = specs.map((spec) => layerRuntime(spec, layerClasses[spec.layerName] ?? []));
      return new Viewport(
        index,
        config.viewportWidth,
        config.viewportHeight,
        config.tileBaseUrl,
        image,
        layers,
        loader,
        start,
      );
    });
    for (const viewport of this.viewports) {
      this.hub.subscribe((state) => {
        void viewport.applyState(state);
      });
    }
  }

  /** Wait for every viewport's in-flight tile fetches. */
  async settle(): Promise<void> {
    await Promise.all(this.viewports.map((v) => v.pending));
  }

  /** Load the initial tiles for every viewport. */
  async start(): Promise<void> {
    await Promise.all(this.viewports.map((v) => v.applyState(this.hub.state)));
  }

  /** Drag gesture in one viewport; every viewport follows. */
  async pan(viewportIndex: number, dxScreen: number, dyScreen: number): Promise<void> {
    const source = this.viewportAt(viewportIndex);
    this.hub.publish(source, panBy(this.hub.state, dxScreen, dyScreen, this.image));
    await this.settle();
  }

  /** Wheel/pinch gesture anchored at a viewport pixel. */
  async zoom(
    viewportIndex: number,
    factor: number,
    viewportX: number,
    viewportY: number,
  ): Promise<void> {
    const source = this.viewportAt(viewportIndex);
    this.hub.publish(
      source,
      zoomAround(
        this.hub.state,
        factor,
        viewportX,
        viewportY,
        this.config.viewportWidth,
        this.config.viewportHeight,
        this.image,
      ),
    );
    await this.settle();
  }

  /** Style one layer of one viewport; client-side only, no refetch. */
  setLayerStyle(viewportIndex: number, layerName: string, patch: StylePatch): void {
    this.viewportAt(viewportIndex).setLayerStyle(layerName, patch);
  }

  private viewportAt(index: number): Viewport {
    const viewport = this.viewports[index];
    if (viewport === undefined) {
      throw new RangeError(`no viewport ${index} in a ${this.viewports.length}-viewport grid`);
    }
    return viewport;
  }
}
