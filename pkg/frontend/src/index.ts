export { parseViewerConfig, ViewerConfigError } from "./config.js";
export type { LayerSpec, ViewerConfig } from "./config.js";
export {
  UnknownLayerError,
  compositeOver,
  parseHexColor,
  recolorTile,
  resolveStyle,
} from "./layers.js";
export type { ClassInfo, LayerStyleState, ResolvedStyle, RGB } from "./layers.js";
export { SyncHub } from "./sync.js";
export type { ViewStateListener } from "./sync.js";
export { TILE_SIZE, infoUrl, tileScaleForZoom, tileUrl, visibleTiles } from "./tiles.js";
export type { TileAddress, TileFormat } from "./tiles.js";
export { MultiViewer } from "./viewer.js";
export { Viewport, layerRuntime } from "./viewport.js";
export type { LayerRuntime, StylePatch, TileLoader } from "./viewport.js";
export {
  MAX_ZOOM,
  MIN_ZOOM,
  clampState,
  fitImage,
  panBy,
  statesEqual,
  visibleRegion,
  zoomAround,
} from "./viewstate.js";
export type { ImageInfo, ViewState } from "./viewstate.js";
export { pathLength, polygonArea, polygonToWkt } from "./annotate.js";
export type { Point } from "./annotate.js";
export { HttpTileLoader, mountViewerGrid } from "./dom.js";
