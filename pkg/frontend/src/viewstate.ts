/**
 * Shared camera state: every viewport in a grid renders the same center
 * and zoom, so the state is a plain value that a hub can broadcast.
 */

export interface ViewState {
  /** Center of the view in base-image pixels. */
  centerX: number;
  centerY: number;
  /** Display pixels per base-image pixel (1 = full resolution). */
  zoom: number;
}

export interface ImageInfo {
  identifier: string;
  width: number;
  height: number;
}

export const MIN_ZOOM = 1 / 65536;
export const MAX_ZOOM = 64;

export function statesEqual(a: ViewState, b: ViewState): boolean {
  return a.centerX === b.centerX && a.centerY === b.centerY && a.zoom === b.zoom;
}

/** Clamp zoom and keep the center inside the image. */
export function clampState(state: ViewState, image: ImageInfo): ViewState {
  const zoom = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, state.zoom));
  const centerX = Math.min(image.width, Math.max(0, state.centerX));
  const centerY = Math.min(image.height, Math.max(0, state.centerY));
  return { centerX, centerY, zoom };
}

/** State that fits the whole image into a viewport of the given size. */
export function fitImage(image: ImageInfo, viewportW: number, viewportH: number): ViewState {
  const zoom = Math.min(viewportW / image.width, viewportH / image.height);
  return clampState({ centerX: image.width / 2, centerY: image.height / 2, zoom }, image);
}

/** Pan by a screen-space delta (drag right moves the image right). */
export function panBy(state: ViewState, dxScreen: number, dyScreen: number, image: ImageInfo): ViewState {
  return clampState(
    {
      centerX: state.centerX - dxScreen / state.zoom,
      centerY: state.centerY - dyScreen / state.zoom,
      zoom: state.zoom,
    },
    image,
  );
}

/**
 * Zoom by a factor keeping the base-image point under the given viewport
 * pixel fixed on screen.
 */
export function zoomAround(
  state: ViewState,
  factor: number,
  viewportX: number,
  viewportY: number,
  viewportW: number,
  viewportH: number,
  image: ImageInfo,
): ViewState {
  const zoom = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, state.zoom * factor));
  if (zoom === state.zoom) {
    return state;
  }
  // base-image point currently under the cursor
  const baseX = state.centerX + (viewportX - viewportW / 2) / state.zoom;
  const baseY = state.centerY + (viewportY - viewportH / 2) / state.zoom;
  return clampState(
    {
      centerX: baseX - (viewportX - viewportW / 2) / zoom,
      centerY: baseY - (viewportY - viewportH / 2) / zoom,
      zoom,
    },
    image,
  );
}

/** The base-image rectangle a viewport of the given size shows. */
export function visibleRegion(
  state: ViewState,
  viewportW: number,
  viewportH: number,
): { x: number; y: number; w: number; h: number } {
  const w = viewportW / state.zoom;
  const h = viewportH / state.zoom;
  return { x: state.centerX - w / 2, y: state.centerY - h / 2, w, h };
}
