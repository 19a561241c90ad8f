/**
 * Viewer configuration: grid dimensions, the tile service to talk to, the
 * base image, and the layer stack each viewport starts with.
 */

export class ViewerConfigError extends Error {}

export interface LayerSpec {
  layerName: string;
  /** class code -> display color ("#rgb" or "#rrggbb"). */
  colorMap: Record<string, string>;
  /** Certainty window [lo, hi] in [0, 1]; pixels outside are hidden. */
  valueRange: [number, number];
  initialOpacity: number;
  initiallyVisible?: boolean;
}

export interface ViewerConfig {
  rows: number;
  cols: number;
  tileBaseUrl: string;
  imageId: string;
  viewportWidth: number;
  viewportHeight: number;
  /** One layer list per viewport, row-major; length rows*cols. */
  viewportLayers: LayerSpec[][];
}

function asRecord(value: unknown, what: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new ViewerConfigError(`${what} must be an object`);
  }
  return value as Record<string, unknown>;
}

function asPositiveInt(value: unknown, what: string): number {
  if (typeof value !== "number" || !Number.isInteger(value) || value < 1) {
    throw new ViewerConfigError(`${what} must be a positive integer`);
  }
  return value;
}

function parseLayerSpec(value: unknown, where: string): LayerSpec {
  const obj = asRecord(value, where);
  const layerName = obj.layerName;
  if (typeof layerName !== "string" || layerName === "") {
    throw new ViewerConfigError(`${where}: layerName must be a non-empty string`);
  }
  const colorMap: Record<string, string> = {};
  if (obj.colorMap !== undefined) {
    for (const [code, color] of Object.entries(asRecord(obj.colorMap, `${where}.colorMap`))) {
      if (typeof color !== "string" || !/^#([0-9a-fA-F]{3}|[0-9a-fA-F]{6})$/.test(color)) {
        throw new ViewerConfigError(`${where}: bad color ${String(color)} for class ${code}`);
      }
      colorMap[code] = color;
    }
  }
  let valueRange: [number, number] = [0, 1];
  if (obj.valueRange !== undefined) {
    const range = obj.valueRange;
    if (!Array.isArray(range) || range.length !== 2) {
      throw new ViewerConfigError(`${where}: valueRange must be [lo, hi]`);
    }
    const [lo, hi] = range as [unknown, unknown];
    if (typeof lo !== "number" || typeof hi !== "number" || lo < 0 || hi > 1 || lo > hi) {
      throw new ViewerConfigError(`${where}: valueRange must satisfy 0 <= lo <= hi <= 1`);
    }
    valueRange = [lo, hi];
  }
  let initialOpacity = 1;
  if (obj.initialOpacity !== undefined) {
    if (
      typeof obj.initialOpacity !== "number" ||
      obj.initialOpacity < 0 ||
      obj.initialOpacity > 1
    ) {
      throw new ViewerConfigError(`${where}: initialOpacity must be in [0, 1]`);
    }
    initialOpacity = obj.initialOpacity;
  }
  const initiallyVisible = obj.initiallyVisible === undefined ? true : obj.initiallyVisible === true;
  return { layerName, colorMap, valueRange, initialOpacity, initiallyVisible };
}

export function parseViewerConfig(source: unknown): ViewerConfig {
  const obj = asRecord(
    typeof source === "string" ? JSON.parse(source) : source,
    "viewer config",
  );
  const rows = asPositiveInt(obj.rows ?? 1, "rows");
  const cols = asPositiveInt(obj.cols ?? 1, "cols");
  if (typeof obj.tileBaseUrl !== "string" || obj.tileBaseUrl === "") {
    throw new ViewerConfigError("tileBaseUrl must be a non-empty string");
  }
  if (typeof obj.imageId !== "string" || obj.imageId === "") {
    throw new ViewerConfigError("imageId must be a non-empty string");
  }
  const viewportWidth = asPositiveInt(obj.viewportWidth ?? 512, "viewportWidth");
  const viewportHeight = asPositiveInt(obj.viewportHeight ?? 512, "viewportHeight");

  const count = rows * cols;
  let viewportLayers: LayerSpec[][];
  if (obj.viewportLayers === undefined && obj.layers !== undefined) {
    // a flat layer list applies to every viewport
    if (!Array.isArray(obj.layers)) {
      throw new ViewerConfigError("layers must be an array");
    }
    const shared = obj.layers.map((l, i) => parseLayerSpec(l, `layers[${i}]`));
    viewportLayers = Array.from({ length: count }, () =>
      shared.map((l) => ({ ...l, colorMap: { ...l.colorMap } })),
    );
  } else if (obj.viewportLayers !== undefined) {
    if (!Array.isArray(obj.viewportLayers) || obj.viewportLayers.length !== count) {
      throw new ViewerConfigError(`viewportLayers must list ${count} viewports`);
    }
    viewportLayers = obj.viewportLayers.map((list, v) => {
      if (!Array.isArray(list)) {
        throw new ViewerConfigError(`viewportLayers[${v}] must be an array`);
      }
      return list.map((l, i) => parseLayerSpec(l, `viewportLayers[${v}][${i}]`));
    });
  } else {
    viewportLayers = Array.from({ length: count }, () => []);
  }

  return {
    rows,
    cols,
    tileBaseUrl: obj.tileBaseUrl,
    imageId: obj.imageId,
    viewportWidth,
    viewportHeight,
    viewportLayers,
  };
}
