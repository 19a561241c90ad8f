/**
 * Client-side layer styling. Feature tiles from the service are data, not
 * pictures: red carries the class's assigned value (1-255, 0 reserved),
 * green the quantized certainty, and alpha is 255 exactly on covered
 * pixels. Recoloring maps those channels through the user's color map and
 * certainty window entirely in the client, so style edits never refetch.
 */

export class UnknownLayerError extends Error {}

export interface ClassInfo {
  code: string;
  red: number;
  color: string | null;
}

export interface LayerStyleState {
  colorMap: Record<string, string>;
  valueRange: [number, number];
  opacity: number;
  visible: boolean;
}

export type RGB = [number, number, number];

const FALLBACK_PALETTE: RGB[] = [
  [230, 60, 60],
  [60, 120, 230],
  [60, 180, 90],
  [230, 160, 40],
  [160, 80, 200],
  [40, 190, 190],
];

export function parseHexColor(color: string): RGB {
  let hex = color.replace(/^#/, "");
  if (hex.length === 3) {
    hex = hex
      .split("")
      .map((c) => c + c)
      .join("");
  }
  if (!/^[0-9a-fA-F]{6}$/.test(hex)) {
    throw new Error(`bad color ${color}`);
  }
  return [
    parseInt(hex.slice(0, 2), 16),
    parseInt(hex.slice(2, 4), 16),
    parseInt(hex.slice(4, 6), 16),
  ];
}

/**
 * Per-red-value lookup tables for one layer, rebuilt when the style
 * changes: 256-entry color table plus the certainty window in quantized
 * units.
 */
export interface ResolvedStyle {
  colorByRed: Array<RGB | null>;
  greenMin: number;
  greenMax: number;
  alpha: number;
  visible: boolean;
}

export function resolveStyle(classes: ClassInfo[], style: LayerStyleState): ResolvedStyle {
  const colorByRed: Array<RGB | null> = new Array(256).fill(null);
  classes.forEach((cls, i) => {
    const mapped = style.colorMap[cls.code] ?? cls.color;
    const rgb =
      mapped != null
        ? parseHexColor(mapped)
        : (FALLBACK_PALETTE[i % FALLBACK_PALETTE.length] as RGB);
    colorByRed[cls.red] = rgb;
  });
  return {
    colorByRed,
    greenMin: Math.ceil(style.valueRange[0] * 255),
    greenMax: Math.floor(style.valueRange[1] * 255),
    alpha: Math.round(style.opacity * 255),
    visible: style.visible,
  };
}

/**
 * Map a raw feature tile to display RGBA. Uncovered pixels (alpha 0) stay
 * transparent; covered pixels outside the certainty window are hidden;
 * the rest take the class's display color at the layer opacity.
 */
export function recolorTile(data: Uint8ClampedArray, style: ResolvedStyle): Uint8ClampedArray {
  const out = new Uint8ClampedArray(data.length);
  if (!style.visible || style.alpha === 0) {
    return out;
  }
  for (let i = 0; i < data.length; i += 4) {
    if (data[i + 3] === 0) {
      continue;
    }
    const red = data[i] as number;
    const green = data[i + 1] as number;
    const color = style.colorByRed[red];
    if (color == null || green < style.greenMin || green > style.greenMax) {
      continue;
    }
    out[i] = color[0];
    out[i + 1] = color[1];
    out[i + 2] = color[2];
    out[i + 3] = style.alpha;
  }
  return out;
}

/** Straight (non-premultiplied) source-over of src onto dst, in place. */
export function compositeOver(dst: Uint8ClampedArray, src: Uint8ClampedArray): void {
  for (let i = 0; i < dst.length; i += 4) {
    const srcA = (src[i + 3] as number) / 255;
    if (srcA <= 0) {
      continue;
    }
    const dstA = (dst[i + 3] as number) / 255;
    const outA = srcA + dstA * (1 - srcA);
    if (outA <= 0) {
      continue;
    }
    for (let c = 0; c < 3; c++) {
      const sv = src[i + c] as number;
      const dv = dst[i + c] as number;
      dst[i + c] = Math.round((sv * srcA + dv * dstA * (1 - srcA)) / outA);
    }
    dst[i + 3] = Math.round(outA * 255);
  }
}
