/**
 * Browser shell: fetch-backed tile loading, canvas rendering, pointer
 * gestures, and per-layer controls. The headless core (viewstate, tiles,
 * sync, layers, viewport, viewer) carries all the logic; this file only
 * wires it to the DOM.
 */

import { parseViewerConfig, type ViewerConfig } from "./config.js";
import type { ClassInfo } from "./layers.js";
import { MultiViewer } from "./viewer.js";
import type { TileLoader, Viewport } from "./viewport.js";
import type { ImageInfo } from "./viewstate.js";
import { infoUrl } from "./tiles.js";

/** Decode PNG/JPEG tile responses to raw RGBA via an offscreen canvas. */
export class HttpTileLoader implements TileLoader {
  async load(url: string, signal?: AbortSignal): Promise<Uint8ClampedArray> {
    const response = await fetch(url, signal ? { signal } : undefined);
    if (!response.ok) {
      throw new Error(`tile fetch failed: ${response.status} ${url}`);
    }
    const bitmap = await createImageBitmap(await response.blob());
    const canvas = new OffscreenCanvas(bitmap.width, bitmap.height);
    const ctx = canvas.getContext("2d");
    if (ctx === null) {
      throw new Error("no 2d context");
    }
    ctx.drawImage(bitmap, 0, 0);
    return ctx.getImageData(0, 0, bitmap.width, bitmap.height).data;
  }
}

interface InfoDoc {
  identifier: string;
  width: number;
  height: number;
  classes?: ClassInfo[] | null;
}

async function fetchInfo(baseUrl: string, identifier: string): Promise<InfoDoc> {
  const response = await fetch(infoUrl(baseUrl, identifier));
  if (!response.ok) {
    throw new Error(`info fetch failed: ${response.status} for ${identifier}`);
  }
  return (await response.json()) as InfoDoc;
}

function showToast(container: HTMLElement, message: string): void {
  const toast = document.createElement("div");
  toast.className = "ht-toast";
  toast.textContent = message;
  toast.style.cssText =
    "position:fixed;bottom:1rem;left:50%;transform:translateX(-50%);" +
    "background:#b00020;color:#fff;padding:0.5rem 1rem;border-radius:4px;z-index:10";
  container.appendChild(toast);
  setTimeout(() => toast.remove(), 4000);
}

function drawViewport(canvas: HTMLCanvasElement, viewport: Viewport): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    return;
  }
  const frame = new Uint8ClampedArray(viewport.composite());
  ctx.putImageData(new ImageData(frame, viewport.width, viewport.height), 0, 0);
}

function buildControls(
  container: HTMLElement,
  viewer: MultiViewer,
  viewportIndex: number,
  redraw: () => void,
): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "ht-controls";
  const viewport = viewer.viewports[viewportIndex];
  if (viewport === undefined) {
    return panel;
  }
  for (const layer of viewport.layers) {
    const row = document.createElement("label");
    row.style.cssText = "display:flex;gap:0.4rem;align-items:center;font:12px sans-serif";

    const toggle = document.createElement("input");
    toggle.type = "checkbox";
    toggle.checked = layer.style.visible;
    toggle.addEventListener("change", () => {
      try {
        viewer.setLayerStyle(viewportIndex, layer.name, { visible: toggle.checked });
        redraw();
      } catch (err) {
        showToast(container, String(err));
      }
    });

    const opacity = document.createElement("input");
    opacity.type = "range";
    opacity.min = "0";
    opacity.max = "1";
    opacity.step = "0.05";
    opacity.value = String(layer.style.opacity);
    opacity.addEventListener("input", () => {
      try {
        viewer.setLayerStyle(viewportIndex, layer.name, { opacity: Number(opacity.value) });
        redraw();
      } catch (err) {
        showToast(container, String(err));
      }
    });

    const name = document.createElement("span");
    name.textContent = layer.name;
    row.append(toggle, name, opacity);
    panel.appendChild(row);
  }
  return panel;
}

/**
 * Mount a configured viewer grid into a container element. Resolves once
 * the first round of tiles is loaded.
 */
export async function mountViewerGrid(
  container: HTMLElement,
  configSource: unknown,
): Promise<MultiViewer> {
  const config: ViewerConfig = parseViewerConfig(configSource);
  const imageInfo = await fetchInfo(config.tileBaseUrl, config.imageId);
  const image: ImageInfo = {
    identifier: config.imageId,
    width: imageInfo.width,
    height: imageInfo.height,
  };

  const layerNames = new Set<string>();
  for (const list of config.viewportLayers) {
    for (const spec of list) {
      layerNames.add(spec.layerName);
    }
  }
  const layerClasses: Record<string, ClassInfo[]> = {};
  for (const name of layerNames) {
    const info = await fetchInfo(config.tileBaseUrl, name);
    layerClasses[name] = info.classes ?? [];
  }

  const viewer = new MultiViewer(config, image, layerClasses, new HttpTileLoader());

  container.style.cssText = `display:grid;gap:4px;grid-template-columns:repeat(${config.cols},auto)`;
  const canvases: HTMLCanvasElement[] = [];
  viewer.viewports.forEach((viewport, index) => {
    const cell = document.createElement("div");
    const canvas = document.createElement("canvas");
    canvas.width = viewport.width;
    canvas.height = viewport.height;
    canvas.style.cssText = "touch-action:none;cursor:grab";
    canvases.push(canvas);

    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    canvas.addEventListener("pointerdown", (e) => {
      dragging = true;
      lastX = e.offsetX;
      lastY = e.offsetY;
      canvas.setPointerCapture(e.pointerId);
    });
    canvas.addEventListener("pointermove", (e) => {
      if (!dragging) {
        return;
      }
      const dx = e.offsetX - lastX;
      const dy = e.offsetY - lastY;
      lastX = e.offsetX;
      lastY = e.offsetY;
      void viewer.pan(index, dx, dy).then(redraw);
    });
    canvas.addEventListener("pointerup", () => {
      dragging = false;
    });
    canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      const factor = e.deltaY < 0 ? 1.25 : 0.8;
      void viewer.zoom(index, factor, e.offsetX, e.offsetY).then(redraw);
    });

    cell.appendChild(canvas);
    cell.appendChild(buildControls(container, viewer, index, redraw));
    container.appendChild(cell);
  });

  function redraw(): void {
    viewer.viewports.forEach((viewport, i) => {
      const canvas = canvases[i];
      if (canvas !== undefined) {
        drawViewport(canvas, viewport);
      }
    });
  }

  await viewer.start();
  await viewer.settle();
  redraw();
  return viewer;
}
