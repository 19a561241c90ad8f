/**
 * Client-local annotation helpers: freehand polygons and measurements
 * live only in the browser and export as WKT — the tile service is
 * read-only. Measurements are reported in base-image pixels (no physical
 * calibration is available from the service).
 */

export type Point = [number, number];

export function polygonToWkt(points: Point[]): string {
  if (points.length < 3) {
    throw new Error("a polygon needs at least 3 points");
  }
  const ring = [...points];
  const first = ring[0] as Point;
  const last = ring[ring.length - 1] as Point;
  if (first[0] !== last[0] || first[1] !== last[1]) {
    ring.push(first);
  }
  const body = ring.map(([x, y]) => `${x} ${y}`).join(", ");
  return `POLYGON ((${body}))`;
}

/** Polyline length in pixels. */
export function pathLength(points: Point[]): number {
  let total = 0;
  for (let i = 1; i < points.length; i++) {
    const [x0, y0] = points[i - 1] as Point;
    const [x1, y1] = points[i] as Point;
    total += Math.hypot(x1 - x0, y1 - y0);
  }
  return total;
}

/** Enclosed area in square pixels (shoelace; open or closed input ring). */
export function polygonArea(points: Point[]): number {
  if (points.length < 3) {
    return 0;
  }
  let twice = 0;
  for (let i = 0; i < points.length; i++) {
    const [x0, y0] = points[i] as Point;
    const [x1, y1] = points[(i + 1) % points.length] as Point;
    twice += x0 * y1 - x1 * y0;
  }
  return Math.abs(twice) / 2;
}
