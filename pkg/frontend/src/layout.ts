// Layout helpers: linear scales, squarified treemaps, sankey geometry.

export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export function linearScale(
  d0: number, d1: number, r0: number, r1: number,
): (v: number) => number {
  const span = d1 - d0;
  return (v: number) => (span === 0 ? (r0 + r1) / 2 : r0 + ((v - d0) / span) * (r1 - r0));
}

function worstAspect(row: number[], side: number): number {
  const total = row.reduce((a, b) => a + b, 0);
  const s2 = total * total;
  let worst = 0;
  for (const area of row) {
    const ratio = Math.max((side * side * area) / s2, s2 / (side * side * area));
    worst = Math.max(worst, ratio);
  }
  return worst;
}

/**
 * Squarified treemap: weights to rectangles inside the given bounds.
 * Result order matches input order; areas are proportional to weights.
 */
export function squarify(weights: number[], bounds: Rect): Rect[] {
  const result: Rect[] = new Array(weights.length);
  const total = weights.reduce((a, b) => a + b, 0);
  if (total <= 0 || weights.length === 0) {
    return weights.map(() => ({ x: bounds.x, y: bounds.y, width: 0, height: 0 }));
  }
  const scale = (bounds.width * bounds.height) / total;
  // Lay out in descending weight order, then restore input order.
  const order = weights.map((w, i) => i).sort((a, b) => weights[b] - weights[a]);
  const areas = order.map((i) => weights[i] * scale);

  let { x, y, width, height } = bounds;
  let row: number[] = [];
  let rowStart = 0;

  const flushRow = () => {
    const rowArea = row.reduce((a, b) => a + b, 0);
    const horizontal = width >= height; // row laid along the shorter side
    const side = horizontal ? height : width;
    const thickness = rowArea / side;
    let offset = 0;
    for (let k = 0; k < row.length; k++) {
      const length = row[k] / thickness;
      const rect: Rect = horizontal
        ? { x, y: y + offset, width: thickness, height: length }
        : { x: x + offset, y, width: length, height: thickness };
      result[order[rowStart + k]] = rect;
      offset += length;
    }
    if (horizontal) {
      x += thickness;
      width -= thickness;
    } else {
      y += thickness;
      height -= thickness;
    }
    rowStart += row.length;
    row = [];
  };

  for (const area of areas) {
    const side = Math.min(width, height);
    if (row.length === 0 || worstAspect([...row, area], side) <= worstAspect(row, side)) {
      row.push(area);
    } else {
      flushRow();
      row.push(area);
    }
  }
  if (row.length) {
    flushRow();
  }
  return result;
}

export interface SankeyNodeGeom {
  category: string;
  x: number;
  y: number;
  height: number;
}

/**
 * Stack nodes in one column: heights proportional to values with fixed
 * gaps, in the given order.
 */
export function stackColumn(
  values: number[], totalHeight: number, gap: number,
): { y: number; height: number }[] {
  const total = values.reduce((a, b) => a + b, 0);
  const usable = totalHeight - gap * Math.max(0, values.length - 1);
  let y = 0;
  return values.map((v) => {
    const height = total > 0 ? (v / total) * usable : 0;
    const out = { y, height };
    y += height + gap;
    return out;
  });
}

/** Cubic ribbon path between two vertical edges. */
export function ribbonPath(
  x0: number, y0: number, h0: number, x1: number, y1: number, h1: number,
): string {
  const mx = (x0 + x1) / 2;
  return [
    `M ${x0} ${y0}`,
    `C ${mx} ${y0} ${mx} ${y1} ${x1} ${y1}`,
    `L ${x1} ${y1 + h1}`,
    `C ${mx} ${y1 + h1} ${mx} ${y0 + h0} ${x0} ${y0 + h0}`,
    "Z",
  ].join(" ");
}
