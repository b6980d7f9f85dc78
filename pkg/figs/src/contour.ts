/**
 * Marching-squares level sets on a structured grid.
 *
 * Returns raw line segments in data coordinates; cells touching missing
 * values are skipped.  Segments are emitted in fixed cell order, so the
 * output is deterministic for a given field.
 */

export type Segment = [number, number, number, number];

/**
 * Level set of field[i][j] (indexed x-then-y) at the given level.
 * `xs` and `ys` are the sorted node coordinates.
 */
export function contourSegments(
  xs: number[],
  ys: number[],
  field: number[][],
  level: number,
): Segment[] {
  const segs: Segment[] = [];
  const interp = (a: number, b: number) => (level - a) / (b - a);
  for (let i = 0; i + 1 < xs.length; i++) {
    for (let j = 0; j + 1 < ys.length; j++) {
      const v00 = field[i][j];
      const v10 = field[i + 1][j];
      const v01 = field[i][j + 1];
      const v11 = field[i + 1][j + 1];
      if (![v00, v10, v01, v11].every(Number.isFinite)) continue;
      // crossing points on the four cell edges
      const pts: Array<[number, number]> = [];
      if (v00 >= level !== v10 >= level) {
        pts.push([xs[i] + interp(v00, v10) * (xs[i + 1] - xs[i]), ys[j]]);
      }
      if (v01 >= level !== v11 >= level) {
        pts.push([xs[i] + interp(v01, v11) * (xs[i + 1] - xs[i]), ys[j + 1]]);
      }
      if (v00 >= level !== v01 >= level) {
        pts.push([xs[i], ys[j] + interp(v00, v01) * (ys[j + 1] - ys[j])]);
      }
      if (v10 >= level !== v11 >= level) {
        pts.push([xs[i + 1], ys[j] + interp(v10, v11) * (ys[j + 1] - ys[j])]);
      }
      // 0, 2 or 4 crossings; pair them in order (the ambiguous saddle case
      // picks a fixed diagonal, which is fine for display contours)
      for (let k = 0; k + 1 < pts.length; k += 2) {
        segs.push([pts[k][0], pts[k][1], pts[k + 1][0], pts[k + 1][1]]);
      }
    }
  }
  return segs;
}
