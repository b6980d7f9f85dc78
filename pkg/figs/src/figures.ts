/**
 * The four figure kinds rendered from blowup2d CSV artifacts.
 *
 * Every renderer is a pure function of the parsed rows plus the axis
 * scales requested in the figure spec; header-only inputs produce empty
 * axes rather than an error.
 */

import { contourSegments } from "./contour.js";
import type { Row } from "./csv.js";
import {
  FONT, HEIGHT, MARGIN, PALETTE, WIDTH, axes, domainOf, label, makeScale,
  openSvg, polyline, px, ramp,
} from "./svg.js";

export type ScaleKind = "linear" | "log";

export interface AxisScales {
  x: ScaleKind;
  y: ScaleKind;
}

const X0 = MARGIN.left;
const X1 = WIDTH - MARGIN.right;
const Y0 = HEIGHT - MARGIN.bottom;
const Y1 = MARGIN.top;

function num(row: Row, key: string): number {
  return row[key] as number;
}

function legend(out: string[], entries: Array<[string, string]>): void {
  entries.forEach(([color, text], i) => {
    const y = Y1 + 12 + 18 * i;
    out.push(
      `<rect x="${px(X1 + 10)}" y="${px(y - 8)}" width="12" height="12" fill="${color}"/>`,
      `<text x="${px(X1 + 27)}" y="${px(y + 2)}" ${FONT} font-size="11">${text}</text>`,
    );
  });
}

function sortedUnique(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

/** Blow-up-time heatmap with the pyramid-deviation contour overlay. */
export function surfaceHeatmap(rows: Row[]): string {
  const out = openSvg("blow-up surface T(x) with pyramid deviation contours");
  const xs = sortedUnique(rows.map((r) => num(r, "x1")));
  const ys = sortedUnique(rows.map((r) => num(r, "x2")));
  const X = makeScale(domainOf(xs), [X0, X1]);
  const Y = makeScale(domainOf(ys), [Y0, Y1]);

  const T: number[][] = xs.map(() => ys.map(() => NaN));
  const ix = new Map(xs.map((v, i) => [v, i]));
  const iy = new Map(ys.map((v, i) => [v, i]));
  for (const r of rows) {
    T[ix.get(num(r, "x1"))!][iy.get(num(r, "x2"))!] = num(r, "T");
  }

  const finiteT = rows.map((r) => num(r, "T")).filter(Number.isFinite);
  const [tLo, tHi] = domainOf(finiteT);
  const hx = xs.length > 1 ? xs[1] - xs[0] : 1;
  const hy = ys.length > 1 ? ys[1] - ys[0] : 1;
  for (let i = 0; i < xs.length; i++) {
    for (let j = 0; j < ys.length; j++) {
      if (!Number.isFinite(T[i][j])) continue;
      const t = (T[i][j] - tLo) / (tHi - tLo);
      const xa = X(xs[i] - hx / 2);
      const xb = X(xs[i] + hx / 2);
      const ya = Y(ys[j] + hy / 2);
      const yb = Y(ys[j] - hy / 2);
      out.push(
        `<rect x="${px(xa)}" y="${px(ya)}" width="${px(xb - xa)}" ` +
          `height="${px(yb - ya)}" fill="${ramp(t)}"/>`,
      );
    }
  }

  // deviation from the exact pyramid, contoured at its quartiles
  const D = xs.map((x, i) =>
    ys.map((y, j) =>
      Number.isFinite(T[i][j])
        ? Math.abs(T[i][j] + Math.max(Math.abs(x), Math.abs(y)))
        : NaN,
    ),
  );
  const dev = D.flat().filter(Number.isFinite).sort((a, b) => a - b);
  if (dev.length > 0 && dev[dev.length - 1] > dev[0]) {
    for (const q of [0.25, 0.5, 0.75]) {
      const level = dev[Math.floor(q * (dev.length - 1))];
      for (const [ax, ay, bx, by] of contourSegments(xs, ys, D, level)) {
        out.push(
          `<line class="pyramid-contour" x1="${px(X(ax))}" y1="${px(Y(ay))}" ` +
            `x2="${px(X(bx))}" y2="${px(Y(by))}" stroke="#ffffff" ` +
            `stroke-width="1.2"/>`,
        );
      }
    }
  }

  axes(out, X, Y, "x1", "x2");
  // colorbar
  for (let k = 0; k < 10; k++) {
    out.push(
      `<rect x="${px(X1 + 14)}" y="${px(Y0 - ((k + 1) * (Y0 - Y1)) / 10)}" ` +
        `width="14" height="${px((Y0 - Y1) / 10)}" fill="${ramp((k + 0.5) / 10)}"/>`,
    );
  }
  out.push(
    `<text x="${px(X1 + 32)}" y="${px(Y0 + 4)}" ${FONT} font-size="10">${label(tLo)}</text>`,
    `<text x="${px(X1 + 32)}" y="${px(Y1 + 8)}" ${FONT} font-size="10">${label(tHi)}</text>`,
  );
  out.push("</svg>");
  return out.join("\n") + "\n";
}

/** Soliton-loosing event clocks versus the depth |log x1|. */
export function timelineFigure(rows: Row[], scales: AxisScales): string {
  const out = openSvg("soliton-loosing timeline: event clocks vs depth");
  const depth = (r: Row) => Math.abs(Math.log(num(r, "x1")));
  const clocks = rows.flatMap((r) => [
    num(r, "s_left"), num(r, "s_up"), num(r, "s_right_plus"),
  ]);
  const X = makeScale(
    domainOf(rows.map(depth), scales.x === "log"), [X0, X1],
    scales.x === "log",
  );
  const Y = makeScale(
    domainOf(clocks, scales.y === "log"), [Y0, Y1], scales.y === "log",
  );
  axes(out, X, Y, "depth |log x1|", "clock s");

  const As = sortedUnique(rows.map((r) => num(r, "A")));
  for (const r of rows) {
    const color = PALETTE[As.indexOf(num(r, "A")) % PALETTE.length];
    const x = X(depth(r));
    const sLeft = num(r, "s_left");
    if (Number.isFinite(sLeft)) {
      const fill = num(r, "chronology_ok") === 1 ? color : "none";
      out.push(
        `<circle cx="${px(x)}" cy="${px(Y(sLeft))}" r="3.5" fill="${fill}" ` +
          `stroke="${color}" stroke-width="1.2"/>`,
      );
    }
    const sUp = num(r, "s_up");
    if (Number.isFinite(sUp)) {
      out.push(
        `<rect x="${px(x - 3)}" y="${px(Y(sUp) - 3)}" width="6" height="6" ` +
          `fill="${color}"/>`,
      );
    }
    const sRight = num(r, "s_right_plus");
    if (Number.isFinite(sRight)) {
      const y = Y(sRight);
      out.push(
        `<path d="M ${px(x)} ${px(y - 4)} L ${px(x + 4)} ${px(y + 3)} ` +
          `L ${px(x - 4)} ${px(y + 3)} Z" fill="none" stroke="${color}" ` +
          `stroke-width="1.2"/>`,
      );
    }
  }
  legend(out, [
    ...As.map((A, i): [string, string] =>
      [PALETTE[i % PALETTE.length], `A = ${label(A)}`]),
    ["#888888", "o left/down"],
    ["#888888", "[] up"],
    ["#888888", "/\\ right+"],
  ]);
  out.push("</svg>");
  return out.join("\n") + "\n";
}

/** Truncated-ansatz residuals against the clock s. */
export function residualsFigure(rows: Row[], scales: AxisScales): string {
  const out = openSvg("ansatz residuals along the trajectory");
  const series: Array<[string, string]> = [
    ["residual_4", "4 solitons"],
    ["residual_2", "2 solitons"],
    ["residual_1", "1 soliton"],
  ];
  const X = makeScale(
    domainOf(rows.map((r) => num(r, "s")), scales.x === "log"), [X0, X1],
    scales.x === "log",
  );
  const Y = makeScale(
    domainOf(
      rows.flatMap((r) => series.map(([k]) => num(r, k))),
      scales.y === "log",
    ),
    [Y0, Y1], scales.y === "log",
  );
  axes(out, X, Y, "clock s", "residual");
  series.forEach(([key], i) => {
    const pts = rows
      .filter((r) => Number.isFinite(num(r, key))
        && (scales.y !== "log" || num(r, key) > 0))
      .map((r): [number, number] => [X(num(r, "s")), Y(num(r, key))]);
    if (pts.length > 0) {
      out.push(polyline(pts, PALETTE[i], ` class="residual-curve"`));
    }
  });
  legend(out, series.map(([, name], i): [string, string] =>
    [PALETTE[i], name]));
  out.push("</svg>");
  return out.join("\n") + "\n";
}

/** Phi trajectories of a seed scan with the +-1 exit lines. */
export function shootingFan(rows: Row[], scales: AxisScales): string {
  const out = openSvg("shooting fan: Phi(s) across the seed bracket");
  const seeds: number[] = [];
  const bySeed = new Map<number, Array<[number, number]>>();
  for (const r of rows) {
    const nu0 = num(r, "nu0");
    if (!bySeed.has(nu0)) {
      bySeed.set(nu0, []);
      seeds.push(nu0);
    }
    bySeed.get(nu0)!.push([num(r, "s"), num(r, "phi")]);
  }
  const X = makeScale(
    domainOf(rows.map((r) => num(r, "s")), scales.x === "log"), [X0, X1],
    scales.x === "log",
  );
  const Y = makeScale([-1.15, 1.15], [Y0, Y1]);
  axes(out, X, Y, "clock s", "Phi");

  for (const phi of [-1, 1]) {
    out.push(
      `<line class="exit-line" x1="${px(X0)}" y1="${px(Y(phi))}" ` +
        `x2="${px(X1)}" y2="${px(Y(phi))}" stroke="#000000" ` +
        `stroke-dasharray="5 4" stroke-width="1"/>`,
    );
  }
  seeds.forEach((nu0, i) => {
    const t = seeds.length > 1 ? i / (seeds.length - 1) : 0.5;
    const pts = bySeed
      .get(nu0)!
      .map(([s, phi]): [number, number] => [X(s), Y(phi)]);
    out.push(polyline(pts, ramp(t), ` class="fan-curve"`));
  });
  out.push(
    `<text x="${px(X1 + 10)}" y="${px(Y1 + 12)}" ${FONT} font-size="11">` +
      `${seeds.length} seeds</text>`,
  );
  out.push("</svg>");
  return out.join("\n") + "\n";
}
