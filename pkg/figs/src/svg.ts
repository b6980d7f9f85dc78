/**
 * Minimal deterministic SVG assembly.
 *
 * Figures are plain strings built from fixed-size canvases, fixed fonts
 * and explicitly rounded coordinates, so identical inputs produce
 * byte-identical files (no timestamps, no random ids, no environment
 * queries).
 */

export const WIDTH = 640;
export const HEIGHT = 480;
export const MARGIN = { top: 44, right: 120, bottom: 48, left: 64 };

export const FONT = 'font-family="DejaVu Sans, sans-serif"';

/** Fixed-width coordinate formatting (pixel space). */
export function px(v: number): string {
  const r = Math.round(v * 100) / 100;
  // avoid the "-0.00" artifact so mirrored layouts stay byte-stable
  return (Object.is(r, -0) ? 0 : r).toFixed(2);
}

/** Tick-label formatting (data space). */
export function label(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    const s = v.toPrecision(3);
    return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
  }
  return v.toExponential(1);
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
  log: boolean;
  ticks(): number[];
}

export function makeScale(
  domain: [number, number],
  range: [number, number],
  log = false,
): Scale {
  let [lo, hi] = domain;
  if (log && (lo <= 0 || hi <= 0)) {
    throw new Error(`log scale needs a positive domain, got [${lo}, ${hi}]`);
  }
  if (lo === hi) {
    // degenerate (constant or empty) data: widen to a unit box
    lo -= 0.5;
    hi += 0.5;
    if (log) {
      lo = hi / 2;
      hi = hi * 2;
    }
  }
  const f = (v: number) => {
    const t = log
      ? (Math.log(v) - Math.log(lo)) / (Math.log(hi) - Math.log(lo))
      : (v - lo) / (hi - lo);
    return range[0] + t * (range[1] - range[0]);
  };
  const scale = f as Scale;
  scale.domain = [lo, hi];
  scale.range = range;
  scale.log = log;
  scale.ticks = () => {
    if (!log) {
      const out = [];
      for (let i = 0; i <= 4; i++) out.push(lo + (i * (hi - lo)) / 4);
      return out;
    }
    const out = [];
    const k0 = Math.ceil(Math.log10(lo) - 1e-9);
    const k1 = Math.floor(Math.log10(hi) + 1e-9);
    for (let k = k0; k <= k1; k++) out.push(Math.pow(10, k));
    return out.length >= 2 ? out : [lo, hi];
  };
  return scale;
}

/** Data domain with 5% padding; [0, 1] when no finite values exist. */
export function domainOf(values: number[], log = false): [number, number] {
  const finite = values.filter(
    (v) => Number.isFinite(v) && (!log || v > 0),
  );
  if (finite.length === 0) return log ? [0.1, 1] : [0, 1];
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (log) return [lo / 1.3, hi * 1.3];
  const pad = 0.05 * (hi - lo || 1);
  return [lo - pad, hi + pad];
}

export function openSvg(title: string): string[] {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
      `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    `<text x="${px(WIDTH / 2)}" y="24" text-anchor="middle" ${FONT} ` +
      `font-size="15">${title}</text>`,
  ];
}

/** Axes, ticks and labels for a standard x/y plot area. */
export function axes(
  out: string[],
  xs: Scale,
  ys: Scale,
  xlabel: string,
  ylabel: string,
): void {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  out.push(
    `<g stroke="#000000" stroke-width="1" fill="none">` +
      `<path d="M ${px(x0)} ${px(y1)} L ${px(x0)} ${px(y0)} L ${px(x1)} ${px(y0)}"/>` +
      `</g>`,
  );
  for (const t of xs.ticks()) {
    const x = xs(t);
    out.push(
      `<line x1="${px(x)}" y1="${px(y0)}" x2="${px(x)}" y2="${px(y0 + 5)}" stroke="#000000"/>`,
      `<text x="${px(x)}" y="${px(y0 + 18)}" text-anchor="middle" ${FONT} font-size="11">${label(t)}</text>`,
    );
  }
  for (const t of ys.ticks()) {
    const y = ys(t);
    out.push(
      `<line x1="${px(x0 - 5)}" y1="${px(y)}" x2="${px(x0)}" y2="${px(y)}" stroke="#000000"/>`,
      `<text x="${px(x0 - 8)}" y="${px(y + 4)}" text-anchor="end" ${FONT} font-size="11">${label(t)}</text>`,
    );
  }
  out.push(
    `<text x="${px((x0 + x1) / 2)}" y="${px(HEIGHT - 10)}" text-anchor="middle" ${FONT} font-size="12">${xlabel}</text>`,
    `<text x="16" y="${px((y0 + y1) / 2)}" text-anchor="middle" ${FONT} font-size="12" transform="rotate(-90 16 ${px((y0 + y1) / 2)})">${ylabel}</text>`,
  );
}

export function polyline(
  points: Array<[number, number]>,
  stroke: string,
  extra = "",
): string {
  const d = points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"} ${px(x)} ${px(y)}`)
    .join(" ");
  return `<path d="${d}" fill="none" stroke="${stroke}" stroke-width="1.5"${extra}/>`;
}

// -- colors ----------------------------------------------------------------

const VIRIDIS: Array<[number, number, number]> = [
  [0x44, 0x01, 0x54],
  [0x3b, 0x52, 0x8b],
  [0x21, 0x91, 0x8c],
  [0x5e, 0xc9, 0x62],
  [0xfd, 0xe7, 0x25],
];

/** Viridis-style ramp on [0, 1] with piecewise-linear RGB anchors. */
export function ramp(t: number): string {
  const u = Math.min(1, Math.max(0, t)) * (VIRIDIS.length - 1);
  const i = Math.min(VIRIDIS.length - 2, Math.floor(u));
  const f = u - i;
  const mix = (a: number, b: number) => Math.round(a + f * (b - a));
  const [r, g, b] = [0, 1, 2].map((k) =>
    mix(VIRIDIS[i][k], VIRIDIS[i + 1][k]),
  );
  const hex = (v: number) => v.toString(16).padStart(2, "0");
  return `#${hex(r)}${hex(g)}${hex(b)}`;
}

/** Fixed categorical palette for small series counts. */
export const PALETTE = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3"];
