/**
 * Minimal deterministic SVG line charts (no DOM, no plotting dependency).
 * Figures are static files rendered once from persisted numbers.
 */

export interface SeriesSpec {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dash?: string;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: SeriesSpec[];
  logY?: boolean;
  annotations?: string[];
  /** horizontal band [lo, hi] drawn behind the curves (data coordinates) */
  band?: { lo: number; hi: number; color: string; label?: string };
  vline?: { x: number; label?: string };
  width?: number;
  height?: number;
}

const MARGIN = { left: 70, right: 20, top: 34, bottom: 46 };

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= n) ?? 10 * mag;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) ticks.push(v);
  return ticks;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return String(Math.round(v * 1e6) / 1e6);
}

export function renderChart(spec: ChartSpec): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 440;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = spec.series.flatMap((s) => s.x);
  let ys = spec.series.flatMap((s) => s.y);
  if (spec.band) ys = ys.concat([spec.band.lo, spec.band.hi]);
  if (spec.logY) ys = ys.filter((y) => y > 0);
  if (xs.length === 0 || ys.length === 0) throw new Error(`chart '${spec.title}': no data`);

  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const yLoRaw = Math.min(...ys);
  const yHiRaw = Math.max(...ys);
  const toY = spec.logY ? (v: number) => Math.log10(v) : (v: number) => v;
  let yLo = toY(yLoRaw);
  let yHi = toY(yHiRaw);
  if (yHi === yLo) {
    yHi += 1;
    yLo -= 1;
  }
  const padY = 0.05 * (yHi - yLo);
  yLo -= padY;
  yHi += padY;

  const px = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo || 1)) * plotW;
  const py = (y: number) => MARGIN.top + plotH - ((toY(y) - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${width / 2}" y="20" text-anchor="middle" font-size="14">${esc(spec.title)}</text>`);

  if (spec.band) {
    const yTop = py(spec.band.hi);
    const yBot = spec.logY && spec.band.lo <= 0 ? MARGIN.top + plotH : py(spec.band.lo);
    parts.push(
      `<rect x="${MARGIN.left}" y="${yTop.toFixed(2)}" width="${plotW}" height="${Math.max(0, yBot - yTop).toFixed(2)}" fill="${spec.band.color}" opacity="0.3"/>`,
    );
  }

  // axes and ticks
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#444"/>`,
  );
  for (const tx of niceTicks(xLo, xHi)) {
    const x = px(tx);
    parts.push(`<line x1="${x.toFixed(2)}" y1="${MARGIN.top + plotH}" x2="${x.toFixed(2)}" y2="${MARGIN.top + plotH + 4}" stroke="#444"/>`);
    parts.push(`<text x="${x.toFixed(2)}" y="${MARGIN.top + plotH + 17}" text-anchor="middle">${fmtTick(tx)}</text>`);
  }
  const yTicks = spec.logY
    ? niceTicks(Math.ceil(yLo), Math.floor(yHi), 8).map((e) => e)
    : niceTicks(yLo, yHi);
  for (const ty of yTicks) {
    const y = MARGIN.top + plotH - ((ty - yLo) / (yHi - yLo)) * plotH;
    const label = spec.logY ? `1e${fmtTick(ty)}` : fmtTick(ty);
    parts.push(`<line x1="${MARGIN.left - 4}" y1="${y.toFixed(2)}" x2="${MARGIN.left}" y2="${y.toFixed(2)}" stroke="#444"/>`);
    parts.push(`<text x="${MARGIN.left - 8}" y="${(y + 4).toFixed(2)}" text-anchor="end">${label}</text>`);
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 10}" text-anchor="middle">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">${esc(spec.yLabel)}</text>`,
  );

  if (spec.vline) {
    const x = px(spec.vline.x);
    parts.push(`<line x1="${x.toFixed(2)}" y1="${MARGIN.top}" x2="${x.toFixed(2)}" y2="${MARGIN.top + plotH}" stroke="#333" stroke-dasharray="2,3"/>`);
    if (spec.vline.label) {
      parts.push(`<text x="${(x + 4).toFixed(2)}" y="${MARGIN.top + 12}">${esc(spec.vline.label)}</text>`);
    }
  }

  for (const s of spec.series) {
    const points: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const yv = s.y[i]!;
      if (spec.logY && !(yv > 0)) continue;
      points.push(`${px(s.x[i]!).toFixed(2)},${py(yv).toFixed(2)}`);
    }
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(`<polyline fill="none" stroke="${s.color}" stroke-width="1.5"${dash} points="${points.join(" ")}"/>`);
  }

  // legend + annotations
  let ly = MARGIN.top + 14;
  for (const s of spec.series) {
    const lx = MARGIN.left + plotW - 230;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${s.color}" stroke-width="1.5"${dash}/>`);
    parts.push(`<text x="${lx + 28}" y="${ly}">${esc(s.label)}</text>`);
    ly += 16;
  }
  if (spec.band?.label) {
    const lx = MARGIN.left + plotW - 230;
    parts.push(`<rect x="${lx}" y="${ly - 12}" width="22" height="10" fill="${spec.band.color}" opacity="0.3"/>`);
    parts.push(`<text x="${lx + 28}" y="${ly}">${esc(spec.band.label)}</text>`);
    ly += 16;
  }
  let ay = MARGIN.top + 14;
  for (const note of spec.annotations ?? []) {
    parts.push(`<text x="${MARGIN.left + 8}" y="${ay}" fill="#222">${esc(note)}</text>`);
    ay += 16;
  }

  parts.push("</svg>");
  return parts.join("\n");
}
