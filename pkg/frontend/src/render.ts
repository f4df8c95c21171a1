/**
 * Figure builders over parsed result files. Pure functions of the persisted
 * numbers: the postprocessor never recomputes dynamics.
 */

import {
  DECAY_COLUMNS,
  ParseError,
  SeriesTable,
  column,
  requireColumns,
  requireIncreasingTime,
} from "./csv.js";
import { Summary, numberFrom } from "./summary.js";
import { renderChart } from "./svg.js";

export interface DecayFigure {
  svg: string;
  maxRelDeviation: number;
}

/**
 * Overlay the measured stable-part H1 norm on the exact envelope
 * e^{-gamma t} |phi_0|_H1 rebuilt from gamma and the initial value, and
 * annotate the maximal relative deviation (a mislabeled gamma is plainly
 * visible as divergence and a large deviation).
 */
export function renderDecay(table: SeriesTable, gamma: number, source = "decay series"): DecayFigure {
  requireColumns(table, DECAY_COLUMNS, source);
  const t = requireIncreasingTime(table, source);
  const measured = column(table, "h1_phid", source);
  const h1Phi0 = measured[0];
  if (h1Phi0 === undefined || !(h1Phi0 > 0)) {
    throw new ParseError(`${source}: initial |phi_d|_H1 must be positive`);
  }
  const envelope = t.map((tv) => h1Phi0 * Math.exp(-gamma * tv));
  let maxRelDeviation = 0;
  for (let i = 0; i < t.length; i++) {
    maxRelDeviation = Math.max(maxRelDeviation, Math.abs(measured[i]! - envelope[i]!) / envelope[i]!);
  }
  const svg = renderChart({
    title: "Stable-part decay: measured vs exact envelope",
    xLabel: "t",
    yLabel: "|phi_d|_H1 (log scale)",
    logY: true,
    series: [
      { label: "measured |phi_d|_H1", x: t, y: measured, color: "#1f77b4" },
      { label: "e^{-gamma t} |phi_0|_H1", x: t, y: envelope, color: "#d62728", dash: "6,4" },
    ],
    annotations: [
      `max relative deviation = ${maxRelDeviation.toExponential(3)}`,
      `gamma = ${gamma}`,
    ],
  });
  return { svg, maxRelDeviation };
}

/** Ensemble E2 curves entering the fitted absorbing ball. */
export function renderAbsorbing(
  members: { name: string; table: SeriesTable }[],
  r0Est: number,
  tAbs: number,
): string {
  if (members.length === 0) throw new ParseError("absorbing figure: no member series found");
  const palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];
  const series = members.map((m, i) => {
    requireColumns(m.table, ["t", "e2"], m.name);
    return {
      label: m.name,
      x: requireIncreasingTime(m.table, m.name),
      y: column(m.table, "e2", m.name),
      color: palette[i % palette.length]!,
    };
  });
  const floor = Math.min(...series.flatMap((s) => s.y.filter((v) => v > 0)));
  return renderChart({
    title: "Forced ensemble absorbed into the fitted ball",
    xLabel: "t",
    yLabel: "E2 (log scale)",
    logY: true,
    series,
    band: { lo: Math.min(floor, r0Est / 10), hi: r0Est, color: "#c8a165", label: "E2 <= R0_est" },
    vline: { x: tAbs, label: `t_abs = ${tAbs.toFixed(2)}` },
    annotations: [`R0_est = ${r0Est.toFixed(4)}`, `${members.length} members`],
  });
}

/** Level-difference and temporal-order panels from a convergence summary. */
export function renderConvergence(summary: Summary): string {
  const certs = summary.certificates;
  const refine = certs.find((c) => c.name.startsWith("Galerkin self-convergence"));
  const order = certs.find((c) => c.name.startsWith("manufactured-solution"));
  if (!refine || !order) {
    throw new ParseError(`${summary.name}: convergence summary lacks the refinement/order certificates`);
  }
  const levels = (refine.constants.levels as number[]).map(Number);
  const diffs = (refine.constants.diffs as number[]).map(Number);
  const dts = (order.constants.dts as number[]).map(Number);
  const errors = (order.constants.errors as number[]).map(Number);
  if (levels.length - 1 !== diffs.length || dts.length !== errors.length) {
    throw new ParseError(`${summary.name}: inconsistent convergence arrays`);
  }
  const slope2 = dts.map((dt) => errors[0]! * (dt / dts[0]!) ** 2);
  return renderChart({
    title: "Convergence: level differences and temporal order",
    xLabel: "mode count (level diffs) / 1000*dt (temporal)",
    yLabel: "H1 difference or error (log scale)",
    logY: true,
    series: [
      { label: "level diff at T", x: levels.slice(1), y: diffs, color: "#1f77b4" },
      { label: "temporal error", x: dts.map((d) => 1000 * d), y: errors, color: "#2ca02c" },
      { label: "slope-2 reference", x: dts.map((d) => 1000 * d), y: slope2, color: "#999999", dash: "4,4" },
    ],
    annotations: [
      `ratios per doubling: ${(refine.constants.ratios as number[]).map((r) => Number(r).toExponential(2)).join(", ")}`,
      `observed orders: ${(order.constants.orders as number[]).map((o) => Number(o).toFixed(3)).join(", ")}`,
    ],
  });
}

/** One-page text report: every certificate from every summary, one line each. */
export function renderCertificates(summaries: Summary[]): string {
  const lines: string[] = [];
  lines.push("certificate report");
  lines.push("==================");
  let total = 0;
  let failed = 0;
  for (const summary of [...summaries].sort((a, b) => a.name.localeCompare(b.name))) {
    lines.push("");
    lines.push(`[${summary.name}] scenario=${summary.scenario}`);
    for (const cert of summary.certificates) {
      total += 1;
      if (!cert.passed) failed += 1;
      const constants = Object.entries(cert.constants)
        .filter(([, v]) => typeof v === "number")
        .map(([k, v]) => `${k}=${formatNumber(v as number)}`)
        .join(" ");
      lines.push(`  ${cert.passed ? "PASS" : "FAIL"}  ${cert.name}${constants ? "  (" + constants + ")" : ""}`);
    }
  }
  lines.push("");
  lines.push(`${total} certificates, ${failed} failed`);
  lines.push("");
  return lines.join("\n");
}

function formatNumber(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(3);
  return String(Math.round(v * 1e6) / 1e6);
}
