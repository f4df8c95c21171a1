#!/usr/bin/env node
/**
 * tdgl-report: render figures and a certificate report from a results dir.
 *
 *     tdgl-report report <results-dir> [--out <dir>]
 *
 * Scans for <name>.summary.json files, renders the figures each scenario
 * supports (decay overlay, ensemble absorption, convergence panels) as SVG
 * next to a one-page certificates.txt. Exit codes: 0 rendered cleanly,
 * 2 unparseable/missing inputs or bad usage.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { ParseError, parseCsv } from "./csv.js";
import { renderAbsorbing, renderCertificates, renderConvergence, renderDecay } from "./render.js";
import { Summary, numberFrom, parseSummary } from "./summary.js";

export interface ReportResult {
  written: string[];
  summaries: Summary[];
}

function readTable(file: string) {
  return parseCsv(fs.readFileSync(file, "utf-8"), path.basename(file));
}

export function generateReport(resultsDir: string, outDir: string): ReportResult {
  if (!fs.existsSync(resultsDir) || !fs.statSync(resultsDir).isDirectory()) {
    throw new ParseError(`results directory not found: ${resultsDir}`);
  }
  const entries = fs.readdirSync(resultsDir).sort();
  const summaryFiles = entries.filter((f) => f.endsWith(".summary.json"));
  if (summaryFiles.length === 0) {
    throw new ParseError(`no *.summary.json files in ${resultsDir}`);
  }
  fs.mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  const summaries: Summary[] = [];

  for (const file of summaryFiles) {
    const summary = parseSummary(fs.readFileSync(path.join(resultsDir, file), "utf-8"), file);
    summaries.push(summary);

    if (summary.scenario === "decomposition") {
      const decayFile = path.join(resultsDir, `${summary.name}.decay.csv`);
      if (!fs.existsSync(decayFile)) {
        throw new ParseError(`${file}: decomposition run without ${summary.name}.decay.csv`);
      }
      const gamma = numberFrom(summary.data, ["gamma"], file);
      const figure = renderDecay(readTable(decayFile), gamma, path.basename(decayFile));
      const out = path.join(outDir, `${summary.name}.decay.svg`);
      fs.writeFileSync(out, figure.svg);
      written.push(out);
    }

    if (summary.scenario === "absorbing-ensemble") {
      const memberFiles = entries.filter(
        (f) => f.startsWith(`${summary.name}.member`) && f.endsWith(".series.csv"),
      );
      const members = memberFiles.map((f) => ({ name: f.replace(".series.csv", ""), table: readTable(path.join(resultsDir, f)) }));
      const r0 = numberFrom(summary.data, ["R0_est"], file);
      const tAbs = numberFrom(summary.data, ["t_abs"], file);
      const out = path.join(outDir, `${summary.name}.absorbing.svg`);
      fs.writeFileSync(out, renderAbsorbing(members, r0, tAbs));
      written.push(out);
    }

    if (summary.scenario === "convergence") {
      const out = path.join(outDir, `${summary.name}.convergence.svg`);
      fs.writeFileSync(out, renderConvergence(summary));
      written.push(out);
    }
  }

  const reportPath = path.join(outDir, "certificates.txt");
  fs.writeFileSync(reportPath, renderCertificates(summaries));
  written.push(reportPath);
  return { written, summaries };
}

export function main(argv: string[]): number {
  const args = [...argv];
  if (args[0] !== "report" || args.length < 2) {
    process.stderr.write("usage: tdgl-report report <results-dir> [--out <dir>]\n");
    return 2;
  }
  const resultsDir = args[1]!;
  let outDir = path.join(resultsDir, "report");
  const outFlag = args.indexOf("--out");
  if (outFlag >= 0) {
    const value = args[outFlag + 1];
    if (!value) {
      process.stderr.write("--out requires a directory argument\n");
      return 2;
    }
    outDir = value;
  }
  try {
    const result = generateReport(resultsDir, outDir);
    for (const file of result.written) {
      process.stdout.write(`wrote ${file}\n`);
    }
    const failed = result.summaries.flatMap((s) => s.certificates).filter((c) => !c.passed).length;
    process.stdout.write(`certificates: ${result.summaries.flatMap((s) => s.certificates).length}, failed: ${failed}\n`);
    return 0;
  } catch (err) {
    if (err instanceof ParseError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  (import.meta.url === `file://${process.argv[1]}` || import.meta.url === new URL(`file://${path.resolve(process.argv[1]!)}`).href);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
