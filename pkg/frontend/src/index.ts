export { ParseError, parseCsv, requireColumns, requireIncreasingTime, column, SERIES_COLUMNS, DECAY_COLUMNS } from "./csv.js";
export type { SeriesTable } from "./csv.js";
export { parseSummary, numberFrom } from "./summary.js";
export type { Summary, CertificateRecord } from "./summary.js";
export { renderChart } from "./svg.js";
export type { ChartSpec, SeriesSpec } from "./svg.js";
export { renderDecay, renderAbsorbing, renderConvergence, renderCertificates } from "./render.js";
export type { DecayFigure } from "./render.js";
export { generateReport, main } from "./cli.js";
