/** Typed view of the simulator's <name>.summary.json documents. */

import { ParseError } from "./csv.js";

export interface CertificateRecord {
  name: string;
  constants: Record<string, unknown>;
  tolerance: number;
  passed: boolean;
  evidence: Record<string, unknown>;
}

export interface Summary {
  name: string;
  scenario: string;
  passed: boolean;
  certificates: CertificateRecord[];
  data: Record<string, unknown>;
  config: Record<string, unknown>;
}

export function parseSummary(text: string, source: string): Summary {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new ParseError(`${source}: invalid JSON (${(err as Error).message})`);
  }
  const obj = doc as Record<string, unknown>;
  for (const key of ["name", "scenario", "certificates"]) {
    if (!(key in obj)) throw new ParseError(`${source}: missing field ${key}`);
  }
  const rawCerts = obj.certificates;
  if (!Array.isArray(rawCerts)) throw new ParseError(`${source}: certificates must be an array`);
  const certificates: CertificateRecord[] = rawCerts.map((c, i) => {
    const cert = c as Record<string, unknown>;
    if (typeof cert.name !== "string" || typeof cert.passed !== "boolean") {
      throw new ParseError(`${source}: certificate ${i} lacks name/passed fields`);
    }
    return {
      name: cert.name,
      constants: (cert.constants ?? {}) as Record<string, unknown>,
      tolerance: Number(cert.tolerance ?? 0),
      passed: cert.passed,
      evidence: (cert.evidence ?? {}) as Record<string, unknown>,
    };
  });
  return {
    name: String(obj.name),
    scenario: String(obj.scenario),
    passed: Boolean(obj.passed),
    certificates,
    data: (obj.data ?? {}) as Record<string, unknown>,
    config: (obj.config ?? {}) as Record<string, unknown>,
  };
}

export function numberFrom(record: Record<string, unknown>, path: string[], source: string): number {
  let cur: unknown = record;
  for (const key of path) {
    if (typeof cur !== "object" || cur === null || !(key in (cur as Record<string, unknown>))) {
      throw new ParseError(`${source}: missing ${path.join(".")}`);
    }
    cur = (cur as Record<string, unknown>)[key];
  }
  const value = Number(cur);
  if (!Number.isFinite(value)) throw new ParseError(`${source}: ${path.join(".")} is not a finite number`);
  return value;
}
