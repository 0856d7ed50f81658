/** Readers for rydrx CSV/JSON output files.
 *
 * Raw numeric tokens are retained verbatim so that --dump-verify can
 * re-emit exactly the bytes that were parsed.
 */

import { readFileSync } from "fs";

export const SUPPORTED_SCHEMA = 1;

export interface Table {
  meta: Record<string, string>;
  columns: string[];
  /** values[i][j]: row i, column j */
  values: number[][];
  /** rawRows[i][j]: the untouched token behind values[i][j] */
  rawRows: string[][];
  path: string;
}

export class SchemaError extends Error {}

export function parseCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const meta: Record<string, string> = {};
  let columns: string[] = [];
  const values: number[][] = [];
  const rawRows: string[][] = [];

  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    if (line === "") continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq >= 0) meta[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
      continue;
    }
    if (columns.length === 0) {
      columns = line.split(",").map((c) => c.trim());
      continue;
    }
    const tokens = line.split(",");
    const row = tokens.map(Number);
    if (tokens.length !== columns.length || row.some(Number.isNaN)) {
      // NaN cells are legal (failed link samples); reject only non-numeric junk
      const bad = tokens.some((t) => t.trim() !== "nan" && Number.isNaN(Number(t)));
      if (bad || tokens.length !== columns.length) {
        throw new SchemaError(`${path}: malformed data row '${line}'`);
      }
    }
    values.push(row);
    rawRows.push(tokens);
  }

  if (meta["schema_version"] !== String(SUPPORTED_SCHEMA)) {
    throw new SchemaError(
      `${path}: schema_version ${meta["schema_version"] ?? "(missing)"} is ` +
        `not supported (expected ${SUPPORTED_SCHEMA})`,
    );
  }
  if (columns.length === 0 || values.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return { meta, columns, values, rawRows, path };
}

export function parseJsonFile(path: string): Table {
  const payload = JSON.parse(readFileSync(path, "utf8"));
  if (payload["schema_version"] !== SUPPORTED_SCHEMA) {
    throw new SchemaError(
      `${path}: schema_version ${payload["schema_version"]} is not ` +
        `supported (expected ${SUPPORTED_SCHEMA})`,
    );
  }
  const meta: Record<string, string> = {};
  for (const [k, v] of Object.entries(payload["meta"] ?? {})) {
    meta[k] = String(v);
  }
  meta["schema_version"] = String(payload["schema_version"]);
  meta["kind"] = String(payload["kind"]);

  let columnNames: string[];
  let fieldNames: string[];
  if (payload["kind"] === "spectrum") {
    columnNames = fieldNames = ["axis_hz", "signal"];
  } else {
    const unit = meta["link_kind"] === "fm" ? "hz" : "m";
    columnNames = ["t_s", `transmitted_${unit}`, `received_${unit}`, "deviation"];
    fieldNames = ["t_s", "transmitted", "received", "deviation"];
  }
  const arrays = fieldNames.map((name) => payload[name] as number[]);
  if (arrays.some((a) => !Array.isArray(a))) {
    throw new SchemaError(`${path}: missing data arrays`);
  }
  const n = arrays[0].length;
  const values: number[][] = [];
  const rawRows: string[][] = [];
  for (let i = 0; i < n; i++) {
    values.push(arrays.map((a) => a[i]));
    rawRows.push(arrays.map((a) => JSON.stringify(a[i])));
  }
  if (n === 0) throw new SchemaError(`${path}: no data rows`);
  return { meta, columns: columnNames, values, rawRows, path };
}

export function parseAny(path: string): Table {
  return path.endsWith(".json") ? parseJsonFile(path) : parseCsv(path);
}

export function column(table: Table, name: string): number[] {
  const j = table.columns.indexOf(name);
  if (j < 0) {
    throw new SchemaError(
      `${table.path}: missing column '${name}' (have ${table.columns.join(", ")})`,
    );
  }
  return table.values.map((row) => row[j]);
}

/** Re-emit the parsed arrays exactly as read (column per line). */
export function dumpVerify(table: Table): string {
  const lines: string[] = [];
  for (let j = 0; j < table.columns.length; j++) {
    const tokens = table.rawRows.map((row) => row[j]);
    lines.push(`${table.columns[j]}:${tokens.join(",")}`);
  }
  return lines.join("\n") + "\n";
}
