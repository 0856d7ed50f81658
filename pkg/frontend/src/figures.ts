/** The four figure kinds built from rydrx output files. */

import { basename } from "path";

import { column, parseAny, SchemaError, Table } from "./data.js";
import { FigureSpec, renderFigure, Series } from "./svg.js";

export const KINDS = [
  "spectrum_overlay",
  "am_roundtrip",
  "fm_roundtrip",
  "calibration_line",
] as const;
export type Kind = (typeof KINDS)[number];

const PALETTE = ["#000000", "#c82828", "#2856c8", "#1e8c50", "#b06000"];

function spectrumLabel(table: Table, index: number): string {
  const rabi = Number(table.meta["mw_rabi_mhz"] ?? NaN);
  const det = Number(table.meta["mw_detuning_mhz"] ?? NaN);
  if (Number.isFinite(rabi) && rabi === 0) return "MW off";
  if (Number.isFinite(det) && det !== 0) {
    return `detuning ${det > 0 ? "+" : ""}${det} MHz`;
  }
  if (Number.isFinite(rabi)) return `MW on (${rabi} MHz)`;
  return basename(table.path);
}

function spectrumOverlay(tables: Table[]): FigureSpec {
  const series: Series[] = tables.map((t, i) => ({
    x: column(t, "axis_hz").map((v) => v / 1e6),
    y: column(t, "signal"),
    color: PALETTE[i % PALETTE.length],
    label: spectrumLabel(t, i),
    style: i === 0 ? "line" : "dashed",
  }));
  return {
    title: "EIT signal vs scan detuning",
    xLabel: "detuning (MHz)",
    yLabel: "EIT signal (norm. absorption units)",
    series,
  };
}

function roundtrip(tables: Table[], fm: boolean): FigureSpec {
  if (tables.length !== 1) {
    throw new SchemaError("round-trip figures take exactly one link file");
  }
  const t = tables[0];
  const wantKind = t.meta["kind"];
  if (wantKind !== "link") {
    throw new SchemaError(`${t.path}: expected a link file, got '${wantKind}'`);
  }
  const time = column(t, "t_s");
  const txName = fm ? "transmitted_hz" : "transmitted_m";
  const rxName = fm ? "received_hz" : "received_m";
  const scale = fm ? 1e-6 : 1.0;
  const tx = column(t, txName).map((v) => v * scale);
  const rx = column(t, rxName).map((v) => v * scale);
  const fidelity = Number(t.meta["fidelity"] ?? NaN);
  const title = fm
    ? `FM round trip (fidelity ${fidelity.toFixed(3)})`
    : `AM round trip (fidelity ${fidelity.toFixed(3)})`;
  return {
    title,
    xLabel: "time (s)",
    yLabel: fm ? "detuning (MHz)" : "modulation m(t)",
    series: [
      { x: time, y: tx, color: PALETTE[0], label: "transmitted", style: "line" },
      {
        x: time,
        y: rx,
        color: PALETTE[1],
        label: "received",
        style: "markers",
        dropTo: 0,
      },
    ],
  };
}

function calibrationLine(tables: Table[]): FigureSpec {
  if (tables.length !== 1) {
    throw new SchemaError("calibration_line takes exactly one file");
  }
  const t = tables[0];
  const rabi = column(t, "mw_rabi_mhz");
  const fat = column(t, "f_at_mhz");
  return {
    title: "AT splitting vs drive Rabi frequency",
    xLabel: "MW Rabi frequency (MHz)",
    yLabel: "measured splitting f_AT (MHz)",
    series: [
      { x: rabi, y: rabi, color: "#999999", label: "1:1", style: "dashed" },
      {
        x: rabi,
        y: fat,
        color: PALETTE[1],
        label: "measured",
        style: "markers",
        dropTo: 0,
      },
    ],
  };
}

export function buildFigure(kind: Kind, paths: string[]): string {
  if (paths.length === 0) throw new SchemaError("no input files given");
  const tables = paths.map(parseAny);
  let spec: FigureSpec;
  switch (kind) {
    case "spectrum_overlay":
      for (const t of tables) {
        if (t.meta["kind"] !== "spectrum") {
          throw new SchemaError(`${t.path}: expected spectrum files`);
        }
      }
      spec = spectrumOverlay(tables);
      break;
    case "am_roundtrip":
      spec = roundtrip(tables, false);
      break;
    case "fm_roundtrip":
      spec = roundtrip(tables, true);
      break;
    case "calibration_line":
      spec = calibrationLine(tables);
      break;
    default:
      throw new SchemaError(`unknown figure kind '${kind}'`);
  }
  return renderFigure(spec);
}
