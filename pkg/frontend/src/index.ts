export { column, dumpVerify, parseAny, parseCsv, parseJsonFile, SchemaError } from "./data.js";
export type { Table } from "./data.js";
export { buildFigure, KINDS } from "./figures.js";
export type { Kind } from "./figures.js";
export { renderFigure } from "./svg.js";
export type { FigureSpec, Series } from "./svg.js";
