/** Minimal hand-rolled SVG plotting: axes, polylines, markers with drop
 * lines. No DOM required, so it runs headless under plain Node. */

const WIDTH = 720;
const HEIGHT = 460;
const MARGIN = { left: 72, right: 24, top: 36, bottom: 56 };

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label?: string;
  style: "line" | "dashed" | "markers";
  /** markers get a vertical drop line down to y = dropTo */
  dropTo?: number;
}

export interface FigureSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 2.5, 5, 10].map((m) => m * mag).find((s) => span / s <= n) ?? mag * 10;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(6)));
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function renderFigure(spec: FigureSpec): string {
  const xs = spec.series.flatMap((s) => s.x).filter(Number.isFinite);
  const ys = spec.series.flatMap((s) => s.y).filter(Number.isFinite);
  if (xs.length === 0 || ys.length === 0) {
    throw new Error(`figure '${spec.title}' has no finite data`);
  }
  let [xLo, xHi] = [Math.min(...xs), Math.max(...xs)];
  let [yLo, yHi] = [Math.min(...ys), Math.max(...ys)];
  if (xHi === xLo) [xLo, xHi] = [xLo - 1, xHi + 1];
  if (yHi === yLo) [yLo, yHi] = [yLo - 1, yHi + 1];
  const yPad = 0.06 * (yHi - yLo);
  yLo -= yPad;
  yHi += yPad;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const px = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number) => MARGIN.top + (1 - (y - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="13">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  for (const t of niceTicks(xLo, xHi)) {
    const x = px(t);
    parts.push(
      `<line x1="${x.toFixed(1)}" y1="${MARGIN.top}" x2="${x.toFixed(1)}" ` +
        `y2="${MARGIN.top + plotH}" stroke="#eee"/>`,
      `<line x1="${x.toFixed(1)}" y1="${MARGIN.top + plotH}" x2="${x.toFixed(1)}" ` +
        `y2="${MARGIN.top + plotH + 5}" stroke="black"/>`,
      `<text x="${x.toFixed(1)}" y="${MARGIN.top + plotH + 20}" ` +
        `text-anchor="middle">${fmtTick(t)}</text>`,
    );
  }
  for (const t of niceTicks(yLo, yHi)) {
    const y = py(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y.toFixed(1)}" x2="${MARGIN.left + plotW}" ` +
        `y2="${y.toFixed(1)}" stroke="#eee"/>`,
      `<line x1="${MARGIN.left - 5}" y1="${y.toFixed(1)}" x2="${MARGIN.left}" ` +
        `y2="${y.toFixed(1)}" stroke="black"/>`,
      `<text x="${MARGIN.left - 9}" y="${(y + 4).toFixed(1)}" ` +
        `text-anchor="end">${fmtTick(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="black"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 14}" ` +
      `text-anchor="middle">${esc(spec.xLabel)}</text>`,
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${esc(spec.yLabel)}</text>`,
    `<text x="${MARGIN.left + plotW / 2}" y="22" text-anchor="middle" ` +
      `font-size="15">${esc(spec.title)}</text>`,
  );

  for (const s of spec.series) {
    if (s.style === "markers") {
      const drop = s.dropTo ?? 0;
      const y0 = py(Math.min(Math.max(drop, yLo), yHi));
      for (let i = 0; i < s.x.length; i++) {
        if (!Number.isFinite(s.x[i]) || !Number.isFinite(s.y[i])) continue;
        const cx = px(s.x[i]);
        const cy = py(s.y[i]);
        parts.push(
          `<line x1="${cx.toFixed(1)}" y1="${cy.toFixed(1)}" x2="${cx.toFixed(1)}" ` +
            `y2="${y0.toFixed(1)}" stroke="${s.color}" stroke-width="0.6" opacity="0.6"/>`,
          star(cx, cy, 4.5, s.color),
        );
      }
    } else {
      const points: string[] = [];
      for (let i = 0; i < s.x.length; i++) {
        if (Number.isFinite(s.x[i]) && Number.isFinite(s.y[i])) {
          points.push(`${px(s.x[i]).toFixed(1)},${py(s.y[i]).toFixed(1)}`);
        }
      }
      const dash = s.style === "dashed" ? ` stroke-dasharray="6 4"` : "";
      parts.push(
        `<polyline points="${points.join(" ")}" fill="none" ` +
          `stroke="${s.color}" stroke-width="1.6"${dash}/>`,
      );
    }
  }

  const labeled = spec.series.filter((s) => s.label);
  labeled.forEach((s, i) => {
    const y = MARGIN.top + 16 + 18 * i;
    const x = MARGIN.left + plotW - 160;
    if (s.style === "markers") {
      parts.push(star(x + 12, y - 4, 4.5, s.color));
    } else {
      const dash = s.style === "dashed" ? ` stroke-dasharray="6 4"` : "";
      parts.push(
        `<line x1="${x}" y1="${y - 4}" x2="${x + 24}" y2="${y - 4}" ` +
          `stroke="${s.color}" stroke-width="1.6"${dash}/>`,
      );
    }
    parts.push(`<text x="${x + 30}" y="${y}">${esc(s.label ?? "")}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function star(cx: number, cy: number, r: number, color: string): string {
  const pts: string[] = [];
  for (let k = 0; k < 10; k++) {
    const rad = k % 2 === 0 ? r : 0.45 * r;
    const a = (Math.PI / 5) * k - Math.PI / 2;
    pts.push(`${(cx + rad * Math.cos(a)).toFixed(1)},${(cy + rad * Math.sin(a)).toFixed(1)}`);
  }
  return `<polygon points="${pts.join(" ")}" fill="${color}"/>`;
}
