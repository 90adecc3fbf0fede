/** Minimal deterministic SVG line-chart renderer. */

export interface Style {
  width: number;
  height: number;
  marginLeft: number;
  marginRight: number;
  marginTop: number;
  marginBottom: number;
  fontSize: number;
  strokeWidth: number;
  background: string;
  colors: string[];
  dashes: string[];
}

export const DEFAULT_STYLE: Style = {
  width: 720,
  height: 480,
  marginLeft: 70,
  marginRight: 20,
  marginTop: 44,
  marginBottom: 52,
  fontSize: 13,
  strokeWidth: 1.6,
  background: "#ffffff",
  colors: ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"],
  dashes: ["", "6 3", "2 2", "8 3 2 3", "4 4", "1 3"],
};

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
  series: Series[];
}

type Scale = (value: number) => number;

/** Fixed-precision number formatting keeps the output byte-stable. */
function fmt(value: number): string {
  return Number(value.toPrecision(6)).toString();
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= count) ?? candidates[candidates.length - 1];
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length > 0 ? ticks : [lo, hi];
}

function extent(values: number[], log: boolean): [number, number] {
  const usable = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (usable.length === 0) throw new Error("no plottable values on this axis");
  let lo = Math.min(...usable);
  let hi = Math.max(...usable);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  if (!log) {
    const pad = 0.03 * (hi - lo);
    return [lo - pad, hi + pad];
  }
  return [lo / 1.3, hi * 1.3];
}

function makeScale(lo: number, hi: number, outLo: number, outHi: number, log: boolean): Scale {
  const a = log ? Math.log10(lo) : lo;
  const b = log ? Math.log10(hi) : hi;
  return (v) => {
    const t = ((log ? Math.log10(v) : v) - a) / (b - a);
    return outLo + t * (outHi - outLo);
  };
}

function tickLabel(value: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(value));
    return `1e${e}`;
  }
  return fmt(value);
}

/** Render a line chart as a standalone SVG document string. */
export function renderChart(spec: ChartSpec, style: Style = DEFAULT_STYLE): string {
  const { width, height } = style;
  const plotLeft = style.marginLeft;
  const plotRight = width - style.marginRight;
  const plotTop = style.marginTop;
  const plotBottom = height - style.marginBottom;

  const xs = spec.series.flatMap((s) => s.x);
  const ys = spec.series.flatMap((s) => s.y);
  if (xs.length === 0) throw new Error("nothing to plot: no series data");
  const [xLo, xHi] = extent(xs, Boolean(spec.xLog));
  const [yLo, yHi] = extent(ys, Boolean(spec.yLog));
  const sx = makeScale(xLo, xHi, plotLeft, plotRight, Boolean(spec.xLog));
  const sy = makeScale(yLo, yHi, plotBottom, plotTop, Boolean(spec.yLog));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="${style.background}"/>`);
  parts.push(`<text x="${width / 2}" y="${style.marginTop - 18}" text-anchor="middle" ` +
    `font-size="${style.fontSize + 3}">${escapeXml(spec.title)}</text>`);

  const xTicks = spec.xLog ? logTicks(xLo, xHi) : niceTicks(xLo, xHi);
  const yTicks = spec.yLog ? logTicks(yLo, yHi) : niceTicks(yLo, yHi);
  for (const t of xTicks) {
    const x = fmt(sx(t));
    parts.push(`<line x1="${x}" y1="${plotTop}" x2="${x}" y2="${plotBottom}" stroke="#dddddd"/>`);
    parts.push(`<text x="${x}" y="${plotBottom + 18}" text-anchor="middle" ` +
      `font-size="${style.fontSize}">${tickLabel(t, Boolean(spec.xLog))}</text>`);
  }
  for (const t of yTicks) {
    const y = fmt(sy(t));
    parts.push(`<line x1="${plotLeft}" y1="${y}" x2="${plotRight}" y2="${y}" stroke="#dddddd"/>`);
    parts.push(`<text x="${plotLeft - 8}" y="${y}" text-anchor="end" dominant-baseline="middle" ` +
      `font-size="${style.fontSize}">${tickLabel(t, Boolean(spec.yLog))}</text>`);
  }
  parts.push(`<rect x="${plotLeft}" y="${plotTop}" width="${plotRight - plotLeft}" ` +
    `height="${plotBottom - plotTop}" fill="none" stroke="#333333"/>`);

  spec.series.forEach((series, idx) => {
    const color = style.colors[idx % style.colors.length];
    const dash = style.dashes[Math.floor(idx / style.colors.length) % style.dashes.length];
    const points: string[] = [];
    for (let i = 0; i < series.x.length; i++) {
      const x = series.x[i];
      const y = series.y[i];
      if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
      if (spec.yLog && y <= 0) continue;
      if (spec.xLog && x <= 0) continue;
      points.push(`${fmt(sx(x))},${fmt(sy(y))}`);
    }
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    parts.push(`<polyline fill="none" stroke="${color}" stroke-width="${style.strokeWidth}"` +
      `${dashAttr} points="${points.join(" ")}"/>`);
  });

  // legend, top-left inside the plot area
  spec.series.forEach((series, idx) => {
    const color = style.colors[idx % style.colors.length];
    const y = plotTop + 16 + idx * (style.fontSize + 5);
    parts.push(`<line x1="${plotLeft + 10}" y1="${y - 4}" x2="${plotLeft + 34}" y2="${y - 4}" ` +
      `stroke="${color}" stroke-width="${style.strokeWidth}"/>`);
    parts.push(`<text x="${plotLeft + 40}" y="${y}" font-size="${style.fontSize}">` +
      `${escapeXml(series.label)}</text>`);
  });

  parts.push(`<text x="${(plotLeft + plotRight) / 2}" y="${height - 14}" text-anchor="middle" ` +
    `font-size="${style.fontSize + 1}">${escapeXml(spec.xLabel)}</text>`);
  parts.push(`<text x="18" y="${(plotTop + plotBottom) / 2}" text-anchor="middle" ` +
    `font-size="${style.fontSize + 1}" transform="rotate(-90 18 ${(plotTop + plotBottom) / 2})">` +
    `${escapeXml(spec.yLabel)}</text>`);
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
