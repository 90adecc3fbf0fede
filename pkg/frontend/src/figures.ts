/** Map each experiment's rows onto a chart: series grouping and axis flags. */

import { ChartSpec, Series } from "./svg";
import { ExperimentId, Row } from "./schema";

function sortedBy<T>(items: T[], key: (t: T) => number): T[] {
  return [...items].sort((a, b) => key(a) - key(b));
}

/** One series per y-column, shared x-column. */
function columnSeries(rows: Row[], xCol: string, yCols: [string, string][]): Series[] {
  const ordered = sortedBy(rows, (r) => r[xCol] as number);
  return yCols.map(([col, label]) => ({
    label,
    x: ordered.map((r) => r[xCol] as number),
    y: ordered.map((r) => r[col] as number),
  }));
}

/** One series per distinct combination of the group columns. */
function groupedSeries(rows: Row[], xCol: string, yCol: string, groupCols: string[]): Series[] {
  const groups = new Map<string, Row[]>();
  for (const row of rows) {
    const key = groupCols.map((c) => String(row[c])).join(" / ");
    const bucket = groups.get(key);
    if (bucket) bucket.push(row);
    else groups.set(key, [row]);
  }
  return [...groups.entries()].map(([label, members]) => {
    const ordered = sortedBy(members, (r) => r[xCol] as number);
    return {
      label,
      x: ordered.map((r) => r[xCol] as number),
      y: ordered.map((r) => r[yCol] as number),
    };
  });
}

export function buildChart(experiment: ExperimentId, rows: Row[]): ChartSpec {
  switch (experiment) {
    case "fig2":
      return {
        title: "Channel gain vs user-receiver distance",
        xLabel: "distance [m]",
        yLabel: "gain [dB]",
        series: columnSeries(rows, "distance_m", [
          ["gain_classical_db", "classical two-ray"],
          ["gain_direct_db", "direct branch"],
          ["gain_plus_db", "+shift branch"],
          ["gain_minus_db", "-shift branch"],
        ]),
      };
    case "fig3":
      return {
        title: "Channel estimation NMSE vs transmit power",
        xLabel: "transmit power [dB]",
        yLabel: "NMSE",
        yLog: true,
        series: groupedSeries(rows, "p_db", "nmse", ["model", "estimator", "branch"]),
      };
    case "fig4a":
      return {
        title: "Branch correlation conditioning vs spacing ratio",
        xLabel: "spacing / coherence spacing",
        yLabel: "condition number [dB]",
        series: groupedSeries(rows, "i", "cond_db", ["model", "sv"]),
      };
    case "fig4b":
      return {
        title: "Achievable rate vs transmit power",
        xLabel: "transmit power [dB]",
        yLabel: "rate [bits/use]",
        series: columnSeries(rows, "p_db", [
          ["rate_mc", "Monte-Carlo rate"],
          ["rate_bound", "upper bound"],
          ["rate_mimo", "plain array"],
        ]),
      };
  }
}
