/**
 * echarts option builders for the five figure kinds.
 *
 * Sweep kinds (ratio, atoms, temperature, distance) draw the with-control
 * and without-control steady populations with error bars; distance figures
 * can overlay a vertical marker at the analytic dip position and ratio /
 * atoms figures an ideal blockaded-ensemble curve.  Dynamics figures draw
 * the time-resolved populations of a single run.
 */
import type { EChartsCoreOption } from "echarts";
import { DynamicsRow, SweepRow } from "./schema.js";

export const FIGURE_KINDS = ["ratio", "atoms", "temperature", "distance", "dynamics"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureRequest {
  kind: FigureKind;
  /** parsed rows per input CSV, in command-line order */
  sweeps?: SweepRow[][];
  dynamics?: DynamicsRow[][];
  /** vertical marker (um) for distance figures */
  dipMarker?: number;
  /** overlay N * r^2 / (N r^2 + 1) on ratio figures (r = x axis) */
  superatomN?: number;
  title?: string;
}

const AXIS_TITLES: Record<FigureKind, [string, string]> = {
  ratio: ["probe/coupling ratio", "steady Rydberg population"],
  atoms: ["ensemble atom number N", "steady Rydberg population"],
  temperature: ["temperature (uK)", "steady Rydberg population"],
  distance: ["control distance r0 (um)", "steady Rydberg population"],
  dynamics: ["time (us)", "population"],
};

const WITH_COLOR = "#111111";
const WITHOUT_COLOR = "#c23531";

function errorBarSeries(name: string, rows: Array<[number, number, number]>, color: string) {
  // rows: [x, y, err]; rendered as vertical segments with caps
  return {
    name: `${name} stderr`,
    type: "custom" as const,
    renderItem: (_params: unknown, api: any) => {
      const x = api.value(0);
      const lo = api.coord([x, api.value(1) - api.value(2)]);
      const hi = api.coord([x, api.value(1) + api.value(2)]);
      const cap = 4;
      const style = { stroke: color, fill: null as null, lineWidth: 1 };
      return {
        type: "group",
        children: [
          { type: "line", shape: { x1: hi[0], y1: hi[1], x2: lo[0], y2: lo[1] }, style },
          { type: "line", shape: { x1: hi[0] - cap, y1: hi[1], x2: hi[0] + cap, y2: hi[1] }, style },
          { type: "line", shape: { x1: lo[0] - cap, y1: lo[1], x2: lo[0] + cap, y2: lo[1] }, style },
        ],
      };
    },
    data: rows,
    z: 5,
    silent: true,
  };
}

function finiteCurve(rows: SweepRow[], pick: (r: SweepRow) => [number, number, number]) {
  return rows.map(pick).filter(([, y]) => Number.isFinite(y));
}

function sweepOption(request: FigureRequest): EChartsCoreOption {
  const rows = (request.sweeps ?? []).flat();
  const [xTitle, yTitle] = AXIS_TITLES[request.kind];
  const withData = finiteCurve(rows, (r) => [r.param, r.frWith, r.frWithErr]);
  const withoutData = finiteCurve(rows, (r) => [r.param, r.frWithout, r.frWithoutErr]);

  const series: any[] = [];
  if (withData.length > 0) {
    series.push({
      name: "with control",
      type: "line",
      symbol: "rect",
      symbolSize: 7,
      itemStyle: { color: WITH_COLOR },
      lineStyle: { color: WITH_COLOR },
      data: withData.map(([x, y]) => [x, y]),
    });
    series.push(errorBarSeries("with control", withData, WITH_COLOR));
  }
  if (withoutData.length > 0) {
    series.push({
      name: "without control",
      type: "line",
      symbol: "circle",
      symbolSize: 7,
      itemStyle: { color: WITHOUT_COLOR },
      lineStyle: { color: WITHOUT_COLOR, type: "dashed" },
      data: withoutData.map(([x, y]) => [x, y]),
    });
    series.push(errorBarSeries("without control", withoutData, WITHOUT_COLOR));
  }

  if (request.kind === "ratio" && request.superatomN !== undefined) {
    const n = request.superatomN;
    const xs = rows.map((r) => r.param);
    const lo = Math.min(...xs);
    const hi = Math.max(...xs);
    const overlay: Array<[number, number]> = [];
    for (let i = 0; i <= 100; i++) {
      const x = lo + ((hi - lo) * i) / 100;
      overlay.push([x, (n * x * x) / (n * x * x + 1)]);
    }
    series.push({
      name: `blockaded-ensemble ideal (N=${n})`,
      type: "line",
      showSymbol: false,
      lineStyle: { color: "#888888", type: "dotted" },
      itemStyle: { color: "#888888" },
      data: overlay,
    });
  }

  if (request.kind === "distance" && request.dipMarker !== undefined) {
    series.push({
      name: "analytic dip",
      type: "line",
      data: [],
      markLine: {
        symbol: "none",
        silent: true,
        lineStyle: { color: "#2f6fb4", type: "dashed", width: 1.5 },
        label: { formatter: `r_dip = ${request.dipMarker.toFixed(2)} um`, position: "end" },
        data: [{ xAxis: request.dipMarker }],
      },
    });
  }

  return {
    animation: false,
    title: { text: request.title ?? `steady Rydberg population vs ${xTitle}`, left: "center" },
    legend: { bottom: 0 },
    grid: { left: 60, right: 30, top: 50, bottom: 60 },
    xAxis: { type: "value", name: xTitle, nameLocation: "middle", nameGap: 28, min: "dataMin", max: "dataMax" },
    yAxis: { type: "value", name: yTitle, min: 0, max: 1 },
    series,
  };
}

function dynamicsOption(request: FigureRequest): EChartsCoreOption {
  const rows = (request.dynamics ?? []).flat();
  const [xTitle, yTitle] = AXIS_TITLES.dynamics;
  const curves: Array<[string, (r: DynamicsRow) => number, string, string]> = [
    ["P_gc", (r) => r.pGc, "#111111", "solid"],
    ["P_rc", (r) => r.pRc, "#c23531", "dashed"],
    ["P_gc + P_rc", (r) => r.pGc + r.pRc, "#2f6fb4", "solid"],
    ["P_gcG", (r) => r.pGcG, "#3a9d5d", "dotted"],
  ];
  return {
    animation: false,
    title: { text: request.title ?? "population dynamics", left: "center" },
    legend: { bottom: 0 },
    grid: { left: 60, right: 30, top: 50, bottom: 60 },
    xAxis: { type: "value", name: xTitle, nameLocation: "middle", nameGap: 28, min: "dataMin", max: "dataMax" },
    yAxis: { type: "value", name: yTitle, min: 0, max: 1 },
    series: curves.map(([name, pick, color, style]) => ({
      name,
      type: "line",
      showSymbol: false,
      lineStyle: { color, type: style },
      itemStyle: { color },
      data: rows.map((r) => [r.time, pick(r)]),
    })),
  };
}

export function buildOption(request: FigureRequest): EChartsCoreOption {
  if (request.kind === "dynamics") {
    if (!request.dynamics || request.dynamics.length === 0) {
      throw new Error("dynamics figures need at least one dynamics CSV");
    }
    return dynamicsOption(request);
  }
  if (!request.sweeps || request.sweeps.length === 0) {
    throw new Error(`${request.kind} figures need at least one sweep CSV`);
  }
  return sweepOption(request);
}
