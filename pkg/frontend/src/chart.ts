/** Sweep chart: predicted score across a covariate grid as an SVG polyline,
 * with the county's historical actual scores overlaid as dots. Data
 * preparation is separated from drawing so tests can assert on the numbers
 * (which all come from service responses) rather than pixels. */

import type { HistoryResponse, SweepResponse } from "./api.js";

export interface ChartPoint {
  x: number;
  y: number;
}

export interface ChartData {
  covariate: string;
  line: ChartPoint[];
  dots: ChartPoint[];
}

export function buildChartData(
  sweep: SweepResponse,
  history: HistoryResponse | null,
): ChartData {
  const line = sweep.values.map((x, i) => ({
    x,
    y: sweep.results[i]!.scenario_aqi,
  }));
  // historical actuals overlay only when the swept covariate is one the
  // history rows carry (the adoption count)
  const dots: ChartPoint[] = [];
  if (history !== null && sweep.covariate === "total_afv") {
    for (const row of history.rows) {
      if (row.aqi_score !== null) {
        dots.push({ x: row.total_afv, y: row.aqi_score });
      }
    }
  }
  return { covariate: sweep.covariate, line, dots };
}

const WIDTH = 640;
const HEIGHT = 320;
const PAD = 36;

function scales(data: ChartData) {
  const xs = [...data.line.map((p) => p.x), ...data.dots.map((p) => p.x)];
  const ys = [...data.line.map((p) => p.y), ...data.dots.map((p) => p.y)];
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);
  const xSpan = xMax - xMin || 1;
  const ySpan = yMax - yMin || 1;
  return {
    sx: (x: number) => PAD + ((x - xMin) / xSpan) * (WIDTH - 2 * PAD),
    sy: (y: number) => HEIGHT - PAD - ((y - yMin) / ySpan) * (HEIGHT - 2 * PAD),
  };
}

export function renderSweepChart(svg: SVGSVGElement, data: ChartData | null): void {
  svg.innerHTML = "";
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  if (data === null || data.line.length === 0) {
    const text = document.createElementNS("http://www.w3.org/2000/svg", "text");
    text.setAttribute("x", String(WIDTH / 2));
    text.setAttribute("y", String(HEIGHT / 2));
    text.setAttribute("class", "chart-placeholder");
    text.setAttribute("text-anchor", "middle");
    text.textContent = "no sweep data";
    svg.appendChild(text);
    return;
  }
  const { sx, sy } = scales(data);
  if (data.line.length > 1) {
    const polyline = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
    polyline.setAttribute(
      "points",
      data.line.map((p) => `${sx(p.x)},${sy(p.y)}`).join(" "),
    );
    polyline.setAttribute("class", "chart-line");
    svg.appendChild(polyline);
  }
  // a single-point grid renders as one marker, no line
  for (const p of data.line.length === 1 ? data.line : []) {
    svg.appendChild(marker(sx(p.x), sy(p.y), "chart-single-point"));
  }
  for (const p of data.dots) {
    svg.appendChild(marker(sx(p.x), sy(p.y), "chart-history-dot"));
  }
}

function marker(cx: number, cy: number, cls: string): SVGCircleElement {
  const circle = document.createElementNS("http://www.w3.org/2000/svg", "circle");
  circle.setAttribute("cx", String(cx));
  circle.setAttribute("cy", String(cy));
  circle.setAttribute("r", "4");
  circle.setAttribute("class", cls);
  return circle;
}
