/** DOM rendering. Every displayed figure is formatted straight from a
 * service response body; nothing is recomputed client-side. */

import type { CountyEntry, ScenarioResult } from "./api.js";
import type { SliderSpec } from "./state.js";
import { formatDelta, formatScore } from "./state.js";

export function renderCountyOptions(
  select: HTMLSelectElement,
  counties: CountyEntry[],
): void {
  select.innerHTML = "";
  const placeholder = document.createElement("option");
  placeholder.value = "";
  placeholder.textContent = "Select a county";
  placeholder.disabled = true;
  placeholder.selected = true;
  select.appendChild(placeholder);
  for (const entry of counties) {
    const option = document.createElement("option");
    option.value = entry.county;
    option.textContent = `${entry.county} (${entry.latest_year})`;
    select.appendChild(option);
  }
}

export function renderSliders(
  container: HTMLElement,
  specs: SliderSpec[],
  onInput: (name: string, value: number) => void,
): void {
  container.innerHTML = "";
  for (const spec of specs) {
    const row = document.createElement("div");
    row.className = "slider-row";

    const label = document.createElement("label");
    label.textContent = spec.name;
    label.htmlFor = `slider-${spec.name}`;

    const input = document.createElement("input");
    input.type = "range";
    input.id = `slider-${spec.name}`;
    input.min = String(spec.min);
    input.max = String(spec.max);
    input.step = String(spec.step);
    input.value = String(spec.baseline);

    const value = document.createElement("span");
    value.className = "slider-value";
    value.dataset.covariate = spec.name;
    value.textContent = displayCovariate(spec.baseline);

    input.addEventListener("input", () => {
      const v = Number(input.value);
      value.textContent = displayCovariate(v);
      onInput(spec.name, v);
    });

    row.append(label, input, value);
    container.appendChild(row);
  }
}

function displayCovariate(value: number): string {
  return Math.abs(value) >= 100 ? Math.round(value).toLocaleString("en-US")
    : value.toPrecision(3);
}

export function renderResult(container: HTMLElement, result: ScenarioResult): void {
  const deltaClass =
    result.delta > 0 ? "delta-positive" : result.delta < 0 ? "delta-negative" : "delta-zero";
  const badge = result.extrapolation_flag
    ? `<span class="badge badge-extrapolation" title="covariates outside the training range: ${result.extrapolated_covariates.join(", ")}">extrapolating</span>`
    : "";
  container.innerHTML = `
    <div class="result-scores">
      <div class="score-card">
        <div class="score-label">baseline</div>
        <div class="score-value" data-role="baseline">${formatScore(result.baseline_aqi)}</div>
      </div>
      <div class="score-card">
        <div class="score-label">scenario ${badge}</div>
        <div class="score-value" data-role="scenario">${formatScore(result.scenario_aqi)}</div>
      </div>
      <div class="score-card">
        <div class="score-label">delta</div>
        <div class="score-value ${deltaClass}" data-role="delta">${formatDelta(result.delta)}</div>
      </div>
    </div>
    <p class="disclaimer">${result.disclaimer}</p>
  `;
}

export function renderBanner(banner: HTMLElement, message: string | null): void {
  if (message === null) {
    banner.hidden = true;
    banner.textContent = "";
    return;
  }
  banner.hidden = false;
  banner.textContent = message;
}

export function renderFieldError(container: HTMLElement, message: string | null): void {
  let el = container.querySelector<HTMLElement>(".field-error");
  if (el === null) {
    el = document.createElement("div");
    el.className = "field-error";
    container.appendChild(el);
  }
  if (message === null) {
    el.hidden = true;
    el.textContent = "";
  } else {
    el.hidden = false;
    el.textContent = message;
  }
}
