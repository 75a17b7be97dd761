/** Scenario explorer state: slider specifications derived from the model's
 * training ranges, request construction, and last-write-wins bookkeeping for
 * in-flight responses. */

import type {
  CountyEntry,
  ModelResponse,
  ScenarioRequest,
  ScenarioResult,
} from "./api.js";

/** Sliders span 0 to 3x the covariate's training maximum; the model's
 * validity envelope (above 1x) is shown via the extrapolation badge. */
export const SLIDER_RANGE_FACTOR = 3;

export interface SliderSpec {
  name: string;
  min: number;
  max: number;
  step: number;
  baseline: number;
}

export interface UiScenarioState {
  county: string | null;
  baseYear: number | null;
  sliders: Record<string, number>;
  baselines: Record<string, number>;
  latest: ScenarioResult | null;
  requestInFlight: boolean;
  /** sequence number of the last request sent */
  lastSeq: number;
  /** sequence number of the last response applied */
  appliedSeq: number;
}

export function initialState(): UiScenarioState {
  return {
    county: null,
    baseYear: null,
    sliders: {},
    baselines: {},
    latest: null,
    requestInFlight: false,
    lastSeq: 0,
    appliedSeq: 0,
  };
}

export function sliderSpecs(
  model: ModelResponse,
  county: CountyEntry,
): SliderSpec[] {
  return model.features.map((feature) => {
    const baseline = county.covariates[feature.name] ?? 0;
    const trainMax = feature.train_max ?? baseline;
    const max = SLIDER_RANGE_FACTOR * Math.max(trainMax, baseline, 1e-9);
    return {
      name: feature.name,
      min: 0,
      max,
      step: max / 300,
      baseline,
    };
  });
}

export function clampToSlider(spec: SliderSpec, value: number): number {
  return Math.min(spec.max, Math.max(spec.min, value));
}

export function selectCounty(
  state: UiScenarioState,
  model: ModelResponse,
  county: CountyEntry,
): void {
  state.county = county.county;
  state.baseYear = county.latest_year;
  state.baselines = {};
  state.sliders = {};
  for (const spec of sliderSpecs(model, county)) {
    state.baselines[spec.name] = spec.baseline;
    state.sliders[spec.name] = spec.baseline;
  }
  state.latest = null;
}

/** Overrides carry only covariates moved off their baselines, as absolute
 * values (the service applies them before standardization). */
export function buildRequest(state: UiScenarioState): ScenarioRequest {
  if (state.county === null || state.baseYear === null) {
    throw new Error("no county selected");
  }
  const overrides: ScenarioRequest["overrides"] = {};
  for (const [name, value] of Object.entries(state.sliders)) {
    if (value !== state.baselines[name]) {
      overrides[name] = { value };
    }
  }
  return { county: state.county, base_year: state.baseYear, overrides };
}

export function nextSeq(state: UiScenarioState): number {
  state.lastSeq += 1;
  state.requestInFlight = true;
  return state.lastSeq;
}

/** Apply a response only if nothing newer was already applied (stale
 * responses from an abandoned burst lose). */
export function applyResponse(
  state: UiScenarioState,
  seq: number,
  result: ScenarioResult,
): boolean {
  if (seq <= state.appliedSeq) return false;
  state.appliedSeq = seq;
  state.latest = result;
  if (seq === state.lastSeq) state.requestInFlight = false;
  return true;
}

export function requestFailed(state: UiScenarioState, seq: number): void {
  if (seq === state.lastSeq) state.requestInFlight = false;
}

export function formatScore(value: number): string {
  return value.toFixed(3);
}

export function formatDelta(value: number): string {
  const text = value.toFixed(3);
  return value > 0 ? `+${text}` : text;
}
