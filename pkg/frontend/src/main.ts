/** Wires the page together: county picker -> sliders -> debounced scenario
 * requests -> rendered result, plus the sweep chart with historical overlay.
 * Exported as a mount function so tests can drive it against recorded
 * response bodies. */

import { ApiClient, ApiError } from "./api.js";
import type { CountyEntry, ModelResponse } from "./api.js";
import { buildChartData, renderSweepChart } from "./chart.js";
import { debounce } from "./debounce.js";
import {
  applyResponse,
  buildRequest,
  clampToSlider,
  initialState,
  nextSeq,
  requestFailed,
  selectCounty,
  sliderSpecs,
} from "./state.js";
import {
  renderBanner,
  renderCountyOptions,
  renderFieldError,
  renderResult,
  renderSliders,
} from "./render.js";

export interface MountOptions {
  debounceMs?: number;
  sweepPoints?: number;
}

export interface AppHandles {
  /** resolves when counties + model metadata have loaded */
  ready: Promise<void>;
  reload(): Promise<void>;
}

export function mountApp(
  root: HTMLElement,
  api: ApiClient,
  options: MountOptions = {},
): AppHandles {
  const debounceMs = options.debounceMs ?? 250;
  const sweepPoints = options.sweepPoints ?? 21;

  root.innerHTML = `
    <div class="banner" data-role="banner" hidden></div>
    <div class="controls">
      <select data-role="county"></select>
      <button data-role="retry" hidden>retry</button>
      <div class="sliders" data-role="sliders"></div>
    </div>
    <div class="result" data-role="result"></div>
    <svg data-role="chart" class="chart"></svg>
  `;
  const banner = root.querySelector<HTMLElement>("[data-role=banner]")!;
  const select = root.querySelector<HTMLSelectElement>("[data-role=county]")!;
  const retry = root.querySelector<HTMLButtonElement>("[data-role=retry]")!;
  const slidersEl = root.querySelector<HTMLElement>("[data-role=sliders]")!;
  const resultEl = root.querySelector<HTMLElement>("[data-role=result]")!;
  const chartEl = root.querySelector<SVGSVGElement>("[data-role=chart]")!;

  const state = initialState();
  let model: ModelResponse | null = null;
  let counties: CountyEntry[] = [];

  async function submitScenario(): Promise<void> {
    if (state.county === null) return;
    const seq = nextSeq(state);
    try {
      const result = await api.scenario(buildRequest(state));
      if (applyResponse(state, seq, result)) {
        renderResult(resultEl, result);
        renderFieldError(slidersEl, null);
        renderBanner(banner, null);
      }
    } catch (err) {
      requestFailed(state, seq);
      if (err instanceof ApiError && err.isClientError) {
        renderFieldError(slidersEl, `${err.code}: ${err.message}`);
      } else {
        renderBanner(banner, err instanceof Error ? err.message : String(err));
      }
    }
  }

  const submitDebounced = debounce(() => {
    void submitScenario();
  }, debounceMs);

  async function refreshChart(): Promise<void> {
    if (state.county === null || state.baseYear === null || model === null) return;
    const covariate = "total_afv";
    const baseline = state.baselines[covariate] ?? 0;
    const values = Array.from({ length: sweepPoints }, (_, k) =>
      Number(((2 * baseline * k) / (sweepPoints - 1 || 1)).toFixed(6)),
    );
    try {
      const [sweep, history] = await Promise.all([
        api.sweep(state.county, state.baseYear, covariate, values),
        api.history(state.county),
      ]);
      renderSweepChart(chartEl, buildChartData(sweep, history));
    } catch {
      renderSweepChart(chartEl, null);
    }
  }

  function onCountyChosen(name: string): void {
    const entry = counties.find((c) => c.county === name);
    if (entry === undefined || model === null) return;
    selectCounty(state, model, entry);
    const specs = sliderSpecs(model, entry);
    renderSliders(slidersEl, specs, (covariate, raw) => {
      const spec = specs.find((s) => s.name === covariate)!;
      state.sliders[covariate] = clampToSlider(spec, raw);
      submitDebounced();
    });
    void submitScenario(); // baseline render, no debounce on selection
    void refreshChart();
  }

  select.addEventListener("change", () => onCountyChosen(select.value));
  retry.addEventListener("click", () => {
    void load();
  });

  async function load(): Promise<void> {
    try {
      const [countiesBody, modelBody] = await Promise.all([
        api.counties(),
        api.model(),
      ]);
      counties = countiesBody.counties;
      model = modelBody;
      renderCountyOptions(select, counties);
      renderBanner(banner, null);
      retry.hidden = true;
    } catch (err) {
      renderBanner(
        banner,
        `failed to reach the prediction service: ${err instanceof Error ? err.message : err}`,
      );
      retry.hidden = false;
      throw err;
    }
  }

  const ready = load();
  return { ready, reload: load };
}

declare global {
  interface Window {
    __aqilens_mounted?: boolean;
  }
}

// browser entry point; tests import mountApp directly instead
if (typeof document !== "undefined" && document.getElementById("app") !== null
    && window.__aqilens_mounted !== true) {
  window.__aqilens_mounted = true;
  mountApp(document.getElementById("app")!, new ApiClient("")).ready.catch(() => {
    // the banner already shows the failure; keep the console clean
  });
}
