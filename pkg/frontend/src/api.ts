/** Typed client for the prediction service. Every number shown in the UI
 * comes from these response bodies; the client never computes scores. */

export interface CountyEntry {
  county: string;
  latest_year: number;
  covariates: Record<string, number>;
  aqi_score: number | null;
}

export interface CountiesResponse {
  counties: CountyEntry[];
}

export interface FeatureInfo {
  name: string;
  weight: number;
  mean: number | null;
  std: number | null;
  train_min: number | null;
  train_max: number | null;
}

export interface ModelResponse {
  schema_version: number;
  fingerprint: string;
  kind: string;
  fitted_by: string;
  include_bias: boolean;
  bias: number | null;
  features: FeatureInfo[];
  metrics: Record<string, number | null> | null;
  aqi: {
    orientation: number;
    score_min: number;
    score_max: number;
    explained_variance: number[];
  } | null;
}

export interface OverridePayload {
  value?: number;
  multiply?: number;
}

export interface ScenarioRequest {
  county: string;
  base_year: number;
  overrides: Record<string, OverridePayload>;
  model_id?: string | null;
}

export interface ScenarioResult {
  county: string;
  base_year: number;
  baseline_covariates: Record<string, number>;
  scenario_covariates: Record<string, number>;
  baseline_aqi: number;
  scenario_aqi: number;
  delta: number;
  extrapolation_flag: boolean;
  extrapolated_covariates: string[];
  disclaimer: string;
  model_fingerprint: string | null;
}

export interface SweepResponse {
  covariate: string;
  values: number[];
  results: ScenarioResult[];
}

export interface HistoryRow {
  year: number;
  aqi_score: number | null;
  total_afv: number;
}

export interface HistoryResponse {
  county: string;
  rows: HistoryRow[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }

  /** 4xx errors render inline next to the controls; 5xx hit the banner. */
  get isClientError(): boolean {
    return this.status >= 400 && this.status < 500;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "service.error";
  let message = `request failed with status ${response.status}`;
  try {
    const body = await response.json();
    if (body?.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  counties(): Promise<CountiesResponse> {
    return this.get("/api/counties");
  }

  model(): Promise<ModelResponse> {
    return this.get("/api/model");
  }

  history(county: string): Promise<HistoryResponse> {
    return this.get(`/api/counties/${encodeURIComponent(county)}/history`);
  }

  scenario(request: ScenarioRequest): Promise<ScenarioResult> {
    return this.post("/api/scenario", request);
  }

  sweep(
    county: string,
    baseYear: number,
    covariate: string,
    values: number[],
  ): Promise<SweepResponse> {
    return this.post("/api/sweep", {
      county,
      base_year: baseYear,
      covariate,
      values,
    });
  }
}
