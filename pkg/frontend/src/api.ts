import type {
  AnalyzeConfig,
  AnalyzeReport,
  ApiErrorBody,
  CalibrateConfig,
  CalibrateResult,
  CurveConfig,
  CurveResult,
  JobRecord,
  SimulateConfig,
  SimulateResult,
} from "./types.js";

// Thin client over the service's /v1 routes. Every function resolves with
// the parsed payload exactly as the server sent it, or rejects with
// ApiError carrying the server's {code, message, field_path} body.

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly fieldPath: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface ApiClientOptions {
  baseUrl?: string;
  fetchImpl?: FetchLike;
}

async function parseError(status: number, response: Response): Promise<ApiError> {
  let body: Partial<ApiErrorBody> = {};
  try {
    body = (await response.json()) as Partial<ApiErrorBody>;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(
    status,
    body.code ?? "http_error",
    body.field_path ?? "",
    body.message ?? `request failed with status ${status}`,
  );
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(options: ApiClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.fetchImpl = options.fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      throw await parseError(response.status, response);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; software_version: string }> {
    return this.request("GET", "/v1/health");
  }

  analyze(config: AnalyzeConfig): Promise<AnalyzeReport> {
    return this.request("POST", "/v1/analyze", config);
  }

  // Small curve requests come back synchronously; large ones as a job
  // record. The caller distinguishes by the presence of curve data.
  weightCurve(config: CurveConfig): Promise<CurveResult | JobRecord> {
    return this.request("POST", "/v1/weight-curve", config);
  }

  calibrate(config: CalibrateConfig): Promise<JobRecord> {
    return this.request("POST", "/v1/calibrate", config);
  }

  simulate(config: SimulateConfig): Promise<JobRecord> {
    return this.request("POST", "/v1/simulate", config);
  }

  job(id: string): Promise<JobRecord> {
    return this.request("GET", `/v1/jobs/${encodeURIComponent(id)}`);
  }

  jobResult<T = SimulateResult | CalibrateResult | CurveResult>(id: string): Promise<T> {
    return this.request("GET", `/v1/jobs/${encodeURIComponent(id)}/result`);
  }
}

export function isJobRecord(payload: CurveResult | JobRecord): payload is JobRecord {
  return "status" in payload && "id" in payload && !("theta" in payload);
}
