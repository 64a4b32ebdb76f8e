/** Typed client for the taskvis HTTP API. All UI traffic goes through here. */

export type FieldType = "nominal" | "ordinal" | "quantitative" | "temporal";
export type GeoRole = "latitude" | "longitude" | "region";
export type Scheme =
  | "default"
  | "complexity"
  | "reverse_complexity"
  | "interest"
  | "task_coverage";
export type Mode = "individual" | "combination";

export interface FieldReport {
  name: string;
  type: FieldType;
  inferred: boolean;
  geo_role: GeoRole | null;
  cardinality: number;
  null_count: number;
  min: number | string | null;
  max: number | string | null;
}

export interface DatasetReport {
  dataset_id: string;
  row_count: number;
  fields: FieldReport[];
}

export interface TaskInfo {
  name: string;
  description: string;
  marks: string[];
  default_scheme: Scheme;
  aggregation_allowed: boolean;
}

export interface ChartEntry {
  vegalite: Record<string, unknown>;
  cost: number;
  covering_tasks: string[];
  fields: string[];
  task: string;
  canonical: string;
}

export interface RecommendResponse {
  charts: ChartEntry[];
  grouped_by_task: Record<string, ChartEntry[]> | null;
  partial: boolean;
  complete?: boolean;
  covered_columns?: string[];
}

export interface FilterSpec {
  field: string;
  op: string;
  value: unknown;
}

export interface RecommendRequest {
  dataset_id: string;
  columns?: string[];
  tasks?: string[];
  mode?: Mode;
  scheme?: Scheme;
  max_charts?: number;
  display_by_task?: boolean;
  filters?: FilterSpec[];
}

export interface FieldPatch {
  type?: FieldType;
  geo_role?: GeoRole | null;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function fail(response: Response): Promise<never> {
  let detail = response.statusText || `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class Client {
  private readonly fetchFn: FetchLike;

  constructor(readonly baseUrl: string = "", fetchFn?: FetchLike) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) await fail(response);
    return (await response.json()) as T;
  }

  uploadDataset(body: string | Blob, format?: "csv" | "json"): Promise<DatasetReport> {
    const query = format ? `?format=${format}` : "";
    return this.json<DatasetReport>(`/api/datasets${query}`, {
      method: "POST",
      body,
    });
  }

  getDataset(datasetId: string): Promise<DatasetReport> {
    return this.json<DatasetReport>(`/api/datasets/${encodeURIComponent(datasetId)}`);
  }

  patchField(datasetId: string, field: string, patch: FieldPatch): Promise<DatasetReport> {
    const path = `/api/datasets/${encodeURIComponent(datasetId)}/fields/${encodeURIComponent(field)}`;
    return this.json<DatasetReport>(path, {
      method: "PATCH",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(patch),
    });
  }

  listTasks(): Promise<TaskInfo[]> {
    return this.json<TaskInfo[]>("/api/tasks");
  }

  recommend(request: RecommendRequest): Promise<RecommendResponse> {
    return this.json<RecommendResponse>("/api/recommend", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
  }

  mapUrl(): string {
    return `${this.baseUrl}/api/maps/us-states.json`;
  }
}
