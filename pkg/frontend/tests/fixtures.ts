/** Canned service responses for the test suites. The golden chart entry is a
 * capture of the real service output for (cars, {Cylinders, Horsepower,
 * Origin}, sort) with the inline data trimmed to two rows. */

import type {
  ChartEntry,
  DatasetReport,
  RecommendResponse,
  TaskInfo,
} from "../src/api.js";

export const GOLDEN_CHART: ChartEntry = {
  vegalite: {
    $schema: "https://vega.github.io/schema/vega-lite/v5.json",
    data: {
      values: [
        { Cylinders: 4, Horsepower: 90, Origin: "Europe" },
        { Cylinders: 8, Horsepower: 200, Origin: "USA" },
      ],
    },
    mark: "bar",
    encoding: {
      x: { field: "Cylinders", type: "ordinal", sort: "y" },
      y: { field: "Horsepower", type: "quantitative", aggregate: "sum", stack: "zero" },
      color: { field: "Origin", type: "nominal" },
    },
  },
  cost: 9.0,
  covering_tasks: ["sort"],
  fields: ["Cylinders", "Horsepower", "Origin"],
  task: "sort",
  canonical: "golden-sort-bar",
};

function simpleChart(task: string, field: string, cost: number): ChartEntry {
  return {
    vegalite: {
      $schema: "https://vega.github.io/schema/vega-lite/v5.json",
      data: { values: [{ [field]: 1 }] },
      mark: "bar",
      encoding: { x: { field, type: "nominal" } },
    },
    cost,
    covering_tasks: [task],
    fields: [field],
    task,
    canonical: `${task}-${field}-${cost}`,
  };
}

export const CARS_REPORT: DatasetReport = {
  dataset_id: "ds-0001",
  row_count: 406,
  fields: [
    { name: "Model", type: "nominal", inferred: true, geo_role: null, cardinality: 311, null_count: 0, min: null, max: null },
    { name: "Cylinders", type: "ordinal", inferred: true, geo_role: null, cardinality: 5, null_count: 0, min: null, max: null },
    { name: "Horsepower", type: "quantitative", inferred: true, geo_role: null, cardinality: 94, null_count: 6, min: 46, max: 230 },
    { name: "Origin", type: "nominal", inferred: true, geo_role: null, cardinality: 3, null_count: 0, min: null, max: null },
  ],
};

export const TASKS: TaskInfo[] = [
  {
    name: "sort",
    description: "Order data by a measure",
    marks: ["bar"],
    default_scheme: "reverse_complexity",
    aggregation_allowed: true,
  },
  {
    name: "magnitude",
    description: "Compare absolute sizes",
    marks: ["bar", "point"],
    default_scheme: "complexity",
    aggregation_allowed: true,
  },
];

export const INDIVIDUAL_RESPONSE: RecommendResponse = {
  charts: [GOLDEN_CHART, simpleChart("sort", "Origin", 4), simpleChart("magnitude", "Cylinders", 3)],
  grouped_by_task: {
    sort: [GOLDEN_CHART, simpleChart("sort", "Origin", 4)],
    magnitude: [simpleChart("magnitude", "Cylinders", 3)],
  },
  partial: false,
};

export const COMBINATION_RESPONSE: RecommendResponse = {
  charts: [GOLDEN_CHART],
  grouped_by_task: null,
  partial: false,
  complete: true,
  covered_columns: ["Cylinders", "Horsepower", "Origin"],
};

export interface RecordedCall {
  url: string;
  method: string;
  body: string | null;
}

export interface StubRoute {
  match: (url: string, method: string) => boolean;
  reply: (call: RecordedCall) => { status?: number; body: unknown };
}

/** fetch stand-in: routes requests to canned replies and records every call. */
export function stubFetch(routes: StubRoute[]) {
  const calls: RecordedCall[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string" ? init.body : null;
    const call: RecordedCall = { url, method, body };
    calls.push(call);
    for (const route of routes) {
      if (route.match(url, method)) {
        const { status = 200, body: payload } = route.reply(call);
        return new Response(JSON.stringify(payload), {
          status,
          headers: { "content-type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ detail: `no stub for ${method} ${url}` }), {
      status: 500,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetchFn, calls };
}

/** The standard happy-path service stub used by the browser-flow tests. */
export function serviceStub() {
  return stubFetch([
    {
      match: (url, method) => method === "POST" && url.startsWith("/api/datasets"),
      reply: () => ({ body: CARS_REPORT }),
    },
    {
      match: (url, method) => method === "GET" && url === "/api/tasks",
      reply: () => ({ body: TASKS }),
    },
    {
      match: (url, method) => method === "PATCH" && url.includes("/fields/"),
      reply: () => ({ body: CARS_REPORT }),
    },
    {
      match: (url, method) => method === "POST" && url === "/api/recommend",
      reply: (call) => {
        const request = JSON.parse(call.body ?? "{}") as { mode?: string };
        return {
          body: request.mode === "combination" ? COMBINATION_RESPONSE : INDIVIDUAL_RESPONSE,
        };
      },
    },
  ]);
}
