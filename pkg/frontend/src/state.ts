/** Application state and the pure view logic around it.
 *
 * Individual-mode requests always ask the service for the per-task grouping,
 * so switching between the flat list and the by-task view is a pure re-render
 * of cached data: no second network round trip.
 */

import type {
  ChartEntry,
  DatasetReport,
  Mode,
  RecommendRequest,
  RecommendResponse,
  Scheme,
  TaskInfo,
} from "./api.js";

export interface AppState {
  dataset: DatasetReport | null;
  tasks: TaskInfo[];
  selectedColumns: string[];
  selectedTasks: string[];
  mode: Mode;
  scheme: Scheme;
  maxCharts: number;
  displayByTask: boolean;
  result: RecommendResponse | null;
  busy: boolean;
  error: string | null;
}

export interface ChartGroup {
  title: string;
  charts: ChartEntry[];
}

export function initialState(): AppState {
  return {
    dataset: null,
    tasks: [],
    selectedColumns: [],
    selectedTasks: [],
    mode: "individual",
    scheme: "default",
    maxCharts: 8,
    displayByTask: false,
    result: null,
    busy: false,
    error: null,
  };
}

export function toggleItem(items: string[], value: string): string[] {
  return items.includes(value) ? items.filter((v) => v !== value) : [...items, value];
}

/** The request an eventual "recommend" click sends. */
export function buildRequest(state: AppState): RecommendRequest {
  if (!state.dataset) throw new Error("no dataset uploaded");
  const request: RecommendRequest = {
    dataset_id: state.dataset.dataset_id,
    columns: state.selectedColumns,
    tasks: state.selectedTasks,
    mode: state.mode,
    scheme: state.scheme,
    max_charts: state.maxCharts,
  };
  // grouping is free to compute server-side; asking for it up front makes
  // the display toggle purely client-side
  if (state.mode === "individual") request.display_by_task = true;
  return request;
}

/** What the chart area shows for the current state, from cached data only. */
export function visibleGroups(state: AppState): ChartGroup[] {
  const result = state.result;
  if (!result) return [];
  if (state.mode === "combination") {
    return [{ title: "combination", charts: result.charts }];
  }
  if (state.displayByTask && result.grouped_by_task) {
    return Object.entries(result.grouped_by_task).map(([task, charts]) => ({
      title: task,
      charts,
    }));
  }
  return [{ title: "recommended", charts: result.charts }];
}

export interface Coverage {
  covered: string[];
  missing: string[];
  complete: boolean;
}

export function combinationCoverage(result: RecommendResponse, columns: string[]): Coverage {
  const covered = new Set<string>();
  for (const chart of result.charts) {
    for (const field of chart.fields) covered.add(field);
  }
  const wanted = columns.length > 0 ? columns : [...covered];
  const missing = wanted.filter((c) => !covered.has(c));
  return {
    covered: [...covered].sort(),
    missing,
    complete: result.complete ?? missing.length === 0,
  };
}

type Listener = (state: AppState) => void;

export class Store {
  private state: AppState = initialState();
  private listeners: Listener[] = [];

  get(): AppState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<AppState>): AppState {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
    return this.state;
  }
}
