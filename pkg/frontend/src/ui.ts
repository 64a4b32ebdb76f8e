/** DOM assembly and event wiring: one store, one client, one render loop. */

import {
  ApiError,
  Client,
  type FieldType,
  type GeoRole,
  type Mode,
  type Scheme,
} from "./api.js";
import { type EmbedFn, renderGroups, resolveEmbed } from "./render.js";
import { Store, buildRequest, combinationCoverage, toggleItem, visibleGroups } from "./state.js";

const FIELD_TYPES: FieldType[] = ["nominal", "ordinal", "quantitative", "temporal"];
const GEO_ROLES: (GeoRole | "none")[] = ["none", "latitude", "longitude", "region"];
const SCHEMES: Scheme[] = [
  "default",
  "complexity",
  "reverse_complexity",
  "interest",
  "task_coverage",
];

export interface AppActions {
  upload(body: string | Blob, format?: "csv" | "json"): Promise<void>;
  setFieldType(field: string, type: FieldType): Promise<void>;
  setGeoRole(field: string, role: GeoRole | null): Promise<void>;
  recommend(): Promise<void>;
}

export interface AppHandles {
  store: Store;
  actions: AppActions;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.status}: ${error.message}`;
  return String(error instanceof Error ? error.message : error);
}

export function buildApp(root: HTMLElement, client: Client, embed?: EmbedFn): AppHandles {
  const store = new Store();
  const draw = embed ?? resolveEmbed();

  root.replaceChildren();
  root.className = "app";

  // --- data upload -------------------------------------------------------
  const uploadPanel = el("section", { class: "panel", id: "upload-panel" });
  uploadPanel.appendChild(el("h2", {}, "data"));
  const fileInput = el("input", { type: "file", id: "file-input" });
  const pasteInput = el("textarea", {
    id: "paste-input",
    placeholder: "or paste CSV / JSON records here",
    rows: "5",
  });
  const uploadButton = el("button", { id: "upload-btn" }, "upload");
  const summary = el("p", { id: "dataset-summary" });
  uploadPanel.append(fileInput, pasteInput, uploadButton, summary);

  // --- fields ------------------------------------------------------------
  const fieldsPanel = el("section", { class: "panel", id: "fields-panel" });
  fieldsPanel.appendChild(el("h2", {}, "fields"));
  const fieldsTable = el("table", { id: "fields-table" });
  fieldsPanel.appendChild(fieldsTable);

  // --- column / task selection -------------------------------------------
  const columnsPanel = el("section", { class: "panel", id: "columns-panel" });
  columnsPanel.appendChild(el("h2", {}, "columns of interest"));
  const columnBoxes = el("div", { id: "column-boxes", class: "choices" });
  columnsPanel.appendChild(columnBoxes);

  const tasksPanel = el("section", { class: "panel", id: "tasks-panel" });
  tasksPanel.appendChild(el("h2", {}, "tasks"));
  const taskBoxes = el("div", { id: "task-boxes", class: "choices" });
  tasksPanel.appendChild(taskBoxes);

  // --- controls ----------------------------------------------------------
  const controls = el("section", { class: "panel", id: "controls-panel" });
  const modeSelect = el("select", { id: "mode-select" });
  for (const mode of ["individual", "combination"]) {
    modeSelect.appendChild(el("option", { value: mode }, mode));
  }
  const schemeSelect = el("select", { id: "scheme-select" });
  for (const scheme of SCHEMES) schemeSelect.appendChild(el("option", { value: scheme }, scheme));
  const maxInput = el("input", { id: "max-input", type: "number", min: "1", value: "8" });
  const displayToggle = el("input", { id: "display-toggle", type: "checkbox" });
  const displayLabel = el("label", { class: "toggle" });
  displayLabel.append(displayToggle, document.createTextNode(" group by task"));
  const recommendButton = el("button", { id: "recommend-btn" }, "recommend");
  controls.append(
    el("label", {}, "mode "),
    modeSelect,
    el("label", {}, " scheme "),
    schemeSelect,
    el("label", {}, " max charts "),
    maxInput,
    displayLabel,
    recommendButton
  );

  const status = el("p", { id: "status" });
  const charts = el("div", { id: "charts" });

  root.append(uploadPanel, fieldsPanel, columnsPanel, tasksPanel, controls, status, charts);

  // --- rendering ---------------------------------------------------------
  function renderSummary(): void {
    const { dataset } = store.get();
    summary.textContent = dataset
      ? `${dataset.dataset_id}: ${dataset.row_count} rows, ${dataset.fields.length} fields`
      : "";
  }

  function renderFields(): void {
    const { dataset } = store.get();
    fieldsTable.replaceChildren();
    if (!dataset) return;
    const head = el("tr");
    for (const title of ["field", "type", "geo role", "profile"]) {
      head.appendChild(el("th", {}, title));
    }
    fieldsTable.appendChild(head);
    for (const field of dataset.fields) {
      const row = el("tr", { "data-field": field.name });

      row.appendChild(el("td", {}, field.name + (field.inferred ? "" : " *")));

      const typeCell = el("td");
      const typeSelect = el("select", { "data-role": "type" });
      for (const t of FIELD_TYPES) typeSelect.appendChild(el("option", { value: t }, t));
      typeSelect.value = field.type;
      typeSelect.addEventListener("change", () => {
        void actions.setFieldType(field.name, typeSelect.value as FieldType);
      });
      typeCell.appendChild(typeSelect);
      row.appendChild(typeCell);

      const geoCell = el("td");
      const geoSelect = el("select", { "data-role": "geo" });
      for (const role of GEO_ROLES) geoSelect.appendChild(el("option", { value: role }, role));
      geoSelect.value = field.geo_role ?? "none";
      geoSelect.addEventListener("change", () => {
        const value = geoSelect.value === "none" ? null : (geoSelect.value as GeoRole);
        void actions.setGeoRole(field.name, value);
      });
      geoCell.appendChild(geoSelect);
      row.appendChild(geoCell);

      const bounds =
        field.min !== null || field.max !== null ? `, ${field.min}..${field.max}` : "";
      row.appendChild(
        el("td", {}, `${field.cardinality} distinct, ${field.null_count} null${bounds}`)
      );
      fieldsTable.appendChild(row);
    }
  }

  function renderChoices(): void {
    const state = store.get();
    columnBoxes.replaceChildren();
    for (const field of state.dataset?.fields ?? []) {
      const label = el("label", { class: "choice" });
      const box = el("input", { type: "checkbox", value: field.name });
      box.checked = state.selectedColumns.includes(field.name);
      box.addEventListener("change", () => {
        store.update({
          selectedColumns: toggleItem(store.get().selectedColumns, field.name),
        });
      });
      label.append(box, document.createTextNode(` ${field.name}`));
      columnBoxes.appendChild(label);
    }
    taskBoxes.replaceChildren();
    for (const task of state.tasks) {
      const label = el("label", { class: "choice", title: task.description });
      const box = el("input", { type: "checkbox", value: task.name });
      box.checked = state.selectedTasks.includes(task.name);
      box.addEventListener("change", () => {
        store.update({ selectedTasks: toggleItem(store.get().selectedTasks, task.name) });
      });
      label.append(box, document.createTextNode(` ${task.name}`));
      taskBoxes.appendChild(label);
    }
  }

  function renderStatus(): void {
    const state = store.get();
    if (state.error) {
      status.textContent = `error ${state.error}`;
      status.className = "error";
      return;
    }
    status.className = "";
    if (state.busy) {
      status.textContent = "working...";
      return;
    }
    const result = state.result;
    if (!result) {
      status.textContent = "";
      return;
    }
    const parts = [`${result.charts.length} charts`];
    if (state.mode === "combination") {
      const coverage = combinationCoverage(result, state.selectedColumns);
      parts.push(
        coverage.complete
          ? `covers all ${coverage.covered.length} columns`
          : `missing: ${coverage.missing.join(", ")}`
      );
    }
    if (result.partial) parts.push("search was cut short; results may be incomplete");
    status.textContent = parts.join(" · ");
  }

  function renderCharts(): void {
    renderGroups(charts, visibleGroups(store.get()), draw);
  }

  function renderAll(): void {
    renderSummary();
    renderFields();
    renderChoices();
    renderStatus();
    renderCharts();
  }

  // --- actions -----------------------------------------------------------
  async function guarded(work: () => Promise<void>): Promise<void> {
    store.update({ busy: true, error: null });
    try {
      await work();
      store.update({ busy: false });
    } catch (error) {
      store.update({ busy: false, error: describe(error) });
    }
  }

  const actions: AppActions = {
    upload: (body, format) =>
      guarded(async () => {
        const dataset = await client.uploadDataset(body, format);
        const tasks = store.get().tasks.length > 0 ? store.get().tasks : await client.listTasks();
        store.update({
          dataset,
          tasks,
          selectedColumns: [],
          selectedTasks: [],
          result: null,
        });
      }),
    setFieldType: (field, type) =>
      guarded(async () => {
        const state = store.get();
        if (!state.dataset) return;
        const dataset = await client.patchField(state.dataset.dataset_id, field, { type });
        store.update({ dataset });
      }),
    setGeoRole: (field, role) =>
      guarded(async () => {
        const state = store.get();
        if (!state.dataset) return;
        const dataset = await client.patchField(state.dataset.dataset_id, field, {
          geo_role: role,
        });
        store.update({ dataset });
      }),
    recommend: () =>
      guarded(async () => {
        const result = await client.recommend(buildRequest(store.get()));
        store.update({ result });
      }),
  };

  // --- events ------------------------------------------------------------
  uploadButton.addEventListener("click", () => {
    const file = fileInput.files?.[0];
    if (file) {
      const format = file.name.endsWith(".json") ? "json" : "csv";
      void actions.upload(file, format);
      return;
    }
    const text = pasteInput.value.trim();
    if (text) void actions.upload(text);
    else store.update({ error: "choose a file or paste data first" });
  });

  modeSelect.addEventListener("change", () => {
    store.update({ mode: modeSelect.value as Mode, result: null });
  });
  schemeSelect.addEventListener("change", () => {
    store.update({ scheme: schemeSelect.value as Scheme });
  });
  maxInput.addEventListener("change", () => {
    const parsed = Number(maxInput.value);
    if (Number.isFinite(parsed) && parsed >= 1) store.update({ maxCharts: Math.floor(parsed) });
  });
  // a pure view toggle: renders from the cached response, never refetches
  displayToggle.addEventListener("change", () => {
    store.update({ displayByTask: displayToggle.checked });
  });
  recommendButton.addEventListener("click", () => {
    if (!store.get().dataset) {
      store.update({ error: "upload a dataset first" });
      return;
    }
    void actions.recommend();
  });

  store.subscribe(renderAll);
  renderAll();
  return { store, actions };
}
