/** Chart-area rendering. Vega-Embed does the actual drawing when its script
 * is on the page; otherwise each chart degrades to its JSON document so the
 * client stays useful without the CDN. */

import type { ChartEntry } from "./api.js";
import type { ChartGroup } from "./state.js";

export type EmbedFn = (
  el: HTMLElement,
  spec: Record<string, unknown>
) => Promise<unknown> | unknown;

declare global {
  interface Window {
    vegaEmbed?: EmbedFn;
  }
}

export function resolveEmbed(): EmbedFn {
  if (typeof window !== "undefined" && typeof window.vegaEmbed === "function") {
    return (el, spec) => window.vegaEmbed!(el, spec);
  }
  return (el, spec) => {
    const pre = document.createElement("pre");
    pre.className = "chart-json";
    pre.textContent = JSON.stringify(spec, null, 2);
    el.appendChild(pre);
  };
}

export function chartCard(entry: ChartEntry, embed: EmbedFn): HTMLElement {
  const card = document.createElement("article");
  card.className = "chart-card";
  card.dataset.task = entry.task;
  card.dataset.fields = entry.fields.join(",");

  const title = document.createElement("header");
  title.textContent = `${entry.task} · cost ${entry.cost}`;
  card.appendChild(title);

  const host = document.createElement("div");
  host.className = "chart-host";
  card.appendChild(host);

  const meta = document.createElement("footer");
  meta.textContent = `fields: ${entry.fields.join(", ")} · tasks: ${entry.covering_tasks.join(", ")}`;
  card.appendChild(meta);

  Promise.resolve(embed(host, entry.vegalite)).catch((err) => {
    host.textContent = `render failed: ${String(err)}`;
  });
  return card;
}

export function renderGroups(root: HTMLElement, groups: ChartGroup[], embed: EmbedFn): void {
  root.replaceChildren();
  if (groups.length === 0 || groups.every((g) => g.charts.length === 0)) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = "no charts yet";
    root.appendChild(empty);
    return;
  }
  for (const group of groups) {
    const section = document.createElement("section");
    section.className = "chart-group";
    section.dataset.group = group.title;

    const heading = document.createElement("h3");
    heading.textContent = `${group.title} (${group.charts.length})`;
    section.appendChild(heading);

    const grid = document.createElement("div");
    grid.className = "chart-grid";
    for (const entry of group.charts) grid.appendChild(chartCard(entry, embed));
    section.appendChild(grid);

    root.appendChild(section);
  }
}
