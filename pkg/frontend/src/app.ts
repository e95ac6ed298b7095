// Browser bootstrap: wires the view models to the DOM. All state shown comes
// from API responses; the only client state is view preferences (sort keys,
// collapse set, selected cluster).

import { ApiClient, ApiError } from "./api.js";
import { ClusterSort, renderClusterRows, renderExplanation, sortClusters } from "./clusters.js";
import { renderDotToSvg } from "./dot.js";
import { SortKey, renderTree } from "./fptree.js";
import type { ClusterRow, FpTreePayload, Label } from "./types.js";

const api = new ApiClient("");

interface ViewState {
  clusters: ClusterRow[];
  clusterSort: ClusterSort;
  clusterSortDesc: boolean;
  selected: number | null;
  fpSort: SortKey;
  collapsed: Set<number>;
  fpTree: FpTreePayload | null;
}

const state: ViewState = {
  clusters: [],
  clusterSort: "size",
  clusterSortDesc: true,
  selected: null,
  fpSort: "count",
  collapsed: new Set(),
  fpTree: null,
};

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

function toast(message: string): void {
  const box = el<HTMLDivElement>("toast");
  box.textContent = message;
  box.classList.add("visible");
  setTimeout(() => box.classList.remove("visible"), 4000);
}

async function refreshRun(): Promise<void> {
  const info = await api.getRun();
  el("run-meta").textContent =
    `run ${info.run_id} — ${info.total_queries} queries, ` +
    `${info.skeletons} skeletons, ${Object.values(info.labels).reduce((a, b) => a + b, 0)} clusters ` +
    `(${info.labels.safe} safe / ${info.labels.unsafe} unsafe / ${info.labels.unknown} unknown)`;
}

async function refreshClusters(): Promise<void> {
  state.clusters = await api.getClusters();
  renderClusterTable();
}

function renderClusterTable(): void {
  const rows = sortClusters(state.clusters, state.clusterSort, state.clusterSortDesc);
  el("cluster-body").innerHTML = renderClusterRows(rows);
  for (const tr of document.querySelectorAll<HTMLTableRowElement>(".cluster-row")) {
    tr.addEventListener("click", () => selectCluster(Number(tr.dataset.cluster)));
  }
}

async function selectCluster(id: number): Promise<void> {
  state.selected = id;
  state.collapsed = new Set();
  try {
    const [detail, tree, dot] = await Promise.all([
      api.getCluster(id),
      api.getFpTree(id),
      api.getDot(id),
    ]);
    state.fpTree = tree;
    el("detail-title").textContent =
      `Cluster ${id} — ${detail.size.skeletons} skeletons, ${detail.size.queries} queries`;
    el("explanation").innerHTML = renderExplanation(detail.explanation);
    el("representative").textContent = detail.representative.text;
    renderFpTree();
    el("graph").innerHTML = renderDotToSvg(dot);
    for (const button of document.querySelectorAll<HTMLButtonElement>(".label-btn")) {
      button.disabled = false;
      button.classList.toggle("active", button.dataset.label === detail.label);
    }
  } catch (err) {
    toast(err instanceof ApiError ? `load failed: ${err.message}` : String(err));
  }
}

function renderFpTree(): void {
  if (!state.fpTree) return;
  el("fptree").innerHTML = renderTree(state.fpTree.root, state.fpSort, state.collapsed);
  for (const row of document.querySelectorAll<HTMLDivElement>(".fp-row")) {
    row.addEventListener("click", () => {
      const feature = Number(row.dataset.feature);
      if (state.collapsed.has(feature)) state.collapsed.delete(feature);
      else state.collapsed.add(feature);
      renderFpTree();
    });
  }
}

async function assignLabel(label: Label): Promise<void> {
  if (state.selected === null) return;
  const previous = state.clusters.find((c) => c.id === state.selected)?.label;
  try {
    await api.setLabel(state.selected, label);
    await refreshClusters();
    await refreshRun();
    await selectCluster(state.selected);
  } catch (err) {
    // non-destructive: reload server truth, surface the failure
    toast(
      err instanceof ApiError
        ? `label rejected (${err.status}): ${err.message}; still ${previous}`
        : String(err),
    );
    await refreshClusters();
  }
}

async function reElaborate(): Promise<void> {
  const k = Number(el<HTMLInputElement>("re-k").value);
  try {
    const result = await api.reElaborate(k);
    toast(`re-elaborated: ${result.retired.length} unknown clusters -> ${result.new.length} finer ones`);
    state.selected = null;
    await refreshClusters();
    await refreshRun();
  } catch (err) {
    toast(err instanceof ApiError ? `re-elaborate failed: ${err.message}` : String(err));
  }
}

function wireControls(): void {
  for (const th of document.querySelectorAll<HTMLTableCellElement>("th[data-sort]")) {
    th.addEventListener("click", () => {
      const key = th.dataset.sort as ClusterSort;
      if (state.clusterSort === key) state.clusterSortDesc = !state.clusterSortDesc;
      else {
        state.clusterSort = key;
        state.clusterSortDesc = key === "size" || key === "queries";
      }
      renderClusterTable();
    });
  }
  el<HTMLSelectElement>("fp-sort").addEventListener("change", (event) => {
    state.fpSort = (event.target as HTMLSelectElement).value as SortKey;
    renderFpTree();
  });
  for (const button of document.querySelectorAll<HTMLButtonElement>(".label-btn")) {
    button.addEventListener("click", () => assignLabel(button.dataset.label as Label));
  }
  el("re-elaborate").addEventListener("click", () => void reElaborate());
}

async function main(): Promise<void> {
  wireControls();
  await refreshRun();
  await refreshClusters();
}

void main().catch((err) => toast(String(err)));
