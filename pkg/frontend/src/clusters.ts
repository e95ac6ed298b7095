// Cluster table view model: sorting and row HTML. Sorting is stable on the
// cluster id so equal keys keep a deterministic order.

import { escapeHtml } from "./fptree.js";
import type { ClusterRow, Label } from "./types.js";

export type ClusterSort = "id" | "size" | "queries" | "label";

const LABEL_ORDER: Record<Label, number> = { unsafe: 0, unknown: 1, safe: 2 };

export function sortClusters(
  rows: readonly ClusterRow[],
  sort: ClusterSort,
  descending = false,
): ClusterRow[] {
  const sorted = [...rows].sort((a, b) => {
    let d = 0;
    if (sort === "size") d = a.skeletons - b.skeletons;
    else if (sort === "queries") d = a.queries - b.queries;
    else if (sort === "label") d = LABEL_ORDER[a.label] - LABEL_ORDER[b.label];
    return d !== 0 ? d : a.id - b.id;
  });
  if (descending) sorted.reverse();
  return sorted;
}

export function labelChip(label: Label): string {
  return `<span class="chip chip-${label}">${label}</span>`;
}

export function renderClusterRows(rows: readonly ClusterRow[]): string {
  return rows
    .map(
      (row) =>
        `<tr class="cluster-row" data-cluster="${row.id}">` +
        `<td>${row.id}</td>` +
        `<td>${labelChip(row.label)}</td>` +
        `<td class="num">${row.skeletons}</td>` +
        `<td class="num">${row.queries}</td>` +
        `</tr>`,
    )
    .join("");
}

export function renderExplanation(text: string): string {
  const [head, ...rest] = text.split("\n");
  const items = rest.map((line) => `<li>${escapeHtml(line)}</li>`).join("");
  return `<p>${escapeHtml(head)}</p><ul class="shared-features">${items}</ul>`;
}
