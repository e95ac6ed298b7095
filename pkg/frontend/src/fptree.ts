// FP-tree view model. Re-sorting and collapsing are pure recomputations over
// the payload the server sent; counts are never edited client-side, and no
// network round trip happens on re-render.

import type { FpNode } from "./types.js";

export type SortKey = "count" | "label" | "feature";

export interface FpViewNode {
  feature: number | null;
  label: string;
  count: number;
  depth: number;
  collapsed: boolean;
  hasChildren: boolean;
}

const comparators: Record<SortKey, (a: FpNode, b: FpNode) => number> = {
  count: (a, b) => b.count - a.count || cmpFeature(a, b),
  label: (a, b) => a.label.localeCompare(b.label) || cmpFeature(a, b),
  feature: cmpFeature,
};

function cmpFeature(a: FpNode, b: FpNode): number {
  return (a.feature ?? -1) - (b.feature ?? -1);
}

export function countNodes(root: FpNode): number {
  let total = 0;
  const stack = [root];
  while (stack.length) {
    const node = stack.pop()!;
    total += 1;
    for (const child of node.children) stack.push(child);
  }
  return total;
}

/** Flatten the tree into visible rows under a sort order and collapse set.
 *
 * This is the whole re-render computation: toggling sort or collapse state
 * reruns it and nothing else. Iterative, so path depth never overflows the
 * stack.
 */
export function flattenTree(
  root: FpNode,
  sort: SortKey,
  collapsed: ReadonlySet<number>,
): FpViewNode[] {
  const out: FpViewNode[] = [];
  const cmp = comparators[sort];
  // stack of [node, depth]; children pushed in reverse sorted order
  const stack: Array<[FpNode, number]> = [[root, 0]];
  while (stack.length) {
    const [node, depth] = stack.pop()!;
    const isCollapsed =
      node.feature !== null && collapsed.has(node.feature) && depth > 0;
    if (node.feature !== null || depth === 0) {
      out.push({
        feature: node.feature,
        label: node.label,
        count: node.count,
        depth,
        collapsed: isCollapsed,
        hasChildren: node.children.length > 0,
      });
    }
    if (isCollapsed) continue;
    const children = [...node.children].sort(cmp);
    for (let i = children.length - 1; i >= 0; i--) {
      stack.push([children[i], depth + 1]);
    }
  }
  return out;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** HTML for the flattened rows; one div per visible node. */
export function renderRows(rows: FpViewNode[]): string {
  const parts: string[] = [];
  for (const row of rows) {
    if (row.feature === null) continue; // synthetic root
    const marker = row.hasChildren ? (row.collapsed ? "&#9656;" : "&#9662;") : "&middot;";
    parts.push(
      `<div class="fp-row" data-feature="${row.feature}" style="--depth:${row.depth}">` +
        `<span class="fp-toggle">${marker}</span>` +
        `<span class="fp-label">${escapeHtml(row.label)}</span>` +
        `<span class="fp-count">${row.count}</span>` +
        `</div>`,
    );
  }
  return parts.join("");
}

export function renderTree(
  root: FpNode,
  sort: SortKey,
  collapsed: ReadonlySet<number>,
): string {
  return renderRows(flattenTree(root, sort, collapsed));
}
