// Client-side renderer for the server's DOT graphs. The server emits a
// constrained digraph dialect (one node or edge statement per line, tree
// shaped); parsing it here keeps the server's common/variable styling as the
// single source of truth while the browser only solves layout.

export interface DotNode {
  id: string;
  label: string;
  common: boolean; // style=filled => shared structure; dashed => variable
}

export interface DotGraph {
  name: string;
  nodes: Map<string, DotNode>;
  edges: Array<[string, string]>;
}

const NODE_RE = /^\s*(\w+)\s*\[(.*)\];$/;
const EDGE_RE = /^\s*(\w+)\s*->\s*(\w+);$/;
const LABEL_RE = /label="((?:[^"\\]|\\.)*)"/;

function unescapeLabel(raw: string): string {
  return raw.replace(/\\(.)/g, "$1");
}

export function parseDot(text: string): DotGraph {
  const lines = text.split("\n");
  const headMatch = lines[0]?.match(/^digraph\s+(\w+)\s*\{/);
  if (!headMatch) throw new Error("not a digraph");
  const graph: DotGraph = { name: headMatch[1], nodes: new Map(), edges: [] };
  for (const line of lines.slice(1)) {
    const trimmed = line.trim();
    if (!trimmed || trimmed === "}" || trimmed.startsWith("rankdir") || trimmed.startsWith("node ")) {
      continue;
    }
    const edge = trimmed.match(EDGE_RE);
    if (edge) {
      graph.edges.push([edge[1], edge[2]]);
      continue;
    }
    const node = trimmed.match(NODE_RE);
    if (node) {
      const attrs = node[2];
      const label = attrs.match(LABEL_RE);
      graph.nodes.set(node[1], {
        id: node[1],
        label: label ? unescapeLabel(label[1]) : node[1],
        common: attrs.includes("style=filled"),
      });
      continue;
    }
    throw new Error(`unsupported DOT statement: ${trimmed}`);
  }
  return graph;
}

interface Placed extends DotNode {
  x: number;
  y: number;
  width: number;
}

const NODE_HEIGHT = 24;
const LEVEL_GAP = 56;
const SIBLING_GAP = 14;
const CHAR_WIDTH = 7.2;
const PADDING = 16;

/** Tidy top-down tree layout: leaves take consecutive slots, parents center
 * over their children. Returns placed nodes plus canvas size. */
export function layoutTree(graph: DotGraph): {
  placed: Map<string, Placed>;
  width: number;
  height: number;
} {
  const children = new Map<string, string[]>();
  const hasParent = new Set<string>();
  for (const [from, to] of graph.edges) {
    if (!children.has(from)) children.set(from, []);
    children.get(from)!.push(to);
    hasParent.add(to);
  }
  const roots = [...graph.nodes.keys()].filter((id) => !hasParent.has(id));
  const placed = new Map<string, Placed>();
  let cursor = PADDING;
  let maxDepth = 0;

  const widthOf = (id: string) =>
    Math.max(34, graph.nodes.get(id)!.label.length * CHAR_WIDTH + 12);

  // iterative post-order: position children first, center parent
  type Frame = { id: string; depth: number; visited: boolean };
  for (const root of roots) {
    const stack: Frame[] = [{ id: root, depth: 0, visited: false }];
    while (stack.length) {
      const frame = stack.pop()!;
      const kids = children.get(frame.id) ?? [];
      maxDepth = Math.max(maxDepth, frame.depth);
      if (!frame.visited && kids.length) {
        stack.push({ ...frame, visited: true });
        for (let i = kids.length - 1; i >= 0; i--) {
          stack.push({ id: kids[i], depth: frame.depth + 1, visited: false });
        }
        continue;
      }
      const node = graph.nodes.get(frame.id)!;
      const width = widthOf(frame.id);
      let x: number;
      if (kids.length) {
        const placedKids = kids.map((k) => placed.get(k)!);
        const first = placedKids[0];
        const last = placedKids[placedKids.length - 1];
        x = (first.x + last.x + last.width) / 2 - width / 2;
      } else {
        x = cursor;
        cursor += width + SIBLING_GAP;
      }
      placed.set(frame.id, {
        ...node,
        x,
        y: PADDING + frame.depth * LEVEL_GAP,
        width,
      });
    }
  }
  let maxX = 0;
  for (const p of placed.values()) maxX = Math.max(maxX, p.x + p.width);
  return {
    placed,
    width: maxX + PADDING,
    height: PADDING * 2 + maxDepth * LEVEL_GAP + NODE_HEIGHT,
  };
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderDotToSvg(text: string): string {
  const graph = parseDot(text);
  const { placed, width, height } = layoutTree(graph);
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
      `width="${width}" height="${height}" class="ast-graph">`,
  ];
  for (const [from, to] of graph.edges) {
    const a = placed.get(from)!;
    const b = placed.get(to)!;
    parts.push(
      `<line x1="${a.x + a.width / 2}" y1="${a.y + NODE_HEIGHT}" ` +
        `x2="${b.x + b.width / 2}" y2="${b.y}" class="ast-edge"/>`,
    );
  }
  for (const p of placed.values()) {
    const cls = p.common ? "ast-node common" : "ast-node variable";
    parts.push(
      `<g class="${cls}">` +
        `<rect x="${p.x}" y="${p.y}" width="${p.width}" height="${NODE_HEIGHT}" rx="4"/>` +
        `<text x="${p.x + p.width / 2}" y="${p.y + NODE_HEIGHT / 2 + 4}" ` +
        `text-anchor="middle">${escapeXml(p.label)}</text>` +
        `</g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
