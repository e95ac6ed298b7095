import { describe, expect, it } from "vitest";

import { layoutTree, parseDot, renderDotToSvg } from "../src/dot.js";

const DOT = `digraph cluster_2 {
  rankdir=TB;
  node [fontname="Helvetica", shape=box];
  n0 [label="select", style=filled, fillcolor="#a6cee3"];
  n1 [label="cols", style=filled, fillcolor="#a6cee3"];
  n2 [label="where", style=dashed, color="#888888"];
  n3 [label="t.a = \\"x\\"", style=dashed, color="#888888"];
  n0 -> n1;
  n0 -> n2;
  n2 -> n3;
}
`;

describe("parseDot", () => {
  it("reads nodes, labels, edges, and styling classes", () => {
    const graph = parseDot(DOT);
    expect(graph.name).toBe("cluster_2");
    expect(graph.nodes.size).toBe(4);
    expect(graph.edges).toEqual([
      ["n0", "n1"],
      ["n0", "n2"],
      ["n2", "n3"],
    ]);
    expect(graph.nodes.get("n0")?.common).toBe(true);
    expect(graph.nodes.get("n2")?.common).toBe(false);
    expect(graph.nodes.get("n3")?.label).toBe('t.a = "x"');
  });

  it("rejects non-digraph input", () => {
    expect(() => parseDot("graph g { a -- b; }")).toThrow();
  });
});

describe("layoutTree", () => {
  it("children sit one level below their parent and do not overlap", () => {
    const graph = parseDot(DOT);
    const { placed } = layoutTree(graph);
    const n0 = placed.get("n0")!;
    const n1 = placed.get("n1")!;
    const n2 = placed.get("n2")!;
    const n3 = placed.get("n3")!;
    expect(n1.y).toBeGreaterThan(n0.y);
    expect(n2.y).toBe(n1.y);
    expect(n3.y).toBeGreaterThan(n2.y);
    const [left, right] = n1.x < n2.x ? [n1, n2] : [n2, n1];
    expect(left.x + left.width).toBeLessThanOrEqual(right.x);
  });

  it("parents center over their children", () => {
    const graph = parseDot(DOT);
    const { placed } = layoutTree(graph);
    const n0 = placed.get("n0")!;
    const n1 = placed.get("n1")!;
    const n2 = placed.get("n2")!;
    const mid = (n1.x + (n2.x + n2.width)) / 2;
    expect(Math.abs(n0.x + n0.width / 2 - mid)).toBeLessThan(1e-6);
  });
});

describe("renderDotToSvg", () => {
  it("emits svg with common/variable classes and all edges", () => {
    const svg = renderDotToSvg(DOT);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.match(/class="ast-node common"/g)).toHaveLength(2);
    expect(svg.match(/class="ast-node variable"/g)).toHaveLength(2);
    expect(svg.match(/<line /g)).toHaveLength(3);
    expect(svg).toContain("t.a = &quot;x&quot;");
  });
});
