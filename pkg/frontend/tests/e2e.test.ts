// End-to-end against a live qlog serve process (spawned in globalSetup):
// list clusters, persist a label, render the FP-tree and DOT payloads, and
// verify re-elaboration splits unknowns while leaving labeled clusters alone.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderClusterRows, sortClusters } from "../src/clusters.js";
import { renderDotToSvg } from "../src/dot.js";
import { countNodes, renderTree } from "../src/fptree.js";

let api: ApiClient;
let runDir: string;

beforeAll(() => {
  api = new ApiClient(process.env.QLOG_BASE_URL!);
  runDir = process.env.QLOG_RUN_DIR!;
});

describe("cluster list", () => {
  it("shows every cluster the server knows", async () => {
    const [info, clusters] = await Promise.all([api.getRun(), api.getClusters()]);
    expect(clusters.length).toBe(info.k);
    const html = renderClusterRows(sortClusters(clusters, "size", true));
    for (const cluster of clusters) {
      expect(html).toContain(`data-cluster="${cluster.id}"`);
    }
    expect(clusters.reduce((a, c) => a + c.skeletons, 0)).toBe(info.skeletons);
  });
});

describe("cluster detail payloads render", () => {
  it("FP-tree flattens and re-sorts from the served payload", async () => {
    const tree = await api.getFpTree(0);
    expect(tree.root.count).toBe(tree.size);
    expect(countNodes(tree.root)).toBeGreaterThan(1);
    const byCount = renderTree(tree.root, "count", new Set());
    const byLabel = renderTree(tree.root, "label", new Set());
    expect(byCount.match(/fp-row/g)?.length).toBe(byLabel.match(/fp-row/g)?.length);
  });

  it("DOT payload renders to SVG with both styling classes", async () => {
    const clusters = await api.getClusters();
    const multi = clusters.find((c) => c.skeletons > 1) ?? clusters[0];
    const svg = renderDotToSvg(await api.getDot(multi.id));
    expect(svg).toContain("ast-node common");
    expect(svg.match(/<line /g)!.length).toBeGreaterThan(3);
  });
});

describe("labeling round trip", () => {
  it("persists through the API and the run directory", async () => {
    await api.setLabel(1, "safe");
    const detail = await api.getCluster(1);
    expect(detail.label).toBe("safe");
    const onDisk = JSON.parse(readFileSync(join(runDir, "labels.json"), "utf-8"));
    expect(onDisk["1"]).toBe("safe");
  });

  it("rejects bad labels without changing state", async () => {
    await expect(
      api.setLabel(0, "fine" as unknown as "safe"),
    ).rejects.toMatchObject({ status: 400 });
    const detail = await api.getCluster(0);
    expect(detail.label).toBe("unknown");
  });
});

describe("re-elaboration", () => {
  it("splits unknowns, leaves labeled clusters byte-identical", async () => {
    // keep the largest cluster unknown so the split is observable; label
    // everything else so isolation is exercised on several clusters
    const before = await api.getClusters();
    const largest = before.reduce((a, b) => (b.skeletons > a.skeletons ? b : a));
    expect(largest.skeletons).toBeGreaterThan(3);
    const labeled: Array<[number, string]> = [];
    for (const cluster of before) {
      if (cluster.id === largest.id) continue;
      const label = cluster.id % 2 ? "safe" : "unsafe";
      await api.setLabel(cluster.id, label as "safe" | "unsafe");
      labeled.push([cluster.id, label]);
    }
    const summaryFiles = new Map(
      labeled.map(([id]) => [
        id,
        readFileSync(join(runDir, "summaries", `${id}.json`), "utf-8"),
      ]),
    );

    const result = await api.reElaborate(6);
    expect(result.retired).toEqual([largest.id]);
    expect(result.new.length).toBe(Math.min(6, largest.skeletons));
    expect(result.new.length).toBeGreaterThan(1);

    const after = await api.getClusters();
    const byId = new Map(after.map((c) => [c.id, c]));
    for (const [id, label] of labeled) {
      expect(byId.get(id)?.label).toBe(label);
      expect(
        readFileSync(join(runDir, "summaries", `${id}.json`), "utf-8"),
      ).toBe(summaryFiles.get(id));
    }
    expect(byId.has(largest.id)).toBe(false);
    for (const fresh of result.new) {
      expect(byId.get(fresh)?.label).toBe("unknown");
    }
    // skeleton conservation across the split
    const skeletonsBefore = before.reduce((a, c) => a + c.skeletons, 0);
    const skeletonsAfter = after.reduce((a, c) => a + c.skeletons, 0);
    expect(skeletonsAfter).toBe(skeletonsBefore);
  });
});

describe("static UI assets", () => {
  it("the server hands out the explorer shell", async () => {
    const response = await fetch(`${process.env.QLOG_BASE_URL}/`);
    expect(response.ok).toBe(true);
    const html = await response.text();
    expect(html).toContain("qlog explorer");
    expect(html).toContain('src="./app.js"');
    const js = await fetch(`${process.env.QLOG_BASE_URL}/app.js`);
    expect(js.ok).toBe(true);
  });
});
