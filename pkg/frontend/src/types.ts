// Payload shapes mirroring the qlog HTTP API. The UI never derives supports
// or counts client-side; everything displayed comes from these objects.

export type Label = "safe" | "unsafe" | "unknown";

export interface RunInfo {
  run_id: string;
  counts: Record<string, unknown>;
  timings_ms: Record<string, number>;
  k: number;
  skeletons: number;
  total_queries: number;
  labels: Record<Label, number>;
}

export interface ClusterRow {
  id: number;
  label: Label;
  skeletons: number;
  queries: number;
}

export interface CommonFeature {
  feature: number;
  support: number;
  fraction: number;
  text: string;
}

export interface ClusterDetail {
  id: number;
  label: Label;
  size: { skeletons: number; queries: number };
  members: number[];
  common_features: CommonFeature[];
  representative: { skeleton: number; text: string };
  explanation: string;
}

export interface FpNode {
  feature: number | null;
  label: string;
  count: number;
  children: FpNode[];
}

export interface FpTreePayload {
  size: number;
  root: FpNode;
}

export interface ReElaborateResult {
  new: number[];
  retired: number[];
}
