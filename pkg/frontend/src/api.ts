import type {
  ClusterDetail,
  ClusterRow,
  FpTreePayload,
  Label,
  ReElaborateResult,
  RunInfo,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // keep statusText
    }
    throw new ApiError(response.status, detail);
  }
  return response.json() as Promise<T>;
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  getRun(): Promise<RunInfo> {
    return fetch(`${this.baseUrl}/api/run`).then((r) => asJson<RunInfo>(r));
  }

  getClusters(): Promise<ClusterRow[]> {
    return fetch(`${this.baseUrl}/api/clusters`).then((r) =>
      asJson<ClusterRow[]>(r),
    );
  }

  getCluster(id: number): Promise<ClusterDetail> {
    return fetch(`${this.baseUrl}/api/clusters/${id}`).then((r) =>
      asJson<ClusterDetail>(r),
    );
  }

  getFpTree(id: number): Promise<FpTreePayload> {
    return fetch(`${this.baseUrl}/api/clusters/${id}/fptree`).then((r) =>
      asJson<FpTreePayload>(r),
    );
  }

  async getDot(id: number): Promise<string> {
    const response = await fetch(`${this.baseUrl}/api/clusters/${id}/dot`);
    if (!response.ok) throw new ApiError(response.status, response.statusText);
    return response.text();
  }

  setLabel(id: number, label: Label): Promise<{ id: number; label: Label }> {
    return fetch(`${this.baseUrl}/api/clusters/${id}/label`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ label }),
    }).then((r) => asJson<{ id: number; label: Label }>(r));
  }

  reElaborate(k: number): Promise<ReElaborateResult> {
    return fetch(`${this.baseUrl}/api/re-elaborate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ k }),
    }).then((r) => asJson<ReElaborateResult>(r));
  }
}
