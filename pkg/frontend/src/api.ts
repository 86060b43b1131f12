/** Typed client for the labeling service. The fetch implementation is
 * injectable so tests can run against a mock transport. */

import {
  DiagnosticJson,
  ElementsJson,
  EventJson,
  EventsPayloadJson,
  LabelJson,
  MetricsJson,
  PreviewJson,
  RunJson,
  StateJson,
  StatsJson,
  VideoJson,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  detail: unknown;

  constructor(status: number, detail: unknown) {
    super(`api error ${status}: ${JSON.stringify(detail)}`);
    this.status = status;
    this.detail = detail;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchImpl(`${this.base}${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    const payload = text ? JSON.parse(text) : null;
    if (!resp.ok) throw new ApiError(resp.status, payload?.detail ?? payload);
    return payload as T;
  }

  videos(): Promise<VideoJson[]> {
    return this.request("GET", "/videos");
  }

  elements(video: string, frame: number): Promise<ElementsJson> {
    return this.request("GET", `/videos/${encodeURIComponent(video)}/elements/${frame}`);
  }

  frameImageUrl(video: string, frame: number): string {
    return `${this.base}/videos/${encodeURIComponent(video)}/frames/${frame}`;
  }

  getEvents(): Promise<EventsPayloadJson> {
    return this.request("GET", "/events");
  }

  putEventsDsl(dsl: string): Promise<EventsPayloadJson> {
    return this.request("PUT", "/events", { dsl });
  }

  putEvents(events: EventJson[]): Promise<EventsPayloadJson> {
    return this.request("PUT", "/events", { events });
  }

  validateEvents(events: EventJson[]): Promise<DiagnosticJson[]> {
    return this.request("POST", "/events/validate", { events });
  }

  validateDsl(dsl: string): Promise<DiagnosticJson[]> {
    return this.request("POST", "/events/validate", { dsl });
  }

  startRun(eventIds?: string[]): Promise<RunJson> {
    return this.request("POST", "/runs", { event_ids: eventIds ?? null });
  }

  listRuns(): Promise<RunJson[]> {
    return this.request("GET", "/runs");
  }

  run(runId: number): Promise<RunJson> {
    return this.request("GET", `/runs/${runId}`);
  }

  async waitForRun(runId: number, timeoutMs = 120_000, pollMs = 150): Promise<RunJson> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const run = await this.run(runId);
      if (run.status === "done" || run.status === "failed") return run;
      if (Date.now() > deadline) throw new Error(`run ${runId} still ${run.status}`);
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }

  async labels(runId: number, video?: string): Promise<LabelJson[]> {
    const query = video === undefined ? "" : `?video=${encodeURIComponent(video)}`;
    const body = await this.request<{ labels: LabelJson[] }>(
      "GET",
      `/runs/${runId}/labels${query}`,
    );
    return body.labels;
  }

  stats(runId: number): Promise<StatsJson> {
    return this.request("GET", `/runs/${runId}/stats`);
  }

  preview(video: string, frame: number, state: StateJson): Promise<PreviewJson>;
  preview(video: string, frame: number, eventId: string, stateName: string): Promise<PreviewJson>;
  preview(
    video: string,
    frame: number,
    stateOrEvent: StateJson | string,
    stateName?: string,
  ): Promise<PreviewJson> {
    const body =
      typeof stateOrEvent === "string"
        ? { video, frame, event_id: stateOrEvent, state_name: stateName }
        : { video, frame, state: stateOrEvent };
    return this.request("POST", "/match/preview", body);
  }

  async evaluate(runId: number): Promise<Record<string, MetricsJson>> {
    const body = await this.request<{ metrics: Record<string, MetricsJson> }>(
      "POST",
      "/evaluate",
      { run_id: runId },
    );
    return body.metrics;
  }
}
