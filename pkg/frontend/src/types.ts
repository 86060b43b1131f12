/** Shared wire types mirroring the service's structured formats. */

export type Kind = "person" | "body_part" | "object";

export interface ElementDeclJson {
  var: string;
  kind: Kind;
  type: string;
  assoc: string | null;
}

export interface DirectionJson {
  kind: "direction";
  anchor: string;
  target: string;
  deg_min: number;
  deg_max: number;
}

export interface ContactJson {
  kind: "contact";
  a: string;
  b: string;
  iou_min: number | null;
}

export interface DistanceOrderJson {
  kind: "distance_order";
  lesser: [string, string];
  greater: [string, string];
}

export type ConstraintJson = DirectionJson | ContactJson | DistanceOrderJson;

export interface StateJson {
  name: string;
  elements: ElementDeclJson[];
  constraints: ConstraintJson[];
}

export interface EventJson {
  event_id: string;
  action_label: string;
  states: StateJson[];
  intervals: number[];
}

export interface DiagnosticJson {
  severity: "error" | "warning";
  location: string;
  message: string;
}

export interface VideoJson {
  video_id: string;
  fps: number;
  frame_count: number;
  has_frames: boolean;
  markers: number[];
}

export interface NodeJson {
  index: number;
  kind: Kind;
  type: string;
  anchor: { x: number; y: number };
  box: { x: number; y: number; w: number; h: number } | null;
  track: number;
  owner_track: number;
}

export interface ElementsJson {
  video_id: string;
  frame_index: number;
  nodes: NodeJson[];
}

export interface EventsPayloadJson {
  dsl: string;
  events: EventJson[];
  diagnostics: DiagnosticJson[];
}

export interface RunJson {
  run_id: number;
  status: "queued" | "running" | "done" | "failed";
  event_ids: string[];
  videos_total: number;
  videos_done: number;
  started_at: string | null;
  finished_at: string | null;
  error: string | null;
  totals?: { instances: number; labels: number } | null;
}

export interface LabelJson {
  video: string;
  frame: number;
  event: string;
  state: number;
  instance: number;
}

export interface StatsJson {
  videos: Record<string, { count: number; positions: number[] }>;
}

export interface OutcomeJson {
  passed: boolean;
  constraint: Record<string, unknown> & { kind: string };
  measured: number | [number, number] | null;
  reason: string | null;
}

export interface MismatchJson {
  matched: boolean;
  best_partial: number;
  missing_types: string[];
  failures: OutcomeJson[];
}

export interface PreviewJson {
  embeddings: {
    state: string;
    frame_index: number;
    assignment: Record<string, number>;
    signature: Record<string, number>;
  }[];
  truncated: boolean;
  report: MismatchJson;
}

export interface MetricsJson {
  frame_precision: number;
  instance_recall: number;
  labeled_frames: number;
  gt_instances: number;
  hit_instances: number;
}
