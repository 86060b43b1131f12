/** Dataset-review helpers: cell matrix colors, label timelines, markers. */

import { LabelJson, StatsJson } from "./types.js";

export const BUCKET_COLORS = ["#e8e8e8", "#cfe8cf", "#9fd49f", "#5cb85c", "#2e7d32"] as const;

/** Bucket a label count for the cell matrix (0 = no labels). */
export function bucketFor(count: number, maxCount: number): number {
  if (count <= 0) return 0;
  if (maxCount <= 0) return 0;
  const share = count / maxCount;
  if (share <= 0.25) return 1;
  if (share <= 0.5) return 2;
  if (share <= 0.75) return 3;
  return 4;
}

export interface MatrixCell {
  video: string;
  count: number;
  bucket: number;
  color: string;
}

export function matrixCells(stats: StatsJson): MatrixCell[] {
  const videos = Object.keys(stats.videos).sort();
  const maxCount = Math.max(0, ...videos.map((v) => stats.videos[v]!.count));
  return videos.map((video) => {
    const count = stats.videos[video]!.count;
    const bucket = bucketFor(count, maxCount);
    return { video, count, bucket, color: BUCKET_COLORS[bucket]! };
  });
}

export interface TimelineDot {
  frame: number;
  x: number;
}

/** Dots along a width-pixel timeline, one per labeled frame position. */
export function timelineDots(positions: number[], frameCount: number, width: number): TimelineDot[] {
  if (frameCount <= 0) return [];
  return positions.map((frame) => ({ frame, x: (frame / frameCount) * width }));
}

export function markerTicks(markers: number[], frameCount: number, width: number): TimelineDot[] {
  return timelineDots(markers, frameCount, width);
}

/** Group a run's labels per video into sorted unique frame positions;
 * matches the service's stats so views can work offline from labels. */
export function positionsFromLabels(labels: LabelJson[]): Record<string, number[]> {
  const grouped = new Map<string, Set<number>>();
  for (const label of labels) {
    let set = grouped.get(label.video);
    if (!set) {
      set = new Set();
      grouped.set(label.video, set);
    }
    set.add(label.frame);
  }
  const out: Record<string, number[]> = {};
  for (const [video, frames] of grouped) {
    out[video] = [...frames].sort((a, b) => a - b);
  }
  return out;
}
