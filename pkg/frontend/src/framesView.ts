/** Frame-review helpers: matched-frame lists and mismatch explanations. */

import { LabelJson, MismatchJson, OutcomeJson } from "./types.js";

export interface MatchedFrame {
  video: string;
  frame: number;
  instance: number;
}

/** Frames labeled for one state of one event, in playback order. */
export function matchedFrames(
  labels: LabelJson[],
  eventId: string,
  stateIndex: number,
): MatchedFrame[] {
  return labels
    .filter((l) => l.event === eventId && l.state === stateIndex)
    .map((l) => ({ video: l.video, frame: l.frame, instance: l.instance }))
    .sort((a, b) => (a.video < b.video ? -1 : a.video > b.video ? 1 : a.frame - b.frame));
}

function formatMeasured(outcome: OutcomeJson): string {
  if (outcome.measured === null) return outcome.reason ?? "unresolved";
  if (Array.isArray(outcome.measured)) {
    const [lesser, greater] = outcome.measured;
    return `distances ${lesser.toFixed(1)} vs ${greater.toFixed(1)}`;
  }
  if (outcome.constraint.kind === "direction") return `measured ${outcome.measured.toFixed(1)} deg`;
  return `measured IoU ${outcome.measured.toFixed(3)}`;
}

export function describeFailure(outcome: OutcomeJson): string {
  const c = outcome.constraint;
  switch (c.kind) {
    case "direction":
      return (
        `dir(${c.anchor} -> ${c.target}) expected [${c.deg_min} deg, ${c.deg_max} deg], ` +
        formatMeasured(outcome)
      );
    case "contact":
      return `contact(${c.a}, ${c.b}) failed, ${formatMeasured(outcome)}`;
    case "distance_order":
      return `closer(${(c.lesser as string[]).join(", ")}; ${(c.greater as string[]).join(", ")}) failed, ${formatMeasured(outcome)}`;
    default:
      return `constraint failed, ${formatMeasured(outcome)}`;
  }
}

/** Human-readable summary of a "why not?" preview report. */
export function describeMismatch(report: MismatchJson): string[] {
  if (report.matched) return [];
  const lines: string[] = [];
  for (const missing of report.missing_types) {
    lines.push(`missing element type "${missing}" in this frame`);
  }
  for (const failure of report.failures) {
    lines.push(describeFailure(failure));
  }
  if (lines.length === 0) {
    lines.push(`no consistent assignment beyond ${report.best_partial} element(s)`);
  }
  return lines;
}
