/** SVG rendering of the defining canvas: nodes, skeleton, links, arcs.
 *
 * Pure presentation over the editor model; all gesture handling dispatches
 * back into StateEditor methods, which are the only source of truth.
 */

import { arcSectorPath, rangeToArc } from "./arcs.js";
import { StateEditor, constraintVars } from "./editor.js";
import { ConstraintJson, NodeJson } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const SKELETON_EDGES: [string, string][] = [
  ["nose", "left_eye"],
  ["nose", "right_eye"],
  ["left_eye", "left_ear"],
  ["right_eye", "right_ear"],
  ["left_shoulder", "right_shoulder"],
  ["left_shoulder", "left_elbow"],
  ["left_elbow", "left_wrist"],
  ["right_shoulder", "right_elbow"],
  ["right_elbow", "right_wrist"],
  ["left_shoulder", "left_hip"],
  ["right_shoulder", "right_hip"],
  ["left_hip", "right_hip"],
  ["left_hip", "left_knee"],
  ["left_knee", "left_ankle"],
  ["right_hip", "right_knee"],
  ["right_knee", "right_ankle"],
];

export function skeletonSegments(nodes: NodeJson[]): [NodeJson, NodeJson][] {
  const byOwner = new Map<number, Map<string, NodeJson>>();
  for (const node of nodes) {
    if (node.kind !== "body_part") continue;
    let parts = byOwner.get(node.owner_track);
    if (!parts) {
      parts = new Map();
      byOwner.set(node.owner_track, parts);
    }
    parts.set(node.type, node);
  }
  const segments: [NodeJson, NodeJson][] = [];
  for (const parts of byOwner.values()) {
    for (const [a, b] of SKELETON_EDGES) {
      const na = parts.get(a);
      const nb = parts.get(b);
      if (na && nb) segments.push([na, nb]);
    }
  }
  return segments;
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

export interface CanvasCallbacks {
  onNodeDrag?: (name: string, x: number, y: number) => void;
  onNodeClick?: (name: string) => void;
  onConstraintClick?: (index: number) => void;
}

const KIND_FILL: Record<string, string> = {
  person: "#4f7bd9",
  body_part: "#8fb2f0",
  object: "#e0954f",
};

export function renderCanvas(
  svg: SVGSVGElement,
  editor: StateEditor,
  callbacks: CanvasCallbacks = {},
  backgroundUrl: string | null = null,
): void {
  svg.replaceChildren();
  if (backgroundUrl) {
    svg.append(
      el("image", { href: backgroundUrl, x: 0, y: 0, width: svg.viewBox.baseVal.width || 1280 }),
    );
  }

  // Constraint links under the nodes.
  editor.constraints.forEach((constraint, index) => {
    const vars = constraintVars(constraint);
    const group = el("g", { class: `constraint constraint-${constraint.kind}` });
    group.addEventListener("click", () => callbacks.onConstraintClick?.(index));
    if (constraint.kind === "direction") {
      const anchorAt = editor.layout.get(constraint.anchor);
      const targetAt = editor.layout.get(constraint.target);
      if (anchorAt && targetAt) {
        group.append(
          el("path", {
            d: arcSectorPath(anchorAt.x, anchorAt.y, 26, 40, rangeToArc(constraint.deg_min, constraint.deg_max)),
            fill: "#d94f4f66",
            stroke: "#d94f4f",
          }),
          el("line", {
            x1: anchorAt.x,
            y1: anchorAt.y,
            x2: targetAt.x,
            y2: targetAt.y,
            stroke: "#d94f4f",
            "stroke-dasharray": "6 3",
          }),
        );
      }
    } else {
      const points = vars
        .map((v) => editor.layout.get(v))
        .filter((p): p is NonNullable<typeof p> => p !== undefined);
      for (let i = 0; i + 1 < points.length; i += 2) {
        group.append(
          el("line", {
            x1: points[i]!.x,
            y1: points[i]!.y,
            x2: points[i + 1]!.x,
            y2: points[i + 1]!.y,
            stroke: constraint.kind === "contact" ? "#4fae5c" : "#9b59b6",
            "stroke-width": 2,
          }),
        );
      }
    }
    svg.append(group);
  });

  for (const [anchor, arc] of editor.pendingArcs) {
    const at = editor.layout.get(anchor);
    if (!at) continue;
    svg.append(
      el("path", {
        d: arcSectorPath(at.x, at.y, 26, 40, arc),
        fill: "#d94f4f33",
        stroke: "#d94f4f",
        "stroke-dasharray": "4 2",
      }),
    );
  }

  for (const decl of editor.elements) {
    const at = editor.layout.get(decl.var);
    if (!at) continue;
    const group = el("g", { class: `node node-${decl.kind}`, "data-var": decl.var });
    group.append(
      el("circle", {
        cx: at.x,
        cy: at.y,
        r: decl.kind === "body_part" ? 7 : 11,
        fill: KIND_FILL[decl.kind] ?? "#999",
        stroke: "#333",
      }),
      (() => {
        const label = el("text", { x: at.x + 12, y: at.y - 8, "font-size": 12 });
        label.textContent = decl.kind === "person" ? decl.var : `${decl.var}:${decl.type}`;
        return label;
      })(),
    );
    let dragging = false;
    group.addEventListener("pointerdown", () => (dragging = true));
    group.addEventListener("pointerup", () => {
      dragging = false;
      callbacks.onNodeClick?.(decl.var);
    });
    svg.addEventListener("pointermove", (ev) => {
      if (!dragging) return;
      const rect = svg.getBoundingClientRect();
      callbacks.onNodeDrag?.(decl.var, ev.clientX - rect.left, ev.clientY - rect.top);
    });
    svg.append(group);
  }
}
