/** Shared test fixtures: the serve_front structure and the gesture script
 * that produces it. */

import { EventEditor, StateEditor } from "../src/editor.js";
import { EventJson } from "../src/types.js";

/** The structured mirror of the hand-written serve_front fixture. */
export const SERVE_FRONT: EventJson = {
  event_id: "serve_front",
  action_label: "serve",
  states: [
    {
      name: "hold",
      elements: [
        { var: "P1", kind: "person", type: "person", assoc: null },
        { var: "P2", kind: "person", type: "person", assoc: null },
        { var: "B", kind: "object", type: "ball", assoc: null },
        { var: "T", kind: "object", type: "table", assoc: null },
        { var: "H", kind: "body_part", type: "nose", assoc: "P1" },
        { var: "RW", kind: "body_part", type: "right_wrist", assoc: "P1" },
      ],
      constraints: [
        { kind: "contact", a: "B", b: "RW", iou_min: null },
        { kind: "direction", anchor: "H", target: "B", deg_min: 95, deg_max: 165 },
        { kind: "direction", anchor: "T", target: "P1", deg_min: 225, deg_max: 315 },
        { kind: "direction", anchor: "T", target: "P2", deg_min: 45, deg_max: 135 },
      ],
    },
    {
      name: "toss",
      elements: [
        { var: "P1", kind: "person", type: "person", assoc: null },
        { var: "B", kind: "object", type: "ball", assoc: null },
        { var: "H", kind: "body_part", type: "nose", assoc: "P1" },
      ],
      constraints: [
        { kind: "direction", anchor: "H", target: "B", deg_min: 200, deg_max: 270 },
      ],
    },
  ],
  intervals: [0.3],
};

/** Drive serve_front's hold-state constraints purely through gestures. */
export function gestureHoldConstraints(hold: StateEditor): void {
  hold.linkContact("B", "RW");
  hold.createArc("H"); // default width 70 at [0, 70]
  hold.dragPendingArc("H", 95);
  hold.linkDirection("H", "B"); // [95, 165]
  hold.createArc("T");
  hold.resizePendingArc("T", 90);
  hold.dragPendingArc("T", 235);
  hold.linkDirection("T", "P1"); // [225, 315]
  hold.createArc("T");
  hold.resizePendingArc("T", 90);
  hold.dragPendingArc("T", 55);
  hold.linkDirection("T", "P2"); // [45, 135]
}

export function gestureServeFront(): EventEditor {
  const editor = new EventEditor("serve_front", "serve");
  const hold = editor.addState("hold");
  hold.addPerson("P1");
  hold.addPerson("P2");
  hold.addObject("ball", "B");
  hold.addObject("table", "T");
  hold.addPart("nose", "H", "P1");
  hold.addPart("right_wrist", "RW", "P1");
  gestureHoldConstraints(hold);

  const toss = editor.addState("toss");
  toss.addPerson("P1");
  toss.addObject("ball", "B");
  toss.addPart("nose", "H", "P1");
  toss.createArc("H");
  toss.dragPendingArc("H", 200);
  toss.linkDirection("H", "B"); // [200, 270]

  editor.setInterval(0, 0.3);
  return editor;
}
