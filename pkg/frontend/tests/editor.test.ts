import { describe, expect, it } from "vitest";

import { EventEditor, LinkError, StateEditor } from "../src/editor.js";
import { NodeJson } from "../src/types.js";
import { SERVE_FRONT, gestureServeFront } from "./fixtures.js";

describe("StateEditor gestures", () => {
  it("builds serve_front structurally equal to the fixture", () => {
    expect(gestureServeFront().toJson()).toEqual(SERVE_FRONT);
  });

  it("node drags change layout but never the serialized state", () => {
    const editor = gestureServeFront();
    const hold = editor.state("hold");
    const before = JSON.stringify(editor.toJson());
    hold.dragNode("B", { x: 999, y: -50 });
    hold.dragNode("H", { x: 1, y: 2 });
    expect(JSON.stringify(editor.toJson())).toBe(before);
    expect(hold.layout.get("B")).toEqual({ x: 999, y: -50 });
  });

  it("rejects a direction link to self without mutating", () => {
    const state = new StateEditor("st");
    state.addObject("ball", "B");
    state.createArc("B");
    const before = JSON.stringify(state.toJson());
    expect(() => state.linkDirection("B", "B")).toThrow(LinkError);
    expect(JSON.stringify(state.toJson())).toBe(before);
  });

  it("rejects links to unknown elements", () => {
    const state = new StateEditor("st");
    state.addObject("ball", "B");
    expect(() => state.linkContact("B", "ghost")).toThrow(LinkError);
  });

  it("distance links pair up: first closer, then farther", () => {
    const state = new StateEditor("st");
    state.addObject("ball", "B");
    state.addPerson("P");
    state.addObject("table", "T");
    expect(state.linkDistance("B", "P")).toBeNull();
    const constraint = state.linkDistance("B", "T");
    expect(constraint).toEqual({
      kind: "distance_order",
      lesser: ["B", "P"],
      greater: ["B", "T"],
    });
    expect(() => {
      state.linkDistance("P", "B");
      state.linkDistance("B", "P");
    }).toThrow(LinkError);
  });

  it("dragging an existing direction arc rotates its range", () => {
    const editor = gestureServeFront();
    const hold = editor.state("hold");
    const rotated = hold.dragConstraintArc(1, 20);
    expect([rotated.deg_min, rotated.deg_max]).toEqual([115, 185]);
    const again = hold.dragConstraintArc(1, -20);
    expect([again.deg_min, again.deg_max]).toEqual([95, 165]);
  });

  it("numeric list-mode editing sets exact bounds", () => {
    const editor = gestureServeFront();
    const hold = editor.state("hold");
    const next = hold.setDirectionBounds(1, 119, 129);
    expect([next.deg_min, next.deg_max]).toEqual([119, 129]);
  });

  it("rename rewrites declarations, associations, and constraints", () => {
    const state = new StateEditor("st");
    state.addPerson("P1");
    state.addPart("nose", "K1", "P1");
    state.addObject("ball", "O1");
    state.linkContact("O1", "K1");
    state.renameElement("K1", "H");
    state.renameElement("O1", "B");
    expect(state.toJson().elements.map((e) => e.var)).toEqual(["P1", "H", "B"]);
    expect(state.toJson().constraints[0]).toEqual({
      kind: "contact",
      a: "B",
      b: "H",
      iou_min: null,
    });
  });

  it("removing an element drops dependent parts and constraints", () => {
    const state = new StateEditor("st");
    state.addPerson("P1");
    state.addPart("nose", "H", "P1");
    state.addObject("ball", "B");
    state.linkContact("B", "H");
    state.removeElement("P1");
    expect(state.toJson().elements.map((e) => e.var)).toEqual(["B"]);
    expect(state.toJson().constraints).toEqual([]);
  });

  it("reorders elements explicitly", () => {
    const state = new StateEditor("st");
    state.addObject("ball", "B");
    state.addPerson("P1");
    state.setElementOrder(["P1", "B"]);
    expect(state.toJson().elements.map((e) => e.var)).toEqual(["P1", "B"]);
    expect(() => state.setElementOrder(["P1"])).toThrow(LinkError);
  });

  it("hot start imports nodes at their positions", () => {
    const nodes: NodeJson[] = [
      {
        index: 0,
        kind: "person",
        type: "person",
        anchor: { x: 640, y: 250 },
        box: { x: 600, y: 150, w: 80, h: 200 },
        track: 0,
        owner_track: 0,
      },
      {
        index: 1,
        kind: "body_part",
        type: "nose",
        anchor: { x: 640, y: 170 },
        box: null,
        track: 0,
        owner_track: 0,
      },
      {
        index: 2,
        kind: "object",
        type: "ball",
        anchor: { x: 600, y: 232 },
        box: { x: 580, y: 212, w: 40, h: 40 },
        track: 1,
        owner_track: 1,
      },
    ];
    const state = new StateEditor("hold");
    state.importFrame("v1", 102, nodes);
    expect(state.toJson().elements).toEqual([
      { var: "P1", kind: "person", type: "person", assoc: null },
      { var: "K1", kind: "body_part", type: "nose", assoc: "P1" },
      { var: "O1", kind: "object", type: "ball", assoc: null },
    ]);
    expect(state.layout.get("P1")).toEqual({ x: 640, y: 250 });
    expect(state.layout.get("K1")).toEqual({ x: 640, y: 170 });
    expect(state.background).toEqual({ video: "v1", frame: 102 });
  });
});

describe("EventEditor", () => {
  it("tracks intervals as states are added and removed", () => {
    const editor = new EventEditor("e");
    editor.addState("a");
    expect(editor.intervals).toEqual([]);
    editor.addState("b");
    editor.addState("c");
    expect(editor.intervals.length).toBe(2);
    editor.setInterval(1, 0.7);
    expect(editor.intervals[1]).toBe(0.7);
    editor.removeState("b");
    expect(editor.intervals.length).toBe(1);
  });

  it("rejects non-positive intervals", () => {
    const editor = new EventEditor("e");
    editor.addState("a");
    editor.addState("b");
    expect(() => editor.setInterval(0, 0)).toThrow(LinkError);
  });

  it("round-trips through JSON", () => {
    const editor = gestureServeFront();
    const json = editor.toJson();
    expect(EventEditor.fromJson(json).toJson()).toEqual(json);
  });
});
