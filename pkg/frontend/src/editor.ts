/** Headless canvas-editor model: gestures in, structured events out.
 *
 * Every semantic decision (matching, validation, metrics) belongs to the
 * service; this model only accumulates declarations and constraints. Node
 * layout is presentation state and never leaks into the serialized event,
 * so dragging nodes around can never change labeling behavior.
 */

import { ArcGeometry, arcToRange, normDeg, rangeToArc, resizeArc, rotateArc } from "./arcs.js";
import {
  ConstraintJson,
  DirectionJson,
  ElementDeclJson,
  EventJson,
  NodeJson,
  StateJson,
} from "./types.js";

export class LinkError extends Error {}

export type LinkMode = "contact" | "direction" | "distance";

export interface Point {
  x: number;
  y: number;
}

export interface BackgroundRef {
  video: string;
  frame: number;
}

const DEFAULT_ARC: ArcGeometry = { midDeg: 35, widthDeg: 70 };

export class StateEditor {
  name: string;
  elements: ElementDeclJson[] = [];
  constraints: ConstraintJson[] = [];
  /** var -> canvas position; presentation only. */
  layout = new Map<string, Point>();
  /** Unlinked direction handles keyed by anchor var. */
  pendingArcs = new Map<string, ArcGeometry>();
  /** First pair of an in-progress distance link. */
  pendingDistance: [string, string] | null = null;
  background: BackgroundRef | null = null;
  listMode = false; // alternate numeric-field rendering of constraints

  constructor(name: string) {
    this.name = name;
  }

  declared(name: string): ElementDeclJson {
    const decl = this.elements.find((e) => e.var === name);
    if (!decl) throw new LinkError(`unknown element ${name}`);
    return decl;
  }

  private addElement(decl: ElementDeclJson, at?: Point): void {
    if (this.elements.some((e) => e.var === decl.var)) {
      throw new LinkError(`duplicate element ${decl.var}`);
    }
    this.elements.push(decl);
    this.layout.set(decl.var, at ?? { x: 80 + 40 * this.elements.length, y: 120 });
  }

  addPerson(name: string, at?: Point): void {
    this.addElement({ var: name, kind: "person", type: "person", assoc: null }, at);
  }

  addObject(type: string, name: string, at?: Point): void {
    this.addElement({ var: name, kind: "object", type, assoc: null }, at);
  }

  addPart(type: string, name: string, assoc: string, at?: Point): void {
    if (this.declared(assoc).kind !== "person") {
      throw new LinkError(`association target ${assoc} is not a person`);
    }
    this.addElement({ var: name, kind: "body_part", type, assoc }, at);
  }

  /** Hot start: pull a frame's extracted elements onto the canvas at their
   * detected positions, with the frame as background. Variable names are
   * auto-assigned (P1.., O1.., K1..) and can be renamed afterwards. */
  importFrame(video: string, frame: number, nodes: NodeJson[]): void {
    const personByTrack = new Map<number, string>();
    let persons = 0;
    let objects = 0;
    let parts = 0;
    for (const node of nodes) {
      if (node.kind !== "person") continue;
      persons += 1;
      const name = `P${persons}`;
      personByTrack.set(node.track, name);
      this.addElement(
        { var: name, kind: "person", type: "person", assoc: null },
        { x: node.anchor.x, y: node.anchor.y },
      );
    }
    for (const node of nodes) {
      if (node.kind === "person") continue;
      const at = { x: node.anchor.x, y: node.anchor.y };
      if (node.kind === "object") {
        objects += 1;
        this.addElement({ var: `O${objects}`, kind: "object", type: node.type, assoc: null }, at);
      } else {
        const owner = personByTrack.get(node.owner_track);
        if (owner === undefined) continue; // orphaned part: skip
        parts += 1;
        this.addElement({ var: `K${parts}`, kind: "body_part", type: node.type, assoc: owner }, at);
      }
    }
    this.background = { video, frame };
  }

  removeElement(name: string): void {
    this.declared(name);
    // Removing a person also removes its body parts; constraints touching
    // anything removed go with them.
    const removed = new Set(
      this.elements.filter((e) => e.var === name || e.assoc === name).map((e) => e.var),
    );
    this.elements = this.elements.filter((e) => !removed.has(e.var));
    for (const gone of removed) {
      this.layout.delete(gone);
      this.pendingArcs.delete(gone);
    }
    this.constraints = this.constraints.filter(
      (c) => !constraintVars(c).some((v) => removed.has(v)),
    );
    if (this.pendingDistance?.some((v) => removed.has(v))) this.pendingDistance = null;
  }

  renameElement(from: string, to: string): void {
    this.declared(from);
    if (from === to) return;
    if (this.elements.some((e) => e.var === to)) throw new LinkError(`duplicate element ${to}`);
    const sub = (v: string) => (v === from ? to : v);
    this.elements = this.elements.map((e) => ({
      ...e,
      var: sub(e.var),
      assoc: e.assoc === null ? null : sub(e.assoc),
    }));
    this.constraints = this.constraints.map((c) => renameInConstraint(c, sub));
    const at = this.layout.get(from);
    if (at) {
      this.layout.delete(from);
      this.layout.set(to, at);
    }
    const arc = this.pendingArcs.get(from);
    if (arc) {
      this.pendingArcs.delete(from);
      this.pendingArcs.set(to, arc);
    }
    if (this.pendingDistance) {
      this.pendingDistance = [sub(this.pendingDistance[0]), sub(this.pendingDistance[1])];
    }
  }

  /** Reorder elements (list mode); purely declarative, no semantic change
   * beyond the serialized order. */
  setElementOrder(names: string[]): void {
    const byVar = new Map(this.elements.map((e) => [e.var, e]));
    if (names.length !== this.elements.length || names.some((n) => !byVar.has(n))) {
      throw new LinkError("order must mention every element exactly once");
    }
    this.elements = names.map((n) => byVar.get(n)!);
  }

  /** Drag gesture on a node: layout only. */
  dragNode(name: string, to: Point): void {
    this.declared(name);
    this.layout.set(name, to);
  }

  // --- direction handles --------------------------------------------------

  createArc(anchor: string, geometry: ArcGeometry = DEFAULT_ARC): ArcGeometry {
    this.declared(anchor);
    this.pendingArcs.set(anchor, geometry);
    return geometry;
  }

  dragPendingArc(anchor: string, deltaDeg: number): ArcGeometry {
    const arc = this.pendingArcs.get(anchor);
    if (!arc) throw new LinkError(`no arc handle on ${anchor}`);
    const rotated = rotateArc(arc, deltaDeg);
    this.pendingArcs.set(anchor, rotated);
    return rotated;
  }

  resizePendingArc(anchor: string, widthDeg: number): ArcGeometry {
    const arc = this.pendingArcs.get(anchor);
    if (!arc) throw new LinkError(`no arc handle on ${anchor}`);
    const resized = resizeArc(arc, widthDeg);
    this.pendingArcs.set(anchor, resized);
    return resized;
  }

  /** Drag gesture on the arc of an existing direction constraint: rotates
   * the range, preserving its width. */
  dragConstraintArc(index: number, deltaDeg: number): DirectionJson {
    const c = this.constraints[index];
    if (!c || c.kind !== "direction") throw new LinkError(`constraint ${index} is not a direction`);
    const rotated = rotateArc(rangeToArc(c.deg_min, c.deg_max), deltaDeg);
    const range = arcToRange(rotated);
    const next: DirectionJson = { ...c, ...range };
    this.constraints[index] = next;
    return next;
  }

  // --- link gestures --------------------------------------------------------

  /** Link in direction mode: from an anchor's arc handle to a target node. */
  linkDirection(anchor: string, target: string): DirectionJson {
    this.declared(anchor);
    this.declared(target);
    if (anchor === target) throw new LinkError("direction to self is not allowed");
    const arc = this.pendingArcs.get(anchor);
    if (!arc) throw new LinkError(`no arc handle on ${anchor}`);
    const range = arcToRange(arc);
    const constraint: DirectionJson = { kind: "direction", anchor, target, ...range };
    this.constraints.push(constraint);
    this.pendingArcs.delete(anchor);
    return constraint;
  }

  /** Link in contact mode between two nodes. */
  linkContact(a: string, b: string, iouMin: number | null = null): ConstraintJson {
    this.declared(a);
    this.declared(b);
    if (a === b) throw new LinkError("contact with self is meaningless");
    const constraint: ConstraintJson = { kind: "contact", a, b, iou_min: iouMin };
    this.constraints.push(constraint);
    return constraint;
  }

  /** Paired links in distance mode: first link nominates the closer pair,
   * the second the farther pair. */
  linkDistance(a: string, b: string): ConstraintJson | null {
    this.declared(a);
    this.declared(b);
    if (a === b) throw new LinkError("distance needs two distinct elements");
    if (this.pendingDistance === null) {
      this.pendingDistance = [a, b];
      return null;
    }
    const lesser = this.pendingDistance;
    if (sameUnorderedPair(lesser, [a, b])) {
      throw new LinkError("distance pairs must differ");
    }
    const constraint: ConstraintJson = { kind: "distance_order", lesser, greater: [a, b] };
    this.constraints.push(constraint);
    this.pendingDistance = null;
    return constraint;
  }

  removeConstraint(index: number): void {
    if (index < 0 || index >= this.constraints.length) throw new LinkError("no such constraint");
    this.constraints.splice(index, 1);
  }

  /** List-mode numeric editing of a direction range (the mode switch that
   * makes narrow arcs workable). */
  setDirectionBounds(index: number, degMin: number, degMax: number): DirectionJson {
    const c = this.constraints[index];
    if (!c || c.kind !== "direction") throw new LinkError(`constraint ${index} is not a direction`);
    const next: DirectionJson = { ...c, deg_min: normDeg(degMin), deg_max: normDeg(degMax) };
    this.constraints[index] = next;
    return next;
  }

  toJson(): StateJson {
    return {
      name: this.name,
      elements: this.elements.map((e) => ({ ...e })),
      constraints: this.constraints.map((c) => ({ ...c })),
    };
  }

  static fromJson(state: StateJson): StateEditor {
    const editor = new StateEditor(state.name);
    for (const e of state.elements) editor.elements.push({ ...e });
    for (const c of state.constraints) editor.constraints.push({ ...c });
    let i = 0;
    for (const e of editor.elements) {
      editor.layout.set(e.var, { x: 80 + 60 * (i % 8), y: 80 + 60 * Math.floor(i / 8) });
      i += 1;
    }
    return editor;
  }
}

export class EventEditor {
  eventId: string;
  actionLabel: string;
  states: StateEditor[] = [];
  intervals: number[] = [];

  constructor(eventId: string, actionLabel = "") {
    this.eventId = eventId;
    this.actionLabel = actionLabel;
  }

  addState(name: string): StateEditor {
    if (this.states.some((s) => s.name === name)) throw new LinkError(`duplicate state ${name}`);
    const state = new StateEditor(name);
    this.states.push(state);
    if (this.states.length > 1) this.intervals.push(0.5);
    return state;
  }

  removeState(name: string): void {
    const idx = this.states.findIndex((s) => s.name === name);
    if (idx < 0) throw new LinkError(`no such state ${name}`);
    this.states.splice(idx, 1);
    if (this.intervals.length > 0) this.intervals.splice(Math.max(idx - 1, 0), 1);
  }

  /** Timeline widget: set the max delay between states k and k+1. */
  setInterval(index: number, seconds: number): void {
    if (index < 0 || index >= this.intervals.length) throw new LinkError("no such interval");
    if (!(seconds > 0)) throw new LinkError("interval must be positive");
    this.intervals[index] = seconds;
  }

  state(name: string): StateEditor {
    const state = this.states.find((s) => s.name === name);
    if (!state) throw new LinkError(`no such state ${name}`);
    return state;
  }

  toJson(): EventJson {
    return {
      event_id: this.eventId,
      action_label: this.actionLabel,
      states: this.states.map((s) => s.toJson()),
      intervals: [...this.intervals],
    };
  }

  static fromJson(event: EventJson): EventEditor {
    const editor = new EventEditor(event.event_id, event.action_label);
    editor.states = event.states.map((s) => StateEditor.fromJson(s));
    editor.intervals = [...event.intervals];
    return editor;
  }
}

export function constraintVars(c: ConstraintJson): string[] {
  switch (c.kind) {
    case "direction":
      return [c.anchor, c.target];
    case "contact":
      return [c.a, c.b];
    case "distance_order":
      return [...c.lesser, ...c.greater];
  }
}

function renameInConstraint(c: ConstraintJson, sub: (v: string) => string): ConstraintJson {
  switch (c.kind) {
    case "direction":
      return { ...c, anchor: sub(c.anchor), target: sub(c.target) };
    case "contact":
      return { ...c, a: sub(c.a), b: sub(c.b) };
    case "distance_order":
      return {
        ...c,
        lesser: [sub(c.lesser[0]), sub(c.lesser[1])],
        greater: [sub(c.greater[0]), sub(c.greater[1])],
      };
  }
}

function sameUnorderedPair(a: [string, string], b: [string, string]): boolean {
  return (a[0] === b[0] && a[1] === b[1]) || (a[0] === b[1] && a[1] === b[0]);
}
