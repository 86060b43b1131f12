/** Event-list management: add, delete, rename, import/export. */

import { EventEditor, LinkError } from "./editor.js";
import { EventJson } from "./types.js";

export class EventListModel {
  editors: EventEditor[] = [];

  static fromJson(events: EventJson[]): EventListModel {
    const model = new EventListModel();
    model.editors = events.map((e) => EventEditor.fromJson(e));
    return model;
  }

  ids(): string[] {
    return this.editors.map((e) => e.eventId);
  }

  get(eventId: string): EventEditor {
    const editor = this.editors.find((e) => e.eventId === eventId);
    if (!editor) throw new LinkError(`no such event ${eventId}`);
    return editor;
  }

  /** New events start with one empty state, ready for hot start. */
  add(eventId: string, actionLabel = ""): EventEditor {
    if (this.editors.some((e) => e.eventId === eventId)) {
      throw new LinkError(`duplicate event ${eventId}`);
    }
    const editor = new EventEditor(eventId, actionLabel);
    editor.addState("state1");
    this.editors.push(editor);
    return editor;
  }

  remove(eventId: string): void {
    const idx = this.editors.findIndex((e) => e.eventId === eventId);
    if (idx < 0) throw new LinkError(`no such event ${eventId}`);
    this.editors.splice(idx, 1);
  }

  rename(from: string, to: string): void {
    if (this.editors.some((e) => e.eventId === to)) throw new LinkError(`duplicate event ${to}`);
    this.get(from).eventId = to;
  }

  replace(eventId: string, replacement: EventEditor): void {
    const idx = this.editors.findIndex((e) => e.eventId === eventId);
    if (idx < 0) throw new LinkError(`no such event ${eventId}`);
    this.editors[idx] = replacement;
  }

  toJson(): EventJson[] {
    return this.editors.map((e) => e.toJson());
  }
}
