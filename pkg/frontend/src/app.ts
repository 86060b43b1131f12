/** Single-page app wiring: dataset matrix, event list, defining canvas,
 * frame review, run history. The service owns all semantics; this file is
 * DOM plumbing around the models in editor.ts / datasetView.ts. */

import { ApiClient, ApiError } from "./api.js";
import { EventEditor, LinkError, LinkMode, StateEditor } from "./editor.js";
import { EventListModel } from "./eventsView.js";
import { describeMismatch } from "./framesView.js";
import { matrixCells, timelineDots, markerTicks } from "./datasetView.js";
import { renderCanvas } from "./render.js";
import { RunJson, VideoJson } from "./types.js";

interface AppState {
  api: ApiClient;
  videos: VideoJson[];
  events: EventListModel;
  currentVideo: string | null;
  currentFrame: number;
  editingEvent: string | null;
  editingState: string | null;
  linkMode: LinkMode;
  linkSource: string | null;
  lastRun: RunJson | null;
}

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function note(message: string, isError = false): void {
  const bar = byId<HTMLDivElement>("notice");
  bar.textContent = message;
  bar.className = isError ? "notice error" : "notice";
}

async function refreshEvents(state: AppState): Promise<void> {
  const payload = await state.api.getEvents();
  state.events = EventListModel.fromJson(payload.events);
  const list = byId<HTMLUListElement>("event-list");
  list.replaceChildren();
  for (const id of state.events.ids()) {
    const item = document.createElement("li");
    const open = document.createElement("button");
    open.textContent = id;
    open.addEventListener("click", () => {
      state.editingEvent = id;
      state.editingState = state.events.get(id).states[0]?.name ?? null;
      redrawCanvas(state);
    });
    const del = document.createElement("button");
    del.textContent = "x";
    del.addEventListener("click", async () => {
      state.events.remove(id);
      await pushEvents(state);
    });
    item.append(open, del);
    list.append(item);
  }
  byId<HTMLTextAreaElement>("dsl-box").value = payload.dsl;
  const diag = byId<HTMLPreElement>("diagnostics");
  diag.textContent = payload.diagnostics
    .map((d) => `${d.severity}: ${d.location}: ${d.message}`)
    .join("\n");
}

async function pushEvents(state: AppState): Promise<void> {
  try {
    await state.api.putEvents(state.events.toJson());
    note("events saved");
  } catch (err) {
    if (err instanceof ApiError) {
      note(`rejected: ${JSON.stringify(err.detail)}`, true);
    } else {
      throw err;
    }
  }
  await refreshEvents(state);
}

function currentEditor(state: AppState): { event: EventEditor; state: StateEditor } | null {
  if (state.editingEvent === null) return null;
  const event = state.events.get(state.editingEvent);
  const name = state.editingState ?? event.states[0]?.name;
  if (name === undefined) return null;
  return { event, state: event.state(name) };
}

function redrawCanvas(state: AppState): void {
  const editing = currentEditor(state);
  byId<HTMLSpanElement>("editing-label").textContent = editing
    ? `${editing.event.eventId} / ${editing.state.name}`
    : "nothing selected";
  const svg = byId<HTMLElement>("canvas") as unknown as SVGSVGElement;
  if (!editing) {
    svg.replaceChildren();
    return;
  }
  const background = editing.state.background;
  renderCanvas(
    svg,
    editing.state,
    {
      onNodeDrag: (name, x, y) => {
        editing.state.dragNode(name, { x, y });
        redrawCanvas(state);
      },
      onNodeClick: (name) => handleLinkClick(state, name),
    },
    background ? state.api.frameImageUrl(background.video, background.frame) : null,
  );
  renderConstraintList(state);
  renderTimelineWidget(state);
}

function handleLinkClick(state: AppState, name: string): void {
  const editing = currentEditor(state);
  if (!editing) return;
  try {
    if (state.linkSource === null) {
      state.linkSource = name;
      note(`link from ${name} (${state.linkMode} mode)`);
      return;
    }
    const source = state.linkSource;
    state.linkSource = null;
    if (state.linkMode === "contact") {
      editing.state.linkContact(source, name);
    } else if (state.linkMode === "direction") {
      if (!editing.state.pendingArcs.has(source)) editing.state.createArc(source);
      editing.state.linkDirection(source, name);
    } else {
      editing.state.linkDistance(source, name);
    }
    redrawCanvas(state);
  } catch (err) {
    if (err instanceof LinkError) {
      note(err.message, true); // inline rejection, no mutation
    } else {
      throw err;
    }
  }
}

function renderConstraintList(state: AppState): void {
  const editing = currentEditor(state);
  const list = byId<HTMLOListElement>("constraint-list");
  list.replaceChildren();
  if (!editing) return;
  editing.state.constraints.forEach((constraint, index) => {
    const item = document.createElement("li");
    if (constraint.kind === "direction") {
      const lo = document.createElement("input");
      const hi = document.createElement("input");
      lo.value = String(constraint.deg_min);
      hi.value = String(constraint.deg_max);
      const apply = document.createElement("button");
      apply.textContent = `dir(${constraint.anchor} -> ${constraint.target}) apply`;
      apply.addEventListener("click", () => {
        editing.state.setDirectionBounds(index, Number(lo.value), Number(hi.value));
        redrawCanvas(state);
      });
      item.append(apply, lo, hi);
    } else {
      item.textContent = JSON.stringify(constraint);
    }
    const drop = document.createElement("button");
    drop.textContent = "remove";
    drop.addEventListener("click", () => {
      editing.state.removeConstraint(index);
      redrawCanvas(state);
    });
    item.append(drop);
    list.append(item);
  });
}

function renderTimelineWidget(state: AppState): void {
  const editing = currentEditor(state);
  const host = byId<HTMLDivElement>("state-timeline");
  host.replaceChildren();
  if (!editing) return;
  editing.event.states.forEach((s, i) => {
    const chip = document.createElement("button");
    chip.textContent = s.name;
    chip.addEventListener("click", () => {
      state.editingState = s.name;
      redrawCanvas(state);
    });
    host.append(chip);
    if (i < editing.event.intervals.length) {
      const input = document.createElement("input");
      input.value = String(editing.event.intervals[i]);
      input.addEventListener("change", () => {
        editing.event.setInterval(i, Number(input.value));
      });
      host.append(input, document.createTextNode("s"));
    }
  });
}

async function refreshDataset(state: AppState): Promise<void> {
  const matrix = byId<HTMLDivElement>("matrix");
  matrix.replaceChildren();
  if (state.lastRun === null || state.lastRun.status !== "done") return;
  const stats = await state.api.stats(state.lastRun.run_id);
  for (const cell of matrixCells(stats)) {
    const box = document.createElement("button");
    box.className = "cell";
    box.style.background = cell.color;
    box.textContent = `${cell.video} (${cell.count})`;
    box.addEventListener("click", () => drawTimeline(state, cell.video, stats.videos[cell.video]!.positions));
    matrix.append(box);
  }
}

function drawTimeline(state: AppState, video: string, positions: number[]): void {
  const meta = state.videos.find((v) => v.video_id === video);
  if (!meta) return;
  state.currentVideo = video;
  const width = 600;
  const svgNs = "http://www.w3.org/2000/svg";
  const svg = byId<HTMLElement>("timeline") as unknown as SVGSVGElement;
  svg.replaceChildren();
  for (const dot of timelineDots(positions, meta.frame_count, width)) {
    const circle = document.createElementNS(svgNs, "circle");
    circle.setAttribute("cx", String(dot.x));
    circle.setAttribute("cy", "10");
    circle.setAttribute("r", "3");
    circle.setAttribute("fill", "#2e7d32");
    circle.addEventListener("click", () => void whyNot(state, video, dot.frame));
    svg.append(circle);
  }
  for (const tick of markerTicks(meta.markers, meta.frame_count, width)) {
    const line = document.createElementNS(svgNs, "line");
    line.setAttribute("x1", String(tick.x));
    line.setAttribute("x2", String(tick.x));
    line.setAttribute("y1", "20");
    line.setAttribute("y2", "32");
    line.setAttribute("stroke", "#d96f02");
    svg.append(line);
  }
}

async function whyNot(state: AppState, video: string, frame: number): Promise<void> {
  const editing = currentEditor(state);
  if (!editing) {
    note("select an event/state first", true);
    return;
  }
  const preview = await state.api.preview(video, frame, editing.state.toJson());
  const out = byId<HTMLPreElement>("whynot");
  out.textContent = preview.report.matched
    ? `frame ${frame}: ${preview.embeddings.length} embedding(s)`
    : describeMismatch(preview.report).join("\n");
}

async function startRun(state: AppState): Promise<void> {
  const run = await state.api.startRun();
  state.lastRun = run;
  note(`run ${run.run_id} ${run.status}`);
  const finished = await state.api.waitForRun(run.run_id);
  state.lastRun = finished;
  note(`run ${finished.run_id} ${finished.status}`);
  await refreshDataset(state);
  await refreshRunHistory(state);
}

async function refreshRunHistory(state: AppState): Promise<void> {
  const host = byId<HTMLUListElement>("run-history");
  host.replaceChildren();
  for (const run of await state.api.listRuns()) {
    const item = document.createElement("li");
    item.textContent = `run ${run.run_id}: ${run.status} (${run.videos_done}/${run.videos_total})`;
    host.append(item);
  }
}

export async function boot(base: string): Promise<void> {
  const api = new ApiClient(base);
  const state: AppState = {
    api,
    videos: await api.videos(),
    events: EventListModel.fromJson([]),
    currentVideo: null,
    currentFrame: 0,
    editingEvent: null,
    editingState: null,
    linkMode: "contact",
    linkSource: null,
    lastRun: null,
  };
  await refreshEvents(state);
  await refreshRunHistory(state);

  byId<HTMLButtonElement>("btn-run").addEventListener("click", () => void startRun(state));
  byId<HTMLButtonElement>("btn-save").addEventListener("click", () => void pushEvents(state));
  byId<HTMLButtonElement>("btn-add-event").addEventListener("click", () => {
    const id = byId<HTMLInputElement>("new-event-id").value.trim();
    if (!id) return;
    state.events.add(id);
    state.editingEvent = id;
    state.editingState = "state1";
    redrawCanvas(state);
  });
  byId<HTMLButtonElement>("btn-import-dsl").addEventListener("click", async () => {
    try {
      await api.putEventsDsl(byId<HTMLTextAreaElement>("dsl-box").value);
      await refreshEvents(state);
      note("imported");
    } catch (err) {
      if (err instanceof ApiError) note(JSON.stringify(err.detail), true);
      else throw err;
    }
  });
  byId<HTMLButtonElement>("btn-hot-start").addEventListener("click", async () => {
    const editing = currentEditor(state);
    const video = state.currentVideo ?? state.videos[0]?.video_id;
    if (!editing || video === undefined) return;
    const frame = Number(byId<HTMLInputElement>("hot-start-frame").value) || 0;
    const elements = await api.elements(video, frame);
    editing.state.importFrame(video, frame, elements.nodes);
    redrawCanvas(state);
  });
  for (const mode of ["contact", "direction", "distance"] as const) {
    byId<HTMLInputElement>(`mode-${mode}`).addEventListener("change", () => {
      state.linkMode = mode;
      state.linkSource = null;
    });
  }
}

declare global {
  interface Window {
    eventlabBoot: (base: string) => Promise<void>;
  }
}

if (typeof window !== "undefined") {
  window.eventlabBoot = boot;
}
