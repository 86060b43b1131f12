"""From per-frame state matches to key-event instances and frame labels.

Per state and identity signature, consecutive matching frames collapse
into maximal runs. Instances chain one run per state, greedily taking the
earliest compatible next-state run whose onset is strictly later and whose
delay from the previous run's end stays within the event's threshold.
Overlapping runs are permitted (a held state may persist past the next
state's onset) unless a minimum delay is configured.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .matcher import Embedding
from .rules import KeyEvent

Signature = tuple[tuple[str, int], ...]  # sorted (var, track) pairs


@dataclass(frozen=True)
class SequencerConfig:
    min_delay_s: float | None = None  # None permits arbitrary overlap

    @classmethod
    def from_mapping(cls, data: dict) -> "SequencerConfig":
        v = data.get("min_delay_s")
        return cls(min_delay_s=None if v is None else float(v))


@dataclass(frozen=True)
class StateRun:
    """Maximal consecutive frame span where one signature keeps matching."""

    state: str
    signature: Signature
    start_frame: int
    end_frame: int  # inclusive


@dataclass(frozen=True)
class KeyEventInstance:
    event_id: str
    video_id: str
    instance_id: int  # 1-based per (video, event), detection order
    runs: tuple[StateRun, ...]  # one per state, in state order
    signature: Signature  # union over the runs' signatures
    onsets: tuple[int, ...]  # start frame of each run


@dataclass(frozen=True)
class FrameLabel:
    video_id: str
    frame_index: int
    event_id: str
    state_index: int  # 1-based
    instance_id: int


def collapse_runs(state: str, matches: Mapping[int, Sequence[Embedding]]) -> list[StateRun]:
    """Collapse per-frame embeddings into maximal per-signature runs,
    ordered by (start frame, signature)."""
    frames_by_sig: dict[Signature, list[int]] = {}
    for frame_index in sorted(matches):
        sigs = {tuple(sorted(e.signature.items())) for e in matches[frame_index]}
        for sig in sigs:
            frames_by_sig.setdefault(sig, []).append(frame_index)

    runs: list[StateRun] = []
    for sig, frames in frames_by_sig.items():
        start = prev = frames[0]
        for f in frames[1:]:
            if f == prev + 1:
                prev = f
                continue
            runs.append(StateRun(state=state, signature=sig, start_frame=start, end_frame=prev))
            start = prev = f
        runs.append(StateRun(state=state, signature=sig, start_frame=start, end_frame=prev))
    runs.sort(key=lambda r: (r.start_frame, r.signature))
    return runs


def _compatible(accumulated: dict[str, int], sig: Signature) -> bool:
    return all(accumulated.get(var, track) == track for var, track in sig)


def detect_instances(
    event: KeyEvent,
    runs_by_state: Mapping[str, Sequence[StateRun]],
    fps: float,
    video_id: str,
    cfg: SequencerConfig = SequencerConfig(),
) -> list[KeyEventInstance]:
    """Chain state runs into instances.

    First-state runs are scanned in start order; each unconsumed one is
    extended greedily with the earliest unconsumed, signature-compatible
    next-state run satisfying onset order and the delay threshold. A full
    chain consumes all of its runs; a dead end consumes nothing. Instances
    with disjoint signatures may overlap in time.
    """
    state_names = [s.name for s in event.states]
    consumed: set[StateRun] = set()
    instances: list[KeyEventInstance] = []

    first_runs = list(runs_by_state.get(state_names[0], []))
    for first in first_runs:
        if first in consumed:
            continue
        chain = [first]
        accumulated = dict(first.signature)
        ok = True
        for k in range(1, len(state_names)):
            thr = event.intervals[k - 1]
            prev = chain[-1]
            chosen = None
            for cand in runs_by_state.get(state_names[k], []):
                if cand in consumed:
                    continue
                if cand.start_frame <= prev.start_frame:
                    continue  # onsets must strictly increase
                delay = (cand.start_frame - prev.end_frame) / fps
                if delay > thr:
                    continue
                if cfg.min_delay_s is not None and delay < cfg.min_delay_s:
                    continue
                if not _compatible(accumulated, cand.signature):
                    continue
                chosen = cand
                break  # runs are sorted; the first hit is the earliest
            if chosen is None:
                ok = False
                break
            chain.append(chosen)
            accumulated.update(chosen.signature)
        if not ok:
            continue
        consumed.update(chain)
        instances.append(
            KeyEventInstance(
                event_id=event.event_id,
                video_id=video_id,
                instance_id=len(instances) + 1,
                runs=tuple(chain),
                signature=tuple(sorted(accumulated.items())),
                onsets=tuple(r.start_frame for r in chain),
            )
        )
    return instances


def generate_labels(instances: Sequence[KeyEventInstance]) -> list[FrameLabel]:
    """One label per frame per used run, sorted by (video, frame)."""
    labels: list[FrameLabel] = []
    for inst in instances:
        for state_index, run in enumerate(inst.runs, start=1):
            for frame in range(run.start_frame, run.end_frame + 1):
                labels.append(
                    FrameLabel(
                        video_id=inst.video_id,
                        frame_index=frame,
                        event_id=inst.event_id,
                        state_index=state_index,
                        instance_id=inst.instance_id,
                    )
                )
    labels.sort(
        key=lambda l: (l.video_id, l.frame_index, l.event_id, l.instance_id, l.state_index)
    )
    return labels


def label_to_record(label: FrameLabel) -> dict:
    return {
        "video": label.video_id,
        "frame": label.frame_index,
        "event": label.event_id,
        "state": label.state_index,
        "instance": label.instance_id,
    }


def label_from_record(record: dict) -> FrameLabel:
    return FrameLabel(
        video_id=str(record["video"]),
        frame_index=int(record["frame"]),
        event_id=str(record["event"]),
        state_index=int(record["state"]),
        instance_id=int(record["instance"]),
    )
