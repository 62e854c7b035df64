"""Gait cycle segmentation: key events, phase assignment, cycles, contacts.

A full running cycle carries four key events in fixed rotation: right foot
landing (phase 0), right foot extension (0.25), left foot landing (0.5),
left foot extension (0.75). Landings are found where the ankle is most
forward relative to the pelvis while near its height minimum; extensions
are the most rearward interior extrema between consecutive landings,
labelled by rotation order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoCycleError, NoGaitError
from .skeleton import MotionSequence, sequence_positions

PHASE_BY_KIND = {"RL": 0.0, "RE": 0.25, "LL": 0.5, "LE": 0.75}
KIND_ROTATION = ("RL", "RE", "LL", "LE")


@dataclass(frozen=True)
class KeyEvent:
    kind: str  # RL | RE | LL | LE
    frame_index: int
    phase: float = field(init=False)

    def __post_init__(self):
        if self.kind not in PHASE_BY_KIND:
            raise ValueError(f"unknown event kind: {self.kind}")
        object.__setattr__(self, "phase", PHASE_BY_KIND[self.kind])


@dataclass(frozen=True)
class CycleSegmentation:
    events: tuple[KeyEvent, ...]
    phase_curve: np.ndarray  # per-frame phase in [0, 1)
    cycles: tuple[tuple[int, int], ...]  # (start RL frame, end RL frame)
    contacts: dict[str, tuple[tuple[int, int], ...]]  # per-foot frame intervals


@dataclass(frozen=True)
class SegmentationConfig:
    height_tolerance_frac: float = 0.05  # of subject height
    local_min_tolerance_frac: float = 0.01  # of subject height
    contact_speed_limit: float = 0.5  # m/s
    noise_floor_frac: float = 0.02  # of subject height, on anterior amplitude
    contact_merge_gap: int = 2  # frames


DEFAULT_SEGMENTATION = SegmentationConfig()


def _smoothing_window(fps: float) -> int:
    w = max(3, int(round(fps / 10.0)))
    return w if w % 2 == 1 else w + 1


def _smooth(x: np.ndarray, window: int) -> np.ndarray:
    half = window // 2
    padded = np.pad(x, half, mode="edge")
    kernel = np.full(window, 1.0 / window)
    return np.convolve(padded, kernel, mode="valid")


def _local_extrema(x: np.ndarray, find_max: bool) -> list[int]:
    """Interior and boundary extrema; plateau ties resolve to the earliest frame."""
    s = x if find_max else -x
    out = []
    n = len(s)
    if n >= 2 and s[0] > s[1]:
        out.append(0)
    for i in range(1, n - 1):
        if s[i] > s[i - 1] and s[i] >= s[i + 1]:
            out.append(i)
    if n >= 2 and s[-1] > s[-2]:
        out.append(n - 1)
    return out


def _refine(x: np.ndarray, idx: int, window: int, find_max: bool) -> int:
    lo = max(0, idx - window)
    hi = min(len(x), idx + window + 1)
    seg = x[lo:hi]
    off = int(np.argmax(seg) if find_max else np.argmin(seg))
    return lo + off


def _foot_signals(seq: MotionSequence) -> dict[str, dict[str, np.ndarray]]:
    pos = sequence_positions(seq)
    pelvis = pos[:, seq.skeleton.index("pelvis")]
    out = {}
    for side in ("right", "left"):
        ankle = pos[:, seq.skeleton.index(f"{side}_ankle")]
        out[side] = {
            "anterior": ankle[:, 2] - pelvis[:, 2],
            "height": ankle[:, 1],
            "world": ankle,
        }
    return out


def detect_key_events(
    seq: MotionSequence, config: SegmentationConfig = DEFAULT_SEGMENTATION
) -> list[KeyEvent]:
    """Detect the RL/RE/LL/LE rotation from ankle trajectory extrema."""
    if seq.n_frames < 4:
        raise NoGaitError("no gait detected")
    window = _smoothing_window(seq.fps)
    signals = _foot_signals(seq)
    height_eps = config.height_tolerance_frac * seq.subject_height
    noise_floor = config.noise_floor_frac * seq.subject_height

    smoothed = {}
    for side in ("right", "left"):
        sm = _smooth(signals[side]["anterior"], window)
        if np.ptp(sm) < noise_floor:
            raise NoGaitError("no gait detected")
        smoothed[side] = sm

    local_eps = config.local_min_tolerance_frac * seq.subject_height
    landings: list[tuple[int, str]] = []
    for side in ("right", "left"):
        raw = signals[side]["anterior"]
        height = signals[side]["height"]
        floor = float(height.min())
        seen = set()
        for cand in _local_extrema(smoothed[side], find_max=True):
            f = _refine(raw, cand, window, find_max=True)
            if f in seen:
                continue
            seen.add(f)
            # forward-most moment must coincide with a height local minimum
            lo, hi = max(0, f - window), min(len(height), f + window + 1)
            near_local_min = height[f] <= height[lo:hi].min() + local_eps
            if height[f] <= floor + height_eps and near_local_min:
                landings.append((f, side))
    landings.sort()

    # drop anything before the first right-foot landing
    while landings and landings[0][1] != "right":
        landings.pop(0)
    if len(landings) < 2:
        raise NoGaitError("no gait detected")
    for (fa, sa), (fb, sb) in zip(landings, landings[1:]):
        if sa == sb:
            raise NoGaitError("no gait detected")

    extension_candidates: dict[str, list[int]] = {}
    for side in ("right", "left"):
        raw = signals[side]["anterior"]
        cands = set()
        for cand in _local_extrema(smoothed[side], find_max=False):
            cands.add(_refine(raw, cand, window, find_max=False))
        extension_candidates[side] = sorted(cands)

    events: list[KeyEvent] = []
    for i, (frame, side) in enumerate(landings):
        kind = "RL" if side == "right" else "LL"
        events.append(KeyEvent(kind, frame))
        if i + 1 >= len(landings):
            break
        nxt = landings[i + 1][0]
        best_frame, best_value = None, None
        for s in ("right", "left"):
            raw = signals[s]["anterior"]
            interior = [f for f in extension_candidates[s] if frame < f < nxt]
            if not interior:
                continue
            f = min(interior, key=lambda f: raw[f])
            if best_value is None or raw[f] < best_value:
                best_frame, best_value = f, raw[f]
        if best_frame is None:
            # motion always has a most-rearward interior frame; fall back to it
            span = np.arange(frame + 1, nxt)
            if len(span) == 0:
                raise NoGaitError("no gait detected")
            stacked = np.minimum(
                signals["right"]["anterior"][span], signals["left"]["anterior"][span]
            )
            best_frame = int(span[np.argmin(stacked)])
        events.append(KeyEvent("RE" if kind == "RL" else "LE", best_frame))

    if len(events) < 4:
        raise NoGaitError("no gait detected")
    return events


def assign_phase(seq: MotionSequence, events: list[KeyEvent]) -> np.ndarray:
    """Per-frame phase: linear between events, linear extrapolation outside."""
    if len(events) < 2:
        raise NoGaitError("need at least two events to assign phase")
    frames = np.array([e.frame_index for e in events], dtype=float)
    unwrapped = np.empty(len(events))
    unwrapped[0] = events[0].phase
    for i in range(1, len(events)):
        step = (events[i].phase - events[i - 1].phase) % 1.0
        unwrapped[i] = unwrapped[i - 1] + (step if step > 0 else 1.0)

    n = seq.n_frames
    t = np.arange(n, dtype=float)
    curve = np.interp(t, frames, unwrapped)
    first_slope = (unwrapped[1] - unwrapped[0]) / (frames[1] - frames[0])
    last_slope = (unwrapped[-1] - unwrapped[-2]) / (frames[-1] - frames[-2])
    before = t < frames[0]
    after = t > frames[-1]
    curve[before] = unwrapped[0] + (t[before] - frames[0]) * first_slope
    curve[after] = unwrapped[-1] + (t[after] - frames[-1]) * last_slope
    return curve % 1.0


def extract_cycles(events: list[KeyEvent]) -> list[tuple[int, int]]:
    """One cycle per consecutive pair of right-foot landings."""
    rl = [e.frame_index for e in events if e.kind == "RL"]
    if len(rl) < 2:
        raise NoCycleError("no complete cycle")
    return [(a, b) for a, b in zip(rl, rl[1:])]


def _ankle_speed(world: np.ndarray, fps: float) -> np.ndarray:
    """Per-frame speed as the smaller one-sided difference.

    A frame bordering a stationary interval counts as stationary, so contact
    intervals include both the landing and the lift-off frame.
    """
    steps = np.linalg.norm(np.diff(world, axis=0), axis=-1) * fps
    n = len(world)
    speed = np.empty(n)
    speed[0] = steps[0]
    speed[-1] = steps[-1]
    if n > 2:
        speed[1:-1] = np.minimum(steps[:-1], steps[1:])
    return speed


def detect_foot_contacts(
    seq: MotionSequence,
    events: list[KeyEvent],
    config: SegmentationConfig = DEFAULT_SEGMENTATION,
) -> dict[str, list[tuple[int, int]]]:
    """Per-foot contact intervals: ankle near its cycle height minimum and slow."""
    signals = _foot_signals(seq)
    height_eps = config.height_tolerance_frac * seq.subject_height
    n = seq.n_frames
    out: dict[str, list[tuple[int, int]]] = {}
    for side in ("right", "left"):
        kind = "RL" if side == "right" else "LL"
        anchors = [e.frame_index for e in events if e.kind == kind]
        bounds = [0, *anchors, n - 1]
        spans = [
            (a, b) for a, b in zip(bounds, bounds[1:]) if b > a
        ] or [(0, n - 1)]
        height = signals[side]["height"]
        speed = _ankle_speed(signals[side]["world"], seq.fps)
        mask = np.zeros(n, dtype=bool)
        for a, b in spans:
            seg = slice(a, b + 1)
            hmin = float(height[seg].min())
            mask[seg] |= (height[seg] <= hmin + height_eps) & (
                speed[seg] < config.contact_speed_limit
            )
        intervals: list[tuple[int, int]] = []
        i = 0
        while i < n:
            if mask[i]:
                j = i
                while j + 1 < n and mask[j + 1]:
                    j += 1
                if intervals and i - intervals[-1][1] <= config.contact_merge_gap:
                    intervals[-1] = (intervals[-1][0], j)
                else:
                    intervals.append((i, j))
                i = j + 1
            else:
                i += 1
        out[side] = intervals
    return out


def segment_motion(
    seq: MotionSequence, config: SegmentationConfig = DEFAULT_SEGMENTATION
) -> CycleSegmentation:
    """Run the full segmentation pipeline on a normalized sequence."""
    events = detect_key_events(seq, config)
    phase_curve = assign_phase(seq, events)
    cycles = extract_cycles(events)
    contacts = detect_foot_contacts(seq, events, config)
    return CycleSegmentation(
        events=tuple(events),
        phase_curve=phase_curve,
        cycles=tuple(cycles),
        contacts={k: tuple(v) for k, v in contacts.items()},
    )
