"""Biomechanical attribute language: meta descriptors, validation, retrieval.

An attribute is a meta tuple [name, type, J_A, J_o, J_B, axis, side, phase]
describing how a quantity is measured on the skeleton:

  P1  distance between the tracked joint J_o and the base joint J_A
  P2  signed component of (J_o - J_A) along an axis
  A1  angle at vertex J_o between the rays to J_A and J_B
  A2  angle between the bone vector (J_A - J_o) and an axis
  T1  per-cycle timing (cycle-time fraction) of a phase moment
  T2  per-cycle duration fraction of a phase range or foot contact
  CAT registered categorical classifier (strike mode, wrist crossing)

Angular values are radians in [0, pi]; positional values are meters;
temporal values are cycle fractions in [0, 1].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gait import CycleSegmentation
from .skeleton import MotionSequence, Skeleton, sequence_positions

SUBTYPES = ("P1", "P2", "A1", "A2", "T1", "T2", "CAT")
CATEGORY_BY_SUBTYPE = {
    "P1": "positional",
    "P2": "positional",
    "A1": "angular",
    "A2": "angular",
    "T1": "temporal",
    "T2": "temporal",
    "CAT": "categorical",
}
AXES = {"X": np.array([1.0, 0.0, 0.0]), "Y": np.array([0.0, 1.0, 0.0]), "Z": np.array([0.0, 0.0, 1.0])}
SIDES = ("left", "neutral", "right")
CLASSIFIERS = ("strike_mode", "wrist_crossing")
STRIKE_CATEGORIES = ("fore", "mid", "rear")

PHASE_MATCH_TOLERANCE = 0.1
STRIKE_DELTA_FRAC = 0.01  # of subject height


@dataclass(frozen=True)
class AttributeMeta:
    name: str
    subtype: str
    j_a: str | None = None
    j_o: str | None = None
    j_b: str | None = None
    axis: str | None = None
    side: str = "neutral"
    phase: float | tuple[float, float] | None = None
    extremum: str | None = None  # per-cycle sampling when no phase is bound
    classifier: str | None = None  # CAT only

    @property
    def category(self) -> str:
        return CATEGORY_BY_SUBTYPE.get(self.subtype, "unknown")

    def to_doc(self) -> dict:
        phase: float | list[float] | None
        if isinstance(self.phase, tuple):
            phase = [self.phase[0], self.phase[1]]
        else:
            phase = self.phase
        doc = {
            "name": self.name,
            "class": self.category,
            "subtype": self.subtype,
            "jA": self.j_a,
            "jO": self.j_o,
            "jB": self.j_b,
            "axis": self.axis,
            "side": self.side,
            "phase": phase,
        }
        if self.extremum is not None:
            doc["extremum"] = self.extremum
        if self.classifier is not None:
            doc["classifier"] = self.classifier
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "AttributeMeta":
        phase = doc.get("phase")
        if isinstance(phase, (list, tuple)):
            phase = (float(phase[0]), float(phase[1]))
        elif phase is not None:
            phase = float(phase)
        return cls(
            name=str(doc.get("name", "")),
            subtype=str(doc.get("subtype", "")),
            j_a=doc.get("jA"),
            j_o=doc.get("jO"),
            j_b=doc.get("jB"),
            axis=doc.get("axis"),
            side=doc.get("side", "neutral"),
            phase=phase,
            extremum=doc.get("extremum"),
            classifier=doc.get("classifier"),
        )


@dataclass(frozen=True)
class MetaIssue:
    field: str
    message: str

    def __str__(self):
        return f"{self.field}: {self.message}"


@dataclass(frozen=True)
class CycleValue:
    cycle: int
    value: float | str | None
    frame: int | None = None


@dataclass(frozen=True)
class AttributeSeries:
    meta: AttributeMeta
    per_cycle: tuple[CycleValue, ...]
    per_frame: np.ndarray | None = None


def _require(meta, issues, **fields):
    for name, label in fields.items():
        if getattr(meta, name) is None:
            issues.append(MetaIssue(name, f"{meta.subtype} requires {label}"))


def _forbid(meta, issues, *names):
    for name in names:
        if getattr(meta, name) is not None:
            issues.append(MetaIssue(name, f"{meta.subtype} does not use this field"))


def validate_meta(meta: AttributeMeta, skeleton: Skeleton) -> list[MetaIssue]:
    """Structural validation; an empty result means the meta is usable."""
    issues: list[MetaIssue] = []
    if not meta.name or not meta.name.strip():
        issues.append(MetaIssue("name", "attribute needs a name"))
    if meta.subtype not in SUBTYPES:
        issues.append(MetaIssue("subtype", f"unknown subtype {meta.subtype!r}"))
        return issues
    if meta.side not in SIDES:
        issues.append(MetaIssue("side", f"side must be one of {SIDES}"))

    joint_names = set(skeleton.names)
    for fname in ("j_a", "j_o", "j_b"):
        value = getattr(meta, fname)
        if value is not None and value not in joint_names:
            issues.append(MetaIssue(fname, f"unknown joint {value!r}"))
    if meta.axis is not None and meta.axis not in AXES:
        issues.append(MetaIssue("axis", f"axis must be one of {tuple(AXES)}"))
    if meta.extremum is not None and meta.extremum not in ("max", "min"):
        issues.append(MetaIssue("extremum", "extremum must be 'max' or 'min'"))

    st = meta.subtype
    if st == "P1":
        _require(meta, issues, j_o="a tracked joint", j_a="a base joint")
        _forbid(meta, issues, "j_b", "axis", "classifier")
    elif st == "P2":
        _require(meta, issues, j_o="a tracked joint", j_a="a base joint", axis="axis")
        _forbid(meta, issues, "j_b", "classifier")
    elif st == "A1":
        _require(meta, issues, j_a="an endpoint", j_o="a vertex joint", j_b="an endpoint")
        _forbid(meta, issues, "axis", "classifier")
    elif st == "A2":
        _require(meta, issues, j_o="a base joint", j_a="an end joint", axis="axis")
        _forbid(meta, issues, "j_b", "classifier")
    elif st == "T1":
        _forbid(meta, issues, "j_a", "j_o", "j_b", "axis", "classifier", "extremum")
        if meta.phase is None:
            issues.append(MetaIssue("phase", "T1 requires a phase moment"))
        elif isinstance(meta.phase, tuple):
            issues.append(MetaIssue("phase", "T1 takes a single phase moment, not a range"))
    elif st == "T2":
        _forbid(meta, issues, "j_a", "j_o", "j_b", "axis", "classifier", "extremum")
        if meta.phase is None or not isinstance(meta.phase, tuple):
            issues.append(MetaIssue("phase", "T2 requires a phase range"))
    elif st == "CAT":
        if meta.classifier not in CLASSIFIERS:
            issues.append(
                MetaIssue("classifier", f"CAT requires a registered classifier {CLASSIFIERS}")
            )
        _forbid(meta, issues, "axis", "extremum")

    if st in ("P1", "P2", "A1", "A2") and meta.phase is not None:
        if isinstance(meta.phase, tuple):
            issues.append(MetaIssue("phase", f"{st} takes a single phase moment"))
        elif not 0.0 <= meta.phase < 1.0:
            issues.append(MetaIssue("phase", "phase must lie in [0, 1)"))
    if isinstance(meta.phase, tuple):
        p0, p1 = meta.phase
        if not (0.0 <= p0 <= 1.0 and 0.0 <= p1 <= 1.0):
            issues.append(MetaIssue("phase", "phase range must lie in [0, 1]"))
        elif p0 >= p1:
            issues.append(MetaIssue("phase", "range start exceeds end"))
    elif meta.phase is not None and st in ("T1",):
        if not 0.0 <= meta.phase < 1.0:
            issues.append(MetaIssue("phase", "phase must lie in [0, 1)"))
    return issues


def evaluate_positions(meta: AttributeMeta, positions: np.ndarray, skeleton: Skeleton) -> np.ndarray:
    """Raw per-frame value of a positional/angular meta from FK positions.

    positions: (n, J, 3). Returns (n,) array.
    """
    st = meta.subtype
    a = positions[:, skeleton.index(meta.j_a)] if meta.j_a else None
    o = positions[:, skeleton.index(meta.j_o)] if meta.j_o else None
    if st == "P1":
        return np.linalg.norm(o - a, axis=-1)
    if st == "P2":
        return (o - a) @ AXES[meta.axis]
    if st == "A1":
        b = positions[:, skeleton.index(meta.j_b)]
        u = a - o
        v = b - o
        cross = np.linalg.norm(np.cross(u, v), axis=-1)
        dot = np.sum(u * v, axis=-1)
        return np.arctan2(cross, dot)
    if st == "A2":
        v = a - o
        axis = AXES[meta.axis]
        cross = np.linalg.norm(np.cross(v, axis[None, :]), axis=-1)
        dot = v @ axis
        return np.arctan2(cross, dot)
    raise ValueError(f"{st} has no per-frame positional evaluation")


def _unwrapped_cycle_phase(phase_curve: np.ndarray, start: int, end: int) -> np.ndarray:
    seg = np.array(phase_curve[start : end + 1], copy=True)
    for i in range(1, len(seg)):
        while seg[i] < seg[i - 1] - 0.5:
            seg[i] += 1.0
    return seg


def _phase_frame(phase_curve: np.ndarray, start: int, end: int, p: float) -> float | None:
    """Fractional frame within [start, end] at which the phase crosses p."""
    seg = _unwrapped_cycle_phase(phase_curve, start, end)
    target = p
    if target < seg[0]:
        target += 1.0
    if target < seg[0] - 1e-9 or target > seg[-1] + 1e-9:
        return None
    return start + float(np.interp(target, seg, np.arange(len(seg), dtype=float)))


def _nearest_phase_frame(
    phase_curve: np.ndarray, start: int, end: int, p: float
) -> tuple[int | None, float]:
    seg = phase_curve[start : end + 1]
    dist = np.abs(seg - p)
    dist = np.minimum(dist, 1.0 - dist)
    idx = int(np.argmin(dist))
    return start + idx, float(dist[idx])


def _landing_frame(seg: CycleSegmentation, cycle: tuple[int, int], side: str) -> int | None:
    start, end = cycle
    if side == "right":
        return start
    for e in seg.events:
        if e.kind == "LL" and start <= e.frame_index <= end:
            return e.frame_index
    return None


def classify_strike(
    seq: MotionSequence, seg: CycleSegmentation, side: str
) -> list[str | None]:
    """Per-cycle strike category from toe vs ankle height at landing."""
    positions = sequence_positions(seq)
    ankle = positions[:, seq.skeleton.index(f"{side}_ankle")]
    toe = positions[:, seq.skeleton.index(f"{side}_foot")]
    delta = STRIKE_DELTA_FRAC * seq.subject_height
    out: list[str | None] = []
    for cycle in seg.cycles:
        frame = _landing_frame(seg, cycle, side)
        if frame is None:
            out.append(None)
            continue
        gap = float(toe[frame, 1] - ankle[frame, 1])
        if gap < -delta:
            out.append("fore")
        elif gap > delta:
            out.append("rear")
        else:
            out.append("mid")
    return out


def _wrist_crossing(
    seq: MotionSequence, seg: CycleSegmentation, side: str
) -> list[str | None]:
    positions = sequence_positions(seq)
    lateral = (
        positions[:, seq.skeleton.index(f"{side}_wrist"), 0]
        - positions[:, seq.skeleton.index("pelvis"), 0]
    )
    out: list[str | None] = []
    for start, end in seg.cycles:
        seg_x = lateral[start : end + 1]
        crossed = bool(seg_x.min() < 0.0 < seg_x.max())
        out.append("crossing" if crossed else "clear")
    return out


def retrieve(
    seq: MotionSequence, seg: CycleSegmentation, meta: AttributeMeta
) -> AttributeSeries:
    """Per-cycle (and per-frame where applicable) values of an attribute."""
    st = meta.subtype
    cycles = seg.cycles
    if st in ("P1", "P2", "A1", "A2"):
        series = evaluate_positions(meta, sequence_positions(seq), seq.skeleton)
        values: list[CycleValue] = []
        for ci, (start, end) in enumerate(cycles):
            if meta.phase is not None:
                frame, dist = _nearest_phase_frame(seg.phase_curve, start, end, meta.phase)
                if frame is None or dist > PHASE_MATCH_TOLERANCE:
                    values.append(CycleValue(ci, None, None))
                else:
                    values.append(CycleValue(ci, float(series[frame]), frame))
            else:
                window = series[start : end + 1]
                if meta.extremum == "min":
                    idx = int(np.argmin(window))
                else:
                    idx = int(np.argmax(window))
                values.append(CycleValue(ci, float(window[idx]), start + idx))
        return AttributeSeries(meta=meta, per_cycle=tuple(values), per_frame=series)

    if st == "T1":
        values = []
        for ci, (start, end) in enumerate(cycles):
            f = _phase_frame(seg.phase_curve, start, end, float(meta.phase))
            if f is None:
                values.append(CycleValue(ci, None, None))
            else:
                values.append(
                    CycleValue(ci, (f - start) / (end - start), int(round(f)))
                )
        return AttributeSeries(meta=meta, per_cycle=tuple(values))

    if st == "T2":
        values = []
        p0, p1 = meta.phase
        for ci, (start, end) in enumerate(cycles):
            f0 = _phase_frame(seg.phase_curve, start, end, p0)
            f1 = _phase_frame(seg.phase_curve, start, end, p1)
            if f0 is None or f1 is None or f1 < f0:
                values.append(CycleValue(ci, None, None))
            else:
                values.append(
                    CycleValue(ci, (f1 - f0) / (end - start), int(round(f0)))
                )
        return AttributeSeries(meta=meta, per_cycle=tuple(values))

    if st == "CAT":
        side = meta.side if meta.side in ("left", "right") else "right"
        if meta.classifier == "strike_mode":
            cats = classify_strike(seq, seg, side)
        else:
            cats = _wrist_crossing(seq, seg, side)
        values = [
            CycleValue(ci, cat, _landing_frame(seg, cycle, side))
            for ci, (cat, cycle) in enumerate(zip(cats, cycles))
        ]
        return AttributeSeries(meta=meta, per_cycle=tuple(values))

    raise ValueError(f"unknown subtype {st!r}")


@dataclass(frozen=True)
class ProfileSnapshot:
    """Transverse-plane projections relative to the body center, per cycle."""

    wrists: dict[str, list[tuple[float, float]]]  # per-cycle mean (x, z)
    knees: dict[str, list[tuple[float, float]]]
    feet: dict[str, list[tuple[float, float] | None]]  # ankle (x, z) at landing
    strike: dict[str, list[str | None]]
    wrist_crossing: dict[str, list[str | None]]

    def to_doc(self) -> dict:
        def pts(rows):
            return [list(p) if p is not None else None for p in rows]

        return {
            "wrists": {s: pts(v) for s, v in self.wrists.items()},
            "knees": {s: pts(v) for s, v in self.knees.items()},
            "feet": {s: pts(v) for s, v in self.feet.items()},
            "strike": dict(self.strike),
            "wristCrossing": dict(self.wrist_crossing),
        }


def build_profile(seq: MotionSequence, seg: CycleSegmentation) -> ProfileSnapshot:
    positions = sequence_positions(seq)
    pelvis = positions[:, seq.skeleton.index("pelvis")]

    def mean_projection(joint: str) -> dict[str, list[tuple[float, float]]]:
        out = {}
        for side in ("left", "right"):
            rel = positions[:, seq.skeleton.index(f"{side}_{joint}")] - pelvis
            rows = []
            for start, end in seg.cycles:
                window = rel[start : end + 1]
                rows.append((float(window[:, 0].mean()), float(window[:, 2].mean())))
            out[side] = rows
        return out

    feet: dict[str, list[tuple[float, float] | None]] = {}
    for side in ("left", "right"):
        rel = positions[:, seq.skeleton.index(f"{side}_ankle")] - pelvis
        rows: list[tuple[float, float] | None] = []
        for cycle in seg.cycles:
            frame = _landing_frame(seg, cycle, side)
            rows.append(
                (float(rel[frame, 0]), float(rel[frame, 2])) if frame is not None else None
            )
        feet[side] = rows

    return ProfileSnapshot(
        wrists=mean_projection("wrist"),
        knees=mean_projection("knee"),
        feet=feet,
        strike={s: classify_strike(seq, seg, s) for s in ("left", "right")},
        wrist_crossing={s: _wrist_crossing(seq, seg, s) for s in ("left", "right")},
    )


def _sided(name: str, side: str) -> str:
    return f"{name} ({side})"


def catalog_metas() -> list[AttributeMeta]:
    """The pre-defined attribute catalog (sided entries expanded)."""
    metas: list[AttributeMeta] = []
    for side in ("left", "right"):
        landing_phase = 0.0 if side == "right" else 0.5
        extension_phase = 0.25 if side == "right" else 0.75
        metas.extend(
            [
                AttributeMeta(
                    _sided("foot landing position", side),
                    "P2",
                    j_o=f"{side}_ankle",
                    j_a="pelvis",
                    axis="Z",
                    side=side,
                    phase=landing_phase,
                ),
                AttributeMeta(
                    _sided("knee lift", side),
                    "P2",
                    j_o=f"{side}_knee",
                    j_a="pelvis",
                    axis="Y",
                    side=side,
                    extremum="max",
                ),
                AttributeMeta(
                    _sided("elbow angle", side),
                    "A1",
                    j_a=f"{side}_shoulder",
                    j_o=f"{side}_elbow",
                    j_b=f"{side}_wrist",
                    side=side,
                    phase=landing_phase,
                ),
                AttributeMeta(
                    _sided("back-kick height", side),
                    "P2",
                    j_o=f"{side}_ankle",
                    j_a="pelvis",
                    axis="Y",
                    side=side,
                    phase=extension_phase,
                ),
                AttributeMeta(
                    _sided("wrist-to-center distance", side),
                    "P1",
                    j_o=f"{side}_wrist",
                    j_a="pelvis",
                    side=side,
                    extremum="max",
                ),
                AttributeMeta(
                    _sided("foot contact time", side),
                    "T2",
                    side=side,
                    phase=(landing_phase, extension_phase),
                ),
                AttributeMeta(
                    _sided("strike mode", side),
                    "CAT",
                    j_o=f"{side}_ankle",
                    side=side,
                    classifier="strike_mode",
                ),
                AttributeMeta(
                    _sided("wrist crossing", side),
                    "CAT",
                    j_o=f"{side}_wrist",
                    side=side,
                    classifier="wrist_crossing",
                ),
            ]
        )
    metas.append(
        AttributeMeta("upper-body lean", "A2", j_o="pelvis", j_a="neck", axis="Y", extremum="max")
    )
    metas.append(AttributeMeta("landing symmetry", "T1", phase=0.5))
    order = {
        "foot landing position": 0,
        "knee lift": 1,
        "elbow angle": 2,
        "upper-body lean": 3,
        "back-kick height": 4,
        "wrist-to-center distance": 5,
        "foot contact time": 6,
        "landing symmetry": 7,
        "strike mode": 8,
        "wrist crossing": 9,
    }

    def key(meta: AttributeMeta):
        base = meta.name.split(" (")[0]
        return (order[base], meta.side)

    return sorted(metas, key=key)
