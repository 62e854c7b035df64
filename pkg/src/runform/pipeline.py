"""End-to-end session pipeline and report/animation document building.

Stages: normalize -> segment -> align -> retrieve -> compare -> summarize.
Failures are re-raised as PipelineError with the stage name so callers can
tell a bad input apart from a bad comparison. Documents are serialized with
a canonical JSON encoding, making reports byte-identical across runs and
across the CLI/HTTP surfaces.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .alignment import CorrespondenceMap, anchored_align
from .attributes import (
    AttributeMeta,
    AttributeSeries,
    build_profile,
    catalog_metas,
    retrieve,
    validate_meta,
)
from .comparison import (
    AttributeDiff,
    AttributeSummary,
    ComparisonConfig,
    SuggestionReport,
    compare_attribute,
    summarize,
)
from .errors import (
    EngineError,
    NothingToCompareError,
    PipelineError,
    UnknownSuggestionError,
)
from .feedback import (
    DEFAULT_CLIP_FRAMES,
    DEFAULT_HOLD_FRAMES,
    build_animation,
    lateral_viewpoint,
    solve_corrected_pose,
    suggest_viewpoint,
)
from .gait import CycleSegmentation, segment_motion
from .motion_io import normalize_orientation
from .skeleton import MotionSequence


def canonical_json(obj) -> bytes:
    """Deterministic JSON bytes; construction order defines key order."""
    return json.dumps(
        obj, ensure_ascii=False, separators=(",", ":"), allow_nan=False
    ).encode("utf-8")


def suggestion_id(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "attribute"


@dataclass
class SessionComputation:
    sample: MotionSequence
    exemplar: MotionSequence
    sample_seg: CycleSegmentation
    exemplar_seg: CycleSegmentation
    correspondence: CorrespondenceMap
    metas: list[AttributeMeta]
    series: dict[str, tuple[AttributeSeries, AttributeSeries]]
    report: SuggestionReport
    cfg: ComparisonConfig
    report_doc: dict = field(default_factory=dict)

    def report_bytes(self) -> bytes:
        return canonical_json(self.report_doc)

    def summary_by_id(self, sid: str) -> AttributeSummary:
        for row in self.report.attributes:
            if row.suggested and suggestion_id(row.meta.name) == sid:
                return row
        raise UnknownSuggestionError(f"unknown suggestion id: {sid}")


def _stage(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except EngineError as e:
        raise PipelineError(stage, e) from e


def _circular_mean_phase(phases: list[float]) -> float:
    if not phases:
        return 0.0
    angles = np.array(phases) * 2.0 * math.pi
    mean = math.atan2(float(np.sin(angles).mean()), float(np.cos(angles).mean()))
    return (mean / (2.0 * math.pi)) % 1.0


def _phase_hint(
    meta: AttributeMeta, series: AttributeSeries, seg: CycleSegmentation
) -> float:
    if isinstance(meta.phase, tuple):
        return (meta.phase[0] + meta.phase[1]) / 2.0
    if meta.phase is not None:
        return float(meta.phase)
    phases = [
        float(seg.phase_curve[cv.frame])
        for cv in series.per_cycle
        if cv.frame is not None
    ]
    return _circular_mean_phase(phases)


def run_session(
    sample: MotionSequence,
    exemplar: MotionSequence,
    user_metas: list[AttributeMeta] | None = None,
    cfg: ComparisonConfig | None = None,
) -> SessionComputation:
    """Execute the whole comparison pipeline for one sample/exemplar pair."""
    cfg = cfg or ComparisonConfig()
    user_metas = list(user_metas or [])
    metas = catalog_metas()
    names = {m.name for m in metas}
    for meta in user_metas:
        issues = validate_meta(meta, sample.skeleton)
        if issues:
            raise PipelineError("attributes", EngineError("; ".join(map(str, issues))))
        if meta.name in names:
            raise PipelineError("attributes", EngineError("name already defined"))
        names.add(meta.name)
        metas.append(meta)

    sample_n = _stage("normalization", normalize_orientation, sample)
    exemplar_n = _stage("normalization", normalize_orientation, exemplar)
    sample_seg = _stage("segmentation", segment_motion, sample_n)
    exemplar_seg = _stage("segmentation", segment_motion, exemplar_n)
    correspondence = _stage(
        "alignment", anchored_align, sample_n, sample_seg, exemplar_n, exemplar_seg
    )

    series: dict[str, tuple[AttributeSeries, AttributeSeries]] = {}
    per_attribute: list[tuple[AttributeMeta, list[AttributeDiff]]] = []
    for meta in metas:
        s_series = _stage("retrieval", retrieve, sample_n, sample_seg, meta)
        e_series = _stage("retrieval", retrieve, exemplar_n, exemplar_seg, meta)
        series[meta.name] = (s_series, e_series)
        try:
            diffs = compare_attribute(
                s_series,
                e_series,
                correspondence.cycle_pairs,
                cfg,
                sample_n.subject_height,
                exemplar_n.subject_height,
            )
        except NothingToCompareError:
            diffs = []
        per_attribute.append((meta, diffs))

    if all(not diffs for _, diffs in per_attribute):
        raise PipelineError("comparison", NothingToCompareError("nothing to compare"))

    profiles = {
        "sample": build_profile(sample_n, sample_seg).to_doc(),
        "exemplar": build_profile(exemplar_n, exemplar_seg).to_doc(),
    }
    report = _stage("comparison", summarize, per_attribute, profiles, cfg)

    comp = SessionComputation(
        sample=sample_n,
        exemplar=exemplar_n,
        sample_seg=sample_seg,
        exemplar_seg=exemplar_seg,
        correspondence=correspondence,
        metas=metas,
        series=series,
        report=report,
        cfg=cfg,
    )
    comp.report_doc = _build_report_doc(comp)
    return comp


def _segment_doc(seq: MotionSequence, seg: CycleSegmentation) -> dict:
    return {
        "frames": seq.n_frames,
        "fps": float(seq.fps),
        "subjectHeight": float(seq.subject_height),
        "cycles": [[int(a), int(b)] for a, b in seg.cycles],
        "events": [
            {"kind": e.kind, "frame": int(e.frame_index), "phase": e.phase}
            for e in seg.events
        ],
        "contacts": {
            side: [[int(a), int(b)] for a, b in intervals]
            for side, intervals in seg.contacts.items()
        },
    }


def _cycle_row(d: AttributeDiff) -> dict:
    return {
        "cycle": int(d.cycle),
        "sampleValue": d.sample_value if isinstance(d.sample_value, str) else float(d.sample_value),
        "exemplarValue": d.exemplar_value
        if isinstance(d.exemplar_value, str)
        else float(d.exemplar_value),
        "sampleNorm": None if d.sample_norm is None else float(d.sample_norm),
        "exemplarNorm": None if d.exemplar_norm is None else float(d.exemplar_norm),
        "relError": None if d.rel_error is None else float(d.rel_error),
        "significant": bool(d.significant),
        "direction": d.direction,
    }


def _build_report_doc(comp: SessionComputation) -> dict:
    catalog_names = {m.name for m in catalog_metas()}
    rows = []
    for summary in comp.report.attributes:
        meta = summary.meta
        s_series, _ = comp.series[meta.name]
        hint = _phase_hint(meta, s_series, comp.sample_seg)
        sid = suggestion_id(meta.name) if summary.suggested else None
        summary.phase_hint = hint
        summary.suggestion_id = sid
        rows.append(
            {
                "meta": meta.to_doc(),
                "name": meta.name,
                "kind": summary.kind,
                "lane": summary.lane,
                "custom": meta.name not in catalog_names,
                "phaseHint": float(hint),
                "score": float(summary.score),
                "glyphWeight": float(summary.glyph_weight),
                "suggested": bool(summary.suggested),
                "suggestionId": sid,
                "direction": summary.direction,
                "cycles": [_cycle_row(d) for d in summary.cycles],
            }
        )
    suggestions = [
        {
            "id": r["suggestionId"],
            "name": r["name"],
            "kind": r["kind"],
            "class": r["meta"]["class"],
            "side": r["meta"]["side"],
            "lane": r["lane"],
            "custom": r["custom"],
            "phaseHint": r["phaseHint"],
            "score": r["score"],
            "glyphWeight": r["glyphWeight"],
            "direction": r["direction"],
        }
        for r in rows
        if r["suggested"]
    ]
    return {
        "version": "1",
        "engine": f"runform/{__version__}",
        "config": comp.cfg.to_doc(),
        "sample": _segment_doc(comp.sample, comp.sample_seg),
        "exemplar": _segment_doc(comp.exemplar, comp.exemplar_seg),
        "pairedCycles": [[int(a), int(b)] for a, b in comp.correspondence.cycle_pairs],
        "alignmentCost": float(comp.correspondence.cost),
        "attributes": rows,
        "suggestions": suggestions,
        "profiles": comp.report.profiles,
    }


def _worst_cycle(diffs: list[AttributeDiff]) -> AttributeDiff:
    sig = [d for d in diffs if d.significant]
    pool = sig or diffs
    numeric = [d for d in pool if d.rel_error is not None]
    if numeric:
        return sorted(numeric, key=lambda d: (-d.rel_error, d.cycle))[0]
    return sorted(pool, key=lambda d: d.cycle)[0]


def build_suggestion_animation(
    comp: SessionComputation,
    sid: str,
    n_frames: int = DEFAULT_CLIP_FRAMES,
) -> dict:
    """Animation document for one suggestion: keyframes, marker, viewpoint."""
    summary = comp.summary_by_id(sid)
    meta = summary.meta
    diff = _worst_cycle(summary.cycles)
    frame_idx = diff.sample_frame
    if frame_idx is None:
        frame_idx = comp.sample_seg.cycles[diff.cycle][0]
    wrong = comp.sample.frame(frame_idx)
    skeleton = comp.sample.skeleton

    if meta.category in ("temporal", "categorical"):
        viewpoint = lateral_viewpoint(meta.side, skeleton.tpose_height())
        if meta.category == "temporal":
            marker = {
                "kind": "temporal",
                "sampleFraction": float(diff.sample_value),
                "exemplarFraction": float(diff.exemplar_value),
                "direction": diff.direction,
            }
        else:
            marker = {
                "kind": "categorical",
                "sample": diff.sample_value,
                "target": diff.exemplar_value,
            }
        frames = (wrong, wrong)
        target_value = diff.exemplar_value
        hold = DEFAULT_HOLD_FRAMES
        fps = 30.0
        frames_doc = [
            {
                "q": [[float(c) for c in q] for q in f.rotations],
                "t": [float(c) for c in f.root_translation],
            }
            for f in frames
        ]
        return {
            "id": sid,
            "attribute": meta.to_doc(),
            "cycle": int(diff.cycle),
            "fps": fps,
            "durationFrames": len(frames),
            "holdFrames": hold,
            "frames": frames_doc,
            "marker": marker,
            "viewpoint": viewpoint.to_doc(),
            "wrongValue": diff.sample_value,
            "targetValue": target_value,
            "skeleton": skeleton.to_doc(),
        }

    target = float(diff.exemplar_value)
    if meta.category == "positional":
        target *= comp.sample.subject_height / comp.exemplar.subject_height
    try:
        corrected = solve_corrected_pose(wrong, skeleton, meta, target)
    except EngineError as e:
        raise PipelineError("feedback", e) from e
    anim = build_animation(wrong, corrected, skeleton, meta, n_frames=n_frames)
    viewpoint = suggest_viewpoint(wrong, skeleton, meta, corrected=corrected)
    return {
        "id": sid,
        "attribute": meta.to_doc(),
        "cycle": int(diff.cycle),
        "fps": float(anim.fps),
        "durationFrames": anim.duration_frames,
        "holdFrames": anim.hold_frames,
        "frames": [
            {
                "q": [[float(c) for c in q] for q in f.rotations],
                "t": [float(c) for c in f.root_translation],
            }
            for f in anim.frames
        ],
        "marker": anim.marker,
        "viewpoint": viewpoint.to_doc(),
        "wrongValue": float(diff.sample_value),
        "targetValue": target,
        "skeleton": skeleton.to_doc(),
    }
