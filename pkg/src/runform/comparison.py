"""Attribute comparison: normalization, per-cycle relative errors, summary.

Values are normalized to [0, 1] before differencing: angles divide by pi,
positions divide by the subject's own height (so different statures compare
fairly), temporal fractions pass through. The relative error divides by the
exemplar's normalized value with a floor that prevents blow-up near zero.
An attribute cycle counts as significant only when its relative error
strictly exceeds the threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .attributes import AttributeMeta, AttributeSeries
from .errors import NothingToCompareError


@dataclass(frozen=True)
class ComparisonConfig:
    threshold: float = 0.25
    rel_error_floor: float = 0.05

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.rel_error_floor <= 0:
            raise ValueError("rel_error_floor must be positive")

    def to_doc(self) -> dict:
        return {"threshold": self.threshold, "relErrorFloor": self.rel_error_floor}


def normalize_value(value: float, meta: AttributeMeta, subject_height: float) -> float:
    """Map a raw attribute value into [0, 1]; sign lives in the direction."""
    cat = meta.category
    if cat == "angular":
        return value / math.pi
    if cat == "positional":
        return min(abs(value) / subject_height, 1.0)
    if cat == "temporal":
        return min(max(value, 0.0), 1.0)
    raise ValueError(f"no numeric normalization for {cat} attributes")


_POSITIONAL_SENSES = {
    "X": ("move right", "move left"),
    "Y": ("lower", "raise"),
    "Z": ("move backward", "move forward"),
}


def correction_sense(meta: AttributeMeta, sample: float, exemplar: float) -> str:
    """Human-readable correction for the sign of (sample - exemplar)."""
    if sample == exemplar:
        return "hold"
    high = sample > exemplar
    cat = meta.category
    if cat == "angular":
        return "decrease angle" if high else "increase angle"
    if cat == "positional":
        if meta.subtype == "P2":
            over, under = _POSITIONAL_SENSES[meta.axis]
            return over if high else under
        return "decrease distance" if high else "increase distance"
    if meta.subtype == "T1":
        return "earlier" if high else "later"
    return "shorten" if high else "lengthen"


@dataclass(frozen=True)
class AttributeDiff:
    meta: AttributeMeta
    cycle: int  # sample cycle index
    sample_value: float | str
    exemplar_value: float | str
    sample_norm: float | None
    exemplar_norm: float | None
    rel_error: float | None
    significant: bool
    direction: str
    sample_frame: int | None = None


def compare_attribute(
    sample: AttributeSeries,
    exemplar: AttributeSeries,
    pairing: tuple[tuple[int, int], ...],
    cfg: ComparisonConfig,
    sample_height: float,
    exemplar_height: float,
) -> list[AttributeDiff]:
    """Per paired cycle differences; cycles with missing values are skipped."""
    if sample.meta.name != exemplar.meta.name or sample.meta.subtype != exemplar.meta.subtype:
        raise ValueError("series being compared must share their meta")
    meta = sample.meta
    diffs: list[AttributeDiff] = []
    for si, ei in pairing:
        if si >= len(sample.per_cycle) or ei >= len(exemplar.per_cycle):
            continue
        sv = sample.per_cycle[si]
        ev = exemplar.per_cycle[ei]
        if sv.value is None or ev.value is None:
            continue
        if meta.category == "categorical":
            mismatch = sv.value != ev.value
            diffs.append(
                AttributeDiff(
                    meta=meta,
                    cycle=si,
                    sample_value=sv.value,
                    exemplar_value=ev.value,
                    sample_norm=None,
                    exemplar_norm=None,
                    rel_error=None,
                    significant=mismatch,
                    direction=f"aim for {ev.value}" if mismatch else "hold",
                    sample_frame=sv.frame,
                )
            )
            continue
        s_norm = normalize_value(sv.value, meta, sample_height)
        e_norm = normalize_value(ev.value, meta, exemplar_height)
        rel = abs(s_norm - e_norm) / max(e_norm, cfg.rel_error_floor)
        diffs.append(
            AttributeDiff(
                meta=meta,
                cycle=si,
                sample_value=sv.value,
                exemplar_value=ev.value,
                sample_norm=s_norm,
                exemplar_norm=e_norm,
                rel_error=rel,
                significant=rel > cfg.threshold,
                direction=correction_sense(meta, sv.value, ev.value),
                sample_frame=sv.frame,
            )
        )
    if not diffs:
        raise NothingToCompareError("nothing to compare")
    return diffs


@dataclass
class AttributeSummary:
    meta: AttributeMeta
    cycles: list[AttributeDiff]
    score: float
    glyph_weight: float
    suggested: bool
    direction: str
    lane: str
    phase_hint: float | None = None
    suggestion_id: str | None = None

    @property
    def kind(self) -> str:
        return "categorical" if self.meta.category == "categorical" else "numeric"


@dataclass
class SuggestionReport:
    attributes: list[AttributeSummary]
    profiles: dict = field(default_factory=dict)

    @property
    def suggestions(self) -> list[AttributeSummary]:
        return [a for a in self.attributes if a.suggested]


def _majority_direction(diffs: list[AttributeDiff]) -> str:
    counts: dict[str, int] = {}
    for d in diffs:
        counts[d.direction] = counts.get(d.direction, 0) + 1
    return max(counts.items(), key=lambda kv: (kv[1], kv[0]))[0]


def summarize(
    per_attribute_diffs: list[tuple[AttributeMeta, list[AttributeDiff]]],
    profiles: dict | None = None,
    cfg: ComparisonConfig | None = None,
) -> SuggestionReport:
    """Aggregate per-cycle diffs into the timeline summary.

    Numeric score: mean relative error over significant cycles, scaled by the
    fraction of significant cycles. Categorical score: the mismatch fraction,
    suggested only when mismatches hold the majority. Glyph weights divide by
    the report's maximum score and clamp into [0.2, 1.0].
    """
    cfg = cfg or ComparisonConfig()
    rows: list[AttributeSummary] = []
    for meta, diffs in per_attribute_diffs:
        sig = [d for d in diffs if d.significant]
        if meta.category == "categorical":
            frac = len(sig) / len(diffs) if diffs else 0.0
            suggested = frac > 0.5
            score = frac if suggested else 0.0
        else:
            if sig:
                mean_err = sum(d.rel_error for d in sig) / len(sig)
                score = mean_err * (len(sig) / len(diffs))
                suggested = True
            else:
                score = 0.0
                suggested = False
        direction = _majority_direction(sig) if sig else "hold"
        rows.append(
            AttributeSummary(
                meta=meta,
                cycles=diffs,
                score=score,
                glyph_weight=0.0,
                suggested=suggested,
                direction=direction,
                lane=meta.side,
            )
        )

    max_score = max((r.score for r in rows if r.suggested), default=0.0)
    for r in rows:
        if r.suggested and max_score > 0:
            r.glyph_weight = min(max(r.score / max_score, 0.2), 1.0)
    return SuggestionReport(attributes=rows, profiles=profiles or {})
