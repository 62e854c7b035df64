"""Temporal alignment between two motions.

Sequences are first anchored at shared key events, then dynamic time warping
runs independently inside each anchor interval. Pose similarity is the
weighted sum of per-joint geodesic rotation angles; the root is excluded so
global placement never influences the warp.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoOverlapError
from .gait import CycleSegmentation
from .skeleton import MotionSequence, PoseFrame, Skeleton

# joints that dominate running form get full weight
_EMPHASIS = {
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
}


def default_joint_weights(skeleton: Skeleton) -> np.ndarray:
    return np.array([1.0 if n in _EMPHASIS else 0.5 for n in skeleton.names])


@dataclass(frozen=True)
class WarpPath:
    pairs: tuple[tuple[int, int], ...]
    cost: float


@dataclass(frozen=True)
class CorrespondenceMap:
    """Concatenated warp segments between anchored key events."""

    pairs: tuple[tuple[int, int], ...]
    cost: float
    anchor_pairs: tuple[tuple[int, int], ...]
    cycle_pairs: tuple[tuple[int, int], ...]  # (sample cycle idx, exemplar cycle idx)

    def exemplar_frames_for(self, sample_frame: int) -> tuple[int, ...]:
        return tuple(j for i, j in self.pairs if i == sample_frame)


def _joint_angles(rot_a: np.ndarray, rot_b: np.ndarray) -> np.ndarray:
    """Geodesic angle per joint between two rotation stacks (..., J, 4).

    Uses atan2 on the relative quaternion: exact zero for identical inputs
    and well-conditioned near identity, unlike the arccos-of-dot form.
    """
    aw, av = rot_a[..., 0], rot_a[..., 1:]
    bw, bv = rot_b[..., 0], rot_b[..., 1:]
    # vec(conj(a) * b): cancels term-by-term when a == b, so the self-distance
    # is exactly zero
    rel_w = aw * bw + np.sum(av * bv, axis=-1)
    rel_v = aw[..., None] * bv - bw[..., None] * av - np.cross(av, bv)
    vec = np.linalg.norm(rel_v, axis=-1)
    return 2.0 * np.arctan2(vec, np.abs(rel_w))


def frame_distance(a: PoseFrame, b: PoseFrame, weights: np.ndarray) -> float:
    """Weighted rotation distance; root rotation and translation excluded."""
    angles = _joint_angles(a.rotations[1:], b.rotations[1:])
    return float(np.sum(weights[1:] * angles))


def cost_matrix(rot_a: np.ndarray, rot_b: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Pairwise frame distances, shape (len(a), len(b))."""
    angles = _joint_angles(rot_a[:, None, 1:], rot_b[None, :, 1:])
    return angles @ weights[1:]


def dtw_align(
    rot_a: np.ndarray, rot_b: np.ndarray, weights: np.ndarray
) -> WarpPath:
    """Optimal monotone alignment with steps (1,0), (0,1), (1,1).

    Endpoints are pinned to the range boundaries. Ties prefer the diagonal
    step so the result is deterministic.
    """
    n, m = rot_a.shape[0], rot_b.shape[0]
    if n == 0 or m == 0:
        raise ValueError("dtw ranges must be non-empty")
    local = cost_matrix(rot_a, rot_b, weights)
    acc = np.full((n, m), np.inf)
    acc[0, 0] = local[0, 0]
    for j in range(1, m):
        acc[0, j] = acc[0, j - 1] + local[0, j]
    for i in range(1, n):
        acc[i, 0] = acc[i - 1, 0] + local[i, 0]
        row = acc[i]
        prev = acc[i - 1]
        for j in range(1, m):
            row[j] = local[i, j] + min(prev[j - 1], prev[j], row[j - 1])

    pairs = [(n - 1, m - 1)]
    i, j = n - 1, m - 1
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            # first minimal option wins: diagonal, then row, then column
            options = (acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
            k = int(np.argmin(options))
            if k == 0:
                i, j = i - 1, j - 1
            elif k == 1:
                i -= 1
            else:
                j -= 1
        pairs.append((i, j))
    pairs.reverse()
    return WarpPath(pairs=tuple(pairs), cost=float(acc[n - 1, m - 1]))


def anchored_align(
    sample: MotionSequence,
    sample_seg: CycleSegmentation,
    exemplar: MotionSequence,
    exemplar_seg: CycleSegmentation,
    weights: np.ndarray | None = None,
) -> CorrespondenceMap:
    """Pair key events by rotation ordinal, then warp inside each interval."""
    if weights is None:
        weights = default_joint_weights(sample.skeleton)
    ev_s = sample_seg.events
    ev_e = exemplar_seg.events
    n_shared = min(len(ev_s), len(ev_e))
    if n_shared < 2:
        raise NoOverlapError("no overlapping cycles")
    for a, b in zip(ev_s[:n_shared], ev_e[:n_shared]):
        if a.kind != b.kind:
            raise NoOverlapError("event rotations disagree; no overlapping cycles")

    anchor_pairs = [
        (ev_s[k].frame_index, ev_e[k].frame_index) for k in range(n_shared)
    ]
    all_pairs: list[tuple[int, int]] = []
    total = 0.0
    for (sa, ea), (sb, eb) in zip(anchor_pairs, anchor_pairs[1:]):
        path = dtw_align(
            sample.rotations[sa : sb + 1], exemplar.rotations[ea : eb + 1], weights
        )
        total += path.cost
        segment = [(sa + i, ea + j) for i, j in path.pairs]
        if all_pairs:
            segment = segment[1:]  # shared anchor frame
        all_pairs.extend(segment)

    shared_rl = sum(1 for e in ev_s[:n_shared] if e.kind == "RL")
    cycle_pairs = tuple((k, k) for k in range(max(0, shared_rl - 1)))
    return CorrespondenceMap(
        pairs=tuple(all_pairs),
        cost=total,
        anchor_pairs=tuple(anchor_pairs),
        cycle_pairs=cycle_pairs,
    )
