"""Corrective demonstrations: pose solving, keyframe animation, viewpoints.

A correction moves exactly one local joint rotation. Angular targets rotate
the vertex joint about the normal of the plane the angle lies in; positional
targets rotate the tracked joint's parent so the bone lands on the closest
direction that attains the target. The suggested viewpoint looks along that
same plane normal so the shown difference projects without foreshortening.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .attributes import AXES, AttributeMeta, evaluate_positions
from .errors import UnreachableTargetError
from .geometry import (
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    normalized,
    quat_conjugate,
    quat_from_axis_angle,
    quat_mul,
    quat_slerp,
)
from .skeleton import PoseFrame, Skeleton, forward_kinematics

DEGENERACY_EPS = 1e-8
DEFAULT_CLIP_FRAMES = 30
DEFAULT_HOLD_FRAMES = 15
VIEW_DISTANCE_HEIGHTS = 2.5


def _any_perpendicular(v: np.ndarray) -> np.ndarray:
    probe = Y_AXIS if abs(float(v @ Y_AXIS)) < 0.9 * float(np.linalg.norm(v)) else X_AXIS
    return normalized(np.cross(v, probe))


def _rotate_local(
    frame: PoseFrame, skeleton: Skeleton, joint: int, world_axis: np.ndarray, angle: float
) -> PoseFrame:
    """Apply a world-axis rotation to one joint's local rotation."""
    rot = quat_from_axis_angle(world_axis, angle)
    parent = skeleton.joints[joint].parent
    if parent is None:
        world_parent = np.array([1.0, 0.0, 0.0, 0.0])
    else:
        chain = []
        p = parent
        while p is not None:
            chain.append(p)
            p = skeleton.joints[p].parent
        world_parent = frame.rotations[chain[-1]]
        for p in reversed(chain[:-1]):
            world_parent = quat_mul(world_parent, frame.rotations[p])
    local_rot = quat_mul(
        quat_conjugate(world_parent), quat_mul(rot, world_parent)
    )
    rotations = np.array(frame.rotations, copy=True)
    rotations[joint] = quat_mul(local_rot, rotations[joint])
    rotations[joint] /= np.linalg.norm(rotations[joint])
    return PoseFrame(rotations, frame.root_translation)


def solve_corrected_pose(
    frame: PoseFrame, skeleton: Skeleton, meta: AttributeMeta, target: float
) -> PoseFrame:
    """Pose whose measured attribute equals target, moving one joint only."""
    positions = forward_kinematics(frame, skeleton)
    current = float(
        evaluate_positions(meta, positions[None], skeleton)[0]
    )
    if abs(current - target) < 1e-12:
        return frame

    st = meta.subtype
    if st in ("A1", "A2"):
        if not 0.0 <= target <= math.pi + 1e-12:
            raise UnreachableTargetError("target unreachable")
        o = positions[skeleton.index(meta.j_o)]
        if st == "A1":
            v1 = positions[skeleton.index(meta.j_a)] - o
            v2 = positions[skeleton.index(meta.j_b)] - o
        else:
            v1 = AXES[meta.axis]
            v2 = positions[skeleton.index(meta.j_a)] - o
        normal = np.cross(v1, v2)
        if np.linalg.norm(normal) < DEGENERACY_EPS:
            normal = _any_perpendicular(v2)
        normal = normalized(normal)
        delta = target - current
        return _rotate_local(frame, skeleton, skeleton.index(meta.j_o), normal, delta)

    if st in ("P1", "P2"):
        tracked = skeleton.index(meta.j_o)
        parent = skeleton.joints[tracked].parent
        if parent is None:
            raise UnreachableTargetError("cannot move the root joint")
        p = positions[parent]
        bone = positions[tracked] - p
        length = float(np.linalg.norm(bone))
        d0 = bone / length
        base = positions[skeleton.index(meta.j_a)]
        if st == "P2":
            u = AXES[meta.axis]
            c = (target - float((p - base) @ u)) / length
        else:
            if target < 0:
                raise UnreachableTargetError("target unreachable")
            rho_vec = p - base
            rho = float(np.linalg.norm(rho_vec))
            if rho < DEGENERACY_EPS:
                if abs(target - length) > 1e-9:
                    raise UnreachableTargetError("target unreachable")
                return frame
            u = rho_vec / rho
            c = (target**2 - rho**2 - length**2) / (2.0 * length * rho)
        if abs(c) > 1.0:
            raise UnreachableTargetError("target unreachable")
        radial = d0 - float(d0 @ u) * u
        r_norm = float(np.linalg.norm(radial))
        r_hat = radial / r_norm if r_norm > DEGENERACY_EPS else _any_perpendicular(u)
        d_new = c * u + math.sqrt(max(0.0, 1.0 - c * c)) * r_hat
        d_new = normalized(d_new)
        axis = np.cross(d0, d_new)
        sin_a = float(np.linalg.norm(axis))
        cos_a = float(d0 @ d_new)
        if sin_a < DEGENERACY_EPS:
            if cos_a > 0:
                return frame
            axis = _any_perpendicular(d0)
            sin_a = 1.0
        angle = math.atan2(sin_a, cos_a)
        return _rotate_local(frame, skeleton, parent, normalized(axis), angle)

    raise ValueError(f"no pose solve for subtype {meta.subtype}")


def altered_joint_index(a: PoseFrame, b: PoseFrame) -> int | None:
    diff = np.linalg.norm(a.rotations - b.rotations, axis=-1)
    idx = int(np.argmax(diff))
    return idx if diff[idx] > 1e-12 else None


def _smoothstep(u: float) -> float:
    return u * u * (3.0 - 2.0 * u)


@dataclass(frozen=True)
class CorrectionAnimation:
    frames: tuple[PoseFrame, ...]
    fps: float
    hold_frames: int
    altered_joint: int | None
    marker: dict = field(default_factory=dict)

    @property
    def duration_frames(self) -> int:
        return len(self.frames)


def build_animation(
    wrong: PoseFrame,
    corrected: PoseFrame,
    skeleton: Skeleton,
    meta: AttributeMeta,
    n_frames: int = DEFAULT_CLIP_FRAMES,
    fps: float = 30.0,
    hold_frames: int = DEFAULT_HOLD_FRAMES,
) -> CorrectionAnimation:
    """Ease-in-out interpolation of the single altered joint, plus marker."""
    if n_frames < 2:
        raise ValueError("animation needs at least the two keyframes")
    joint = altered_joint_index(wrong, corrected)
    frames = []
    for k in range(n_frames):
        u = _smoothstep(k / (n_frames - 1))
        rotations = np.array(wrong.rotations, copy=True)
        if joint is not None:
            rotations[joint] = quat_slerp(
                wrong.rotations[joint], corrected.rotations[joint], u
            )
        frames.append(PoseFrame(rotations, wrong.root_translation))

    pos_wrong = forward_kinematics(wrong, skeleton)
    pos_corr = forward_kinematics(corrected, skeleton)
    marker: dict = {}
    if meta.subtype in ("A1", "A2"):
        o = pos_wrong[skeleton.index(meta.j_o)]
        moving = meta.j_b if meta.subtype == "A1" else meta.j_a
        fixed = (
            pos_wrong[skeleton.index(meta.j_a)].tolist()
            if meta.subtype == "A1"
            else (o + AXES[meta.axis] * 0.4).tolist()
        )
        marker = {
            "kind": "angular",
            "vertex": o.tolist(),
            "armFixed": fixed,
            "armWrong": pos_wrong[skeleton.index(moving)].tolist(),
            "armCorrect": pos_corr[skeleton.index(moving)].tolist(),
        }
    elif meta.subtype in ("P1", "P2"):
        marker = {
            "kind": "positional",
            "wrong": pos_wrong[skeleton.index(meta.j_o)].tolist(),
            "correct": pos_corr[skeleton.index(meta.j_o)].tolist(),
            "base": pos_wrong[skeleton.index(meta.j_a)].tolist(),
        }
    return CorrectionAnimation(
        frames=tuple(frames),
        fps=fps,
        hold_frames=hold_frames,
        altered_joint=joint,
        marker=marker,
    )


@dataclass(frozen=True)
class Viewpoint:
    view_dir: np.ndarray  # unit camera-to-subject direction
    up: np.ndarray
    distance: float
    azimuth_deg: float
    elevation_deg: float

    def to_doc(self) -> dict:
        return {
            "dir": [float(c) for c in self.view_dir],
            "up": [float(c) for c in self.up],
            "distance": self.distance,
            "azimuthDeg": self.azimuth_deg,
            "elevationDeg": self.elevation_deg,
        }


def _resolve_side_sign(normal: np.ndarray, side: str) -> np.ndarray:
    """Flip the normal so the camera sits on the attribute's body side."""
    # camera position is subject - view_dir * distance; +X is subject-left
    lateral = float(normal @ X_AXIS)
    want_negative = side == "left"  # camera at +X means view_dir points -X.. +X
    if abs(lateral) > DEGENERACY_EPS:
        if want_negative and lateral > 0:
            return -normal
        if not want_negative and lateral < 0:
            return -normal
        return normal
    anterior = float(normal @ Z_AXIS)
    if abs(anterior) > DEGENERACY_EPS:
        return -normal if anterior > 0 else normal
    return -normal if float(normal @ Y_AXIS) > 0 else normal


def _finalize(
    view_dir: np.ndarray, up_seed: np.ndarray, side: str, subject_height: float
) -> Viewpoint:
    view_dir = _resolve_side_sign(normalized(view_dir), side)
    up = np.array(up_seed, dtype=float)
    if float(up @ Y_AXIS) < 0:
        up = -up
    up = up - float(up @ view_dir) * view_dir
    n = float(np.linalg.norm(up))
    if n < DEGENERACY_EPS:
        up = Y_AXIS - float(Y_AXIS @ view_dir) * view_dir
        n = float(np.linalg.norm(up))
        if n < DEGENERACY_EPS:
            up = _any_perpendicular(view_dir)
            n = 1.0
    up = up / n
    cam = -view_dir
    azimuth = math.degrees(math.atan2(float(cam @ X_AXIS), float(cam @ Z_AXIS)))
    elevation = math.degrees(math.asin(max(-1.0, min(1.0, float(cam @ Y_AXIS)))))
    return Viewpoint(
        view_dir=view_dir,
        up=up,
        distance=VIEW_DISTANCE_HEIGHTS * subject_height,
        azimuth_deg=azimuth,
        elevation_deg=elevation,
    )


def viewpoint_for_vectors(
    v1: np.ndarray, v2: np.ndarray, side: str, subject_height: float
) -> Viewpoint:
    """Viewpoint along the normal of the plane spanned by two vectors."""
    normal = np.cross(v1, v2)
    if np.linalg.norm(normal) < DEGENERACY_EPS:
        return _finalize(X_AXIS, Y_AXIS, side, subject_height)
    up_seed = normalized(v1) + normalized(v2)
    if np.linalg.norm(up_seed) < DEGENERACY_EPS:
        up_seed = Y_AXIS
    return _finalize(normal, up_seed, side, subject_height)


def lateral_viewpoint(side: str, subject_height: float) -> Viewpoint:
    """Sagittal-plane view used for temporal and categorical suggestions."""
    return _finalize(X_AXIS, Y_AXIS, side, subject_height)


def suggest_viewpoint(
    frame: PoseFrame,
    skeleton: Skeleton,
    meta: AttributeMeta,
    corrected: PoseFrame | None = None,
) -> Viewpoint:
    """Viewing direction that shows the attribute difference undistorted."""
    height = skeleton.tpose_height()
    if meta.category in ("temporal", "categorical"):
        return lateral_viewpoint(meta.side, height)
    positions = forward_kinematics(frame, skeleton)
    o = positions[skeleton.index(meta.j_o)]
    if meta.subtype == "A1":
        v1 = positions[skeleton.index(meta.j_a)] - o
        v2 = positions[skeleton.index(meta.j_b)] - o
        return viewpoint_for_vectors(v1, v2, meta.side, height)
    if meta.subtype == "A2":
        v1 = AXES[meta.axis]
        v2 = positions[skeleton.index(meta.j_a)] - o
        return viewpoint_for_vectors(v1, v2, meta.side, height)
    if corrected is None:
        return lateral_viewpoint(meta.side, height)
    center = positions[skeleton.index("pelvis")]
    wrong_pt = positions[skeleton.index(meta.j_o)]
    correct_pt = forward_kinematics(corrected, skeleton)[skeleton.index(meta.j_o)]
    v1 = wrong_pt - center
    v2 = correct_pt - center
    return viewpoint_for_vectors(v1, v2, meta.side, height)
