"""Pose-sequence document format and global orientation normalization.

Document schema (UTF-8 JSON):
    {
      "version": "1",
      "fps": <number>,
      "skeleton": [{"name": str, "parent": int|null, "offset": [x, y, z]}, ...],
      "frames": [{"q": [[w, x, y, z] x J], "t": [x, y, z]}, ...]
    }
"""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import MotionFormatError, NoHeadingError
from .geometry import quat_mul, quat_rotate, quat_yaw
from .skeleton import JointDef, MotionSequence, Skeleton

FORMAT_VERSION = "1"

# Quaternions this far from unit norm are silently renormalized; anything
# worse is rejected as corrupt.
QUAT_NORM_TOLERANCE = 1e-3

MIN_HEADING_DISPLACEMENT = 1e-8  # meters


def serialize_motion(seq: MotionSequence) -> dict:
    return {
        "version": FORMAT_VERSION,
        "fps": float(seq.fps),
        "skeleton": seq.skeleton.to_doc(),
        "frames": [
            {
                "q": [[float(c) for c in q] for q in seq.rotations[i]],
                "t": [float(c) for c in seq.root_translations[i]],
            }
            for i in range(seq.n_frames)
        ],
    }


def dumps_motion(seq: MotionSequence) -> str:
    return json.dumps(serialize_motion(seq), separators=(",", ":"))


def parse_motion(document: bytes | str | dict) -> MotionSequence:
    """Parse and validate a pose-sequence document."""
    if isinstance(document, (bytes, str)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as e:
            raise MotionFormatError(f"malformed document: {e}") from e
    else:
        doc = document
    if not isinstance(doc, dict):
        raise MotionFormatError("malformed document: expected a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise MotionFormatError(f"unsupported format version: {doc.get('version')!r}")

    fps = doc.get("fps")
    if not isinstance(fps, (int, float)) or not math.isfinite(fps) or fps <= 0:
        raise MotionFormatError("fps must be a positive number")

    skel_doc = doc.get("skeleton")
    if not isinstance(skel_doc, list) or not skel_doc:
        raise MotionFormatError("missing skeleton")
    joints = []
    for entry in skel_doc:
        try:
            name = entry["name"]
            parent = entry["parent"]
            offset = np.array([float(c) for c in entry["offset"]], dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise MotionFormatError(f"malformed skeleton entry: {e}") from e
        if offset.shape != (3,):
            raise MotionFormatError(f"joint '{name}': offset must have 3 components")
        joints.append(JointDef(str(name), None if parent is None else int(parent), offset))
    skeleton = Skeleton(tuple(joints))

    frames_doc = doc.get("frames")
    if not isinstance(frames_doc, list) or not frames_doc:
        raise MotionFormatError("sequence must contain at least one frame")
    n = len(frames_doc)
    rotations = np.empty((n, skeleton.n_joints, 4))
    translations = np.empty((n, 3))
    for i, fr in enumerate(frames_doc):
        try:
            q = np.array(fr["q"], dtype=float)
            t = np.array(fr["t"], dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise MotionFormatError(f"malformed frame {i}: {e}") from e
        if q.shape != (skeleton.n_joints, 4):
            raise MotionFormatError(
                f"frame {i}: expected {skeleton.n_joints} quaternions of 4 components"
            )
        if t.shape != (3,):
            raise MotionFormatError(f"frame {i}: root translation must have 3 components")
        norms = np.linalg.norm(q, axis=-1)
        if np.any(np.abs(norms - 1.0) > QUAT_NORM_TOLERANCE):
            raise MotionFormatError(f"frame {i}: invalid rotation norm")
        rotations[i] = q / norms[:, None]
        translations[i] = t
    return MotionSequence(
        skeleton=skeleton, fps=float(fps), rotations=rotations, root_translations=translations
    )


def heading_yaw(seq: MotionSequence) -> float:
    """Yaw of the total horizontal root displacement, measured from +Z."""
    disp = seq.root_translations[-1] - seq.root_translations[0]
    dx, dz = float(disp[0]), float(disp[2])
    if math.hypot(dx, dz) < MIN_HEADING_DISPLACEMENT:
        raise NoHeadingError("cannot infer heading")
    return math.atan2(dx, dz)


def normalize_orientation(seq: MotionSequence) -> MotionSequence:
    """Rotate the whole sequence about the vertical axis so travel is along +Z.

    Pure rigid yaw: applied to the root rotation and root translation of every
    frame; bone lengths and all relative joint rotations are untouched.
    """
    if seq.n_frames < 2:
        raise NoHeadingError("cannot infer heading")
    yaw = heading_yaw(seq)
    if yaw == 0.0:
        return seq
    q_fix = quat_yaw(-yaw)
    rotations = np.array(seq.rotations, copy=True)
    rotations[:, 0] = quat_mul(q_fix[None, :], rotations[:, 0])
    translations = quat_rotate(q_fix[None, :], seq.root_translations)
    return MotionSequence(
        skeleton=seq.skeleton,
        fps=seq.fps,
        rotations=rotations,
        root_translations=translations,
    )
