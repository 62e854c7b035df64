"""Skeletal model, pose frames, motion sequences, and forward kinematics.

Coordinate convention (right-handed): +Y up, +Z anterior (travel direction
after orientation normalization), +X subject-left. Rotations are local,
parent-relative unit quaternions in (w, x, y, z) order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MotionFormatError
from .geometry import quat_mul, quat_rotate

CANONICAL_JOINTS = (
    "pelvis",
    "left_hip",
    "right_hip",
    "spine1",
    "left_knee",
    "right_knee",
    "spine2",
    "left_ankle",
    "right_ankle",
    "spine3",
    "left_foot",
    "right_foot",
    "neck",
    "left_collar",
    "right_collar",
    "head",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hand",
    "right_hand",
)

N_JOINTS = len(CANONICAL_JOINTS)

# name -> (parent name or None, T-pose offset from parent in meters)
_DEFAULT_TREE = {
    "pelvis": (None, (0.0, 0.0, 0.0)),
    "left_hip": ("pelvis", (0.09, -0.06, 0.0)),
    "right_hip": ("pelvis", (-0.09, -0.06, 0.0)),
    "spine1": ("pelvis", (0.0, 0.11, 0.0)),
    "left_knee": ("left_hip", (0.0, -0.40, 0.0)),
    "right_knee": ("right_hip", (0.0, -0.40, 0.0)),
    "spine2": ("spine1", (0.0, 0.12, 0.0)),
    "left_ankle": ("left_knee", (0.0, -0.40, 0.0)),
    "right_ankle": ("right_knee", (0.0, -0.40, 0.0)),
    "spine3": ("spine2", (0.0, 0.12, 0.0)),
    "left_foot": ("left_ankle", (0.0, -0.06, 0.13)),
    "right_foot": ("right_ankle", (0.0, -0.06, 0.13)),
    "neck": ("spine3", (0.0, 0.14, 0.0)),
    "left_collar": ("spine3", (0.05, 0.10, 0.0)),
    "right_collar": ("spine3", (-0.05, 0.10, 0.0)),
    "head": ("neck", (0.0, 0.18, 0.0)),
    "left_shoulder": ("left_collar", (0.12, 0.02, 0.0)),
    "right_shoulder": ("right_collar", (-0.12, 0.02, 0.0)),
    "left_elbow": ("left_shoulder", (0.26, 0.0, 0.0)),
    "right_elbow": ("right_shoulder", (-0.26, 0.0, 0.0)),
    "left_wrist": ("left_elbow", (0.25, 0.0, 0.0)),
    "right_wrist": ("right_elbow", (-0.25, 0.0, 0.0)),
    "left_hand": ("left_wrist", (0.08, 0.0, 0.0)),
    "right_hand": ("right_wrist", (-0.08, 0.0, 0.0)),
}


@dataclass(frozen=True)
class JointDef:
    name: str
    parent: int | None
    offset: np.ndarray  # (3,) meters, T-pose offset from parent


@dataclass(frozen=True)
class Skeleton:
    joints: tuple[JointDef, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        names = [j.name for j in self.joints]
        if len(set(names)) != len(names):
            raise MotionFormatError("duplicate joint names")
        if set(names) != set(CANONICAL_JOINTS):
            missing = set(CANONICAL_JOINTS) - set(names)
            extra = set(names) - set(CANONICAL_JOINTS)
            bad = ", ".join(sorted(missing | extra))
            raise MotionFormatError(f"unknown joint name or missing joints: {bad}")
        root_count = sum(1 for j in self.joints if j.parent is None)
        if root_count != 1 or self.joints[0].parent is not None:
            raise MotionFormatError("skeleton must have exactly one root at index 0")
        if self.joints[0].name != "pelvis":
            raise MotionFormatError("root joint must be the pelvis")
        for i, j in enumerate(self.joints):
            if j.parent is not None and not (0 <= j.parent < i):
                raise MotionFormatError(
                    f"joint '{j.name}' parent index {j.parent} breaks topological order"
                )
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})
        if self.tpose_height() <= 0.0:
            raise MotionFormatError("degenerate skeleton: zero T-pose height")

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(j.name for j in self.joints)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise MotionFormatError(f"unknown joint name: {name}") from None

    @property
    def parents(self) -> np.ndarray:
        return np.array([-1 if j.parent is None else j.parent for j in self.joints])

    @property
    def offsets(self) -> np.ndarray:
        return np.stack([j.offset for j in self.joints])

    def bone_length(self, name: str) -> float:
        return float(np.linalg.norm(self.joints[self.index(name)].offset))

    def tpose_positions(self) -> np.ndarray:
        """World joint positions at identity rotations, zero root translation."""
        pos = np.zeros((self.n_joints, 3))
        for i, j in enumerate(self.joints):
            if j.parent is not None:
                pos[i] = pos[j.parent] + j.offset
        return pos

    def tpose_height(self) -> float:
        ys = self.tpose_positions()[:, 1]
        return float(ys.max() - ys.min())

    def scaled(self, factor: float) -> "Skeleton":
        return Skeleton(
            tuple(JointDef(j.name, j.parent, j.offset * factor) for j in self.joints)
        )

    def to_doc(self) -> list[dict]:
        return [
            {"name": j.name, "parent": j.parent, "offset": [float(c) for c in j.offset]}
            for j in self.joints
        ]


def default_skeleton() -> Skeleton:
    joints = []
    index = {}
    for i, name in enumerate(CANONICAL_JOINTS):
        parent_name, offset = _DEFAULT_TREE[name]
        parent = None if parent_name is None else index[parent_name]
        joints.append(JointDef(name, parent, np.array(offset)))
        index[name] = i
    return Skeleton(tuple(joints))


DEFAULT_SKELETON = default_skeleton()


@dataclass(frozen=True)
class PoseFrame:
    rotations: np.ndarray  # (J, 4) local unit quaternions, (w, x, y, z)
    root_translation: np.ndarray  # (3,) meters

    def __post_init__(self):
        norms = np.linalg.norm(self.rotations, axis=-1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise MotionFormatError("invalid rotation norm")


@dataclass(frozen=True)
class MotionSequence:
    """Timed skeletal motion stored as stacked per-frame arrays."""

    skeleton: Skeleton
    fps: float
    rotations: np.ndarray  # (n, J, 4)
    root_translations: np.ndarray  # (n, 3)
    subject_height: float = field(init=False)

    def __post_init__(self):
        if self.fps <= 0:
            raise MotionFormatError("fps must be positive")
        if self.rotations.ndim != 3 or self.rotations.shape[0] == 0:
            raise MotionFormatError("sequence must contain at least one frame")
        if self.rotations.shape[1] != self.skeleton.n_joints:
            raise MotionFormatError("rotation count does not match skeleton")
        norms = np.linalg.norm(self.rotations, axis=-1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise MotionFormatError("invalid rotation norm")
        object.__setattr__(self, "subject_height", self.skeleton.tpose_height())

    @classmethod
    def from_frames(
        cls, skeleton: Skeleton, fps: float, frames: list[PoseFrame]
    ) -> "MotionSequence":
        if not frames:
            raise MotionFormatError("sequence must contain at least one frame")
        return cls(
            skeleton=skeleton,
            fps=fps,
            rotations=np.stack([f.rotations for f in frames]),
            root_translations=np.stack([f.root_translation for f in frames]),
        )

    @property
    def n_frames(self) -> int:
        return self.rotations.shape[0]

    @property
    def duration(self) -> float:
        return (self.n_frames - 1) / self.fps

    def frame(self, i: int) -> PoseFrame:
        return PoseFrame(self.rotations[i], self.root_translations[i])

    def times(self) -> np.ndarray:
        return np.arange(self.n_frames) / self.fps


def forward_kinematics(frame: PoseFrame, skeleton: Skeleton) -> np.ndarray:
    """World positions (J, 3) of every joint for a single frame."""
    rot = frame.rotations[None, ...]
    pos, _ = fk_positions_rotations(rot, frame.root_translation[None, :], skeleton)
    return pos[0]


def fk_positions_rotations(
    rotations: np.ndarray, root_translations: np.ndarray, skeleton: Skeleton
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized FK over frames.

    rotations: (n, J, 4), root_translations: (n, 3).
    Returns (positions (n, J, 3), world rotations (n, J, 4)).
    """
    n = rotations.shape[0]
    nj = skeleton.n_joints
    positions = np.empty((n, nj, 3))
    world = np.empty((n, nj, 4))
    positions[:, 0] = root_translations
    world[:, 0] = rotations[:, 0]
    offsets = skeleton.offsets
    for i in range(1, nj):
        p = skeleton.joints[i].parent
        world[:, i] = quat_mul(world[:, p], rotations[:, i])
        positions[:, i] = positions[:, p] + quat_rotate(world[:, p], offsets[i])
    return positions, world


def sequence_positions(seq: MotionSequence) -> np.ndarray:
    """FK positions for every frame, shape (n, J, 3)."""
    pos, _ = fk_positions_rotations(seq.rotations, seq.root_translations, seq.skeleton)
    return pos
