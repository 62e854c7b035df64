"""Synthetic running-motion generator with exact ground truth.

The generator plants each stance foot at a fixed world point and solves the
leg with closed-form two-bone IK, so landing/extension times, foot-contact
intervals, and joint-angle waveforms are known analytically from the
parameters. Ground-truth values are computed with plain trigonometry,
independently of the quaternion FK used by the rest of the engine, which
makes the output usable as a test oracle.

Conventions: the motion travels along +Z; right-foot landings happen at
integer multiples of the cycle duration (frame 0 is a right landing).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import X_AXIS, Y_AXIS, Z_AXIS, quat_from_axis_angle, quat_mul
from .skeleton import DEFAULT_SKELETON, MotionSequence, Skeleton

EVENT_KINDS = ("RL", "RE", "LL", "LE")
PHASE_BY_KIND = {"RL": 0.0, "RE": 0.25, "LL": 0.5, "LE": 0.75}


@dataclass(frozen=True)
class GaitParams:
    """Inputs of the synthetic gait. Angles in radians, durations in seconds."""

    cycle_duration: float = 1.0
    stance_fraction: float = 0.35
    fps: float = 30.0
    n_cycles: int = 5
    hip_swing: float = 0.35  # leg angle from vertical at touchdown/toe-off
    knee_flexion: float = 1.2  # peak swing-phase knee flexion
    elbow_angle: float = 1.4  # constant elbow flexion
    arm_swing: float = 0.5  # shoulder swing amplitude
    torso_lean: float = 0.12  # constant forward lean applied at spine1

    def __post_init__(self):
        if self.cycle_duration <= 0:
            raise ValueError("cycle_duration must be positive")
        if not 0.0 < self.stance_fraction < 0.5:
            raise ValueError("stance_fraction must lie in (0, 0.5) for an aerial gait")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.n_cycles < 1:
            raise ValueError("n_cycles must be at least 1")
        if not 0.0 <= self.hip_swing < math.pi / 2:
            raise ValueError("hip_swing must lie in [0, pi/2)")
        for name in ("knee_flexion", "elbow_angle", "arm_swing", "torso_lean"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


class _Geometry:
    """Derived constants shared by the generator and the ground truth."""

    def __init__(self, params: GaitParams, skeleton: Skeleton):
        self.skeleton = skeleton
        self.thigh = skeleton.bone_length("left_ankle")  # knee->ankle == hip->knee here
        self.l1 = skeleton.bone_length("left_knee")
        self.l2 = skeleton.bone_length("left_ankle")
        self.leg = self.l1 + self.l2
        hip_off = skeleton.joints[skeleton.index("left_hip")].offset
        self.hip_dx = abs(float(hip_off[0]))
        self.hip_dy = float(hip_off[1])  # negative: hips sit below the pelvis
        self.reach = self.leg * math.sin(params.hip_swing)
        self.hip_height = self.leg * math.cos(params.hip_swing)
        self.pelvis_height = self.hip_height - self.hip_dy
        s = params.stance_fraction
        self.speed = 2.0 * self.reach / (s * params.cycle_duration)
        k = params.knee_flexion
        self.tuck_dist = math.sqrt(
            self.l1**2 + self.l2**2 + 2.0 * self.l1 * self.l2 * math.cos(k)
        )
        self.lift = self.hip_height - self.tuck_dist
        if self.lift < -1e-12:
            raise ValueError(
                "knee_flexion too small for hip_swing: swing foot would drop below ground"
            )
        self.lift = max(self.lift, 0.0)
        foot_off = skeleton.joints[skeleton.index("left_foot")].offset
        # pitch the ankle so the toe stays level with it (mid-foot strike)
        self.foot_pitch = math.atan2(float(foot_off[1]), float(foot_off[2]))
        self.toe_forward = math.hypot(float(foot_off[1]), float(foot_off[2]))


def _leg_waveforms(params: GaitParams, geo: _Geometry, times: np.ndarray, offset: float):
    """Per-frame thigh angle, knee flexion, and ankle targets for one leg.

    offset is the leg's cycle shift in cycle units (0 right, 0.5 left).
    Angles follow the sagittal convention: thigh angle is measured from
    straight down, positive forward; knee flexion folds the shank backward.
    """
    d_cycle = params.cycle_duration
    s = params.stance_fraction
    tau_cycles = times / d_cycle - offset
    k = np.floor(tau_cycles)
    tau = tau_cycles - k
    stance = tau <= s + 1e-12

    hip_z = geo.speed * times
    plant_z = geo.speed * (k + offset) * d_cycle + geo.reach

    u = (tau - s) / (1.0 - s)
    sweep = 0.5 * (1.0 - np.cos(np.pi * u))  # 0 -> 1, flat at both ends
    swing_y = geo.lift * np.sin(np.pi * u) ** 2
    swing_z = hip_z - geo.reach + 2.0 * geo.reach * sweep

    ankle_y = np.where(stance, 0.0, swing_y)
    ankle_z = np.where(stance, plant_z, swing_z)

    dy = ankle_y - geo.hip_height
    dz = ankle_z - hip_z
    dist = np.hypot(dy, dz)
    cos_alpha = (geo.l1**2 + dist**2 - geo.l2**2) / (2.0 * geo.l1 * dist)
    alpha = np.arccos(np.clip(cos_alpha, -1.0, 1.0))
    cos_inner = (geo.l1**2 + geo.l2**2 - dist**2) / (2.0 * geo.l1 * geo.l2)
    kappa = np.pi - np.arccos(np.clip(cos_inner, -1.0, 1.0))
    phi = np.arctan2(dz, -dy)
    psi = phi + alpha
    return psi, kappa, ankle_y, ankle_z, stance


@dataclass
class GaitTruth:
    """Analytic ground truth exposed alongside the generated sequence."""

    params: GaitParams
    n_frames: int
    times: np.ndarray
    speed: float
    landing_reach: float
    pelvis_height: float
    hip_height: float
    lift: float
    events: list[dict]  # {"kind", "time", "frame", "phase"}
    contacts: dict[str, list[tuple[int, int]]]
    phase: np.ndarray  # per-frame phase in [0, 1)
    thigh_angle: dict[str, np.ndarray]
    knee_flexion: dict[str, np.ndarray]
    _geo: _Geometry = field(repr=False)
    _arm_angle: dict[str, np.ndarray] = field(repr=False)

    def event_frames(self, kind: str) -> list[int]:
        return [e["frame"] for e in self.events if e["kind"] == kind]

    def knee_interior_angle(self, side: str) -> np.ndarray:
        """Hip-knee-ankle angle per frame; pi means a straight leg."""
        return np.pi - self.knee_flexion[side]

    def elbow_interior_angle(self) -> float:
        return math.pi - self.params.elbow_angle

    def lean_angle(self) -> float:
        """Angle between the pelvis->neck vector and vertical."""
        skel = self._geo.skeleton
        o1 = float(skel.joints[skel.index("spine1")].offset[1])
        rest = sum(
            float(skel.joints[skel.index(n)].offset[1])
            for n in ("spine2", "spine3", "neck")
        )
        t = self.params.torso_lean
        return math.atan2(rest * math.sin(t), o1 + rest * math.cos(t))

    def pelvis_positions(self) -> np.ndarray:
        n = self.n_frames
        out = np.zeros((n, 3))
        out[:, 1] = self.pelvis_height
        out[:, 2] = self.speed * self.times
        return out

    def knee_positions(self, side: str) -> np.ndarray:
        geo = self._geo
        psi = self.thigh_angle[side]
        sign = 1.0 if side == "left" else -1.0
        out = np.zeros((self.n_frames, 3))
        out[:, 0] = sign * geo.hip_dx
        out[:, 1] = geo.hip_height - geo.l1 * np.cos(psi)
        out[:, 2] = self.speed * self.times + geo.l1 * np.sin(psi)
        return out

    def ankle_positions(self, side: str) -> np.ndarray:
        geo = self._geo
        psi = self.thigh_angle[side]
        kappa = self.knee_flexion[side]
        knee = self.knee_positions(side)
        out = np.array(knee)
        out[:, 1] -= geo.l2 * np.cos(psi - kappa)
        out[:, 2] += geo.l2 * np.sin(psi - kappa)
        return out

    def toe_positions(self, side: str) -> np.ndarray:
        out = np.array(self.ankle_positions(side))
        out[:, 2] += self._geo.toe_forward
        return out

    def wrist_positions(self, side: str) -> np.ndarray:
        """Wrist world positions from the lean/arm-swing chain, matrix math."""
        geo = self._geo
        skel = geo.skeleton
        sign = 1.0 if side == "left" else -1.0
        t = self.params.torso_lean
        swing = self._arm_angle[side]

        def off(name):
            return skel.joints[skel.index(name)].offset

        spine1 = self.pelvis_positions() + off("spine1")
        lean_m = np.array(
            [[1, 0, 0], [0, math.cos(t), -math.sin(t)], [0, math.sin(t), math.cos(t)]]
        )
        chain = off("spine2") + off("spine3")
        collar = spine1 + (lean_m @ (chain + off(f"{side}_collar")))
        shoulder = collar + (lean_m @ off(f"{side}_shoulder"))
        upper_len = float(np.linalg.norm(off(f"{side}_elbow")))
        fore_len = float(np.linalg.norm(off(f"{side}_wrist")))
        ang = t - swing  # combined sagittal angle of the hanging arm
        upper = upper_len * np.stack(
            [np.zeros_like(ang), -np.cos(ang), -np.sin(ang)], axis=-1
        )
        elbow = shoulder + upper
        e = self.params.elbow_angle
        fore_local = np.array([0.0, -math.cos(e), math.sin(e)])
        cos_a, sin_a = np.cos(ang), np.sin(ang)
        fore = fore_len * np.stack(
            [
                np.zeros_like(ang),
                cos_a * fore_local[1] - sin_a * fore_local[2],
                sin_a * fore_local[1] + cos_a * fore_local[2],
            ],
            axis=-1,
        )
        _ = sign  # arm chains are mirrored in x by the offsets themselves
        return elbow + fore

    def knee_lift(self, side: str) -> np.ndarray:
        """Vertical knee offset from the pelvis per frame (negative: below)."""
        return self.knee_positions(side)[:, 1] - self.pelvis_height

    def phase_at(self, t: np.ndarray) -> np.ndarray:
        d = self.params.cycle_duration
        s = self.params.stance_fraction
        tau = (t / d) % 1.0
        knots = np.array([0.0, s, 0.5, 0.5 + s, 1.0])
        phases = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
        return np.interp(tau, knots, phases) % 1.0


@dataclass
class SynthGait:
    sequence: MotionSequence
    truth: GaitTruth


def synth_gait(params: GaitParams, skeleton: Skeleton | None = None) -> SynthGait:
    """Generate a periodic running motion plus its analytic ground truth."""
    skeleton = skeleton or DEFAULT_SKELETON
    geo = _Geometry(params, skeleton)
    d = params.cycle_duration
    n_frames = int(round(params.n_cycles * d * params.fps)) + 1
    times = np.arange(n_frames) / params.fps
    t_end = times[-1]

    legs = {}
    for side, offset in (("right", 0.0), ("left", 0.5)):
        legs[side] = _leg_waveforms(params, geo, times, offset)

    nj = skeleton.n_joints
    rotations = np.zeros((n_frames, nj, 4))
    rotations[..., 0] = 1.0

    def set_joint(name: str, quats: np.ndarray):
        rotations[:, skeleton.index(name)] = quats

    for side in ("left", "right"):
        psi, kappa, _, _, _ = legs[side]
        set_joint(f"{side}_hip", quat_from_axis_angle(X_AXIS, -psi))
        set_joint(f"{side}_knee", quat_from_axis_angle(X_AXIS, kappa))
        set_joint(f"{side}_ankle", quat_from_axis_angle(X_AXIS, geo.foot_pitch + psi - kappa))

    if params.torso_lean != 0.0:
        lean_q = quat_from_axis_angle(X_AXIS, params.torso_lean)
        rotations[:, skeleton.index("spine1")] = lean_q

    cycle_phase = 2.0 * np.pi * times / d
    arm = {
        "right": -params.arm_swing * np.cos(cycle_phase),
        "left": params.arm_swing * np.cos(cycle_phase),
    }
    drop = {"left": quat_from_axis_angle(Z_AXIS, -np.pi / 2), "right": quat_from_axis_angle(Z_AXIS, np.pi / 2)}
    bend = {
        "left": quat_from_axis_angle(Y_AXIS, -params.elbow_angle),
        "right": quat_from_axis_angle(Y_AXIS, params.elbow_angle),
    }
    for side in ("left", "right"):
        swing_q = quat_from_axis_angle(X_AXIS, -arm[side])
        set_joint(f"{side}_shoulder", quat_mul(swing_q, drop[side][None, :]))
        set_joint(f"{side}_elbow", np.broadcast_to(bend[side], (n_frames, 4)).copy())

    translations = np.zeros((n_frames, 3))
    translations[:, 1] = geo.pelvis_height
    translations[:, 2] = geo.speed * times

    sequence = MotionSequence(
        skeleton=skeleton, fps=params.fps, rotations=rotations, root_translations=translations
    )

    s = params.stance_fraction
    events = []
    for k in range(params.n_cycles + 1):
        for kind, frac in (("RL", 0.0), ("RE", s), ("LL", 0.5), ("LE", 0.5 + s)):
            t = (k + frac) * d
            if t <= t_end + 1e-9:
                events.append(
                    {
                        "kind": kind,
                        "time": t,
                        "frame": int(round(t * params.fps)),
                        "phase": PHASE_BY_KIND[kind],
                    }
                )
    events.sort(key=lambda e: e["time"])

    last = n_frames - 1
    contacts: dict[str, list[tuple[int, int]]] = {"left": [], "right": []}
    for side, offset in (("right", 0.0), ("left", 0.5)):
        k = 0
        while True:
            start_t = (k + offset) * d
            if start_t > t_end + 1e-9:
                break
            end_t = min(start_t + s * d, t_end)
            contacts[side].append(
                (int(round(start_t * params.fps)), min(int(round(end_t * params.fps)), last))
            )
            k += 1

    truth = GaitTruth(
        params=params,
        n_frames=n_frames,
        times=times,
        speed=geo.speed,
        landing_reach=geo.reach,
        pelvis_height=geo.pelvis_height,
        hip_height=geo.hip_height,
        lift=geo.lift,
        events=events,
        contacts=contacts,
        phase=np.interp(
            (times / d) % 1.0,
            np.array([0.0, s, 0.5, 0.5 + s, 1.0]),
            np.array([0.0, 0.25, 0.5, 0.75, 1.0]),
        )
        % 1.0,
        thigh_angle={side: legs[side][0] for side in ("left", "right")},
        knee_flexion={side: legs[side][1] for side in ("left", "right")},
        _geo=geo,
        _arm_angle=arm,
    )
    return SynthGait(sequence=sequence, truth=truth)
