import math

import numpy as np
import pytest

from runform.skeleton import sequence_positions
from runform.synth import GaitParams, synth_gait


@pytest.fixture(scope="module")
def gait():
    return synth_gait(GaitParams(cycle_duration=1.0, fps=30.0, n_cycles=3))


def joint_positions(seq, name):
    return sequence_positions(seq)[:, seq.skeleton.index(name)]


class TestFrameLayout:
    def test_frame_count_covers_all_cycles(self, gait):
        # one closing landing frame beyond n_cycles * fps * duration
        assert gait.sequence.n_frames == 91

    def test_right_landing_ground_truth_frames(self, gait):
        assert gait.truth.event_frames("RL") == [0, 30, 60, 90]

    def test_left_landing_ground_truth_frames(self, gait):
        assert gait.truth.event_frames("LL") == [15, 45, 75]

    def test_event_rotation_order(self, gait):
        kinds = [e["kind"] for e in gait.truth.events]
        expected = ["RL", "RE", "LL", "LE"]
        for i, k in enumerate(kinds):
            assert k == expected[i % 4]


class TestGroundTruthConsistency:
    """The quaternion-FK output must land exactly on the trig ground truth."""

    def test_fk_ankles_match_analytic_paths(self, gait):
        for side in ("left", "right"):
            got = joint_positions(gait.sequence, f"{side}_ankle")
            np.testing.assert_allclose(got, gait.truth.ankle_positions(side), atol=1e-9)

    def test_fk_knees_match_analytic_paths(self, gait):
        for side in ("left", "right"):
            got = joint_positions(gait.sequence, f"{side}_knee")
            np.testing.assert_allclose(got, gait.truth.knee_positions(side), atol=1e-9)

    def test_fk_wrists_match_analytic_chain(self, gait):
        for side in ("left", "right"):
            got = joint_positions(gait.sequence, f"{side}_wrist")
            np.testing.assert_allclose(got, gait.truth.wrist_positions(side), atol=1e-9)

    def test_knee_angle_matches_law_of_cosines(self, gait):
        # independent recomputation from FK positions
        seq = gait.sequence
        pos = sequence_positions(seq)
        for side in ("left", "right"):
            hip = pos[:, seq.skeleton.index(f"{side}_hip")]
            knee = pos[:, seq.skeleton.index(f"{side}_knee")]
            ankle = pos[:, seq.skeleton.index(f"{side}_ankle")]
            u = hip - knee
            v = ankle - knee
            cos = np.sum(u * v, axis=-1) / (
                np.linalg.norm(u, axis=-1) * np.linalg.norm(v, axis=-1)
            )
            measured = np.arccos(np.clip(cos, -1, 1))
            np.testing.assert_allclose(
                measured, gait.truth.knee_interior_angle(side), atol=1e-9
            )

    def test_toe_stays_level_with_ankle(self, gait):
        seq = gait.sequence
        pos = sequence_positions(seq)
        for side in ("left", "right"):
            ankle_y = pos[:, seq.skeleton.index(f"{side}_ankle"), 1]
            toe_y = pos[:, seq.skeleton.index(f"{side}_foot"), 1]
            np.testing.assert_allclose(toe_y, ankle_y, atol=1e-9)

    def test_elbow_interior_angle_constant(self, gait):
        seq = gait.sequence
        pos = sequence_positions(seq)
        sh = pos[:, seq.skeleton.index("right_shoulder")]
        el = pos[:, seq.skeleton.index("right_elbow")]
        wr = pos[:, seq.skeleton.index("right_wrist")]
        u = sh - el
        v = wr - el
        cos = np.sum(u * v, axis=-1) / (
            np.linalg.norm(u, axis=-1) * np.linalg.norm(v, axis=-1)
        )
        measured = np.arccos(np.clip(cos, -1, 1))
        np.testing.assert_allclose(
            measured, gait.truth.elbow_interior_angle(), atol=1e-9
        )


class TestContactGroundTruth:
    def test_stance_foot_is_world_fixed(self, gait):
        ankle = joint_positions(gait.sequence, "right_ankle")
        for start, end in gait.truth.contacts["right"][:-1]:
            span = ankle[start : end + 1]
            # acos conditioning at grazing full extension costs ~1e-9
            np.testing.assert_allclose(span, np.broadcast_to(span[0], span.shape), atol=1e-8)

    def test_stance_duration_matches_fraction(self):
        params = GaitParams(stance_fraction=0.35, fps=30.0, n_cycles=3)
        truth = synth_gait(params).truth
        cycle_frames = params.cycle_duration * params.fps
        for start, end in truth.contacts["right"][:-1]:
            assert (end - start) / cycle_frames == pytest.approx(0.35, abs=2 / cycle_frames)

    def test_swing_foot_leaves_ground(self, gait):
        ankle = joint_positions(gait.sequence, "right_ankle")
        (s0, e0), (s1, _) = gait.truth.contacts["right"][:2]
        mid_swing = (e0 + s1) // 2
        assert ankle[mid_swing, 1] > 0.05

    def test_left_leg_is_half_cycle_shifted_right_leg(self, gait):
        # identical waveforms offset by half a cycle
        half = 15
        right = gait.truth.knee_interior_angle("right")
        left = gait.truth.knee_interior_angle("left")
        np.testing.assert_allclose(left[half:], right[:-half], atol=1e-9)


class TestDegenerateAndValidation:
    def test_zero_amplitudes_freeze_every_frame(self):
        params = GaitParams(hip_swing=0.0, knee_flexion=0.0, arm_swing=0.0, torso_lean=0.0, n_cycles=2)
        seq = synth_gait(params).sequence
        np.testing.assert_allclose(
            seq.rotations, np.broadcast_to(seq.rotations[0], seq.rotations.shape), atol=1e-12
        )
        np.testing.assert_allclose(
            seq.root_translations,
            np.broadcast_to(seq.root_translations[0], seq.root_translations.shape),
            atol=1e-12,
        )

    def test_insufficient_flexion_rejected(self):
        with pytest.raises(ValueError, match="knee_flexion too small"):
            synth_gait(GaitParams(hip_swing=0.35, knee_flexion=0.1))

    def test_walking_stance_rejected(self):
        with pytest.raises(ValueError, match="stance_fraction"):
            GaitParams(stance_fraction=0.6)

    def test_phase_ground_truth_hits_event_phases(self, gait):
        truth = gait.truth
        for e in truth.events:
            got = truth.phase_at(np.array([e["time"]]))[0]
            assert got == pytest.approx(e["phase"], abs=1e-9)

    def test_lean_angle_formula(self):
        t = 0.2
        truth = synth_gait(GaitParams(torso_lean=t, n_cycles=1)).truth
        # pelvis->neck: 0.11 straight segment + 0.38 leaned chain
        expected = math.atan2(0.38 * math.sin(t), 0.11 + 0.38 * math.cos(t))
        assert truth.lean_angle() == pytest.approx(expected, abs=1e-12)
