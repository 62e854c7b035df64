import math

import numpy as np
import pytest

from runform.attributes import AttributeMeta, evaluate_positions
from runform.errors import UnreachableTargetError
from runform.feedback import (
    altered_joint_index,
    build_animation,
    lateral_viewpoint,
    solve_corrected_pose,
    suggest_viewpoint,
    viewpoint_for_vectors,
)
from runform.gait import segment_motion
from runform.geometry import quat_slerp
from runform.skeleton import DEFAULT_SKELETON, forward_kinematics
from runform.synth import GaitParams, synth_gait

SKEL = DEFAULT_SKELETON

ELBOW = AttributeMeta(
    "elbow angle", "A1", j_a="right_shoulder", j_o="right_elbow", j_b="right_wrist",
    side="right",
)
LEAN = AttributeMeta("upper-body lean", "A2", j_o="pelvis", j_a="neck", axis="Y")
LANDING = AttributeMeta(
    "foot landing position", "P2", j_o="right_ankle", j_a="pelvis", axis="Z", side="right"
)
WRIST_DIST = AttributeMeta(
    "wrist-to-center distance", "P1", j_o="right_wrist", j_a="pelvis", side="right"
)


@pytest.fixture(scope="module")
def gait():
    return synth_gait(GaitParams(n_cycles=3))


@pytest.fixture(scope="module")
def landing_frame(gait):
    return gait.sequence.frame(30)


def measure(meta, frame):
    pos = forward_kinematics(frame, SKEL)
    return float(evaluate_positions(meta, pos[None], SKEL)[0])


class TestSolveCorrectedPose:
    def test_elbow_angle_reaches_target(self, landing_frame):
        current = measure(ELBOW, landing_frame)
        target = 2.0 * math.pi / 3.0
        assert abs(current - target) > 0.05
        fixed = solve_corrected_pose(landing_frame, SKEL, ELBOW, target)
        assert measure(ELBOW, fixed) == pytest.approx(target, abs=1e-9)

    def test_exactly_one_local_rotation_changes(self, landing_frame):
        fixed = solve_corrected_pose(landing_frame, SKEL, ELBOW, 2.0)
        diff = np.linalg.norm(landing_frame.rotations - fixed.rotations, axis=-1)
        changed = np.nonzero(diff > 1e-12)[0]
        assert list(changed) == [SKEL.index("right_elbow")]

    def test_target_equal_to_current_returns_same_frame(self, landing_frame):
        current = measure(ELBOW, landing_frame)
        fixed = solve_corrected_pose(landing_frame, SKEL, ELBOW, current)
        assert fixed is landing_frame

    def test_lean_angle_reaches_target(self, landing_frame):
        target = measure(LEAN, landing_frame) + 0.15
        fixed = solve_corrected_pose(landing_frame, SKEL, LEAN, target)
        assert measure(LEAN, fixed) == pytest.approx(target, abs=1e-9)

    def test_landing_position_reaches_target(self, landing_frame):
        current = measure(LANDING, landing_frame)
        target = current - 0.08  # land closer to the body
        fixed = solve_corrected_pose(landing_frame, SKEL, LANDING, target)
        assert measure(LANDING, fixed) == pytest.approx(target, abs=1e-9)
        changed = np.nonzero(
            np.linalg.norm(landing_frame.rotations - fixed.rotations, axis=-1) > 1e-12
        )[0]
        assert list(changed) == [SKEL.index("right_knee")]

    def test_p1_distance_reaches_target(self, landing_frame):
        current = measure(WRIST_DIST, landing_frame)
        target = current + 0.06
        fixed = solve_corrected_pose(landing_frame, SKEL, WRIST_DIST, target)
        assert measure(WRIST_DIST, fixed) == pytest.approx(target, abs=1e-9)

    def test_beyond_reach_is_unreachable(self, landing_frame):
        with pytest.raises(UnreachableTargetError, match="target unreachable"):
            solve_corrected_pose(landing_frame, SKEL, LANDING, 2.0)

    def test_angle_target_beyond_pi_is_unreachable(self, landing_frame):
        with pytest.raises(UnreachableTargetError):
            solve_corrected_pose(landing_frame, SKEL, ELBOW, 3.5)


class TestBuildAnimation:
    def test_two_frames_are_exactly_the_keyframes(self, landing_frame):
        fixed = solve_corrected_pose(landing_frame, SKEL, ELBOW, 2.0)
        anim = build_animation(landing_frame, fixed, SKEL, ELBOW, n_frames=2)
        np.testing.assert_allclose(anim.frames[0].rotations, landing_frame.rotations)
        np.testing.assert_allclose(anim.frames[-1].rotations, fixed.rotations, atol=1e-12)

    def test_first_frame_is_wrong_pose_and_last_attains_target(self, landing_frame):
        target = 2.1
        fixed = solve_corrected_pose(landing_frame, SKEL, ELBOW, target)
        anim = build_animation(landing_frame, fixed, SKEL, ELBOW, n_frames=30)
        assert anim.duration_frames == 30
        np.testing.assert_allclose(anim.frames[0].rotations, landing_frame.rotations)
        assert measure(ELBOW, anim.frames[-1]) == pytest.approx(target, abs=1e-3)

    def test_midpoint_is_geodesic_midpoint(self, landing_frame):
        fixed = solve_corrected_pose(landing_frame, SKEL, ELBOW, 2.0)
        anim = build_animation(landing_frame, fixed, SKEL, ELBOW, n_frames=3)
        joint = SKEL.index("right_elbow")
        expected = quat_slerp(
            landing_frame.rotations[joint], fixed.rotations[joint], 0.5
        )
        np.testing.assert_allclose(anim.frames[1].rotations[joint], expected, atol=1e-12)

    def test_only_altered_joint_moves_through_clip(self, landing_frame):
        fixed = solve_corrected_pose(landing_frame, SKEL, ELBOW, 2.0)
        anim = build_animation(landing_frame, fixed, SKEL, ELBOW, n_frames=10)
        joint = SKEL.index("right_elbow")
        for f in anim.frames:
            diff = np.linalg.norm(f.rotations - landing_frame.rotations, axis=-1)
            others = np.delete(diff, joint)
            assert np.all(others < 1e-12)

    def test_angular_marker_endpoints_match_fk(self, landing_frame):
        fixed = solve_corrected_pose(landing_frame, SKEL, ELBOW, 2.0)
        anim = build_animation(landing_frame, fixed, SKEL, ELBOW)
        pos_w = forward_kinematics(landing_frame, SKEL)
        pos_c = forward_kinematics(fixed, SKEL)
        m = anim.marker
        np.testing.assert_allclose(m["vertex"], pos_w[SKEL.index("right_elbow")], atol=1e-9)
        np.testing.assert_allclose(m["armFixed"], pos_w[SKEL.index("right_shoulder")], atol=1e-9)
        np.testing.assert_allclose(m["armWrong"], pos_w[SKEL.index("right_wrist")], atol=1e-9)
        np.testing.assert_allclose(m["armCorrect"], pos_c[SKEL.index("right_wrist")], atol=1e-9)

    def test_positional_marker_points(self, landing_frame):
        target = measure(LANDING, landing_frame) - 0.08
        fixed = solve_corrected_pose(landing_frame, SKEL, LANDING, target)
        anim = build_animation(landing_frame, fixed, SKEL, LANDING)
        m = anim.marker
        assert m["kind"] == "positional"
        np.testing.assert_allclose(
            m["wrong"], forward_kinematics(landing_frame, SKEL)[SKEL.index("right_ankle")],
            atol=1e-9,
        )
        np.testing.assert_allclose(
            m["correct"], forward_kinematics(fixed, SKEL)[SKEL.index("right_ankle")],
            atol=1e-9,
        )

    def test_altered_joint_detection(self, landing_frame):
        fixed = solve_corrected_pose(landing_frame, SKEL, ELBOW, 2.0)
        assert altered_joint_index(landing_frame, fixed) == SKEL.index("right_elbow")
        assert altered_joint_index(landing_frame, landing_frame) is None


class TestViewpoint:
    def test_axis_aligned_cross_product_case(self):
        vp = viewpoint_for_vectors(
            np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), "right", 1.7
        )
        np.testing.assert_allclose(np.abs(vp.view_dir), [0.0, 0.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(
            vp.up, np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0), atol=1e-12
        )
        assert vp.distance == pytest.approx(2.5 * 1.7)

    def test_view_orthogonal_to_both_angle_vectors(self, landing_frame):
        vp = suggest_viewpoint(landing_frame, SKEL, ELBOW)
        pos = forward_kinematics(landing_frame, SKEL)
        o = pos[SKEL.index("right_elbow")]
        v1 = pos[SKEL.index("right_shoulder")] - o
        v2 = pos[SKEL.index("right_wrist")] - o
        assert abs(float(vp.view_dir @ v1)) < 1e-6 * np.linalg.norm(v1)
        assert abs(float(vp.view_dir @ v2)) < 1e-6 * np.linalg.norm(v2)
        assert float(vp.up @ np.array([0.0, 1.0, 0.0])) >= 0.0
        assert np.linalg.norm(vp.view_dir) == pytest.approx(1.0, abs=1e-9)
        assert abs(float(vp.view_dir @ vp.up)) < 1e-6

    def test_right_side_camera_sits_on_right(self, landing_frame):
        vp = suggest_viewpoint(landing_frame, SKEL, ELBOW)
        camera = -vp.view_dir * vp.distance
        assert camera[0] < 0  # subject-right is -X

    def test_left_side_camera_sits_on_left(self, landing_frame):
        meta = AttributeMeta(
            "elbow angle", "A1", j_a="left_shoulder", j_o="left_elbow", j_b="left_wrist",
            side="left",
        )
        vp = suggest_viewpoint(landing_frame, SKEL, meta)
        camera = -vp.view_dir * vp.distance
        assert camera[0] > 0

    def test_positional_view_orthogonal_to_correction_arrow(self, landing_frame):
        target = measure(LANDING, landing_frame) - 0.08
        fixed = solve_corrected_pose(landing_frame, SKEL, LANDING, target)
        vp = suggest_viewpoint(landing_frame, SKEL, LANDING, corrected=fixed)
        wrong = forward_kinematics(landing_frame, SKEL)[SKEL.index("right_ankle")]
        correct = forward_kinematics(fixed, SKEL)[SKEL.index("right_ankle")]
        arrow = correct - wrong
        assert abs(float(vp.view_dir @ arrow)) < 1e-6 * np.linalg.norm(arrow)

    def test_temporal_viewpoint_is_lateral(self):
        meta = AttributeMeta("contact", "T2", side="right", phase=(0.0, 0.25))
        vp = lateral_viewpoint(meta.side, 1.7)
        np.testing.assert_allclose(np.abs(vp.view_dir), [1.0, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(vp.up, [0.0, 1.0, 0.0], atol=1e-12)

    def test_colinear_angle_falls_back_without_error(self):
        # a dead straight arm has no angle plane
        q = np.zeros((24, 4))
        q[:, 0] = 1.0
        from runform.skeleton import PoseFrame

        frame = PoseFrame(q, np.zeros(3))
        vp = suggest_viewpoint(frame, SKEL, ELBOW)
        np.testing.assert_allclose(np.abs(vp.view_dir), [1.0, 0.0, 0.0], atol=1e-9)

    def test_upside_down_up_seed_gets_flipped(self):
        vp = viewpoint_for_vectors(
            np.array([0.0, -1.0, 0.2]), np.array([0.3, -1.0, 0.0]), "neutral", 1.7
        )
        assert float(vp.up[1]) >= 0.0
