"""Acceptance suite: one test per release criterion, at stated tolerances.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion. Expected values come from independent oracles: trigonometric
ground truth of the synthetic gait generator, a recursive reference DTW,
and hand-constructed geometry.
"""
import json
import math
import time
from dataclasses import replace
from functools import lru_cache

import numpy as np
import pytest
from fastapi.testclient import TestClient
from scipy.optimize import brentq

from runform.alignment import cost_matrix, default_joint_weights, dtw_align
from runform.attributes import AttributeMeta, catalog_metas, evaluate_positions, retrieve
from runform.cli import main as cli_main
from runform.comparison import ComparisonConfig, compare_attribute
from runform.errors import NoGaitError
from runform.feedback import suggest_viewpoint, viewpoint_for_vectors
from runform.gait import (
    assign_phase,
    detect_foot_contacts,
    detect_key_events,
    extract_cycles,
)
from runform.geometry import quat_slerp
from runform.motion_io import dumps_motion, serialize_motion
from runform.pipeline import build_suggestion_animation, run_session, suggestion_id
from runform.service import create_app
from runform.skeleton import DEFAULT_SKELETON, PoseFrame, forward_kinematics
from runform.synth import GaitParams, synth_gait

SKEL = DEFAULT_SKELETON


def ok(label: str):
    print(f"[criterion] {label}: PASS")


@lru_cache(maxsize=None)
def ten_cycle_params():
    return GaitParams(cycle_duration=1.0, fps=30.0, n_cycles=10)


@lru_cache(maxsize=None)
def exemplar_gait():
    return synth_gait(ten_cycle_params())


@lru_cache(maxsize=None)
def knee_lift_pair():
    """Sample whose frame-grid knee-lift peak is exactly 0.6x the exemplar's."""
    exemplar = exemplar_gait()
    target = 0.6 * float(exemplar.truth.knee_lift("right").max())

    def gap(k):
        truth = synth_gait(replace(ten_cycle_params(), knee_flexion=k)).truth
        return float(truth.knee_lift("right").max()) - target

    k_solved = brentq(gap, 1.25, 2.6, xtol=1e-13)
    sample = synth_gait(replace(ten_cycle_params(), knee_flexion=k_solved))
    return sample, exemplar


class TestCriterionPhaseConstants:
    def test_phase_constants_and_event_accuracy(self):
        gait = exemplar_gait()
        start = time.perf_counter()
        events = detect_key_events(gait.sequence)
        curve = assign_phase(gait.sequence, events)
        cycles = extract_cycles(events)
        detect_foot_contacts(gait.sequence, events)
        elapsed = time.perf_counter() - start

        phases = {e.kind: e.phase for e in events}
        assert phases == {"RL": 0.0, "RE": 0.25, "LL": 0.5, "LE": 0.75}

        truth_events = gait.truth.events
        assert len(cycles) >= 5
        assert len(events) == len(truth_events)
        for got, want in zip(events, truth_events):
            assert got.kind == want["kind"]
            assert abs(got.frame_index - want["frame"]) <= 1

        assert gait.sequence.n_frames >= 300
        assert elapsed < 1.0, f"segmentation took {elapsed:.3f}s"
        assert len(curve) == gait.sequence.n_frames
        ok("phase constants 0/.25/.5/.75, events within +-1 frame, < 1 s / 300 frames")


class TestCriterionDtw:
    def test_self_alignment(self):
        seq = synth_gait(GaitParams(n_cycles=2)).sequence
        path = dtw_align(seq.rotations, seq.rotations, default_joint_weights(SKEL))
        assert path.cost == 0.0
        assert path.pairs == tuple((i, i) for i in range(seq.n_frames))
        ok("DTW self-alignment: zero cost on the diagonal")

    def test_matches_bruteforce_on_100_seeds(self):
        def reference_cost(costs):
            n, m = costs.shape

            @lru_cache(maxsize=None)
            def best(i, j):
                if i == 0 and j == 0:
                    return costs[0][0]
                cands = []
                if i > 0 and j > 0:
                    cands.append(best(i - 1, j - 1))
                if i > 0:
                    cands.append(best(i - 1, j))
                if j > 0:
                    cands.append(best(i, j - 1))
                return costs[i][j] + min(cands)

            return best(n - 1, m - 1)

        w = default_joint_weights(SKEL)
        for seed in range(100):
            rng = np.random.default_rng(seed)
            n, m = int(rng.integers(1, 13)), int(rng.integers(1, 13))
            qa = rng.normal(size=(n, 24, 4))
            qa /= np.linalg.norm(qa, axis=-1, keepdims=True)
            qb = rng.normal(size=(m, 24, 4))
            qb /= np.linalg.norm(qb, axis=-1, keepdims=True)
            got = dtw_align(qa, qb, w).cost
            want = reference_cost(cost_matrix(qa, qb, w))
            assert got == pytest.approx(want, abs=1e-9), f"seed {seed}"
        ok("DTW equals brute-force DP on 100 random instances (lengths <= 12)")

    def test_known_warp_recovery(self):
        gait = synth_gait(GaitParams(n_cycles=4, fps=30.0))
        seq = gait.sequence
        n = seq.n_frames
        total_t = (n - 1) / seq.fps

        def warp(t):
            return t + 0.02 * total_t * math.sin(math.pi * t / total_t) ** 2

        rot_b = np.empty_like(seq.rotations)
        for j in range(n):
            src = min(warp(j / seq.fps) * seq.fps, n - 1)
            lo = int(math.floor(src))
            hi = min(lo + 1, n - 1)
            u = src - lo
            for joint in range(24):
                rot_b[j, joint] = quat_slerp(
                    seq.rotations[lo, joint], seq.rotations[hi, joint], u
                )
        path = dtw_align(seq.rotations, rot_b, default_joint_weights(SKEL))
        hits = sum(
            abs(i - warp(j / seq.fps) * seq.fps) <= 2.0 for i, j in path.pairs
        )
        assert hits / len(path.pairs) >= 0.95
        ok("DTW recovers a known smooth warp within +-2 frames for >= 95% of frames")


class TestCriterionRetrieval:
    def test_analytic_pose_values(self):
        pos = SKEL.tpose_positions().copy()
        pos[SKEL.index("left_shoulder")] = [0.0, 1.4, 0.0]
        pos[SKEL.index("left_elbow")] = [0.0, 1.1, 0.0]
        pos[SKEL.index("left_wrist")] = [0.0, 1.1, 0.3]
        pos[SKEL.index("pelvis")] = [0.0, 1.0, 0.0]
        pos[SKEL.index("left_ankle")] = [0.1, 0.05, 0.3]
        theta = 0.41
        pos[SKEL.index("neck")] = pos[SKEL.index("pelvis")] + [
            0.0,
            math.cos(theta),
            math.sin(theta),
        ]
        pos = pos[None]

        a1 = AttributeMeta("a", "A1", j_a="left_shoulder", j_o="left_elbow", j_b="left_wrist")
        assert evaluate_positions(a1, pos, SKEL)[0] == pytest.approx(math.pi / 2, abs=1e-9)
        p2 = AttributeMeta("p", "P2", j_o="left_ankle", j_a="pelvis", axis="Z")
        assert evaluate_positions(p2, pos, SKEL)[0] == pytest.approx(0.3, abs=1e-9)
        p1 = AttributeMeta("d", "P1", j_o="left_wrist", j_a="pelvis")
        want = float(np.linalg.norm(pos[0, SKEL.index("left_wrist")] - pos[0, SKEL.index("pelvis")]))
        assert evaluate_positions(p1, pos, SKEL)[0] == pytest.approx(want, abs=1e-9)
        a2 = AttributeMeta("l", "A2", j_o="pelvis", j_a="neck", axis="Y")
        assert evaluate_positions(a2, pos, SKEL)[0] == pytest.approx(theta, abs=1e-9)
        ok("retrieval matches closed-form values on analytic poses within 1e-9")

    def test_waveform_recovery(self):
        from runform.gait import segment_motion

        gait = exemplar_gait()
        seg = segment_motion(gait.sequence)
        meta = AttributeMeta(
            "knee angle", "A1", j_a="right_hip", j_o="right_knee", j_b="right_ankle",
            side="right",
        )
        series = retrieve(gait.sequence, seg, meta)
        np.testing.assert_allclose(
            series.per_frame, gait.truth.knee_interior_angle("right"), atol=1e-6
        )
        ok("synthetic knee waveform recovered within 1e-6 rad")

    def test_contact_duration(self):
        from runform.gait import segment_motion

        params = GaitParams(stance_fraction=0.35, fps=30.0, n_cycles=6)
        gait = synth_gait(params)
        seg = segment_motion(gait.sequence)
        meta = next(m for m in catalog_metas() if m.name == "foot contact time (right)")
        series = retrieve(gait.sequence, seg, meta)
        cycle_frames = params.cycle_duration * params.fps
        for cv in series.per_cycle:
            assert cv.value == pytest.approx(0.35, abs=2.0 / cycle_frames)
        ok("contact duration within 2 frames of the stance fraction")


class TestCriterionThreshold:
    def test_strict_threshold_rule(self):
        meta = AttributeMeta("knee lift", "P2", j_o="left_knee", j_a="pelvis", axis="Y")
        cfg = ComparisonConfig(threshold=0.25)
        h = 1.0

        from runform.attributes import AttributeSeries, CycleValue

        def one(value):
            return AttributeSeries(meta, (CycleValue(0, value, 0),))

        e = one(0.40)
        (at_boundary,) = compare_attribute(one(0.50), e, ((0, 0),), cfg, h, h)
        assert at_boundary.rel_error == pytest.approx(0.25, abs=1e-12)
        assert not at_boundary.significant

        (above,) = compare_attribute(one(0.40 * 1.2501), e, ((0, 0),), cfg, h, h)
        assert above.rel_error == pytest.approx(0.2501, abs=1e-9)
        assert above.significant
        ok("rel error 0.25 not significant, 0.2501 significant (strict >)")

    def test_monotone_under_threshold_increase(self):
        sample, exemplar = knee_lift_pair()
        prev = None
        for thr in (0.15, 0.25, 0.4, 0.6):
            comp = run_session(
                sample.sequence, exemplar.sequence, cfg=ComparisonConfig(threshold=thr)
            )
            names = {s["name"] for s in comp.report_doc["suggestions"]}
            if prev is not None:
                assert names.issubset(prev)
            prev = names
        ok("suggestion set monotone under threshold increase")


class TestCriterionCorrectionAnimation:
    def test_animation_contract(self):
        sample, exemplar = knee_lift_pair()
        comp = run_session(sample.sequence, exemplar.sequence)
        sid = suggestion_id("knee lift (right)")
        doc = build_suggestion_animation(comp, sid)

        meta = AttributeMeta.from_doc(doc["attribute"])
        first = PoseFrame(np.array(doc["frames"][0]["q"]), np.array(doc["frames"][0]["t"]))
        last = PoseFrame(np.array(doc["frames"][-1]["q"]), np.array(doc["frames"][-1]["t"]))

        measured_first = evaluate_positions(
            meta, forward_kinematics(first, SKEL)[None], SKEL
        )[0]
        assert measured_first == pytest.approx(doc["wrongValue"], abs=1e-9)

        measured_last = evaluate_positions(
            meta, forward_kinematics(last, SKEL)[None], SKEL
        )[0]
        assert measured_last == pytest.approx(doc["targetValue"], abs=1e-3)

        changed = np.nonzero(
            np.linalg.norm(first.rotations - last.rotations, axis=-1) > 1e-12
        )[0]
        assert len(changed) == 1
        ok("animation starts at the wrong pose, attains the target within 1e-3, moves one joint")


class TestCriterionViewpoint:
    def test_angular_viewpoints_orthogonal(self):
        sample = synth_gait(replace(ten_cycle_params(), elbow_angle=1.9))
        exemplar = exemplar_gait()
        comp = run_session(sample.sequence, exemplar.sequence)
        angular = [
            r for r in comp.report.attributes
            if r.suggested and r.meta.category == "angular"
        ]
        assert angular, "constructed pair must flag the elbow angles"
        for row in angular:
            sid = suggestion_id(row.meta.name)
            doc = build_suggestion_animation(comp, sid)
            view = np.array(doc["viewpoint"]["dir"])
            up = np.array(doc["viewpoint"]["up"])
            frame = PoseFrame(
                np.array(doc["frames"][0]["q"]), np.array(doc["frames"][0]["t"])
            )
            pos = forward_kinematics(frame, SKEL)
            meta = row.meta
            o = pos[SKEL.index(meta.j_o)]
            v1 = pos[SKEL.index(meta.j_a)] - o
            v2 = pos[SKEL.index(meta.j_b)] - o
            assert abs(float(view @ v1)) < 1e-6 * np.linalg.norm(v1)
            assert abs(float(view @ v2)) < 1e-6 * np.linalg.norm(v2)
            assert float(up[1]) >= 0.0
            assert np.linalg.norm(view) == pytest.approx(1.0, abs=1e-9)
        ok("angular viewpoints orthogonal to both angle vectors, up stays upward")

    def test_degenerate_colinear_falls_back(self):
        q = np.zeros((24, 4))
        q[:, 0] = 1.0
        frame = PoseFrame(q, np.zeros(3))
        meta = AttributeMeta(
            "elbow angle", "A1", j_a="right_shoulder", j_o="right_elbow",
            j_b="right_wrist", side="right",
        )
        vp = suggest_viewpoint(frame, SKEL, meta)
        np.testing.assert_allclose(np.abs(vp.view_dir), [1.0, 0.0, 0.0], atol=1e-9)
        vp2 = viewpoint_for_vectors(
            np.array([1.0, 0.0, 0.0]), np.array([2.0, 0.0, 0.0]), "left", 1.7
        )
        assert np.linalg.norm(vp2.view_dir) == pytest.approx(1.0, abs=1e-9)
        ok("colinear angle vectors fall back to the lateral view without error")


class TestCriterionEndToEnd:
    def test_self_comparison_is_clean(self):
        seq = exemplar_gait().sequence
        comp = run_session(seq, seq)
        assert comp.report_doc["suggestions"] == []
        ok("self-comparison yields zero suggestions")

    def test_knee_lift_pair_flags_exactly_knee_lift(self):
        sample, exemplar = knee_lift_pair()
        start = time.perf_counter()
        comp = run_session(sample.sequence, exemplar.sequence)
        elapsed = time.perf_counter() - start

        assert sample.sequence.n_frames >= 300
        names = {s["name"] for s in comp.report_doc["suggestions"]}
        assert names == {"knee lift (left)", "knee lift (right)"}

        by_name = {r["name"]: r for r in comp.report_doc["attributes"]}
        for side in ("left", "right"):
            for cycle in by_name[f"knee lift ({side})"]["cycles"]:
                assert cycle["relError"] == pytest.approx(0.4, abs=1e-6)
        assert elapsed < 5.0, f"pipeline took {elapsed:.2f}s"
        ok("knee-lift x0.6 pair: exactly the knee-lift suggestion, rel error 0.4 within 1e-6, < 5 s")

    def test_report_byte_determinism(self):
        sample, exemplar = knee_lift_pair()
        a = run_session(sample.sequence, exemplar.sequence).report_bytes()
        b = run_session(sample.sequence, exemplar.sequence).report_bytes()
        assert a == b
        ok("report bytes identical across runs")


class TestCriterionParity:
    def test_cli_and_http_identical(self, tmp_path):
        sample, exemplar = knee_lift_pair()
        sample_path = tmp_path / "sample.json"
        exemplar_path = tmp_path / "exemplar.json"
        sample_path.write_text(dumps_motion(sample.sequence))
        exemplar_path.write_text(dumps_motion(exemplar.sequence))
        out = tmp_path / "report.json"
        code = cli_main([
            "analyze", "--sample", str(sample_path), "--exemplar", str(exemplar_path),
            "--out", str(out),
        ])
        assert code == 0
        cli_bytes = out.read_bytes()

        app = create_app(store_path=tmp_path / "store", ui_dir=tmp_path / "missing")
        with TestClient(app) as client:
            resp = client.post(
                "/sessions",
                json={
                    "sample": serialize_motion(sample.sequence),
                    "exemplar": serialize_motion(exemplar.sequence),
                },
            )
            sid = resp.json()["id"]
            http_bytes = client.get(f"/sessions/{sid}/report").content
        assert cli_bytes == http_bytes
        ok("CLI and HTTP reports byte-identical")


FIXTURES = __import__("pathlib").Path(__file__).resolve().parent.parent / "frontend" / "fixtures"


@pytest.mark.skipif(not FIXTURES.is_dir(), reason="secondary component not built")
class TestSecondaryEditorRoundtrip:
    def test_authored_documents_validate_and_reproduce_catalog_values(self):
        from runform.attributes import validate_meta
        from runform.gait import segment_motion

        gait = exemplar_gait()
        seg = segment_motion(gait.sequence)
        docs = json.loads((FIXTURES / "authored-attributes.json").read_text())
        assert {d["expectedCatalog"] for d in docs} == {
            "foot landing position (right)",
            "elbow angle (right)",
            "foot contact time (right)",
        }
        catalog = {m.name: m for m in catalog_metas()}
        for entry in docs:
            meta = AttributeMeta.from_doc(entry["document"])
            assert validate_meta(meta, SKEL) == []
            authored = retrieve(gait.sequence, seg, meta)
            reference = retrieve(gait.sequence, seg, catalog[entry["expectedCatalog"]])
            for a, b in zip(authored.per_cycle, reference.per_cycle):
                assert a.value == pytest.approx(b.value, abs=1e-9)
        ok("editor-authored attribute documents reproduce catalog values within 1e-9")
