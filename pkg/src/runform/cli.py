"""Command-line interface.

`analyze` runs the pipeline on two pose documents and writes the report
(and optionally every suggestion animation); by default it runs in-process,
with --server it becomes a thin client of a running service instance, and
both paths produce byte-identical documents. `serve` starts the HTTP
service; `synth` writes synthetic running motions for demos and testing.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import urllib.request
from pathlib import Path

from .attributes import AttributeMeta, validate_meta
from .comparison import ComparisonConfig
from .errors import EngineError, MotionFormatError, PipelineError
from .motion_io import dumps_motion, parse_motion
from .pipeline import build_suggestion_animation, canonical_json, run_session
from .synth import GaitParams, synth_gait

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PIPELINE = 3

PRESETS = {
    "expert": GaitParams(),
    "amateur": GaitParams(
        hip_swing=0.32, knee_flexion=0.95, elbow_angle=1.1, arm_swing=0.35, torso_lean=0.28
    ),
}


def _load_attribute_docs(path: str | None) -> list[dict]:
    if not path:
        return []
    docs = json.loads(Path(path).read_text())
    if not isinstance(docs, list):
        raise MotionFormatError("attributes file must hold a JSON list")
    return docs


def _analyze_local(args) -> int:
    sample = parse_motion(Path(args.sample).read_bytes())
    exemplar = parse_motion(Path(args.exemplar).read_bytes())
    attr_docs = _load_attribute_docs(args.attributes)
    metas = [AttributeMeta.from_doc(d) for d in attr_docs]
    for meta in metas:
        issues = validate_meta(meta, sample.skeleton)
        if issues:
            raise MotionFormatError(
                "invalid attribute: " + "; ".join(str(i) for i in issues)
            )
    cfg = ComparisonConfig(threshold=args.threshold, rel_error_floor=args.rel_error_floor)
    comp = run_session(sample, exemplar, metas, cfg)
    report = comp.report_bytes()
    _write_output(args.out, report)
    if args.emit_animations:
        out_dir = Path(args.emit_animations)
        out_dir.mkdir(parents=True, exist_ok=True)
        doc = comp.report_doc
        for sugg in doc["suggestions"]:
            anim = build_suggestion_animation(comp, sugg["id"])
            (out_dir / f"{sugg['id']}.json").write_bytes(canonical_json(anim))
    return EXIT_OK


def _analyze_remote(args) -> int:
    base = args.server.rstrip("/")
    body = {
        "sample": json.loads(Path(args.sample).read_text()),
        "exemplar": json.loads(Path(args.exemplar).read_text()),
        "config": {"threshold": args.threshold, "relErrorFloor": args.rel_error_floor},
        "attributes": _load_attribute_docs(args.attributes),
    }
    req = urllib.request.Request(
        f"{base}/sessions",
        data=json.dumps(body).encode("utf-8"),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    with urllib.request.urlopen(req) as resp:
        session_id = json.loads(resp.read())["id"]
    with urllib.request.urlopen(f"{base}/sessions/{session_id}/report") as resp:
        report = resp.read()
    _write_output(args.out, report)
    if args.emit_animations:
        out_dir = Path(args.emit_animations)
        out_dir.mkdir(parents=True, exist_ok=True)
        for sugg in json.loads(report)["suggestions"]:
            url = f"{base}/sessions/{session_id}/animations/{sugg['id']}"
            with urllib.request.urlopen(url) as resp:
                (out_dir / f"{sugg['id']}.json").write_bytes(resp.read())
    return EXIT_OK


def _write_output(out: str | None, data: bytes) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.write(b"\n")


def _cmd_analyze(args) -> int:
    try:
        if args.server:
            return _analyze_remote(args)
        return _analyze_local(args)
    except MotionFormatError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except PipelineError as e:
        print(f"pipeline error: {e}", file=sys.stderr)
        return EXIT_PIPELINE
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PIPELINE


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(store_path=args.store, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def _cmd_synth(args) -> int:
    params = PRESETS[args.preset]
    overrides = {}
    for name in ("cycle_duration", "stance_fraction", "fps", "n_cycles",
                 "hip_swing", "knee_flexion", "elbow_angle", "arm_swing", "torso_lean"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if overrides:
        from dataclasses import replace

        params = replace(params, **overrides)
    seq = synth_gait(params).sequence
    Path(args.out).write_text(dumps_motion(seq))
    print(f"wrote {seq.n_frames} frames to {args.out}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="runform", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="compare a sample run against an exemplar")
    analyze.add_argument("--sample", required=True, help="sample pose-sequence file")
    analyze.add_argument("--exemplar", required=True, help="exemplar pose-sequence file")
    analyze.add_argument("--attributes", help="JSON list of user attribute documents")
    analyze.add_argument("--threshold", type=float, default=0.25)
    analyze.add_argument("--rel-error-floor", type=float, default=0.05, dest="rel_error_floor")
    analyze.add_argument("--out", help="report output path (default stdout)")
    analyze.add_argument("--emit-animations", help="directory for suggestion animations")
    analyze.add_argument("--server", help="analyze through a running service instead")
    analyze.set_defaults(fn=_cmd_analyze)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default=os.environ.get("RUNFORM_HOST", "127.0.0.1"))
    serve.add_argument("--port", type=int, default=int(os.environ.get("RUNFORM_PORT", "8787")))
    serve.add_argument("--store", default=None, help="session store directory")
    serve.add_argument("--ui", default=None, help="studio bundle directory")
    serve.set_defaults(fn=_cmd_serve)

    synth = sub.add_parser("synth", help="write a synthetic running motion")
    synth.add_argument("--out", required=True)
    synth.add_argument("--preset", choices=sorted(PRESETS), default="expert")
    synth.add_argument("--cycle-duration", type=float, dest="cycle_duration")
    synth.add_argument("--stance-fraction", type=float, dest="stance_fraction")
    synth.add_argument("--fps", type=float)
    synth.add_argument("--n-cycles", type=int, dest="n_cycles")
    synth.add_argument("--hip-swing", type=float, dest="hip_swing")
    synth.add_argument("--knee-flexion", type=float, dest="knee_flexion")
    synth.add_argument("--elbow-angle", type=float, dest="elbow_angle")
    synth.add_argument("--arm-swing", type=float, dest="arm_swing")
    synth.add_argument("--torso-lean", type=float, dest="torso_lean")
    synth.set_defaults(fn=_cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
