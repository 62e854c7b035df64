"""Disk-backed session store.

Each session is a plain directory: copied inputs, config, user attributes,
the generated report, and lazily built animation documents. Everything is
re-derivable from the inputs, so a process restart only costs a recompute.
"""
from __future__ import annotations

import json
import threading
import time
import uuid
from pathlib import Path

from .attributes import AttributeMeta, MetaIssue, catalog_metas, validate_meta
from .comparison import ComparisonConfig
from .errors import EngineError, UnknownSuggestionError
from .motion_io import parse_motion
from .pipeline import SessionComputation, build_suggestion_animation, canonical_json, run_session


class UnknownSessionError(EngineError):
    pass


class AttributeValidationError(EngineError):
    def __init__(self, issues):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)


class SessionStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._cache: dict[str, SessionComputation] = {}

    def _dir(self, session_id: str) -> Path:
        d = self.root / session_id
        if not d.is_dir():
            raise UnknownSessionError(f"unknown session: {session_id}")
        return d

    def _user_metas(self, session_dir: Path) -> list[AttributeMeta]:
        attr_path = session_dir / "attributes.json"
        if not attr_path.exists():
            return []
        docs = json.loads(attr_path.read_text())
        return [AttributeMeta.from_doc(d) for d in docs]

    def _config(self, session_dir: Path) -> ComparisonConfig:
        doc = json.loads((session_dir / "config.json").read_text())
        return ComparisonConfig(
            threshold=doc.get("threshold", 0.25),
            rel_error_floor=doc.get("relErrorFloor", 0.05),
        )

    def _recompute(self, session_id: str) -> SessionComputation:
        d = self._dir(session_id)
        sample = parse_motion((d / "sample.json").read_bytes())
        exemplar = parse_motion((d / "exemplar.json").read_bytes())
        comp = run_session(
            sample, exemplar, self._user_metas(d), self._config(d)
        )
        _write_atomic(d / "report.json", comp.report_bytes())
        self._cache[session_id] = comp
        return comp

    def _computation(self, session_id: str) -> SessionComputation:
        comp = self._cache.get(session_id)
        if comp is None:
            with self._lock:
                comp = self._cache.get(session_id)
                if comp is None:
                    comp = self._recompute(session_id)
        return comp

    def create(
        self,
        sample_doc: dict | bytes,
        exemplar_doc: dict | bytes,
        config: ComparisonConfig | None = None,
        attributes: list[dict] | None = None,
    ) -> str:
        sample = parse_motion(sample_doc)
        exemplar = parse_motion(exemplar_doc)
        config = config or ComparisonConfig()
        user_metas = [AttributeMeta.from_doc(doc) for doc in (attributes or [])]
        for meta in user_metas:
            issues = validate_meta(meta, sample.skeleton)
            if issues:
                raise AttributeValidationError(issues)
        comp = run_session(sample, exemplar, user_metas, config)

        session_id = uuid.uuid4().hex[:12]
        with self._lock:
            d = self.root / session_id
            d.mkdir(parents=True)
            _write_atomic(
                d / "sample.json",
                sample_doc if isinstance(sample_doc, bytes) else canonical_json(sample_doc),
            )
            _write_atomic(
                d / "exemplar.json",
                exemplar_doc
                if isinstance(exemplar_doc, bytes)
                else canonical_json(exemplar_doc),
            )
            _write_atomic(d / "config.json", canonical_json(config.to_doc()))
            _write_atomic(d / "attributes.json", canonical_json(attributes or []))
            _write_atomic(d / "meta.json", canonical_json({"id": session_id, "createdAt": time.time()}))
            _write_atomic(d / "report.json", comp.report_bytes())
            self._cache[session_id] = comp
        return session_id

    def report_bytes(self, session_id: str) -> bytes:
        d = self._dir(session_id)
        path = d / "report.json"
        if path.exists():
            return path.read_bytes()
        return self._computation(session_id).report_bytes()

    def profile_bytes(self, session_id: str) -> bytes:
        report = json.loads(self.report_bytes(session_id))
        return canonical_json(report["profiles"])

    def add_attribute(self, session_id: str, meta_doc: dict) -> bytes:
        with self._lock:
            d = self._dir(session_id)
            comp = self._cache.get(session_id)
            skeleton = (
                comp.sample.skeleton
                if comp
                else parse_motion((d / "sample.json").read_bytes()).skeleton
            )
            meta = AttributeMeta.from_doc(meta_doc)
            issues = validate_meta(meta, skeleton)
            if issues:
                raise AttributeValidationError(issues)
            docs = json.loads((d / "attributes.json").read_text())
            existing = {m["name"] for m in docs}
            existing.update(m.name for m in catalog_metas())
            if meta.name in existing:
                raise AttributeValidationError([MetaIssue("name", "name already defined")])
            docs.append(meta_doc)
            _write_atomic(d / "attributes.json", canonical_json(docs))
            # whole-report regeneration also drops stale cached animations
            anim_dir = d / "animations"
            if anim_dir.is_dir():
                for f in anim_dir.glob("*.json"):
                    f.unlink()
            comp = self._recompute(session_id)
            return comp.report_bytes()

    def animation_bytes(self, session_id: str, sid: str) -> bytes:
        d = self._dir(session_id)
        path = d / "animations" / f"{sid}.json"
        if path.exists():
            return path.read_bytes()
        comp = self._computation(session_id)
        try:
            doc = build_suggestion_animation(comp, sid)
        except UnknownSuggestionError:
            raise
        data = canonical_json(doc)
        path.parent.mkdir(exist_ok=True)
        _write_atomic(path, data)
        return data

    def delete(self, session_id: str) -> None:
        import shutil

        d = self._dir(session_id)
        with self._lock:
            self._cache.pop(session_id, None)
            shutil.rmtree(d)

    def list_sessions(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir() if p.is_dir())
