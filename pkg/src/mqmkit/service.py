"""HTTP backend for the human annotation workflow.

State is an append-only JSONL log: every accepted write is flushed and
fsynced before it is acknowledged, each record carries a checksum, and a
restart replays the log to reconstruct identical state. Reads serve the
in-memory view; writes are serialized by a store-wide lock. An optional
snapshot keeps restart cost bounded for long logs.

Endpoints (JSON unless noted): GET /units, GET /units/{id},
PUT /units/{id}/annotation, POST /units/{id}/preview-score,
GET /export?format=mqm-text|jsonl, GET /progress.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence, Union

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware

from .corpus import unit_to_dict
from .mqm_format import serialize_document
from .scoring import score_unit
from .taxonomy import (
    MqmScore,
    TranslationUnit,
    UnitAnnotation,
    validate_annotation,
)

__all__ = [
    "TaskStatus",
    "AnnotationTask",
    "StorageCorruption",
    "StaleRevision",
    "AnnotationStore",
    "create_app",
]


class TaskStatus(Enum):
    UNANNOTATED = "unannotated"
    IN_PROGRESS = "in_progress"
    DONE = "done"


class StorageCorruption(RuntimeError):
    pass


class StaleRevision(ValueError):
    def __init__(self, expected: int, actual: int):
        self.actual = actual
        super().__init__(f"stale revision {expected}, current is {actual}")


class ValidationFailed(ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("annotation failed validation")


@dataclass(frozen=True)
class AnnotationTask:
    unit_id: str
    status: TaskStatus
    annotation: Optional[UnitAnnotation]
    annotator_id: Optional[str]
    revision: int
    updated_at: Optional[float]

    def summary(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "status": self.status.value,
            "annotator_id": self.annotator_id,
            "revision": self.revision,
            "updated_at": self.updated_at,
        }

    def to_dict(self) -> dict:
        data = self.summary()
        data["annotation"] = self.annotation.to_dict() if self.annotation else None
        return data


def _record_checksum(payload: dict) -> str:
    canonical = json.dumps(payload, ensure_ascii=False, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class AnnotationStore:
    """Dataset units plus their annotation state, backed by a JSONL log."""

    def __init__(
        self,
        units: Sequence[TranslationUnit],
        log_path: Union[str, Path],
        snapshot_path: Optional[Union[str, Path]] = None,
        snapshot_every: int = 0,
    ):
        self._lock = threading.Lock()
        self.units: dict[str, TranslationUnit] = {}
        for unit in units:
            if unit.id in self.units:
                raise ValueError(f"duplicate unit id {unit.id!r}")
            unit.require_hypothesis()
            self.units[unit.id] = unit
        self._tasks: dict[str, AnnotationTask] = {
            uid: AnnotationTask(uid, TaskStatus.UNANNOTATED, None, None, 0, None)
            for uid in self.units
        }
        self._by_annotator: dict[str, dict[str, UnitAnnotation]] = {}
        self.log_path = Path(log_path)
        self.snapshot_path = Path(snapshot_path) if snapshot_path else None
        self.snapshot_every = snapshot_every
        self._applied_records = 0
        self._replay()

    # -- persistence ----------------------------------------------------

    def _replay(self) -> None:
        start = 0
        if self.snapshot_path and self.snapshot_path.exists():
            start = self._load_snapshot()
        if not self.log_path.exists():
            return
        with self.log_path.open("r", encoding="utf-8") as handle:
            for index, line in enumerate(handle):
                if not line.strip():
                    continue
                record = self._verify_line(line, index + 1)
                if index < start:
                    continue
                self._apply(record)
                self._applied_records = index + 1

    def _verify_line(self, line: str, line_number: int) -> dict:
        try:
            record = json.loads(line)
            payload = record["payload"]
            checksum = record["checksum"]
        except (json.JSONDecodeError, KeyError, TypeError):
            raise StorageCorruption(f"log line {line_number} is unreadable")
        if _record_checksum(payload) != checksum:
            raise StorageCorruption(f"log line {line_number} fails its checksum")
        return payload

    def verify_log(self) -> None:
        """Re-read the whole log, checking every checksum."""
        if not self.log_path.exists():
            return
        with self.log_path.open("r", encoding="utf-8") as handle:
            for index, line in enumerate(handle):
                if line.strip():
                    self._verify_line(line, index + 1)

    def _apply(self, payload: dict) -> AnnotationTask:
        annotation = UnitAnnotation.from_dict(payload["annotation"])
        status = TaskStatus.DONE if payload.get("done", True) else TaskStatus.IN_PROGRESS
        task = AnnotationTask(
            unit_id=payload["unit_id"],
            status=status,
            annotation=annotation,
            annotator_id=payload.get("annotator_id"),
            revision=int(payload["revision"]),
            updated_at=float(payload["timestamp"]),
        )
        self._tasks[task.unit_id] = task
        if task.annotator_id:
            self._by_annotator.setdefault(task.annotator_id, {})[task.unit_id] = annotation
        return task

    def _append(self, payload: dict) -> None:
        record = {"payload": payload, "checksum": _record_checksum(payload)}
        line = json.dumps(record, ensure_ascii=False)
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        with self.log_path.open("a", encoding="utf-8") as handle:
            handle.write(line + "\n")
            handle.flush()
            os.fsync(handle.fileno())
        self._applied_records += 1

    def _maybe_snapshot(self) -> None:
        if self.snapshot_every and self._applied_records % self.snapshot_every == 0:
            self._write_snapshot()

    def _write_snapshot(self) -> None:
        if not self.snapshot_path:
            return
        state = {
            "applied_records": self._applied_records,
            "tasks": [t.to_dict() for t in self._tasks.values() if t.revision > 0],
        }
        tmp = self.snapshot_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(state, ensure_ascii=False), encoding="utf-8")
        tmp.replace(self.snapshot_path)

    def _load_snapshot(self) -> int:
        state = json.loads(self.snapshot_path.read_text(encoding="utf-8"))
        for data in state["tasks"]:
            annotation = UnitAnnotation.from_dict(data["annotation"])
            task = AnnotationTask(
                unit_id=data["unit_id"],
                status=TaskStatus(data["status"]),
                annotation=annotation,
                annotator_id=data.get("annotator_id"),
                revision=int(data["revision"]),
                updated_at=data.get("updated_at"),
            )
            self._tasks[task.unit_id] = task
            if task.annotator_id:
                self._by_annotator.setdefault(task.annotator_id, {})[task.unit_id] = annotation
        return int(state["applied_records"])

    # -- operations ------------------------------------------------------

    def get_task(self, unit_id: str) -> AnnotationTask:
        return self._tasks[unit_id]

    def list_tasks(
        self,
        status: Optional[TaskStatus] = None,
        corpus: Optional[str] = None,
        offset: int = 0,
        limit: int = 50,
    ) -> tuple[int, list[AnnotationTask]]:
        tasks = [self._tasks[uid] for uid in sorted(self._tasks)]
        if status is not None:
            tasks = [t for t in tasks if t.status is status]
        if corpus is not None:
            tasks = [
                t
                for t in tasks
                if self.units[t.unit_id].corpus is not None
                and self.units[t.unit_id].corpus.value == corpus
            ]
        return len(tasks), tasks[offset : offset + limit]

    def put_annotation(
        self,
        unit_id: str,
        annotation: UnitAnnotation,
        annotator_id: Optional[str] = None,
        done: bool = True,
        expected_revision: Optional[int] = None,
    ) -> tuple[AnnotationTask, MqmScore]:
        """Validate, persist (log append + fsync), then apply. Last write
        wins; pass ``expected_revision`` for optimistic concurrency."""
        unit = self.units[unit_id]
        violations = validate_annotation(unit, annotation)
        hard = [v for v in violations if not v.is_warning]
        if hard:
            raise ValidationFailed(hard)
        with self._lock:
            current = self._tasks[unit_id]
            if expected_revision is not None and expected_revision != current.revision:
                raise StaleRevision(expected_revision, current.revision)
            now = time.time()
            if current.updated_at is not None and now <= current.updated_at:
                now = current.updated_at + 1e-6
            payload = {
                "unit_id": unit_id,
                "annotation": annotation.to_dict(),
                "annotator_id": annotator_id,
                "done": done,
                "revision": current.revision + 1,
                "timestamp": now,
            }
            self._append(payload)
            task = self._apply(payload)
            self._maybe_snapshot()
        return task, score_unit(annotation)

    def progress(self) -> dict:
        counts = {status.value: 0 for status in TaskStatus}
        for task in self._tasks.values():
            counts[task.status.value] += 1
        return {"total": len(self._tasks), **counts}

    def done_items(
        self, annotator_id: Optional[str] = None
    ) -> list[tuple[TranslationUnit, UnitAnnotation]]:
        if annotator_id is not None:
            chosen = self._by_annotator.get(annotator_id, {})
            return [(self.units[uid], chosen[uid]) for uid in sorted(chosen)]
        return [
            (self.units[uid], self._tasks[uid].annotation)
            for uid in sorted(self._tasks)
            if self._tasks[uid].status is TaskStatus.DONE
        ]

    def export_text(self, annotator_id: Optional[str] = None) -> str:
        return serialize_document(self.done_items(annotator_id))

    def export_jsonl(self) -> str:
        lines = []
        for uid in sorted(self.units):
            unit, task = self.units[uid], self._tasks[uid]
            record = unit_to_dict(unit)
            record["status"] = task.status.value
            if task.annotation is not None:
                record["annotation"] = task.annotation.to_dict()
                record["score"] = score_unit(task.annotation).to_dict()
                record["annotator_id"] = task.annotator_id
                record["revision"] = task.revision
            lines.append(json.dumps(record, ensure_ascii=False))
        return "\n".join(lines) + ("\n" if lines else "")


def create_app(store: AnnotationStore, cors_origins: Sequence[str] = ("*",)) -> FastAPI:
    app = FastAPI(title="mqmkit annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    def _unit_or_404(unit_id: str) -> TranslationUnit:
        try:
            return store.units[unit_id]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown unit {unit_id!r}")

    def _parse_annotation(body: dict, unit_id: str) -> UnitAnnotation:
        data = body.get("annotation")
        if data is None:
            raise HTTPException(status_code=422, detail="body lacks 'annotation'")
        data = {**data, "unit_id": data.get("unit_id", unit_id)}
        try:
            return UnitAnnotation.from_dict(data)
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=f"malformed annotation: {exc}")

    @app.get("/units")
    def list_units(
        status: Optional[str] = None,
        corpus: Optional[str] = None,
        offset: int = Query(0, ge=0),
        limit: int = Query(50, ge=1, le=500),
    ):
        task_status = None
        if status is not None:
            try:
                task_status = TaskStatus(status)
            except ValueError:
                raise HTTPException(status_code=400, detail=f"unknown status {status!r}")
        if corpus is not None and corpus not in {
            unit.corpus.value for unit in store.units.values() if unit.corpus
        }:
            raise HTTPException(status_code=400, detail=f"unknown corpus {corpus!r}")
        total, tasks = store.list_tasks(task_status, corpus, offset, limit)
        return {
            "total": total,
            "offset": offset,
            "limit": limit,
            "tasks": [t.summary() for t in tasks],
        }

    @app.get("/units/{unit_id}")
    def get_unit(unit_id: str):
        unit = _unit_or_404(unit_id)
        return {"unit": unit_to_dict(unit), "task": store.get_task(unit_id).to_dict()}

    @app.put("/units/{unit_id}/annotation")
    def put_annotation(unit_id: str, body: dict):
        _unit_or_404(unit_id)
        annotation = _parse_annotation(body, unit_id)
        revision = body.get("revision")
        try:
            task, score = store.put_annotation(
                unit_id,
                annotation,
                annotator_id=body.get("annotator_id"),
                done=bool(body.get("done", True)),
                expected_revision=int(revision) if revision is not None else None,
            )
        except StaleRevision as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValidationFailed as exc:
            raise HTTPException(
                status_code=422, detail=[v.to_dict() for v in exc.violations]
            )
        return {"task": task.to_dict(), "score": score.to_dict()}

    @app.post("/units/{unit_id}/preview-score")
    def preview_score(unit_id: str, body: dict):
        unit = _unit_or_404(unit_id)
        annotation = _parse_annotation(body, unit_id)
        violations = validate_annotation(unit, annotation)
        hard = [v.to_dict() for v in violations if not v.is_warning]
        if hard:
            raise HTTPException(status_code=422, detail=hard)
        return {
            "score": score_unit(annotation).to_dict(),
            "warnings": [v.to_dict() for v in violations if v.is_warning],
        }

    @app.get("/export")
    def export(format: str = "mqm-text", annotator: Optional[str] = None):
        try:
            store.verify_log()
        except StorageCorruption as exc:
            raise HTTPException(status_code=500, detail=str(exc))
        if format == "mqm-text":
            return Response(
                content=store.export_text(annotator), media_type="text/plain; charset=utf-8"
            )
        if format == "jsonl":
            return Response(
                content=store.export_jsonl(), media_type="application/x-ndjson"
            )
        raise HTTPException(status_code=400, detail=f"unknown export format {format!r}")

    @app.get("/progress")
    def progress():
        return store.progress()

    return app
