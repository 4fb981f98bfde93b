"""Label-collection HTTP service consumed by the annotation UI.

Endpoints (JSON):
  GET  /api/session?rater=R   -> {guideline, categories, rater_id}
  GET  /api/items/next?rater=R -> {item_id, title, thumbnail_url} | 204
  POST /api/labels {item_id, rater, choice} -> 201
  GET  /api/progress          -> per-rater done/total counts
  GET  /api/export            -> items x raters grid (null = unlabeled)

Every submission is appended to a JSONL audit log; on duplicates the last
write per (item, rater) wins. The service can also serve a static UI bundle
from a directory mounted at the web root.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .categories import CATEGORY_DISPLAY, CHOICE_ORDER, CHOICE_SET


@dataclass
class SessionStore:
    """In-memory label state backed by an append-only JSONL log."""

    items: list[dict]
    raters: list[str]
    guideline: str
    log_path: Path
    labels: dict[tuple[str, str], str] = field(default_factory=dict)
    seq: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self.item_ids = [it["item_id"] for it in self.items]
        if len(set(self.item_ids)) != len(self.item_ids):
            raise ValueError("duplicate item_id in session items")
        self._item_set = set(self.item_ids)
        self.log_path = Path(self.log_path)
        if self.log_path.exists():
            self._replay()

    def _replay(self):
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                self.labels[(entry["item_id"], entry["rater"])] = entry["choice"]
                self.seq = max(self.seq, entry["seq"])

    def submit(self, item_id: str, rater: str, choice: str) -> int:
        if rater not in self.raters:
            raise KeyError(rater)
        if item_id not in self._item_set:
            raise ValueError(f"item {item_id!r} is not part of this session")
        if choice not in CHOICE_SET:
            raise ValueError(f"invalid choice {choice!r}")
        with self._lock:
            self.seq += 1
            entry = {"seq": self.seq, "item_id": item_id, "rater": rater, "choice": choice}
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
            self.labels[(item_id, rater)] = choice
            return self.seq

    def next_item(self, rater: str) -> dict | None:
        if rater not in self.raters:
            raise KeyError(rater)
        for item in self.items:
            if (item["item_id"], rater) not in self.labels:
                return item
        return None

    def progress(self) -> dict:
        total = len(self.items)
        per_rater = {
            r: sum(1 for i in self.item_ids if (i, r) in self.labels) for r in self.raters
        }
        return {"total_items": total, "raters": {r: {"done": d, "total": total} for r, d in per_rater.items()}}

    def export(self) -> dict:
        cells = [
            [self.labels.get((item_id, rater)) for rater in self.raters]
            for item_id in self.item_ids
        ]
        return {"item_ids": list(self.item_ids), "raters": list(self.raters), "cells": cells}


class LabelSubmission(BaseModel):
    item_id: str
    rater: str
    choice: str


def create_app(store: SessionStore, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="annotation service")

    def _auth(rater: str) -> str:
        if rater not in store.raters:
            raise HTTPException(status_code=401, detail=f"unknown rater {rater!r}")
        return rater

    @app.get("/api/session")
    def session(rater: str = Query(...)):
        _auth(rater)
        categories = [dict(token=tok, **CATEGORY_DISPLAY[tok]) for tok in CHOICE_ORDER]
        return {"guideline": store.guideline, "categories": categories, "rater_id": rater}

    @app.get("/api/items/next")
    def items_next(rater: str = Query(...)):
        _auth(rater)
        item = store.next_item(rater)
        if item is None:
            return Response(status_code=204)
        return {
            "item_id": item["item_id"],
            "title": item["title"],
            "thumbnail_url": item.get("thumbnail_url", ""),
        }

    @app.post("/api/labels", status_code=201)
    def post_label(submission: LabelSubmission):
        _auth(submission.rater)
        try:
            seq = store.submit(submission.item_id, submission.rater, submission.choice)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"seq": seq}

    @app.get("/api/progress")
    def progress():
        return store.progress()

    @app.get("/api/export")
    def export():
        return store.export()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app


def load_sample_items(path: str | Path) -> list[dict]:
    """Read sample items (line-delimited JSON) for an annotation session."""
    items = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            items.append(
                {
                    "item_id": obj.get("item_id") or obj["video_id"],
                    "title": obj["title"],
                    "thumbnail_url": obj.get("thumbnail_url") or obj.get("thumbnail_ref", ""),
                }
            )
    return items
