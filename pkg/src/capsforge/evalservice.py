"""Blinded pairwise human evaluation of two fusion systems.

A session samples items deterministically from a seed, assigns each
item's outputs to left/right sides from the same seed, and collects
four-way judgments. Which side is which system never leaves the
server; tallies unblind at the end. The low seed bit sets side
polarity, so ``seed ^ 1`` creates the mirror session (same items,
sides swapped) used to verify blinding.

State is two append-only JSONL logs (sessions, judgments) replayed on
startup; a judgment is fsynced before it is acknowledged.
"""

from __future__ import annotations

import enum
import json
import os
import re
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Mapping
from urllib.parse import parse_qs, urlparse

from .digest import digest64, hexdigest64
from .errors import (
    CoverageGap,
    DuplicateJudgment,
    UnknownItem,
    UnknownSession,
)

SESSIONS_LOG = "sessions.jsonl"
JUDGMENTS_LOG = "judgments.jsonl"


class JudgmentChoice(str, enum.Enum):
    LEFT_WIN = "LeftWin"
    RIGHT_WIN = "RightWin"
    SIMILAR = "SimilarQuality"
    IDENTICAL = "NearlyIdentical"


@dataclass(frozen=True)
class SystemOutput:
    """One system's fusion for one source record, with shared context."""

    id: str
    raw_caption: str
    synthetic_caption: str
    output: str
    image_ref: str = ""


@dataclass(frozen=True)
class EvalItem:
    item_id: str
    raw: str
    synthetic: str
    left: str
    right: str
    left_is_a: bool  # server-side only; never serialized to annotators
    image_ref: str = ""

    def public_view(self, index: int, total: int) -> dict:
        return {
            "item_id": self.item_id,
            "index": index,
            "total": total,
            "raw": self.raw,
            "synthetic": self.synthetic,
            "image_ref": self.image_ref,
            "left": self.left,
            "right": self.right,
        }


@dataclass(frozen=True)
class EvalSession:
    session_id: str
    system_a_name: str
    system_b_name: str
    seed: int
    items: tuple[EvalItem, ...]

    def item(self, item_id: str) -> EvalItem:
        for candidate in self.items:
            if candidate.item_id == item_id:
                return candidate
        raise UnknownItem(item_id)


@dataclass(frozen=True)
class JudgmentRecord:
    session_id: str
    item_id: str
    choice: JudgmentChoice
    annotator: str
    timestamp: float


@dataclass
class EvalSummary:
    a_win: int = 0
    b_win: int = 0
    similar: int = 0
    identical: int = 0

    @property
    def judgments(self) -> int:
        return self.a_win + self.b_win + self.similar + self.identical

    def as_dict(self) -> dict:
        return {
            "a_win": self.a_win,
            "b_win": self.b_win,
            "similar": self.similar,
            "identical": self.identical,
            "judgments": self.judgments,
        }


def _sample_order_key(item_id: str, sample_seed: int) -> tuple[int, str]:
    return digest64("sample", item_id, seed=sample_seed), item_id


def _side_bit(item_id: str, sample_seed: int) -> bool:
    return bool(digest64("side", item_id, seed=sample_seed) & 1)


def create_session(
    outputs_a: Mapping[str, SystemOutput],
    outputs_b: Mapping[str, SystemOutput],
    sample_n: int,
    seed: int,
    system_a_name: str = "system_a",
    system_b_name: str = "system_b",
) -> EvalSession:
    """Sample items and fix their blinded side assignment from the seed."""
    universe = sorted(set(outputs_a) | set(outputs_b))
    if sample_n > len(universe):
        raise ValueError(f"sample_n={sample_n} exceeds {len(universe)} available ids")
    sample_seed = seed >> 1
    polarity = bool(seed & 1)
    sampled = sorted(universe, key=lambda i: _sample_order_key(i, sample_seed))[:sample_n]

    items: list[EvalItem] = []
    for item_id in sampled:
        if item_id not in outputs_a:
            raise CoverageGap(item_id, system_a_name)
        if item_id not in outputs_b:
            raise CoverageGap(item_id, system_b_name)
        out_a = outputs_a[item_id]
        out_b = outputs_b[item_id]
        left_is_a = _side_bit(item_id, sample_seed) ^ polarity
        items.append(
            EvalItem(
                item_id=item_id,
                raw=out_a.raw_caption,
                synthetic=out_a.synthetic_caption,
                image_ref=out_a.image_ref,
                left=out_a.output if left_is_a else out_b.output,
                right=out_b.output if left_is_a else out_a.output,
                left_is_a=left_is_a,
            )
        )
    session_id = "s" + hexdigest64(
        system_a_name, system_b_name, str(seed), *(i.item_id for i in items)
    )[:12]
    return EvalSession(
        session_id=session_id,
        system_a_name=system_a_name,
        system_b_name=system_b_name,
        seed=seed,
        items=tuple(items),
    )


def _session_to_obj(session: EvalSession) -> dict:
    return {
        "session_id": session.session_id,
        "system_a_name": session.system_a_name,
        "system_b_name": session.system_b_name,
        "seed": session.seed,
        "items": [
            {
                "item_id": item.item_id,
                "raw": item.raw,
                "synthetic": item.synthetic,
                "image_ref": item.image_ref,
                "left": item.left,
                "right": item.right,
                "left_is_a": item.left_is_a,
            }
            for item in session.items
        ],
    }


def _session_from_obj(obj: dict) -> EvalSession:
    return EvalSession(
        session_id=obj["session_id"],
        system_a_name=obj["system_a_name"],
        system_b_name=obj["system_b_name"],
        seed=int(obj["seed"]),
        items=tuple(
            EvalItem(
                item_id=item["item_id"],
                raw=item["raw"],
                synthetic=item["synthetic"],
                image_ref=item.get("image_ref", ""),
                left=item["left"],
                right=item["right"],
                left_is_a=bool(item["left_is_a"]),
            )
            for item in obj["items"]
        ),
    )


class EvalStore:
    """Durable session and judgment state, rebuilt by log replay."""

    def __init__(self, state_dir: str | Path):
        self.state_dir = Path(state_dir)
        self.state_dir.mkdir(parents=True, exist_ok=True)
        self._sessions_path = self.state_dir / SESSIONS_LOG
        self._judgments_path = self.state_dir / JUDGMENTS_LOG
        self._lock = threading.RLock()
        self._sessions: dict[str, EvalSession] = {}
        self._judgments: dict[str, dict[tuple[str, str], JudgmentRecord]] = {}
        self._replay()

    def _replay(self) -> None:
        if self._sessions_path.exists():
            with open(self._sessions_path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        session = _session_from_obj(json.loads(line))
                    except (json.JSONDecodeError, KeyError, TypeError):
                        continue  # torn tail write
                    self._sessions[session.session_id] = session
                    self._judgments.setdefault(session.session_id, {})
        if self._judgments_path.exists():
            with open(self._judgments_path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        obj = json.loads(line)
                        record = JudgmentRecord(
                            session_id=obj["session_id"],
                            item_id=obj["item_id"],
                            choice=JudgmentChoice(obj["choice"]),
                            annotator=obj["annotator"],
                            timestamp=float(obj["timestamp"]),
                        )
                    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                        continue
                    self._judgments.setdefault(record.session_id, {})[
                        (record.item_id, record.annotator)
                    ] = record

    def _append(self, path: Path, obj: dict) -> None:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def add_session(self, session: EvalSession) -> EvalSession:
        with self._lock:
            existing = self._sessions.get(session.session_id)
            if existing is not None:
                return existing  # deterministic ids make re-creation idempotent
            self._append(self._sessions_path, _session_to_obj(session))
            self._sessions[session.session_id] = session
            self._judgments.setdefault(session.session_id, {})
            return session

    def get_session(self, session_id: str) -> EvalSession:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def list_sessions(self) -> list[dict]:
        with self._lock:
            return [
                {
                    "session_id": s.session_id,
                    "system_a": s.system_a_name,
                    "system_b": s.system_b_name,
                    "total": len(s.items),
                    "judgments": len(self._judgments.get(s.session_id, {})),
                }
                for s in self._sessions.values()
            ]

    def judged_count(self, session_id: str, annotator: str) -> int:
        with self._lock:
            judgments = self._judgments.get(session_id, {})
            return sum(1 for item_id, who in judgments if who == annotator)

    def next_item(
        self, session_id: str, annotator: str
    ) -> tuple[EvalItem | None, int, int, int]:
        """Lowest-index unjudged item for this annotator, or None when done.

        Returns (item, index, judged, total).
        """
        with self._lock:
            session = self.get_session(session_id)
            judgments = self._judgments.get(session_id, {})
            judged = sum(1 for item_id, who in judgments if who == annotator)
            for index, item in enumerate(session.items):
                if (item.item_id, annotator) not in judgments:
                    return item, index, judged, len(session.items)
            return None, len(session.items), judged, len(session.items)

    def submit(
        self, session_id: str, item_id: str, choice: JudgmentChoice, annotator: str
    ) -> JudgmentRecord:
        with self._lock:
            session = self.get_session(session_id)
            session.item(item_id)  # raises UnknownItem
            key = (item_id, annotator)
            if key in self._judgments[session_id]:
                raise DuplicateJudgment(f"{item_id} already judged by {annotator!r}")
            record = JudgmentRecord(
                session_id=session_id,
                item_id=item_id,
                choice=choice,
                annotator=annotator,
                timestamp=time.time(),
            )
            self._append(
                self._judgments_path,
                {
                    "session_id": record.session_id,
                    "item_id": record.item_id,
                    "choice": record.choice.value,
                    "annotator": record.annotator,
                    "timestamp": record.timestamp,
                },
            )
            self._judgments[session_id][key] = record
            return record

    def tally(self, session_id: str) -> EvalSummary:
        """Unblind judgments into per-system counts; partial tallies allowed."""
        with self._lock:
            session = self.get_session(session_id)
            summary = EvalSummary()
            for record in self._judgments.get(session_id, {}).values():
                item = session.item(record.item_id)
                if record.choice is JudgmentChoice.SIMILAR:
                    summary.similar += 1
                elif record.choice is JudgmentChoice.IDENTICAL:
                    summary.identical += 1
                elif record.choice is JudgmentChoice.LEFT_WIN:
                    if item.left_is_a:
                        summary.a_win += 1
                    else:
                        summary.b_win += 1
                else:  # RIGHT_WIN
                    if item.left_is_a:
                        summary.b_win += 1
                    else:
                        summary.a_win += 1
            return summary


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".map": "application/json",
    ".ico": "image/x-icon",
}

_PLACEHOLDER_PAGE = (
    "<!doctype html><meta charset='utf-8'><title>capsforge eval</title>"
    "<body style='font-family:sans-serif;max-width:40em;margin:4em auto'>"
    "<h1>capsforge eval service</h1>"
    "<p>No annotator UI is installed. Point <code>--ui-dir</code> at the built "
    "frontend assets, or drive the HTTP API directly:</p>"
    "<ul><li>POST /sessions</li><li>GET /sessions/{id}/next?annotator=NAME</li>"
    "<li>POST /sessions/{id}/judgments</li><li>GET /sessions/{id}/tally</li></ul>"
)

_NEXT_RE = re.compile(r"^/sessions/([^/]+)/next$")
_JUDG_RE = re.compile(r"^/sessions/([^/]+)/judgments$")
_TALLY_RE = re.compile(r"^/sessions/([^/]+)/tally$")


class _EvalHandler(BaseHTTPRequestHandler):
    store: EvalStore
    ui_dir: Path | None = None
    quiet: bool = True

    def log_message(self, fmt, *args):  # noqa: N802
        if not self.quiet:
            super().log_message(fmt, *args)

    def _send_json(self, code: int, obj: dict) -> None:
        body = json.dumps(obj, ensure_ascii=False).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length) if length else b""
        try:
            obj = json.loads(raw.decode("utf-8")) if raw else {}
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise ValueError("request body is not valid JSON")
        if not isinstance(obj, dict):
            raise ValueError("request body must be a JSON object")
        return obj

    def _serve_static(self, path: str) -> None:
        if path == "/":
            path = "/index.html"
        if self.ui_dir is None:
            if path == "/index.html":
                body = _PLACEHOLDER_PAGE.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/html; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            self._send_json(404, {"error": "not found"})
            return
        base = self.ui_dir.resolve()
        target = (base / path.lstrip("/")).resolve()
        if not str(target).startswith(str(base)) or not target.is_file():
            self._send_json(404, {"error": "not found"})
            return
        body = target.read_bytes()
        self.send_response(200)
        self.send_header(
            "Content-Type", _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        )
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self) -> None:  # noqa: N802
        parsed = urlparse(self.path)
        path = parsed.path
        try:
            if path == "/sessions":
                self._send_json(200, {"sessions": self.store.list_sessions()})
                return
            match = _NEXT_RE.match(path)
            if match:
                query = parse_qs(parsed.query)
                annotator = query.get("annotator", ["anonymous"])[0]
                item, index, judged, total = self.store.next_item(match.group(1), annotator)
                if item is None:
                    self._send_json(200, {"done": True, "judged": judged, "total": total})
                else:
                    self._send_json(
                        200, {"done": False, "judged": judged, "item": item.public_view(index, total)}
                    )
                return
            match = _TALLY_RE.match(path)
            if match:
                session = self.store.get_session(match.group(1))
                tally = self.store.tally(match.group(1))
                payload = tally.as_dict()
                payload.update(
                    {
                        "session_id": session.session_id,
                        "system_a": session.system_a_name,
                        "system_b": session.system_b_name,
                        "total_items": len(session.items),
                    }
                )
                self._send_json(200, payload)
                return
            self._serve_static(path)
        except UnknownSession as exc:
            self._send_json(404, {"error": "unknown session", "detail": str(exc)})
        except Exception as exc:  # pragma: no cover - defensive
            self._send_json(500, {"error": "internal", "detail": str(exc)})

    def do_POST(self) -> None:  # noqa: N802
        path = urlparse(self.path).path
        try:
            body = self._read_body()
            if path == "/sessions":
                outputs_a = {}
                outputs_b = {}
                for item in body.get("items", []):
                    record_id = item["id"]
                    shared = {
                        "id": record_id,
                        "raw_caption": item.get("raw_caption", ""),
                        "synthetic_caption": item.get("synthetic_caption", ""),
                        "image_ref": item.get("image_ref", ""),
                    }
                    if "output_a" in item:
                        outputs_a[record_id] = SystemOutput(output=item["output_a"], **shared)
                    if "output_b" in item:
                        outputs_b[record_id] = SystemOutput(output=item["output_b"], **shared)
                session = create_session(
                    outputs_a,
                    outputs_b,
                    sample_n=int(body.get("sample_n", len(outputs_a))),
                    seed=int(body.get("seed", 0)),
                    system_a_name=body.get("system_a", "system_a"),
                    system_b_name=body.get("system_b", "system_b"),
                )
                session = self.store.add_session(session)
                self._send_json(
                    201,
                    {
                        "session_id": session.session_id,
                        "total": len(session.items),
                        "system_a": session.system_a_name,
                        "system_b": session.system_b_name,
                    },
                )
                return
            match = _JUDG_RE.match(path)
            if match:
                record = self.store.submit(
                    match.group(1),
                    item_id=body["item_id"],
                    choice=JudgmentChoice(body["choice"]),
                    annotator=body.get("annotator", "anonymous"),
                )
                judged = self.store.judged_count(match.group(1), record.annotator)
                total = len(self.store.get_session(match.group(1)).items)
                self._send_json(200, {"ok": True, "judged": judged, "total": total})
                return
            self._send_json(404, {"error": "not found"})
        except UnknownSession as exc:
            self._send_json(404, {"error": "unknown session", "detail": str(exc)})
        except UnknownItem as exc:
            self._send_json(404, {"error": "unknown item", "detail": str(exc)})
        except DuplicateJudgment as exc:
            self._send_json(409, {"error": "duplicate judgment", "detail": str(exc)})
        except CoverageGap as exc:
            self._send_json(400, {"error": "coverage gap", "detail": str(exc)})
        except (KeyError, ValueError) as exc:
            self._send_json(400, {"error": "bad request", "detail": str(exc)})
        except Exception as exc:  # pragma: no cover - defensive
            self._send_json(500, {"error": "internal", "detail": str(exc)})


def make_server(
    store: EvalStore,
    host: str = "127.0.0.1",
    port: int = 8325,
    ui_dir: str | Path | None = None,
    quiet: bool = True,
) -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server bound to the store."""
    handler = type(
        "EvalHandler",
        (_EvalHandler,),
        {
            "store": store,
            "ui_dir": Path(ui_dir) if ui_dir is not None else None,
            "quiet": quiet,
        },
    )
    return ThreadingHTTPServer((host, port), handler)
