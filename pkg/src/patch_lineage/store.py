"""On-disk corpus store, analysis result files, and the review judgment log.

The store is a plain directory: one UTF-8 patch file per mail/commit plus a
JSON-lines manifest, so it stays diffable and inspectable.  Result files use
the same text format as curated reference clusterings, with the analysis
configuration recorded in a comment header.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .diffparse import parse_unified_diff
from .gitrepo import load_commit_records, load_patch_dir_records
from .mailparse import (
    MissingMessageId,
    extract_patch_records,
    parse_mbox,
    parse_subject_tags,
)
from .model import (
    KIND_MAIL,
    ClusterSet,
    Corpus,
    Patch,
    PatchId,
    SeriesInfo,
    SimilarityConfig,
)
from .evaluation import load_clusters_file, write_clusters_file

MANIFEST_NAME = "manifest.jsonl"
COVERS_NAME = "covers.jsonl"
PATCH_DIR = "patches"

_SAFE_CHARS = re.compile(r"[^A-Za-z0-9@._-]")


def _safe_filename(pid: PatchId) -> str:
    digest = hashlib.sha1(pid.value.encode("utf-8")).hexdigest()[:10]
    readable = _SAFE_CHARS.sub("_", pid.value.strip("<>"))[:80]
    return f"{pid.kind}-{readable}-{digest}.patch"


@dataclass
class MailIngestStats:
    mails: int = 0
    patches: int = 0
    warnings: int = 0
    duplicates: int = 0
    cover_letters: int = 0

    def summary(self) -> str:
        return (
            f"mails={self.mails} patches={self.patches} "
            f"warnings={self.warnings} duplicates={self.duplicates}"
        )


class CorpusStore:
    """Directory-backed persistence for ingested patches."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._ids: set[PatchId] | None = None

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_NAME

    def _known_ids(self) -> set[PatchId]:
        if self._ids is None:
            self._ids = set()
            if self.manifest_path.exists():
                for entry in self._manifest_entries():
                    self._ids.add(PatchId(entry["kind"], entry["value"]))
        return self._ids

    def _manifest_entries(self) -> Iterator[dict]:
        with open(self.manifest_path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    yield json.loads(line)

    def add_record(self, patch: Patch, diff_text: str, extra: dict | None = None) -> bool:
        """Persist one patch; returns False when the id is already present."""
        if patch.id in self._known_ids():
            return False
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / PATCH_DIR).mkdir(exist_ok=True)
        rel = f"{PATCH_DIR}/{_safe_filename(patch.id)}"
        body = "\n".join(patch.message)
        text = (body + "\n" if body else "") + diff_text.rstrip("\n") + "\n"
        (self.root / rel).write_text(text, encoding="utf-8")
        entry = {
            "kind": patch.id.kind,
            "value": patch.id.value,
            "date": patch.submission_date,
            "subject": patch.subject,
            "author": patch.author,
            "series": (
                [patch.series.revision, patch.series.position, patch.series.total]
                if patch.series
                else None
            ),
            "files": list(patch.filenames),
            "message_lines": len(patch.message),
            "path": rel,
        }
        if extra:
            entry.update(extra)
        with open(self.manifest_path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(entry, ensure_ascii=False) + "\n")
        self._known_ids().add(patch.id)
        return True

    def add_cover_letter(self, meta: dict) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        with open(self.root / COVERS_NAME, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(meta, ensure_ascii=False) + "\n")

    def load(self) -> Corpus:
        """Rebuild the corpus from disk; the inverse of ingestion."""
        mails: list[Patch] = []
        commits: list[Patch] = []
        if not self.manifest_path.exists():
            return Corpus()
        for entry in self._manifest_entries():
            text = (self.root / entry["path"]).read_text(encoding="utf-8")
            lines = text.splitlines()
            n = entry["message_lines"]
            message = tuple(lines[:n])
            diff = parse_unified_diff("\n".join(lines[n:]))
            series = None
            if entry.get("series"):
                rev, pos, tot = entry["series"]
                series = SeriesInfo(revision=rev, position=pos, total=tot)
            patch = Patch(
                id=PatchId(entry["kind"], entry["value"]),
                subject=entry["subject"],
                message=message,
                diff=diff,
                submission_date=entry["date"],
                author=entry.get("author"),
                series=series,
            )
            if patch.id.kind == KIND_MAIL:
                mails.append(patch)
            else:
                commits.append(patch)
        return Corpus(mails=mails, commits=commits)


def ingest_mbox_paths(paths: Iterable[str | Path], store: CorpusStore) -> MailIngestStats:
    """Read mbox archives (optionally gzipped) into the store.

    Duplicate Message-IDs keep their first occurrence; drops and decode
    problems are counted as warnings rather than failing the run.
    """
    stats = MailIngestStats()
    for path in paths:
        data = Path(path).read_bytes()
        for mail in parse_mbox(data):
            stats.mails += 1
            if mail.parse_warning:
                stats.warnings += 1
            try:
                records = extract_patch_records(mail)
            except MissingMessageId:
                stats.warnings += 1
                continue
            if not records:
                revision, position, total, _ = parse_subject_tags(mail.subject)
                if position == 0 and mail.message_id:
                    stats.cover_letters += 1
                    store.add_cover_letter(
                        {
                            "message_id": mail.message_id,
                            "subject": mail.subject,
                            "date": mail.date,
                            "series": [revision, position, total],
                            "in_reply_to": mail.in_reply_to,
                            "references": mail.references,
                        }
                    )
                continue
            for patch, diff_text in records:
                added = store.add_record(
                    patch,
                    diff_text,
                    extra={
                        "in_reply_to": mail.in_reply_to,
                        "references": mail.references,
                    },
                )
                if added:
                    stats.patches += 1
                else:
                    stats.duplicates += 1
                    stats.warnings += 1
    return stats


def ingest_repo(store: CorpusStore, repo_path: str | Path, range_expr: str) -> int:
    count = 0
    for patch, diff_text in load_commit_records(repo_path, range_expr):
        if store.add_record(patch, diff_text):
            count += 1
    return count


def ingest_patch_dir(store: CorpusStore, path: str | Path) -> int:
    count = 0
    for patch, diff_text in load_patch_dir_records(path):
        if store.add_record(patch, diff_text):
            count += 1
    return count


def write_result(
    cs: ClusterSet,
    path: str | Path,
    cfg: SimilarityConfig,
    window_days: int,
    engine: str,
) -> None:
    comment = (
        f"config tf={cfg.tf} th={cfg.th} dlr={cfg.dlr} w={cfg.w} ta={cfg.ta} "
        f"window_days={window_days} engine={engine}"
    )
    write_clusters_file(cs, path, comments=[comment])


def read_result(path: str | Path) -> tuple[ClusterSet, dict]:
    """Load a result file and whatever configuration its header recorded."""
    meta: dict = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            body = line.lstrip("#").strip()
            if body.startswith("config "):
                for token in body[len("config ") :].split():
                    key, _, value = token.partition("=")
                    if not value:
                        continue
                    if key in ("tf", "th", "dlr", "w", "ta"):
                        meta[key] = float(value)
                    elif key == "window_days":
                        meta[key] = int(value)
                    else:
                        meta[key] = value
    return load_clusters_file(path), meta


@dataclass(frozen=True)
class Judgment:
    a: PatchId
    b: PatchId
    verdict: str

    VERDICTS = ("same", "different")

    def pair(self) -> tuple[PatchId, PatchId]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


class JudgmentLog:
    """Append-only review verdict log: one JSON object per line, fsynced.

    Replay is deterministic, so restarting a review session reproduces the
    exact same pending-candidate queue.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def append(self, a: PatchId, b: PatchId, verdict: str) -> Judgment:
        if verdict not in Judgment.VERDICTS:
            raise ValueError(f"verdict must be one of {Judgment.VERDICTS}: {verdict!r}")
        judgment = Judgment(a=a, b=b, verdict=verdict)
        first, second = judgment.pair()
        line = json.dumps(
            {
                "a": {"kind": first.kind, "value": first.value},
                "b": {"kind": second.kind, "value": second.value},
                "verdict": verdict,
            },
            ensure_ascii=False,
        )
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as handle:
            handle.write(line + "\n")
            handle.flush()
            os.fsync(handle.fileno())
        return judgment

    def entries(self) -> list[Judgment]:
        if not self.path.exists():
            return []
        out = []
        with open(self.path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                raw = json.loads(line)
                out.append(
                    Judgment(
                        a=PatchId(raw["a"]["kind"], raw["a"]["value"]),
                        b=PatchId(raw["b"]["kind"], raw["b"]["value"]),
                        verdict=raw["verdict"],
                    )
                )
        return out

    def judged_pairs(self) -> set[tuple[PatchId, PatchId]]:
        return {j.pair() for j in self.entries()}

    def groundtruth(self) -> ClusterSet:
        """Connected components of the accumulated "same" verdicts."""
        cs = ClusterSet()
        for judgment in self.entries():
            cs.add(judgment.a)
            cs.add(judgment.b)
            if judgment.verdict == "same":
                cs.union(judgment.a, judgment.b)
        return cs
