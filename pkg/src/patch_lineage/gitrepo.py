"""Commit extraction from git repositories.

Commits are read through the git executable (read-only log plumbing), never
by touching object storage directly.  A directory of pre-exported
``<hash>.patch`` files works as a VCS-free alternative.
"""

from __future__ import annotations

import email
import email.policy
import email.utils
import re
import subprocess
from pathlib import Path

from .diffparse import parse_unified_diff
from .mailparse import split_message_and_diff
from .model import Diff, Patch, PatchId

_REC_SEP = "\x00"
_FIELD_SEP = "\x1f"
_BODY_SEP = "\x1e"

# Control-character separators are emitted via %x escapes: argv must not
# contain raw NUL bytes.
_LOG_FORMAT = "%x00%H%x1f%ct%x1f%an <%ae>%x1f%P%x1f%B%x1e"


class RepoUnavailable(OSError):
    """Repository path missing, unreadable, or not a git repository."""


class BadRange(ValueError):
    """Revision range did not resolve."""


def _run_git(repo_path: str | Path, args: list[str]) -> str:
    path = Path(repo_path)
    if not path.exists():
        raise RepoUnavailable(f"no such repository: {path}")
    try:
        proc = subprocess.run(
            ["git", "-C", str(path), *args],
            capture_output=True,
            check=False,
        )
    except OSError as exc:
        raise RepoUnavailable(f"cannot invoke git: {exc}") from exc
    if proc.returncode != 0:
        stderr = proc.stderr.decode("utf-8", errors="replace").strip()
        if "not a git repository" in stderr.lower():
            raise RepoUnavailable(stderr)
        raise BadRange(stderr or f"git {' '.join(args)} failed")
    return proc.stdout.decode("utf-8", errors="replace")


def _split_message(body: str) -> tuple[str, tuple[str, ...]]:
    lines = body.splitlines()
    subject = lines[0].strip() if lines else ""
    rest = lines[1:]
    while rest and not rest[0].strip():
        rest = rest[1:]
    while rest and not rest[-1].strip():
        rest = rest[:-1]
    return subject, tuple(rest)


def load_commit_records(repo_path: str | Path, range_expr: str) -> list[tuple[Patch, str]]:
    """One (Patch, raw diff text) per non-merge, non-empty commit in range.

    Diffs are taken against the first parent; the submission date is the
    committer date.  Extraction order follows git's topological order, so
    re-running on an unchanged repository is bit-identical.
    """
    out = _run_git(
        repo_path,
        [
            "log",
            "--topo-order",
            "--no-color",
            f"--format={_LOG_FORMAT}",
            "-p",
            "--no-renames",
            range_expr,
        ],
    )
    records: list[tuple[Patch, str]] = []
    for record in out.split(_REC_SEP):
        if not record.strip():
            continue
        head, _, tail = record.partition(_BODY_SEP)
        fields = head.split(_FIELD_SEP)
        if len(fields) != 5:
            continue
        sha, ctime, author, parents, body = fields
        if len(parents.split()) > 1:
            continue  # merge commits carry no single diff
        diff_text = tail.strip("\n")
        diff = parse_unified_diff(diff_text)
        if diff.total_changed_lines < 1:
            continue  # empty commits are not patches
        subject, message = _split_message(body)
        patch = Patch(
            id=PatchId.commit(sha.strip().lower()),
            subject=subject,
            message=message,
            diff=diff,
            submission_date=int(ctime),
            author=author.strip() or None,
        )
        records.append((patch, diff_text))
    return records


def load_commits(repo_path: str | Path, range_expr: str) -> list[Patch]:
    return [patch for patch, _ in load_commit_records(repo_path, range_expr)]


_HASH_STEM = re.compile(r"^[0-9a-f]{7,40}$")


def load_patch_dir_records(path: str | Path) -> list[tuple[Patch, str]]:
    """VCS-free ingestion: read ``<hash>.patch`` files in format-patch layout.

    Each file is a single mail-shaped document whose Date header supplies the
    commit date and whose body holds the message and diff.  Files are read in
    sorted name order.
    """
    root = Path(path)
    if not root.is_dir():
        raise RepoUnavailable(f"no such patch directory: {root}")
    records: list[tuple[Patch, str]] = []
    for entry in sorted(root.glob("*.patch")):
        stem = entry.stem.lower()
        if not _HASH_STEM.match(stem):
            continue
        msg = email.message_from_bytes(entry.read_bytes(), policy=email.policy.default)
        date_header = msg.get("Date")
        if not date_header:
            continue
        when = email.utils.parsedate_to_datetime(str(date_header))
        payload = msg.get_payload(decode=True)
        body = (
            payload.decode(msg.get_content_charset() or "utf-8", errors="replace")
            if payload is not None
            else str(msg.get_payload())
        )
        message, diff_text = split_message_and_diff(body)
        if diff_text is None:
            continue
        diff: Diff = parse_unified_diff(diff_text)
        if diff.total_changed_lines < 1:
            continue
        subject = str(msg.get("Subject") or "")
        subject = re.sub(r"^\s*(\[[^\]]*\]\s*)+", "", subject).strip()
        author = msg.get("From")
        patch = Patch(
            id=PatchId.commit(stem),
            subject=subject,
            message=tuple(message),
            diff=diff,
            submission_date=int(when.timestamp()),
            author=str(author) if author else None,
        )
        records.append((patch, diff_text))
    return records


def load_patch_dir(path: str | Path) -> list[Patch]:
    return [patch for patch, _ in load_patch_dir_records(path)]
