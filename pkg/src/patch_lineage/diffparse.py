"""Unified diff parsing and commit message tag stripping.

The parser is deliberately forgiving: patches transported through mailing
lists are often whitespace-damaged, so hunk line counts are used to delimit
hunks but never enforced, and unknown trailing material simply ends the parse.
"""

from __future__ import annotations

import re

from .model import Diff, FileDiff, Hunk


class MalformedDiff(ValueError):
    """Raised when diff structure is irrecoverably out of order."""


_HUNK_RE = re.compile(r"^@@\s+-(\d+)(?:,(\d+))?\s+\+(\d+)(?:,(\d+))?\s+@@(.*)$")
_GIT_HEADER_RE = re.compile(r"^diff --git ")

# Extended git header lines that may follow "diff --git"; the rename/copy and
# mode/binary ones mark content-free file entries.
_META_HEADERS = (
    "old mode ",
    "new mode ",
    "deleted file mode ",
    "new file mode ",
    "copy from ",
    "copy to ",
    "rename from ",
    "rename to ",
    "similarity index ",
    "dissimilarity index ",
    "index ",
    "Binary files ",
    "GIT binary patch",
)

# Default inventory of review/maintainer tags stripped from messages before
# comparison.  Projects with other conventions can pass their own set.
DEFAULT_TAG_PREFIXES = frozenset(
    {
        "signed-off-by",
        "acked-by",
        "tested-by",
        "reviewed-by",
        "reported-by",
        "suggested-by",
        "cc",
        "fixes",
        "link",
    }
)


def strip_tags(message: list[str] | tuple[str, ...], tags: frozenset[str] = DEFAULT_TAG_PREFIXES) -> list[str]:
    """Drop tag lines ("Signed-off-by: ...", "Cc: ..."), keep everything else.

    A line is a tag line when the text before its first colon, case-folded,
    is in ``tags``.  Lines without a colon are never tags.  Idempotent.
    """
    out = []
    for line in message:
        head, sep, _ = line.partition(":")
        if sep and head.strip().lower() in tags:
            continue
        out.append(line)
    return out


def changed_line_count(diff: Diff) -> int:
    """Insertions plus deletions across all hunks of all files."""
    return diff.total_changed_lines


def _is_plain_file_header(lines: list[str], i: int) -> bool:
    return (
        lines[i].startswith("--- ")
        and i + 1 < len(lines)
        and lines[i + 1].startswith("+++ ")
    )


def _clean_path(raw: str) -> str:
    """Strip a/ b/ prefixes and trailing timestamp metadata from a header path."""
    path = raw.split("\t", 1)[0].strip()
    if path == "/dev/null":
        return path
    if path.startswith(("a/", "b/")):
        path = path[2:]
    return path


def _paths_from_git_line(line: str) -> tuple[str, str]:
    # "diff --git a/old b/new"; paths containing " b/" make this ambiguous,
    # so results are only used when no ---/+++ or rename lines follow.
    body = line[len("diff --git ") :]
    idx = body.rfind(" b/")
    if idx < 0:
        return body.strip(), body.strip()
    return _clean_path(body[:idx]), _clean_path(body[idx + 1 :])


class _FileBuilder:
    def __init__(self, old_path: str = "", new_path: str = ""):
        self.old_path = old_path
        self.new_path = new_path
        self.hunks: list[Hunk] = []
        self.got_paths = False

    def build(self) -> FileDiff:
        return FileDiff(
            old_path=self.old_path,
            new_path=self.new_path,
            hunks=tuple(self.hunks),
            meta_only=not self.hunks,
        )


def parse_unified_diff(text: str) -> Diff:
    """Parse unified-diff text into a Diff.

    Leading non-diff material (commit message, diffstat) is skipped; parsing
    starts at the first file header ("diff --git", or a "--- "/"+++ " pair).
    Raises MalformedDiff if a hunk header precedes any file header, or a
    change line appears under a file header before any hunk opened.
    """
    lines = text.splitlines()
    n = len(lines)
    files: list[_FileBuilder] = []
    i = 0

    # Preamble: look for the first file header.
    while i < n:
        line = lines[i]
        if _GIT_HEADER_RE.match(line) or _is_plain_file_header(lines, i):
            break
        if _HUNK_RE.match(line):
            raise MalformedDiff(f"hunk header before any file header: {line!r}")
        i += 1

    current: _FileBuilder | None = None
    while i < n:
        line = lines[i]

        if _GIT_HEADER_RE.match(line):
            current = _FileBuilder(*_paths_from_git_line(line))
            files.append(current)
            i += 1
            continue

        if _is_plain_file_header(lines, i):
            if current is None or current.hunks or current.got_paths:
                current = _FileBuilder()
                files.append(current)
            current.old_path = _clean_path(lines[i][4:])
            current.new_path = _clean_path(lines[i + 1][4:])
            current.got_paths = True
            i += 2
            continue

        hunk_match = _HUNK_RE.match(line)
        if hunk_match:
            assert current is not None  # preamble scan guarantees a file header
            i = _parse_hunk(lines, i, hunk_match, current)
            continue

        if current is not None and not current.hunks:
            # Extended git header region.
            if line.startswith("rename from ") or line.startswith("copy from "):
                current.old_path = line.split(" from ", 1)[1].strip()
                i += 1
                continue
            if line.startswith("rename to ") or line.startswith("copy to "):
                current.new_path = line.split(" to ", 1)[1].strip()
                i += 1
                continue
            if any(line.startswith(h) for h in _META_HEADERS):
                i += 1
                continue
            if line[:1] in ("+", "-"):
                raise MalformedDiff(f"change line outside any hunk: {line!r}")
            break  # trailing material ends the parse

        if line.startswith("\\"):
            i += 1
            continue
        break  # trailing material after hunks ends the parse

    return Diff(files=_merge_duplicate_paths(b.build() for b in files))


def _parse_hunk(lines: list[str], i: int, match: re.Match, current: _FileBuilder) -> int:
    old_start = int(match.group(1))
    old_len = int(match.group(2)) if match.group(2) is not None else 1
    new_start = int(match.group(3))
    new_len = int(match.group(4)) if match.group(4) is not None else 1
    heading = match.group(5).strip()

    insertions: list[str] = []
    deletions: list[str] = []
    context: list[str] = []
    old_rem, new_rem = old_len, new_len
    i += 1
    while i < len(lines) and (old_rem > 0 or new_rem > 0):
        line = lines[i]
        # Structural headers terminate a hunk even when counts claim more
        # lines: damaged counts must not swallow the next file.
        if _GIT_HEADER_RE.match(line) or _HUNK_RE.match(line):
            break
        if line.startswith("+"):
            insertions.append(line[1:])
            new_rem -= 1
        elif line.startswith("-"):
            deletions.append(line[1:])
            old_rem -= 1
        elif line.startswith(" "):
            context.append(line[1:])
            old_rem -= 1
            new_rem -= 1
        elif line.startswith("\\"):
            pass  # "\ No newline at end of file"
        else:
            # Whitespace-damaged context line (prefix column eaten in transit).
            context.append(line)
            old_rem -= 1
            new_rem -= 1
        i += 1

    current.hunks.append(
        Hunk(
            heading=heading,
            old_start=old_start,
            old_len=old_len,
            new_start=new_start,
            new_len=new_len,
            insertions=tuple(insertions),
            deletions=tuple(deletions),
            context=tuple(context),
        )
    )
    return i


def _merge_duplicate_paths(file_diffs) -> tuple[FileDiff, ...]:
    merged: dict[str, FileDiff] = {}
    order: list[str] = []
    for fd in file_diffs:
        key = fd.path
        if key not in merged:
            merged[key] = fd
            order.append(key)
        else:
            prev = merged[key]
            merged[key] = FileDiff(
                old_path=prev.old_path,
                new_path=prev.new_path,
                hunks=prev.hunks + fd.hunks,
                meta_only=prev.meta_only and fd.meta_only,
            )
    return tuple(merged[k] for k in order)


def render_diff(diff: Diff) -> str:
    """Serialize a Diff back to parseable text.

    Debug helper: hunk line interleaving is not preserved (deletions, then
    insertions, then context), but re-parsing yields an equal Diff for any
    well-formed input.
    """
    out: list[str] = []
    for fd in diff.files:
        out.append(f"diff --git a/{fd.path} b/{fd.path}")
        if fd.meta_only and not fd.hunks:
            out.append(f"rename from {fd.old_path}")
            out.append(f"rename to {fd.new_path}")
            continue
        out.append(f"--- {fd.old_path}")
        out.append(f"+++ {fd.new_path}")
        for h in fd.hunks:
            old_len = len(h.deletions) + len(h.context)
            new_len = len(h.insertions) + len(h.context)
            header = f"@@ -{h.old_start},{old_len} +{h.new_start},{new_len} @@"
            if h.heading:
                header += f" {h.heading}"
            out.append(header)
            out.extend("-" + line for line in h.deletions)
            out.extend("+" + line for line in h.insertions)
            out.extend(" " + line for line in h.context)
    return "\n".join(out) + ("\n" if out else "")
