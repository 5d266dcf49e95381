"""Shared domain types: patch identities, diffs, configuration and clusterings.

A patch is a commit message plus a diff, regardless of whether it came from a
mailing list or from a repository.  Everything downstream (similarity scoring,
clustering, evaluation) works on these types only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, total_ordering
from typing import Iterable, Iterator

KIND_MAIL = "mail"
KIND_COMMIT = "commit"

_COMMIT_HASH_RE = re.compile(r"^[0-9a-f]{7,40}$")

# Sort rank per kind: mail identities order before commit identities so that
# mixed clusters get a deterministic, mail-first canonical id.
_KIND_RANK = {KIND_MAIL: 0, KIND_COMMIT: 1}


@total_ordering
@dataclass(frozen=True)
class PatchId:
    """Identity of a patch: a mail Message-ID or a commit hash."""

    kind: str
    value: str

    def __post_init__(self) -> None:
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown patch id kind: {self.kind!r}")
        if not self.value:
            raise ValueError("patch id value must be non-empty")
        if self.kind == KIND_COMMIT and not _COMMIT_HASH_RE.match(self.value):
            raise ValueError(f"not a commit hash: {self.value!r}")

    @classmethod
    def mail(cls, message_id: str) -> "PatchId":
        return cls(KIND_MAIL, message_id)

    @classmethod
    def commit(cls, sha: str) -> "PatchId":
        return cls(KIND_COMMIT, sha)

    @property
    def is_mail(self) -> bool:
        return self.kind == KIND_MAIL

    @property
    def is_commit(self) -> bool:
        return self.kind == KIND_COMMIT

    @property
    def sort_key(self) -> tuple[int, str]:
        return (_KIND_RANK[self.kind], self.value)

    def __lt__(self, other: "PatchId") -> bool:
        if not isinstance(other, PatchId):
            return NotImplemented
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return self.value


def canonical_order(a: PatchId, b: PatchId) -> int:
    """Total order over patch ids: -1, 0 or 1.  Mails sort before commits."""
    ka, kb = a.sort_key, b.sort_key
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0


@dataclass(frozen=True)
class Hunk:
    """One contiguous change region: its heading, position and classified lines.

    Line lists carry the text only; the leading diff marker column
    (' ', '+', '-') is stripped at parse time.
    """

    heading: str
    old_start: int
    old_len: int
    new_start: int
    new_len: int
    insertions: tuple[str, ...] = ()
    deletions: tuple[str, ...] = ()
    context: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for name in ("insertions", "deletions", "context"):
            val = getattr(self, name)
            if not isinstance(val, tuple):
                object.__setattr__(self, name, tuple(val))

    @property
    def changed_line_count(self) -> int:
        return len(self.insertions) + len(self.deletions)


@dataclass(frozen=True)
class FileDiff:
    """Changes to one file.  ``meta_only`` marks rename/mode/binary entries
    that legitimately carry no hunks."""

    old_path: str
    new_path: str
    hunks: tuple[Hunk, ...] = ()
    meta_only: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.hunks, tuple):
            object.__setattr__(self, "hunks", tuple(self.hunks))
        if not self.hunks and not self.meta_only:
            raise ValueError(f"file entry without hunks must be meta_only: {self.path}")

    @property
    def path(self) -> str:
        """Comparison path: the new path, or the old one for deletions."""
        if self.new_path and self.new_path != "/dev/null":
            return self.new_path
        return self.old_path

    @property
    def changed_line_count(self) -> int:
        return sum(h.changed_line_count for h in self.hunks)


@dataclass(frozen=True)
class Diff:
    """A parsed unified diff: an ordered set of per-file changes."""

    files: tuple[FileDiff, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.files, tuple):
            object.__setattr__(self, "files", tuple(self.files))
        paths = [f.path for f in self.files]
        if len(paths) != len(set(paths)):
            raise ValueError("duplicate file paths within one diff")

    @cached_property
    def total_changed_lines(self) -> int:
        return sum(f.changed_line_count for f in self.files)

    @property
    def paths(self) -> tuple[str, ...]:
        return tuple(f.path for f in self.files)


@dataclass(frozen=True)
class SeriesInfo:
    """Subject-tag metadata: revision round and position within a series."""

    revision: int = 1
    position: int | None = None
    total: int | None = None

    def __post_init__(self) -> None:
        if self.revision < 1:
            raise ValueError("series revision must be >= 1")
        if self.position is not None and self.position < 0:
            raise ValueError("series position must be >= 0")
        if self.total is not None and self.total < 1:
            raise ValueError("series total must be >= 1")

    @property
    def is_cover_letter(self) -> bool:
        return self.position == 0


@dataclass(frozen=True)
class Patch:
    """The unit of comparison: message plus diff, with identity and metadata.

    ``subject`` holds the summary line (cleaned mail subject, or the first
    line of a commit message); ``message`` holds the remaining body lines.
    ``submission_date`` is UTC epoch seconds: the mail Date header for mails,
    the committer date for commits.
    """

    id: PatchId
    subject: str
    message: tuple[str, ...]
    diff: Diff
    submission_date: int
    author: str | None = None
    series: SeriesInfo | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.message, tuple):
            object.__setattr__(self, "message", tuple(self.message))
        if self.diff.total_changed_lines < 1:
            raise ValueError(f"patch {self.id} has no changed lines")
        object.__setattr__(self, "submission_date", int(self.submission_date))

    @property
    def filenames(self) -> tuple[str, ...]:
        return self.diff.paths


@dataclass(frozen=True)
class SimilarityConfig:
    """The five comparison tuneables, each confined to [0, 1].

    tf: filename similarity threshold for considering two files at all.
    th: hunk heading similarity threshold for pairing hunks.
    dlr: minimum changed-line-count ratio (smaller / bigger) below which a
         pair is rejected outright.
    w: weight of the message score against the diff score.
    ta: combined score at or above which two patches count as similar.
    """

    tf: float = 1.0
    th: float = 1.0
    dlr: float = 0.4
    w: float = 0.3
    ta: float = 0.82

    def __post_init__(self) -> None:
        for name in ("tf", "th", "dlr", "w", "ta"):
            val = getattr(self, name)
            if not (0.0 <= val <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {val}")


@dataclass(frozen=True)
class SimilarityScore:
    """Outcome of rating one pair: component scores and the combined value."""

    r_msg: float
    r_diff: float
    combined: float
    gated: bool = False

    def __post_init__(self) -> None:
        if self.gated and self.combined != 0.0:
            raise ValueError("gated score must have combined == 0")
        for name in ("r_msg", "r_diff", "combined"):
            val = getattr(self, name)
            if not (0.0 <= val <= 1.0):
                raise ValueError(f"{name} out of range: {val}")


class ClusterSet:
    """A partition of patch ids, maintained as a disjoint-set forest.

    Each cluster is identified by its canonical id: the minimum member under
    the total patch-id order.  The exposed partition is independent of the
    order in which unions were applied.
    """

    def __init__(self, universe: Iterable[PatchId] = ()):
        self._parent: dict[PatchId, PatchId] = {}
        self._min: dict[PatchId, PatchId] = {}
        self._size: dict[PatchId, int] = {}
        for pid in universe:
            self.add(pid)

    def add(self, pid: PatchId) -> None:
        if pid not in self._parent:
            self._parent[pid] = pid
            self._min[pid] = pid
            self._size[pid] = 1

    def __contains__(self, pid: PatchId) -> bool:
        return pid in self._parent

    def ids(self) -> Iterator[PatchId]:
        return iter(self._parent)

    @property
    def element_count(self) -> int:
        return len(self._parent)

    @property
    def cluster_count(self) -> int:
        return sum(1 for pid, parent in self._parent.items() if pid == parent)

    def find(self, pid: PatchId) -> PatchId:
        root = pid
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[pid] != root:
            self._parent[pid], pid = root, self._parent[pid]
        return root

    def union(self, a: PatchId, b: PatchId) -> PatchId:
        """Merge the clusters of a and b; idempotent.  Returns the new root."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size.pop(rb)
        if self._min[rb] < self._min[ra]:
            self._min[ra] = self._min[rb]
        del self._min[rb]
        return ra

    def same(self, a: PatchId, b: PatchId) -> bool:
        return self.find(a) == self.find(b)

    def canonical(self, pid: PatchId) -> PatchId:
        return self._min[self.find(pid)]

    def clusters(self) -> dict[PatchId, frozenset[PatchId]]:
        """Canonical id -> members, for every cluster."""
        groups: dict[PatchId, set[PatchId]] = {}
        for pid in self._parent:
            groups.setdefault(self.find(pid), set()).add(pid)
        return {self._min[root]: frozenset(members) for root, members in groups.items()}

    def members(self, pid: PatchId) -> frozenset[PatchId]:
        root = self.find(pid)
        return frozenset(p for p in self._parent if self.find(p) == root)

    def partition(self) -> frozenset[frozenset[PatchId]]:
        return frozenset(self.clusters().values())

    def restrict(self, ids: Iterable[PatchId]) -> "ClusterSet":
        """Project the partition onto a subset of the universe."""
        keep = set(ids)
        missing = keep - set(self._parent)
        if missing:
            raise KeyError(f"ids not in cluster set: {sorted(missing)[:3]}")
        out = ClusterSet(keep)
        by_root: dict[PatchId, PatchId] = {}
        for pid in sorted(keep):
            root = self.find(pid)
            if root in by_root:
                out.union(by_root[root], pid)
            else:
                by_root[root] = pid
        return out

    def copy(self) -> "ClusterSet":
        out = ClusterSet()
        out._parent = dict(self._parent)
        out._min = dict(self._min)
        out._size = dict(self._size)
        return out

    @classmethod
    def from_clusters(cls, groups: Iterable[Iterable[PatchId]]) -> "ClusterSet":
        out = cls()
        for group in groups:
            members = list(group)
            for pid in members:
                out.add(pid)
            for other in members[1:]:
                out.union(members[0], other)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClusterSet):
            return NotImplemented
        return self.partition() == other.partition()

    def __repr__(self) -> str:
        return f"ClusterSet({self.cluster_count} clusters over {self.element_count} ids)"


@dataclass
class Corpus:
    """All patches under analysis: mails plus commits, with lookup indexes."""

    mails: list[Patch] = field(default_factory=list)
    commits: list[Patch] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.by_id: dict[PatchId, Patch] = {}
        for patch in self.patches():
            if patch.id in self.by_id:
                raise ValueError(f"duplicate patch id: {patch.id}")
            self.by_id[patch.id] = patch
        self.by_filename: dict[str, list[PatchId]] = {}
        for patch in self.patches():
            for name in patch.filenames:
                self.by_filename.setdefault(name, []).append(patch.id)
        for ids in self.by_filename.values():
            ids.sort()
        self.time_sorted: list[PatchId] = sorted(
            self.by_id, key=lambda pid: (self.by_id[pid].submission_date, pid)
        )

    def patches(self) -> Iterator[Patch]:
        yield from self.mails
        yield from self.commits

    def get(self, pid: PatchId) -> Patch:
        return self.by_id[pid]

    def __contains__(self, pid: PatchId) -> bool:
        return pid in self.by_id

    def __len__(self) -> int:
        return len(self.by_id)
