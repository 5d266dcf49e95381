"""Competing clustering techniques used for comparison.

Both operate on raw change lines rather than token similarity: one weights
the fraction of identical (filename, sign, line) tuples, the other matches
whitespace-normalized hunk checksums.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from typing import Iterable

from .model import ClusterSet, Patch, PatchId


def change_tuples(patch: Patch) -> Counter:
    """Multiset of (filename, sign, line text) over all hunks; context excluded."""
    changes: Counter = Counter()
    for fd in patch.diff.files:
        for hunk in fd.hunks:
            for line in hunk.insertions:
                changes[(fd.path, "+", line)] += 1
            for line in hunk.deletions:
                changes[(fd.path, "-", line)] += 1
    return changes


def plusminus_cluster(
    patches: Iterable[Patch], threshold: float, denominator: str = "min"
) -> ClusterSet:
    """Cluster by the fraction of identical change lines.

    Two patches are similar when |intersection| / min(|a|, |b|) reaches the
    threshold (or / |union| with denominator="union" for a Jaccard variant).
    Clusters are the connected components of that relation.  At threshold 0
    the predicate is always true: one cluster per candidate component.
    """
    if not (0.0 <= threshold <= 1.0):
        raise ValueError(f"threshold must lie in [0, 1]: {threshold}")
    if denominator not in ("min", "union"):
        raise ValueError(f"unknown denominator mode: {denominator}")
    ordered = sorted(patches, key=lambda p: p.id)
    cs = ClusterSet(p.id for p in ordered)
    changes = {p.id: change_tuples(p) for p in ordered}

    for a, b in _shared_file_pairs(ordered):
        ca, cb = changes[a], changes[b]
        common = sum((ca & cb).values())
        if denominator == "min":
            denom = min(sum(ca.values()), sum(cb.values()))
        else:
            denom = sum((ca | cb).values())
        fraction = common / denom if denom else 0.0
        if fraction >= threshold:
            cs.union(a, b)
    return cs


def plusminus_similarity(a: Patch, b: Patch, denominator: str = "min") -> float:
    ca, cb = change_tuples(a), change_tuples(b)
    common = sum((ca & cb).values())
    denom = (
        min(sum(ca.values()), sum(cb.values()))
        if denominator == "min"
        else sum((ca | cb).values())
    )
    return common / denom if denom else 0.0


def hunk_checksums(patch: Patch) -> frozenset[str]:
    """MD5 per hunk over its change lines with all whitespace removed."""
    sums = set()
    for fd in patch.diff.files:
        for hunk in fd.hunks:
            if not hunk.insertions and not hunk.deletions:
                continue
            parts = ["-" + _squash(line) for line in hunk.deletions]
            parts += ["+" + _squash(line) for line in hunk.insertions]
            digest = hashlib.md5("\n".join(parts).encode("utf-8")).hexdigest()
            sums.add(digest)
    return frozenset(sums)


def _squash(line: str) -> str:
    return "".join(line.split())


def checksum_cluster(patches: Iterable[Patch]) -> ClusterSet:
    """Cluster patches sharing at least one hunk checksum.

    Exact matching through an inverted index: no candidate pair is ever
    dropped, and nothing is pairwise-compared.
    """
    ordered = sorted(patches, key=lambda p: p.id)
    cs = ClusterSet(p.id for p in ordered)
    by_checksum: dict[str, PatchId] = {}
    for patch in ordered:
        for digest in sorted(hunk_checksums(patch)):
            if digest in by_checksum:
                cs.union(by_checksum[digest], patch.id)
            else:
                by_checksum[digest] = patch.id
    return cs


def _shared_file_pairs(ordered: list[Patch]) -> list[tuple[PatchId, PatchId]]:
    """Candidate pairs touching at least one common filename."""
    by_file: dict[str, list[PatchId]] = {}
    for patch in ordered:
        for name in patch.filenames:
            by_file.setdefault(name, []).append(patch.id)
    pairs: set[tuple[PatchId, PatchId]] = set()
    for ids in by_file.values():
        for i, a in enumerate(ids):
            for b in ids[i + 1 :]:
                pairs.add((a, b) if a < b else (b, a))
    return sorted(pairs)
