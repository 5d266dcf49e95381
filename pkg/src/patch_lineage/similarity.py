"""Pairwise patch similarity: token metrics, message and diff scores.

The combined score of a pair is ``w * r_msg + (1 - w) * r_diff`` unless the
changed-line-count ratio falls below ``dlr``, in which case the pair is
rejected outright.  All operations are pure; scores are symmetric and
reflexive by construction.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .diffparse import DEFAULT_TAG_PREFIXES, strip_tags
from .model import Diff, FileDiff, Hunk, Patch, SimilarityConfig, SimilarityScore


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character edits turning a into b."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a):
        cur = [i + 1]
        for j, cb in enumerate(b):
            cur.append(min(prev[j + 1] + 1, cur[j] + 1, prev[j] + (ca != cb)))
        prev = cur
    return prev[-1]


@lru_cache(maxsize=1 << 20)
def _cached_similarity(a: str, b: str) -> float:
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def string_similarity(a: str, b: str) -> float:
    """Normalized Levenshtein similarity in [0, 1]; two empty strings score 1."""
    if a > b:
        a, b = b, a
    return _cached_similarity(a, b)


@dataclass(frozen=True)
class TokenBag:
    """Multiset of lowercased whitespace-separated tokens, kept sorted."""

    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        tokens = tuple(sorted(self.tokens))
        for token in tokens:
            if not token or token.split() != [token]:
                raise ValueError(f"not a bare token: {token!r}")
        object.__setattr__(self, "tokens", tokens)

    @classmethod
    def from_lines(cls, lines) -> "TokenBag":
        tokens = [tok.lower() for line in lines for tok in line.split()]
        return cls(tuple(tokens))

    @cached_property
    def counts(self) -> Counter:
        return Counter(self.tokens)

    @cached_property
    def token_set(self) -> frozenset[str]:
        return frozenset(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __bool__(self) -> bool:
        return bool(self.tokens)


def _directed_score(a: TokenBag, b: TokenBag) -> float:
    """Mean over a's tokens of the best match found in b; 0 against an empty b."""
    if not a or not b:
        return 0.0
    total = 0.0
    for token, count in a.counts.items():
        if token in b.token_set:
            best = 1.0
        else:
            best = max(string_similarity(token, other) for other in b.counts)
        total += best * count
    return total / len(a)


def bag_score(a: TokenBag, b: TokenBag) -> float:
    """Symmetric closest-match score: mean of both directed scores."""
    if not a and not b:
        return 1.0
    if a.tokens == b.tokens:
        return 1.0
    return (_directed_score(a, b) + _directed_score(b, a)) / 2.0


def message_bag(patch: Patch, tags: frozenset[str] = DEFAULT_TAG_PREFIXES) -> TokenBag:
    """Token bag over the patch's subject and message, tag lines removed."""
    lines = strip_tags((patch.subject, *patch.message), tags)
    return TokenBag.from_lines(lines)


def message_similarity(a: Patch, b: Patch) -> float:
    return bag_score(message_bag(a), message_bag(b))


def _greedy_match(candidates: list[tuple]) -> list[tuple]:
    """One-to-one greedy matching over (sort_key, left, right, payload) rows.

    Rows must arrive pre-sorted by descending preference.  Each left/right
    token is used at most once.  Relative order of conflicting rows is what
    determines the outcome, so any tie-break that is consistent under
    argument swap keeps the overall scoring symmetric.
    """
    used_left: set = set()
    used_right: set = set()
    picked = []
    for row in candidates:
        _, left, right = row[0], row[1], row[2]
        if left in used_left or right in used_right:
            continue
        used_left.add(left)
        used_right.add(right)
        picked.append(row)
    return picked


def _hunk_score(ha: Hunk, hb: Hunk) -> float | None:
    """Mean over the insertion/deletion parts present in either hunk.

    A part present on exactly one side scores 0; a part absent on both
    sides is skipped.  Returns None for hunks with no change lines at all.
    """
    parts: list[float] = []
    for lines_a, lines_b in ((ha.insertions, hb.insertions), (ha.deletions, hb.deletions)):
        if not lines_a and not lines_b:
            continue
        if not lines_a or not lines_b:
            parts.append(0.0)
        else:
            parts.append(bag_score(TokenBag.from_lines(lines_a), TokenBag.from_lines(lines_b)))
    if not parts:
        return None
    return sum(parts) / len(parts)


def _match_hunks(fa: FileDiff, fb: FileDiff, th: float) -> list[float]:
    candidates = []
    for i, ha in enumerate(fa.hunks):
        for j, hb in enumerate(fb.hunks):
            sim = string_similarity(ha.heading, hb.heading)
            if sim >= th:
                candidates.append(((-sim, i, j), i, j))
    candidates.sort(key=lambda row: row[0])
    scores = []
    for _, i, j in _greedy_match(candidates):
        score = _hunk_score(fa.hunks[i], fb.hunks[j])
        if score is not None:
            scores.append(score)
    return scores


def diff_similarity(a: Diff, b: Diff, tf: float, th: float) -> float:
    """Score two diffs: pair up similar files, then similar hunks, then
    compare insertion/deletion token bags.  Flat mean over all matched hunks;
    0 when nothing matches."""
    files_a = [f for f in a.files if f.hunks]
    files_b = [f for f in b.files if f.hunks]
    candidates = []
    for fa in files_a:
        for fb in files_b:
            sim = string_similarity(fa.path, fb.path)
            if sim >= tf:
                candidates.append(((-sim, fa.path, fb.path), fa, fb))
    candidates.sort(key=lambda row: row[0])
    hunk_scores: list[float] = []
    for _, fa, fb in _greedy_match(candidates):
        hunk_scores.extend(_match_hunks(fa, fb, th))
    if not hunk_scores:
        return 0.0
    # Summation order must not depend on which argument came first, or the
    # score would lose exact symmetry to float rounding.
    hunk_scores.sort()
    return sum(hunk_scores) / len(hunk_scores)


def rate(a: Patch, b: Patch, cfg: SimilarityConfig) -> SimilarityScore:
    """Rate a pair of patches under the given configuration.

    Pairs whose changed-line counts are too imbalanced (ratio below dlr) are
    gated: they score 0 and the component scores are not computed.
    """
    la, lb = a.diff.total_changed_lines, b.diff.total_changed_lines
    bigger = max(la, lb)
    ratio = (min(la, lb) / bigger) if bigger else 1.0
    if ratio < cfg.dlr:
        return SimilarityScore(r_msg=0.0, r_diff=0.0, combined=0.0, gated=True)
    r_msg = message_similarity(a, b)
    r_diff = diff_similarity(a.diff, b.diff, cfg.tf, cfg.th)
    combined = cfg.w * r_msg + (1.0 - cfg.w) * r_diff
    return SimilarityScore(r_msg=r_msg, r_diff=r_diff, combined=combined, gated=False)


def is_similar(a: Patch, b: Patch, cfg: SimilarityConfig) -> bool:
    return rate(a, b, cfg).combined >= cfg.ta
