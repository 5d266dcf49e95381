"""Grouping similar patches into equivalence classes.

Two modes:

* the production two-phase engine: mail clusters are grown by comparing
  cluster representatives (the youngest mail), then representatives are
  compared against commits.  Candidate pairs are prefiltered by a shared
  filename and a submission time window, which keeps the pair count tractable
  on large corpora.
* ``exact_cluster``: full pairwise evaluation with no prefilter and no
  representatives; the reference implementation of the underlying
  threshold-graph semantics, used to validate the engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .model import ClusterSet, Corpus, Patch, PatchId, SimilarityConfig
from .similarity import rate, string_similarity

Scorer = Callable[[Patch, Patch], float]

DEFAULT_WINDOW_DAYS = 365


def make_scorer(cfg: SimilarityConfig) -> Scorer:
    """Combined-score function with per-pair memoization."""
    cache: dict[tuple[PatchId, PatchId], float] = {}

    def scorer(a: Patch, b: Patch) -> float:
        key = (a.id, b.id) if a.id < b.id else (b.id, a.id)
        hit = cache.get(key)
        if hit is None:
            hit = cache[key] = rate(a, b, cfg).combined
        return hit

    return scorer


@dataclass
class CandidateIndex:
    """Inverted indexes used by the pair prefilter."""

    by_filename: dict[str, list[PatchId]] = field(default_factory=dict)
    dates: dict[PatchId, int] = field(default_factory=dict)
    time_sorted: list[PatchId] = field(default_factory=list)

    @classmethod
    def build(cls, patches: Iterable[Patch]) -> "CandidateIndex":
        index = cls()
        for patch in patches:
            index.dates[patch.id] = patch.submission_date
            for name in patch.filenames:
                index.by_filename.setdefault(name, []).append(patch.id)
        for ids in index.by_filename.values():
            ids.sort()
        index.time_sorted = sorted(index.dates, key=lambda pid: (index.dates[pid], pid))
        return index


def candidate_pairs(
    patches: Sequence[Patch],
    window_days: int = DEFAULT_WINDOW_DAYS,
    tf: float = 1.0,
) -> list[tuple[PatchId, PatchId]]:
    """Unordered id pairs worth rating: submitted within the time window and
    touching at least one pair of filenames whose similarity reaches tf.

    With tf = 1 this is an exact shared-filename test through the inverted
    index.  Returned in canonical pair order, without duplicates.
    """
    index = CandidateIndex.build(patches)
    window = window_days * 86400
    names = sorted(index.by_filename)
    pairs: set[tuple[PatchId, PatchId]] = set()

    def emit(a: PatchId, b: PatchId) -> None:
        if a == b:
            return
        if abs(index.dates[a] - index.dates[b]) > window:
            return
        pairs.add((a, b) if a < b else (b, a))

    if tf >= 1.0:
        name_groups = [[name] for name in names]
    else:
        # Group every filename with all sufficiently similar ones.
        name_groups = []
        for i, name in enumerate(names):
            group = [name]
            for other in names[i + 1 :]:
                if string_similarity(name, other) >= tf:
                    group.append(other)
            name_groups.append(group)

    for group in name_groups:
        anchor = group[0]
        for pid_a in index.by_filename[anchor]:
            for other in group:
                for pid_b in index.by_filename[other]:
                    emit(pid_a, pid_b)
    return sorted(pairs)


def representative(cluster: Iterable[PatchId], corpus: Corpus) -> PatchId:
    """The cluster's comparison proxy: its youngest mail member.

    Ties on the submission date fall back to the canonical id order.
    """
    best: PatchId | None = None
    best_date = 0
    for pid in cluster:
        if not pid.is_mail:
            continue
        date = corpus.get(pid).submission_date
        if best is None or date > best_date or (date == best_date and pid < best):
            best, best_date = pid, date
    if best is None:
        raise ValueError("cluster holds no mail member")
    return best


def cluster_mails(
    mails: Sequence[Patch],
    cfg: SimilarityConfig,
    window_days: int = DEFAULT_WINDOW_DAYS,
    scorer: Scorer | None = None,
) -> ClusterSet:
    """Phase one: grow mail clusters until a fixpoint.

    Every mail starts as a singleton.  Each pass rates the representatives of
    all candidate cluster pairs and merges those at or above ta; passes repeat
    until none merges.  Deterministic for any input order.
    """
    scorer = scorer or make_scorer(cfg)
    corpus = Corpus(mails=list(mails))
    cs = ClusterSet(p.id for p in mails)
    base_pairs = candidate_pairs(list(mails), window_days, cfg.tf)

    while True:
        clusters = cs.clusters()
        reps = {canon: representative(members, corpus) for canon, members in clusters.items()}
        cluster_pairs: set[tuple[PatchId, PatchId]] = set()
        for a, b in base_pairs:
            ca, cb = cs.canonical(a), cs.canonical(b)
            if ca != cb:
                cluster_pairs.add((ca, cb) if ca < cb else (cb, ca))
        merges = []
        for ca, cb in sorted(cluster_pairs):
            rep_a, rep_b = corpus.get(reps[ca]), corpus.get(reps[cb])
            if scorer(rep_a, rep_b) >= cfg.ta:
                merges.append((ca, cb))
        if not merges:
            return cs
        for ca, cb in merges:
            cs.union(ca, cb)


def attach_commits(
    cs: ClusterSet,
    corpus: Corpus,
    cfg: SimilarityConfig,
    window_days: int = DEFAULT_WINDOW_DAYS,
    scorer: Scorer | None = None,
) -> ClusterSet:
    """Phase two: link commits to the mail clusters.

    Each mail cluster's representative is rated against prefiltered commits;
    matches join the representative's cluster.  Two clusters matching the same
    commit merge transitively.  Unmatched commits stay singletons.
    """
    scorer = scorer or make_scorer(cfg)
    out = cs.copy()
    for commit in corpus.commits:
        out.add(commit.id)

    rep_ids = sorted(
        representative(members, corpus) for members in cs.clusters().values()
    )
    rep_patches = [corpus.get(pid) for pid in rep_ids]
    pool = rep_patches + list(corpus.commits)
    rep_set = set(rep_ids)

    for a, b in candidate_pairs(pool, window_days, cfg.tf):
        mail_id, commit_id = (a, b) if a.is_mail else (b, a)
        if not mail_id.is_mail or not commit_id.is_commit:
            continue
        if mail_id not in rep_set:
            continue
        if scorer(corpus.get(mail_id), corpus.get(commit_id)) >= cfg.ta:
            out.union(mail_id, commit_id)
    return out


def cluster_corpus(
    corpus: Corpus,
    cfg: SimilarityConfig,
    window_days: int = DEFAULT_WINDOW_DAYS,
    scorer: Scorer | None = None,
) -> ClusterSet:
    """Run both phases over a corpus."""
    scorer = scorer or make_scorer(cfg)
    phase_one = cluster_mails(corpus.mails, cfg, window_days, scorer)
    return attach_commits(phase_one, corpus, cfg, window_days, scorer)


def exact_cluster(patches: Iterable[Patch], cfg: SimilarityConfig) -> ClusterSet:
    """Connected components of the full similarity threshold graph.

    Rates every unordered pair; no prefilter, no representatives.  Intended
    for small sets and for validating the two-phase engine.
    """
    ordered = sorted(patches, key=lambda p: p.id)
    cs = ClusterSet(p.id for p in ordered)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1 :]:
            if rate(a, b, cfg).combined >= cfg.ta:
                cs.union(a.id, b.id)
    return cs


def census(cs: ClusterSet) -> dict[str, int]:
    """Cluster statistics: totals and mail/commit composition counts."""
    mail_counts: list[int] = []
    commit_counts: list[int] = []
    for members in cs.clusters().values():
        mail_counts.append(sum(1 for pid in members if pid.is_mail))
        commit_counts.append(sum(1 for pid in members if pid.is_commit))
    return {
        "clusters": len(mail_counts),
        "clusters_with_commit": sum(1 for c in commit_counts if c >= 1),
        "clusters_gt1_mail": sum(1 for m in mail_counts if m > 1),
        "clusters_gt2_mail": sum(1 for m in mail_counts if m > 2),
        "clusters_gt3_mail": sum(1 for m in mail_counts if m > 3),
        "clusters_eq1_mail": sum(1 for m in mail_counts if m == 1),
    }
