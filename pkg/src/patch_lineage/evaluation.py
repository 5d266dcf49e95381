"""External validation of clusterings and the parameter sweep harness.

Accuracy is measured pairwise against a curated reference clustering: the
Fowlkes-Mallows index (geometric mean of pairwise precision and recall) is
the primary number, with purity kept around to demonstrate why it is not.
"""

from __future__ import annotations

import csv
import math
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .cluster import DEFAULT_WINDOW_DAYS, Scorer, cluster_corpus
from .model import ClusterSet, Corpus, Patch, PatchId, SimilarityConfig
from .similarity import diff_similarity, message_similarity


class UniverseMismatch(ValueError):
    """Two clusterings do not cover the same element set."""


class ShapeMismatch(ValueError):
    """Requested cluster sizes do not add up to the universe size."""


class EmptyGrid(ValueError):
    """A sweep grid with no points."""


@dataclass(frozen=True)
class PairCounts:
    """Pairwise confusion counts between a result and a reference clustering."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def _comb2(n: int) -> int:
    return n * (n - 1) // 2


def pair_counts(result: ClusterSet, truth: ClusterSet) -> PairCounts:
    """Count co-clustering agreement over all unordered element pairs.

    Computed from per-cluster contingency sums, which is equivalent to
    enumerating every pair but linear in the overlap table size.
    """
    result_ids = set(result.ids())
    truth_ids = set(truth.ids())
    if result_ids != truth_ids:
        raise UniverseMismatch(
            f"universes differ: {len(result_ids)} vs {len(truth_ids)} elements"
        )
    truth_label = {pid: truth.canonical(pid) for pid in truth.ids()}
    tp = 0
    result_pairs = 0
    for members in result.clusters().values():
        result_pairs += _comb2(len(members))
        overlap = Counter(truth_label[pid] for pid in members)
        tp += sum(_comb2(n) for n in overlap.values())
    truth_pairs = sum(_comb2(len(m)) for m in truth.clusters().values())
    fp = result_pairs - tp
    fn = truth_pairs - tp
    tn = _comb2(len(result_ids)) - tp - fp - fn
    return PairCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def fowlkes_mallows(counts: PairCounts) -> float:
    """sqrt(precision * recall) over pairs; 0 when there are no true positives."""
    if counts.tp == 0:
        return 0.0
    precision = counts.tp / (counts.tp + counts.fp)
    recall = counts.tp / (counts.tp + counts.fn)
    return math.sqrt(precision * recall)


def purity(result: ClusterSet, truth: ClusterSet) -> float:
    """Fraction of elements falling into their cluster's dominant truth label.

    Degenerate by design: an all-singleton result always scores 1, which is
    exactly why pair-based indices are used instead.
    """
    result_ids = set(result.ids())
    if result_ids != set(truth.ids()):
        raise UniverseMismatch("universes differ")
    if not result_ids:
        return 1.0
    truth_label = {pid: truth.canonical(pid) for pid in truth.ids()}
    covered = 0
    for members in result.clusters().values():
        overlap = Counter(truth_label[pid] for pid in members)
        covered += max(overlap.values())
    return covered / len(result_ids)


def random_clustering(
    shape: Sequence[int], universe: Iterable[PatchId], seed: int
) -> ClusterSet:
    """Uniformly random partition with exactly the given cluster sizes.

    Reproducible per seed: elements are shuffled in canonical order and cut
    into consecutive slices.
    """
    elements = sorted(universe)
    if sum(shape) != len(elements):
        raise ShapeMismatch(f"shape sums to {sum(shape)}, universe has {len(elements)}")
    rng = random.Random(seed)
    rng.shuffle(elements)
    groups = []
    at = 0
    for size in shape:
        groups.append(elements[at : at + size])
        at += size
    return ClusterSet.from_clusters(groups)


def cluster_shape(cs: ClusterSet) -> list[int]:
    """Cluster sizes in descending order."""
    return sorted((len(m) for m in cs.clusters().values()), reverse=True)


@dataclass(frozen=True)
class GridAxis:
    lo: float
    hi: float
    step: float

    def values(self) -> list[float]:
        if self.step <= 0 or self.hi < self.lo:
            raise EmptyGrid(f"bad axis: [{self.lo}, {self.hi}] step {self.step}")
        count = int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return [round(self.lo + k * self.step, 9) for k in range(count)]


@dataclass(frozen=True)
class SweepGrid:
    """Inclusive per-parameter ranges; the cross product is the sweep."""

    tf: GridAxis
    th: GridAxis
    dlr: GridAxis
    w: GridAxis
    ta: GridAxis

    @property
    def size(self) -> int:
        n = 1
        for axis in (self.tf, self.th, self.dlr, self.w, self.ta):
            n *= len(axis.values())
        return n

    def configs(self) -> Iterator[SimilarityConfig]:
        for tf in self.tf.values():
            for th in self.th.values():
                for dlr in self.dlr.values():
                    for w in self.w.values():
                        for ta in self.ta.values():
                            yield SimilarityConfig(tf=tf, th=th, dlr=dlr, w=w, ta=ta)


# The published evaluation grid: 9 * 18 * 11 * 11 * 41 = 803682 points.
DEFAULT_GRID = SweepGrid(
    tf=GridAxis(0.60, 1.00, 0.05),
    th=GridAxis(0.15, 1.00, 0.05),
    dlr=GridAxis(0.00, 1.00, 0.10),
    w=GridAxis(0.00, 1.00, 0.10),
    ta=GridAxis(0.60, 1.00, 0.01),
)


@dataclass(frozen=True)
class SweepRow:
    config: SimilarityConfig
    counts: PairCounts
    fm: float


class FactorizedScorer:
    """Score cache shared across sweep points.

    r_msg never depends on the tuneables and r_diff only on (tf, th), so one
    corpus-wide cache serves every (dlr, w, ta) combination; those parameters
    only gate and recombine cached component scores.
    """

    def __init__(self, corpus: Corpus):
        self._corpus = corpus
        self._msg: dict[tuple[PatchId, PatchId], float] = {}
        self._diff: dict[tuple[PatchId, PatchId, float, float], float] = {}

    def for_config(self, cfg: SimilarityConfig) -> Scorer:
        def scorer(a: Patch, b: Patch) -> float:
            la, lb = a.diff.total_changed_lines, b.diff.total_changed_lines
            bigger = max(la, lb)
            ratio = (min(la, lb) / bigger) if bigger else 1.0
            if ratio < cfg.dlr:
                return 0.0
            key = (a.id, b.id) if a.id < b.id else (b.id, a.id)
            r_msg = self._msg.get(key)
            if r_msg is None:
                r_msg = self._msg[key] = message_similarity(a, b)
            dkey = (*key, cfg.tf, cfg.th)
            r_diff = self._diff.get(dkey)
            if r_diff is None:
                r_diff = self._diff[dkey] = diff_similarity(a.diff, b.diff, cfg.tf, cfg.th)
            return cfg.w * r_msg + (1.0 - cfg.w) * r_diff

        return scorer


def sweep(
    grid: SweepGrid,
    corpus: Corpus,
    truth: ClusterSet,
    window_days: int = DEFAULT_WINDOW_DAYS,
) -> list[SweepRow]:
    """Run the full analysis at every grid point and score it against truth.

    Results are projected onto the truth universe before pair counting, so a
    corpus may contain patches outside the curated reference.
    """
    if grid.size == 0:
        raise EmptyGrid("sweep grid has no points")
    shared = FactorizedScorer(corpus)
    truth_ids = list(truth.ids())
    rows: list[SweepRow] = []
    for cfg in grid.configs():
        result = cluster_corpus(corpus, cfg, window_days, shared.for_config(cfg))
        counts = pair_counts(result.restrict(truth_ids), truth)
        rows.append(SweepRow(config=cfg, counts=counts, fm=fowlkes_mallows(counts)))
    return rows


SWEEP_CSV_FIELDS = ["tf", "th", "dlr", "w", "ta", "tp", "fp", "fn", "fm"]


def write_sweep_csv(rows: Iterable[SweepRow], path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SWEEP_CSV_FIELDS)
        for row in rows:
            cfg = row.config
            writer.writerow(
                [cfg.tf, cfg.th, cfg.dlr, cfg.w, cfg.ta,
                 row.counts.tp, row.counts.fp, row.counts.fn, f"{row.fm:.6f}"]
            )


@dataclass
class DurationReport:
    """Per-cluster integration durations with distribution summaries.

    A duration is the time from a cluster's latest mail to its earliest
    commit.  Clusters lacking either side are omitted.  Negative values
    (clock skew, out-of-order integration) are kept in the data but also
    counted separately.
    """

    rows: list[tuple[PatchId, int]]

    @property
    def durations(self) -> list[int]:
        return [seconds for _, seconds in self.rows]

    @property
    def negative_count(self) -> int:
        return sum(1 for d in self.durations if d < 0)

    def quantile(self, q: float) -> int:
        """Smallest duration d with ECDF(d) >= q."""
        data = sorted(self.durations)
        if not data:
            raise ValueError("no durations")
        if not (0.0 < q <= 1.0):
            raise ValueError(f"quantile out of range: {q}")
        idx = math.ceil(q * len(data)) - 1
        return data[max(idx, 0)]

    def ecdf(self) -> list[tuple[int, float]]:
        data = sorted(self.durations)
        n = len(data)
        return [(d, (i + 1) / n) for i, d in enumerate(data)]


def integration_durations(cs: ClusterSet, corpus: Corpus) -> DurationReport:
    rows: list[tuple[PatchId, int]] = []
    for canon, members in sorted(cs.clusters().items()):
        mail_dates = [corpus.get(p).submission_date for p in members if p.is_mail]
        commit_dates = [corpus.get(p).submission_date for p in members if p.is_commit]
        if not mail_dates or not commit_dates:
            continue
        rows.append((canon, min(commit_dates) - max(mail_dates)))
    return DurationReport(rows=rows)


def load_clusters_file(path: str | Path) -> ClusterSet:
    """Read the cluster file format: one cluster per line, ids separated by
    whitespace; '#' lines are comments.  Mail ids keep their angle brackets,
    commit ids are bare hex hashes."""
    groups: list[list[PatchId]] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            group = []
            for token in line.split():
                if token.startswith("<"):
                    group.append(PatchId.mail(token))
                else:
                    try:
                        group.append(PatchId.commit(token))
                    except ValueError as exc:
                        raise ValueError(f"{path}:{lineno}: bad id {token!r}") from exc
            groups.append(group)
    return ClusterSet.from_clusters(groups)


def clusters_to_text(cs: ClusterSet, comments: Sequence[str] = ()) -> str:
    """Render the cluster file format; inverse of load_clusters_file.

    Members are written in canonical order, clusters sorted by their
    canonical id, so output is stable across runs.
    """
    clusters = cs.clusters()
    out = [f"# {comment}" for comment in comments]
    for canon in sorted(clusters):
        members = sorted(clusters[canon])
        out.append(" ".join(str(pid) for pid in members))
    return "\n".join(out) + ("\n" if out else "")


def write_clusters_file(
    cs: ClusterSet, path: str | Path, comments: Sequence[str] = ()
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(clusters_to_text(cs, comments))
