import random

import pytest

from patch_lineage.model import (
    ClusterSet,
    Corpus,
    PatchId,
    SimilarityConfig,
    SimilarityScore,
    canonical_order,
)

from conftest import mail_patch, commit_patch


class TestPatchId:
    def test_mail_ids_order_lexicographically(self):
        assert canonical_order(PatchId.mail("<a@x>"), PatchId.mail("<b@x>")) == -1

    def test_reflexive_equality(self):
        pid = PatchId.mail("<z@x>")
        assert canonical_order(pid, pid) == 0

    def test_mail_sorts_before_commit(self):
        assert canonical_order(PatchId.mail("<z@x>"), PatchId.commit("abc1234")) == -1
        assert PatchId.mail("<z@x>") < PatchId.commit("abc1234")

    def test_total_order_properties(self):
        rng = random.Random(7)
        ids = [PatchId.mail(f"<{rng.randrange(100)}@x>") for _ in range(30)]
        ids += [PatchId.commit(f"{rng.randrange(16**8):08x}") for _ in range(30)]
        for a in ids[:10]:
            for b in ids[:10]:
                assert canonical_order(a, b) == -canonical_order(b, a)
                for c in ids[:10]:
                    if a <= b <= c:
                        assert a <= c

    def test_rejects_empty_value(self):
        with pytest.raises(ValueError):
            PatchId.mail("")

    @pytest.mark.parametrize("bad", ["ABC1234", "12345", "xyz", "g" * 10, "a" * 41])
    def test_rejects_malformed_commit_hash(self, bad):
        with pytest.raises(ValueError):
            PatchId.commit(bad)

    @pytest.mark.parametrize("good", ["abc1234", "a" * 40, "0123456789abcdef"])
    def test_accepts_abbreviated_hashes(self, good):
        assert PatchId.commit(good).value == good


class TestSimilarityConfig:
    def test_defaults_valid(self):
        SimilarityConfig()

    @pytest.mark.parametrize("field", ["tf", "th", "dlr", "w", "ta"])
    @pytest.mark.parametrize("value", [-0.01, 1.01, 2.0])
    def test_out_of_range_is_construction_error(self, field, value):
        with pytest.raises(ValueError):
            SimilarityConfig(**{field: value})


class TestSimilarityScore:
    def test_gated_requires_zero(self):
        with pytest.raises(ValueError):
            SimilarityScore(r_msg=0.0, r_diff=0.0, combined=0.5, gated=True)


class TestClusterSet:
    def _ids(self, n):
        return [PatchId.mail(f"<{i:03d}@x>") for i in range(n)]

    def test_partition_property_after_random_unions(self):
        rng = random.Random(3)
        ids = self._ids(40)
        cs = ClusterSet(ids)
        for _ in range(60):
            cs.union(rng.choice(ids), rng.choice(ids))
        seen = {}
        for canon, members in cs.clusters().items():
            assert canon == min(members)
            for pid in members:
                assert pid not in seen, "element in two clusters"
                seen[pid] = canon
        assert set(seen) == set(ids)

    def test_union_order_independence(self):
        rng = random.Random(5)
        ids = self._ids(25)
        merges = [(rng.choice(ids), rng.choice(ids)) for _ in range(30)]
        reference = ClusterSet(ids)
        for a, b in merges:
            reference.union(a, b)
        for trial in range(5):
            shuffled = merges[:]
            random.Random(trial).shuffle(shuffled)
            cs = ClusterSet(ids)
            for a, b in shuffled:
                cs.union(a, b)
            assert cs == reference

    def test_union_commutative_idempotent(self):
        ids = self._ids(4)
        cs1 = ClusterSet(ids)
        cs1.union(ids[0], ids[1])
        cs1.union(ids[0], ids[1])
        cs2 = ClusterSet(ids)
        cs2.union(ids[1], ids[0])
        assert cs1 == cs2

    def test_canonical_is_min_member(self):
        ids = self._ids(5)
        cs = ClusterSet(ids)
        cs.union(ids[4], ids[2])
        cs.union(ids[2], ids[3])
        assert cs.canonical(ids[4]) == ids[2]
        assert cs.members(ids[3]) == frozenset({ids[2], ids[3], ids[4]})

    def test_restrict_projects_partition(self):
        ids = self._ids(6)
        cs = ClusterSet(ids)
        cs.union(ids[0], ids[1])
        cs.union(ids[1], ids[2])
        sub = cs.restrict([ids[0], ids[2], ids[5]])
        assert sub.members(ids[0]) == frozenset({ids[0], ids[2]})
        assert sub.members(ids[5]) == frozenset({ids[5]})

    def test_from_clusters_roundtrip(self):
        ids = self._ids(5)
        cs = ClusterSet.from_clusters([ids[:3], ids[3:]])
        assert cs.partition() == frozenset(
            {frozenset(ids[:3]), frozenset(ids[3:])}
        )


class TestCorpus:
    def test_duplicate_ids_rejected(self):
        a = mail_patch("<a@x>")
        with pytest.raises(ValueError):
            Corpus(mails=[a, a])

    def test_indexes(self):
        a = mail_patch("<a@x>")
        c = commit_patch("ab" * 20)
        corpus = Corpus(mails=[a], commits=[c])
        assert corpus.get(a.id) is a
        assert a.id in corpus.by_filename["a.c"]
        assert corpus.time_sorted[0] == a.id

    def test_patch_requires_changed_lines(self):
        from patch_lineage.model import Diff, FileDiff

        empty = Diff(files=(FileDiff(old_path="a", new_path="a", meta_only=True),))
        with pytest.raises(ValueError):
            mail_patch("<a@x>", diff=empty)
