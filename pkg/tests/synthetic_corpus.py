"""Deterministic synthetic corpora for engine validation.

Builds mail patches paired with commits derived by realistic maintainer
perturbations (appended tags, reworded messages, shifted context, amended
change lines), plus a few adversarial constructions that punish degenerate
parameter choices: near-duplicate messages over unrelated diffs, identical
diffs under unrelated messages, and heavily size-imbalanced lookalikes.

Everything is driven by one seeded RNG, so corpora are bit-reproducible.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from patch_lineage.model import (
    ClusterSet,
    Corpus,
    Diff,
    FileDiff,
    Hunk,
    Patch,
    PatchId,
    SeriesInfo,
)

T0 = 1336000000  # early May 2012, UTC

_DIRS = [
    "drivers/net",
    "fs/ext4",
    "kernel/sched",
    "mm",
    "net/ipv4",
    "sound/pci",
    "arch/x86/kernel",
    "drivers/gpu/drm",
    "include/linux",
    "block",
]
_NAMES = ["core", "main", "util", "dev", "ops", "ring", "queue", "table"]
FILE_POOL = [f"{d}/{n}.c" for d in _DIRS for n in _NAMES]

MSG_WORDS = (
    "fix avoid race buffer overflow when device driver probe fails return error "
    "path leak memory allocation check null pointer dereference before use handle "
    "case where interrupt arrives early during init sequence remove unused variable "
    "warning reported static analysis simplify logic cleanup refactor split helper "
    "function improve readability update stale documentation wrong size calculation "
    "off one loop bound validate input length against limit reject oversized request "
    "queue stall under load timeout value too small increase default align spec "
    "hardware quirk workaround enable feature flag disable broken mode fallback safe"
).split()

# Disjoint-alphabet vocabulary: near-zero string similarity against MSG_WORDS.
ALT_WORDS = (
    "zqxkw qqzzj xjkwz kzqxj wwqzx jxzqk zzxkq qkjwz xwzqk kqjzx zxqkj qzkwj "
    "xxkzq jwqkz zkqxw wqjzk qxjzk kkzwx zqwjx xqkzj"
).split()

IDENTS = (
    "ring desc skb napi budget dev priv regs irq mask flags state ctx req resp "
    "dma addr len count offset head tail index entry slot page order zone node "
    "lock cpu cache stat err ret val tmp buf size"
).split()
FUNCS = (
    "init probe remove start stop reset alloc free enable disable read write "
    "update flush poll handle setup teardown attach detach"
).split()
ERRNOS = ["INVAL", "NOMEM", "IO", "BUSY", "AGAIN"]

BOILERPLATE = [
    "\treturn ret;",
    "\tif (err)",
    "\t\tgoto out;",
    "#include <linux/module.h>",
    "\tbreak;",
]

TAG_POOL = [
    "Signed-off-by: Some Maintainer <maint@lineage.test>",
    "Acked-by: A Reviewer <rev@lineage.test>",
    "Reviewed-by: Another Reviewer <rev2@lineage.test>",
    "Tested-by: Bot <bot@lineage.test>",
]


@dataclass
class SynthSpec:
    n_pairs: int = 200
    seed: int = 1
    include_baits: bool = True
    max_reword_fraction: float = 0.10
    max_context_shift: int = 2


def _code_line(rng: random.Random) -> str:
    a, b = rng.choice(IDENTS), rng.choice(IDENTS)
    pattern = rng.randrange(4)
    if pattern == 0:
        return f"\t{a} = {b}_{rng.choice(FUNCS)}({rng.choice(IDENTS)});"
    if pattern == 1:
        return f"\tif (!{a}->{b})"
    if pattern == 2:
        return f"\t\treturn -E{rng.choice(ERRNOS)};"
    return f"\t{a}->{b} = {rng.randrange(64)};"


def _heading(rng: random.Random) -> str:
    return (
        f"static int {rng.choice(IDENTS)}_{rng.choice(FUNCS)}"
        f"(struct {rng.choice(IDENTS)} *{rng.choice('pqrs')})"
    )


def _words(rng: random.Random, pool: list[str], n: int) -> list[str]:
    return [rng.choice(pool) for _ in range(n)]


def _message(rng: random.Random, pool: list[str]) -> list[str]:
    lines = []
    for _ in range(rng.randint(2, 4)):
        lines.append(" ".join(_words(rng, pool, rng.randint(5, 9))))
    return lines


def _mutate_word(word: str, rng: random.Random) -> str:
    if not word:
        return word + "x"
    pos = rng.randrange(len(word))
    repl = rng.choice("aeiounrst")
    if repl == word[pos]:
        return word + rng.choice("sx")
    return word[:pos] + repl + word[pos + 1 :]


def _mutate_line(line: str, rng: random.Random) -> str:
    # Change one alphanumeric character; whitespace and punctuation stay put.
    positions = [i for i, ch in enumerate(line) if ch.isalnum()]
    if not positions:
        return line + "x"
    pos = rng.choice(positions)
    repl = rng.choice("aeiounrst0123456789")
    if repl == line[pos]:
        repl = "x"
    return line[:pos] + repl + line[pos + 1 :]


def _reword(lines: list[str], rng: random.Random, fraction: float) -> list[str]:
    """Replace roughly `fraction` of the words, always at least one."""
    flat = [(i, j) for i, line in enumerate(lines) for j in range(len(line.split()))]
    if not flat:
        return lines
    k = max(1, round(len(flat) * fraction))
    targets = set(rng.sample(flat, min(k, len(flat))))
    out = []
    for i, line in enumerate(lines):
        words = line.split()
        for j, word in enumerate(words):
            if (i, j) in targets:
                words[j] = _mutate_word(word, rng)
        out.append(" ".join(words))
    return out


def _hunk(rng: random.Random, heading: str, ins: list[str], dels: list[str]) -> Hunk:
    ctx = [_code_line(rng), _code_line(rng)]
    start = rng.randint(1, 400)
    return Hunk(
        heading=heading,
        old_start=start,
        old_len=len(dels) + len(ctx),
        new_start=start,
        new_len=len(ins) + len(ctx),
        insertions=tuple(ins),
        deletions=tuple(dels),
        context=tuple(ctx),
    )


def _basic_diff(rng: random.Random, paths: list[str]) -> Diff:
    files = []
    for path in paths:
        hunks = []
        for _ in range(rng.randint(1, 2)):
            ins = [_code_line(rng) for _ in range(rng.randint(1, 3))]
            if rng.random() < 0.4:
                ins.append(rng.choice(BOILERPLATE))
            dels = [_code_line(rng) for _ in range(rng.randint(0, 2))]
            hunks.append(_hunk(rng, _heading(rng), ins, dels))
        files.append(FileDiff(old_path=path, new_path=path, hunks=tuple(hunks)))
    return Diff(files=tuple(files))


def _shift_context(hunk: Hunk, rng: random.Random, max_lines: int) -> Hunk:
    ctx = list(hunk.context)
    for _ in range(rng.randint(0, max_lines)):
        if ctx:
            ctx[rng.randrange(len(ctx))] = _code_line(rng)
    delta = rng.randint(-4, 8)
    return Hunk(
        heading=hunk.heading,
        old_start=max(1, hunk.old_start + delta),
        old_len=len(hunk.deletions) + len(ctx),
        new_start=max(1, hunk.new_start + delta),
        new_len=len(hunk.insertions) + len(ctx),
        insertions=hunk.insertions,
        deletions=hunk.deletions,
        context=tuple(ctx),
    )


def _amend_diff(diff: Diff, rng: random.Random, mode: str, max_shift: int) -> Diff:
    """mode: "none" | "light" (one change line mutated) | "heavy" (every line)."""
    all_positions = [
        (fi, hi, part, li)
        for fi, fd in enumerate(diff.files)
        for hi, h in enumerate(fd.hunks)
        for part, lines in (("ins", h.insertions), ("del", h.deletions))
        for li in range(len(lines))
    ]
    if mode == "heavy":
        targets = set(all_positions)
    elif mode == "light" and all_positions:
        targets = {rng.choice(all_positions)}
    else:
        targets = set()

    files = []
    for fi, fd in enumerate(diff.files):
        hunks = []
        for hi, hunk in enumerate(fd.hunks):
            ins = [
                _mutate_line(line, rng) if (fi, hi, "ins", li) in targets else line
                for li, line in enumerate(hunk.insertions)
            ]
            dels = [
                _mutate_line(line, rng) if (fi, hi, "del", li) in targets else line
                for li, line in enumerate(hunk.deletions)
            ]
            shifted = _shift_context(
                Hunk(
                    heading=hunk.heading,
                    old_start=hunk.old_start,
                    old_len=len(dels) + len(hunk.context),
                    new_start=hunk.new_start,
                    new_len=len(ins) + len(hunk.context),
                    insertions=tuple(ins),
                    deletions=tuple(dels),
                    context=hunk.context,
                ),
                rng,
                max_shift,
            )
            hunks.append(shifted)
        files.append(FileDiff(old_path=fd.old_path, new_path=fd.new_path, hunks=tuple(hunks)))
    return Diff(files=tuple(files))


def _mail_id(i: int) -> PatchId:
    return PatchId.mail(f"<synth-{i:04d}@lineage.test>")


def _commit_id(i: int, seed: int) -> PatchId:
    return PatchId.commit(hashlib.sha1(f"commit-{i}-{seed}".encode()).hexdigest())


def _mail(i: int, subject: list[str], message: list[str], diff: Diff, date: int) -> Patch:
    return Patch(
        id=_mail_id(i),
        subject=" ".join(subject),
        message=tuple(message),
        diff=diff,
        submission_date=date,
        author=f"dev{i % 17}@lineage.test",
        series=SeriesInfo(revision=1),
    )


def _commit_from(
    i: int,
    spec: SynthSpec,
    rng: random.Random,
    mail: Patch,
    amend: str,
) -> Patch:
    message = _reword(list(mail.message), rng, spec.max_reword_fraction)
    for _ in range(rng.randint(1, 2)):
        message.append(rng.choice(TAG_POOL))
    subject_words = mail.subject.split()
    if rng.random() < 0.2 and subject_words:
        pos = rng.randrange(len(subject_words))
        subject_words[pos] = _mutate_word(subject_words[pos], rng)
    diff = _amend_diff(mail.diff, rng, amend, spec.max_context_shift)
    return Patch(
        id=_commit_id(i, spec.seed),
        subject=" ".join(subject_words),
        message=tuple(message),
        diff=diff,
        submission_date=mail.submission_date + rng.randint(1, 40) * 86400 + rng.randint(0, 3600),
        author="Some Maintainer <maint@lineage.test>",
    )


def make_corpus(spec: SynthSpec) -> tuple[Corpus, ClusterSet]:
    """Returns (corpus, truth): one truth cluster {mail, commit} per change."""
    rng = random.Random(spec.seed)
    mails: list[Patch] = []
    commits: list[Patch] = []

    n_bait = 14 if spec.include_baits and spec.n_pairs >= 40 else 0
    n_plain = spec.n_pairs - n_bait

    for i in range(n_plain):
        date = T0 + i * 6 * 3600 + rng.randint(0, 1800)
        paths = rng.sample(FILE_POOL, rng.randint(1, 2))
        diff = _basic_diff(rng, paths)
        mail = _mail(i, _words(rng, MSG_WORDS, rng.randint(4, 7)), _message(rng, MSG_WORDS), diff, date)
        amend = ("heavy", "heavy", "heavy", "light", "light", "light",
                 "none", "none", "none", "none")[i % 10]
        mails.append(mail)
        commits.append(_commit_from(i, spec, rng, mail, amend))

    if n_bait:
        next_i = n_plain

        # Size-imbalance lookalikes: small change nested inside a big one,
        # same file, heading and message.  Only the ratio gate separates them.
        for _ in range(3):
            path = rng.choice(FILE_POOL)
            heading = _heading(rng)
            subject = _words(rng, MSG_WORDS, 5)
            message = _message(rng, MSG_WORDS)
            small_ins = [_code_line(rng), _code_line(rng)]
            big_ins = list(small_ins)
            while len(big_ins) < 6:
                big_ins.append(_mutate_line(rng.choice(small_ins), rng))
            date = T0 + next_i * 6 * 3600
            for ins in (small_ins, big_ins):
                diff = Diff(
                    files=(
                        FileDiff(
                            old_path=path,
                            new_path=path,
                            hunks=(_hunk(rng, heading, list(ins), []),),
                        ),
                    )
                )
                mail = _mail(next_i, subject, message, diff, date + next_i)
                mails.append(mail)
                commits.append(_commit_from(next_i, spec, rng, mail, "none"))
                next_i += 1

        # Message clones: identical prose describing unrelated changes that
        # touch the same file.  Punishes message-only weighting.
        for _ in range(2):
            path = rng.choice(FILE_POOL)
            subject = _words(rng, MSG_WORDS, 5)
            message = _message(rng, MSG_WORDS)
            date = T0 + next_i * 6 * 3600
            for _ in range(2):
                diff = _basic_diff(rng, [path])
                mail = _mail(next_i, subject, message, diff, date + next_i)
                mails.append(mail)
                commits.append(_commit_from(next_i, spec, rng, mail, "none"))
                next_i += 1

        # Diff clones: identical change under unrelated messages (disjoint
        # vocabularies).  Punishes diff-only weighting.
        for _ in range(2):
            path = rng.choice(FILE_POOL)
            heading = _heading(rng)
            ins = [_code_line(rng) for _ in range(3)]
            dels = [_code_line(rng)]
            date = T0 + next_i * 6 * 3600
            for pool in (MSG_WORDS, ALT_WORDS):
                diff = Diff(
                    files=(
                        FileDiff(
                            old_path=path,
                            new_path=path,
                            hunks=(_hunk(rng, heading, list(ins), list(dels)),),
                        ),
                    )
                )
                mail = _mail(next_i, _words(rng, pool, 5), _message(rng, pool), diff, date + next_i)
                mails.append(mail)
                commits.append(_commit_from(next_i, spec, rng, mail, "none"))
                next_i += 1

    corpus = Corpus(mails=mails, commits=commits)
    truth = ClusterSet.from_clusters(
        [(m.id, c.id) for m, c in zip(mails, commits)]
    )
    return corpus, truth


def make_random_patch(rng: random.Random, index: int, kind: str = "mail") -> Patch:
    """One standalone random patch; used by property tests."""
    paths = rng.sample(FILE_POOL, rng.randint(1, 2))
    diff = _basic_diff(rng, paths)
    if kind == "mail":
        pid = PatchId.mail(f"<rand-{index:05d}@lineage.test>")
        series = SeriesInfo(revision=rng.randint(1, 3))
    else:
        pid = PatchId.commit(hashlib.sha1(f"rand-{index}".encode()).hexdigest())
        series = None
    return Patch(
        id=pid,
        subject=" ".join(_words(rng, MSG_WORDS, rng.randint(3, 7))),
        message=tuple(_message(rng, MSG_WORDS)),
        diff=diff,
        submission_date=T0 + rng.randint(0, 10_000_000),
        author=None,
        series=series,
    )
