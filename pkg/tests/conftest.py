from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from patch_lineage.model import Diff, FileDiff, Hunk, Patch, PatchId, SeriesInfo


def hunk(heading="", ins=(), dels=(), ctx=(), old_start=1, new_start=1):
    return Hunk(
        heading=heading,
        old_start=old_start,
        old_len=len(dels) + len(ctx),
        new_start=new_start,
        new_len=len(ins) + len(ctx),
        insertions=tuple(ins),
        deletions=tuple(dels),
        context=tuple(ctx),
    )


def file_diff(path, hunks):
    return FileDiff(old_path=path, new_path=path, hunks=tuple(hunks))


def simple_diff(*file_specs):
    """file_specs: (path, [hunk, ...]) pairs."""
    return Diff(files=tuple(file_diff(path, hunks) for path, hunks in file_specs))


def mail_patch(value, subject="fix thing", message=("does a thing",), diff=None,
               date=1336000000, series=None):
    if diff is None:
        diff = simple_diff(("a.c", [hunk(heading="h", ins=["x"])]))
    return Patch(
        id=PatchId.mail(value),
        subject=subject,
        message=tuple(message),
        diff=diff,
        submission_date=date,
        series=series or SeriesInfo(revision=1),
    )


def commit_patch(value, subject="fix thing", message=("does a thing",), diff=None,
                 date=1336600000):
    if diff is None:
        diff = simple_diff(("a.c", [hunk(heading="h", ins=["x"])]))
    return Patch(
        id=PatchId.commit(value),
        subject=subject,
        message=tuple(message),
        diff=diff,
        submission_date=date,
    )


@pytest.fixture
def data_dir():
    return Path(__file__).parent / "data"
