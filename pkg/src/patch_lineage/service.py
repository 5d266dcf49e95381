"""HTTP API for browsing analysis results and curating a reference clustering.

The service is a read-mostly view over a corpus store and one result file;
the single mutation is recording a human same/different verdict for a
candidate pair, which is appended to a crash-safe judgment log.  A browser
client can be mounted on top, but every endpoint is usable headlessly.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .cluster import DEFAULT_WINDOW_DAYS, candidate_pairs, census
from .diffparse import strip_tags
from .evaluation import clusters_to_text
from .model import ClusterSet, Corpus, Patch, PatchId, SimilarityConfig
from .similarity import rate
from .store import CorpusStore, JudgmentLog, read_result

# Width of the borderline band around ta from which review candidates are
# drawn; human judgment is most valuable near the decision threshold.
CANDIDATE_BAND = 0.2


class HunkModel(BaseModel):
    heading: str
    old_start: int
    old_len: int
    new_start: int
    new_len: int
    insertions: list[str]
    deletions: list[str]
    context: list[str]


class FileDiffModel(BaseModel):
    old_path: str
    new_path: str
    path: str
    meta_only: bool
    hunks: list[HunkModel]


class SeriesModel(BaseModel):
    revision: int
    position: int | None
    total: int | None


class PatchDetail(BaseModel):
    id: str
    kind: str
    subject: str
    message: list[str]
    tag_lines: list[int]
    submission_date: int
    author: str | None
    series: SeriesModel | None
    files: list[FileDiffModel]


class MemberPreview(BaseModel):
    id: str
    kind: str
    subject: str
    submission_date: int


class ClusterSummary(BaseModel):
    id: str
    size: int
    mail_count: int
    commit_count: int
    members: list[MemberPreview]


class ClusterPage(BaseModel):
    page: int
    page_size: int
    total_clusters: int
    total_pages: int
    clusters: list[ClusterSummary]


class CandidateModel(BaseModel):
    a: str
    a_kind: str
    b: str
    b_kind: str
    r_msg: float
    r_diff: float
    combined: float
    gated: bool


class CensusModel(BaseModel):
    clusters: int
    clusters_with_commit: int
    clusters_gt1_mail: int
    clusters_gt2_mail: int
    clusters_gt3_mail: int
    clusters_eq1_mail: int
    mails: int
    commits: int


class JudgmentIn(BaseModel):
    a: str
    b: str
    verdict: str


class JudgmentAck(BaseModel):
    recorded: bool
    remaining: int


class ReviewState:
    """Everything the endpoints need, loaded once at startup."""

    def __init__(
        self,
        corpus: Corpus,
        result: ClusterSet,
        cfg: SimilarityConfig,
        window_days: int,
        log: JudgmentLog,
    ):
        self.corpus = corpus
        self.result = result
        self.cfg = cfg
        self.window_days = window_days
        self.log = log
        self._candidates: list[CandidateModel] | None = None

    def resolve(self, value: str) -> PatchId:
        for kind in ("mail", "commit"):
            try:
                pid = PatchId(kind, value)
            except ValueError:
                continue
            if pid in self.corpus:
                return pid
        raise HTTPException(status_code=404, detail=f"unknown patch id: {value}")

    def scored_candidates(self) -> list[CandidateModel]:
        """Borderline pairs ordered by descending combined score."""
        if self._candidates is None:
            lo = self.cfg.ta - CANDIDATE_BAND
            hi = self.cfg.ta + CANDIDATE_BAND
            rows = []
            pairs = candidate_pairs(
                list(self.corpus.patches()), self.window_days, self.cfg.tf
            )
            for a, b in pairs:
                score = rate(self.corpus.get(a), self.corpus.get(b), self.cfg)
                if lo <= score.combined <= hi:
                    rows.append(
                        CandidateModel(
                            a=a.value,
                            a_kind=a.kind,
                            b=b.value,
                            b_kind=b.kind,
                            r_msg=score.r_msg,
                            r_diff=score.r_diff,
                            combined=score.combined,
                            gated=score.gated,
                        )
                    )
            rows.sort(key=lambda c: (-c.combined, c.a, c.b))
            self._candidates = rows
        return self._candidates

    def pending_candidates(self) -> list[CandidateModel]:
        judged = self.log.judged_pairs()
        out = []
        for cand in self.scored_candidates():
            pa = self.resolve(cand.a)
            pb = self.resolve(cand.b)
            pair = (pa, pb) if pa < pb else (pb, pa)
            if pair not in judged:
                out.append(cand)
        return out


def _patch_detail(patch: Patch) -> PatchDetail:
    kept = set(strip_tags(patch.message))
    tag_lines = [i for i, line in enumerate(patch.message) if line not in kept]
    return PatchDetail(
        id=patch.id.value,
        kind=patch.id.kind,
        subject=patch.subject,
        message=list(patch.message),
        tag_lines=tag_lines,
        submission_date=patch.submission_date,
        author=patch.author,
        series=(
            SeriesModel(
                revision=patch.series.revision,
                position=patch.series.position,
                total=patch.series.total,
            )
            if patch.series
            else None
        ),
        files=[
            FileDiffModel(
                old_path=f.old_path,
                new_path=f.new_path,
                path=f.path,
                meta_only=f.meta_only,
                hunks=[
                    HunkModel(
                        heading=h.heading,
                        old_start=h.old_start,
                        old_len=h.old_len,
                        new_start=h.new_start,
                        new_len=h.new_len,
                        insertions=list(h.insertions),
                        deletions=list(h.deletions),
                        context=list(h.context),
                    )
                    for h in f.hunks
                ],
            )
            for f in patch.diff.files
        ],
    )


def create_app(
    store_dir: str | Path,
    result_path: str | Path,
    judgment_log: str | Path | None = None,
    cfg: SimilarityConfig | None = None,
    window_days: int | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    corpus = CorpusStore(store_dir).load()
    result, meta = read_result(result_path)
    if cfg is None:
        cfg = SimilarityConfig(
            tf=meta.get("tf", 1.0),
            th=meta.get("th", 1.0),
            dlr=meta.get("dlr", 0.4),
            w=meta.get("w", 0.3),
            ta=meta.get("ta", 0.82),
        )
    if window_days is None:
        window_days = meta.get("window_days", DEFAULT_WINDOW_DAYS)
    log_path = (
        Path(judgment_log) if judgment_log else Path(store_dir) / "judgments.jsonl"
    )
    state = ReviewState(corpus, result, cfg, window_days, JudgmentLog(log_path))

    app = FastAPI(title="patch-lineage review service")
    app.state.review = state

    @app.exception_handler(HTTPException)
    async def http_error(_request: Request, exc: HTTPException):
        return JSONResponse(status_code=exc.status_code, content={"error": str(exc.detail)})

    @app.exception_handler(RequestValidationError)
    async def validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/api/clusters", response_model=ClusterPage)
    def list_clusters(page: int = 1, page_size: int = 50):
        if page < 1 or page_size < 1:
            raise HTTPException(status_code=400, detail="page and page_size start at 1")
        clusters = state.result.clusters()
        order = sorted(clusters)
        total = len(order)
        total_pages = max(1, -(-total // page_size))
        window = order[(page - 1) * page_size : page * page_size]
        return ClusterPage(
            page=page,
            page_size=page_size,
            total_clusters=total,
            total_pages=total_pages,
            clusters=[_summary(state, canon, clusters[canon], preview=8) for canon in window],
        )

    @app.get("/api/census", response_model=CensusModel)
    def get_census():
        counts = census(state.result)
        return CensusModel(
            **counts,
            mails=len(state.corpus.mails),
            commits=len(state.corpus.commits),
        )

    @app.get("/api/cluster/{cid:path}", response_model=ClusterSummary)
    def get_cluster(cid: str):
        pid = state.resolve(cid)
        if pid not in state.result:
            raise HTTPException(status_code=404, detail=f"not in result: {cid}")
        members = state.result.members(pid)
        canon = state.result.canonical(pid)
        return _summary(state, canon, members, preview=None)

    @app.get("/api/patch/{pid:path}", response_model=PatchDetail)
    def get_patch(pid: str):
        return _patch_detail(state.corpus.get(state.resolve(pid)))

    @app.get("/api/candidates", response_model=list[CandidateModel])
    def get_candidates(limit: int = 20):
        if limit < 1:
            raise HTTPException(status_code=400, detail="limit starts at 1")
        return state.pending_candidates()[:limit]

    @app.post("/api/judgment", response_model=JudgmentAck)
    def post_judgment(body: JudgmentIn):
        if body.verdict not in ("same", "different"):
            raise HTTPException(status_code=400, detail="verdict must be same|different")
        a = state.resolve(body.a)
        b = state.resolve(body.b)
        if a == b:
            raise HTTPException(status_code=400, detail="cannot judge a pair against itself")
        state.log.append(a, b, body.verdict)
        return JudgmentAck(recorded=True, remaining=len(state.pending_candidates()))

    @app.get("/api/export/groundtruth")
    def export_groundtruth():
        truth = state.log.groundtruth()
        text = clusters_to_text(truth, comments=["assembled from review judgments"])
        return PlainTextResponse(text)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _summary(
    state: ReviewState,
    canon: PatchId,
    members: frozenset[PatchId],
    preview: int | None,
) -> ClusterSummary:
    ordered = sorted(members)
    shown = ordered if preview is None else ordered[:preview]
    previews = []
    for pid in shown:
        patch = state.corpus.get(pid)
        previews.append(
            MemberPreview(
                id=pid.value,
                kind=pid.kind,
                subject=patch.subject,
                submission_date=patch.submission_date,
            )
        )
    return ClusterSummary(
        id=canon.value,
        size=len(members),
        mail_count=sum(1 for p in members if p.is_mail),
        commit_count=sum(1 for p in members if p.is_commit),
        members=previews,
    )
