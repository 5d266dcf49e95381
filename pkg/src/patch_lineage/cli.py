"""Command line entry points.

Thin wrappers over the library: ingest archives and repositories into a
corpus store, run the analysis, sweep parameters, score results against a
reference clustering, and serve the review API.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .baselines import checksum_cluster, plusminus_cluster
from .cluster import DEFAULT_WINDOW_DAYS, census, cluster_corpus
from .diffparse import MalformedDiff
from .evaluation import (
    DEFAULT_GRID,
    EmptyGrid,
    GridAxis,
    ShapeMismatch,
    SweepGrid,
    UniverseMismatch,
    fowlkes_mallows,
    integration_durations,
    load_clusters_file,
    pair_counts,
    purity,
    sweep,
    write_sweep_csv,
)
from .gitrepo import BadRange, RepoUnavailable
from .model import SimilarityConfig
from .store import (
    CorpusStore,
    ingest_mbox_paths,
    ingest_patch_dir,
    ingest_repo,
    read_result,
    write_result,
)

USAGE_ERROR = 1
DATA_ERROR = 2

_DATA_ERRORS = (
    MalformedDiff,
    RepoUnavailable,
    BadRange,
    UniverseMismatch,
    ShapeMismatch,
    EmptyGrid,
    FileNotFoundError,
    NotADirectoryError,
    PermissionError,
    KeyError,
    ValueError,
)

PARAM_DEFAULTS = {
    "tf": 1.0,
    "th": 1.0,
    "dlr": 0.4,
    "w": 0.3,
    "ta": 0.82,
    "window_days": DEFAULT_WINDOW_DAYS,
    "engine": "rate",
    "pm_threshold": 0.5,
}


def _read_config_file(path: str) -> dict:
    """key=value per line; '#' starts a comment."""
    out: dict = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in PARAM_DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key == "engine":
            out[key] = value
        elif key == "window_days":
            out[key] = int(value)
        else:
            out[key] = float(value)
    return out


def _resolve_params(args: argparse.Namespace) -> dict:
    params = dict(PARAM_DEFAULTS)
    if getattr(args, "config", None):
        params.update(_read_config_file(args.config))
    for key in PARAM_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    return params


def _config_from(params: dict) -> SimilarityConfig:
    return SimilarityConfig(
        tf=params["tf"], th=params["th"], dlr=params["dlr"],
        w=params["w"], ta=params["ta"],
    )


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--tf", type=float, help="filename similarity threshold")
    parser.add_argument("--th", type=float, help="hunk heading similarity threshold")
    parser.add_argument("--dlr", type=float, help="diff length ratio gate")
    parser.add_argument("--w", type=float, help="message weight in the combined score")
    parser.add_argument("--ta", type=float, help="auto-accept threshold")
    parser.add_argument("--window-days", dest="window_days", type=int,
                        help="candidate time window in days")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patch-lineage",
        description="Track patch evolution from mailing lists into a repository.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-mbox", help="read mbox archives into a corpus store")
    p.add_argument("--store", required=True)
    p.add_argument("paths", nargs="+")

    p = sub.add_parser("ingest-repo", help="read commits into a corpus store")
    p.add_argument("--store", required=True)
    p.add_argument("--repo", help="git repository path")
    p.add_argument("--range", dest="range_expr", help="revision range, e.g. v3.3..v3.6")
    p.add_argument("--patch-dir", help="directory of pre-exported <hash>.patch files")

    p = sub.add_parser("analyze", help="cluster the corpus and write a result file")
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--engine", choices=["rate", "plusminus", "checksum"])
    p.add_argument("--pm-threshold", dest="pm_threshold", type=float,
                   help="plus-minus baseline threshold")
    _add_param_flags(p)

    p = sub.add_parser("sweep", help="score a parameter grid against a reference clustering")
    p.add_argument("--store", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out", required=True)
    for name, axis in (
        ("tf", DEFAULT_GRID.tf), ("th", DEFAULT_GRID.th), ("dlr", DEFAULT_GRID.dlr),
        ("w", DEFAULT_GRID.w), ("ta", DEFAULT_GRID.ta),
    ):
        p.add_argument(
            f"--grid-{name}",
            default=f"{axis.lo}:{axis.hi}:{axis.step}",
            help=f"lo:hi:step for {name} (default %(default)s)",
        )
    p.add_argument("--window-days", dest="window_days", type=int, default=DEFAULT_WINDOW_DAYS)

    p = sub.add_parser("evaluate", help="score one result file against a reference clustering")
    p.add_argument("--result", required=True)
    p.add_argument("--truth", required=True)

    p = sub.add_parser("stats", help="integration duration statistics for a result")
    p.add_argument("--store", required=True)
    p.add_argument("--result", required=True)
    p.add_argument("--quantiles", default="0.5,0.8,0.995")

    p = sub.add_parser("serve", help="run the review HTTP service")
    p.add_argument("--store", required=True)
    p.add_argument("--result", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8420)
    p.add_argument("--judgment-log", dest="judgment_log")
    p.add_argument("--ui-dir", dest="ui_dir")
    _add_param_flags(p)

    return parser


def _parse_axis(text: str) -> GridAxis:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid axis must be lo:hi:step, got {text!r}")
    return GridAxis(float(parts[0]), float(parts[1]), float(parts[2]))


def cmd_ingest_mbox(args: argparse.Namespace) -> int:
    store = CorpusStore(args.store)
    stats = ingest_mbox_paths(args.paths, store)
    print(stats.summary())
    return 0


def cmd_ingest_repo(args: argparse.Namespace) -> int:
    store = CorpusStore(args.store)
    if args.patch_dir:
        count = ingest_patch_dir(store, args.patch_dir)
    elif args.repo and args.range_expr:
        count = ingest_repo(store, args.repo, args.range_expr)
    else:
        print("ingest-repo needs --repo with --range, or --patch-dir", file=sys.stderr)
        return USAGE_ERROR
    print(f"commits={count}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    params = _resolve_params(args)
    cfg = _config_from(params)
    corpus = CorpusStore(args.store).load()
    engine = params["engine"]
    if engine == "rate":
        result = cluster_corpus(corpus, cfg, params["window_days"])
    elif engine == "plusminus":
        result = plusminus_cluster(corpus.patches(), params["pm_threshold"])
    elif engine == "checksum":
        result = checksum_cluster(corpus.patches())
    else:
        print(f"unknown engine: {engine}", file=sys.stderr)
        return USAGE_ERROR
    write_result(result, args.out, cfg, params["window_days"], engine)
    for key, value in census(result).items():
        print(f"{key}={value}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    grid = SweepGrid(
        tf=_parse_axis(args.grid_tf),
        th=_parse_axis(args.grid_th),
        dlr=_parse_axis(args.grid_dlr),
        w=_parse_axis(args.grid_w),
        ta=_parse_axis(args.grid_ta),
    )
    corpus = CorpusStore(args.store).load()
    truth = load_clusters_file(args.truth)
    rows = sweep(grid, corpus, truth, args.window_days)
    write_sweep_csv(rows, args.out)
    best = max(rows, key=lambda r: r.fm)
    cfg = best.config
    print(f"rows={len(rows)}")
    print(
        f"best fm={best.fm:.6f} at tf={cfg.tf} th={cfg.th} dlr={cfg.dlr} "
        f"w={cfg.w} ta={cfg.ta}"
    )
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    result, _ = read_result(args.result)
    truth = load_clusters_file(args.truth)
    restricted = result.restrict(truth.ids())
    counts = pair_counts(restricted, truth)
    fm = fowlkes_mallows(counts)
    pur = purity(restricted, truth)
    print(f"tp={counts.tp} fp={counts.fp} fn={counts.fn} tn={counts.tn}")
    print(f"fm={fm:.6f}")
    print(f"purity={pur:.6f}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    corpus = CorpusStore(args.store).load()
    result, _ = read_result(args.result)
    report = integration_durations(result, corpus)
    print(f"clusters_with_duration={len(report.rows)}")
    print(f"negative={report.negative_count}")
    if report.rows:
        for q in (float(q) for q in args.quantiles.split(",")):
            seconds = report.quantile(q)
            print(f"q={q:g} seconds={seconds} days={seconds / 86400:.2f}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    params = _resolve_params(args)
    explicit = any(
        getattr(args, key, None) is not None for key in ("tf", "th", "dlr", "w", "ta")
    ) or bool(getattr(args, "config", None))
    app = create_app(
        args.store,
        args.result,
        judgment_log=args.judgment_log,
        cfg=_config_from(params) if explicit else None,
        window_days=args.window_days,
        ui_dir=args.ui_dir,
    )
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return DATA_ERROR
    except SystemExit as exc:
        # uvicorn sys.exits on startup failures such as a busy port.
        if exc.code:
            print(f"service failed to start on {args.host}:{args.port}", file=sys.stderr)
            return DATA_ERROR
    return 0


_COMMANDS = {
    "ingest-mbox": cmd_ingest_mbox,
    "ingest-repo": cmd_ingest_repo,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "evaluate": cmd_evaluate,
    "stats": cmd_stats,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; the CLI contract says 1.
        return 0 if exc.code == 0 else USAGE_ERROR
    try:
        return _COMMANDS[args.command](args)
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
