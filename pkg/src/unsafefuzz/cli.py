"""Command-line entry point: ``scan``, ``pathfind``, ``fuzz``, ``campaign``, ``report``.

Exit status is 0 on success and 2 on any error; warnings never change it.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import callgraph, pathfinder, unsafescan
from .campaign import build_report, campaign_document, load_campaign
from .coverage import MAP_SIZE, check_map_size
from .evalstats import render_oracles, render_table
from .fuzzer import ConfigError, TrialConfig, run_campaign, run_trial
from .harness import get_target

log = logging.getLogger("unsafefuzz")

EXIT_OK = 0
EXIT_ERROR = 2


class CliError(Exception):
    pass


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def map_size_from_env() -> int:
    raw = os.environ.get("UF_MAP_SIZE")
    if raw is None:
        return MAP_SIZE
    try:
        return check_map_size(int(raw))
    except ValueError as exc:
        raise CliError(f"UF_MAP_SIZE: {exc}") from None


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {value}")
    return value


def seed_int(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def cmd_scan(args) -> int:
    for p in args.src:
        if not os.path.exists(p) or not os.access(p, os.R_OK):
            raise CliError(f"cannot read {p}")
    try:
        result = unsafescan.scan_source(unsafescan.iter_rust_files(args.src))
    except OSError as exc:
        raise CliError(f"cannot read {exc.filename}: {exc.strerror}") from None
    manifest = result.manifest
    if args.symbol_map:
        manifest = unsafescan.apply_symbol_map(manifest, unsafescan.load_symbol_map(read_text(args.symbol_map)))
    write_atomic(args.out, unsafescan.write_manifest(manifest))
    print(f"{len(manifest)} unsafe function(s), {len(result.warnings)} warning(s)")
    return EXIT_OK


def cmd_pathfind(args) -> int:
    graphs = [callgraph.parse_any(read_text(p)) for p in args.callgraph]
    g = callgraph.merge(graphs)
    manifest = unsafescan.load_manifest(read_text(args.unsafe))
    if not manifest.functions:
        log.warning("unsafe manifest is empty: every function will be blocked")
    mode = "conservative_indirect" if args.conservative_indirect else "standard"
    blocklist = pathfinder.compute_blocklist(g, manifest, mode)
    write_atomic(args.out, pathfinder.write_blocklist(blocklist, args.format))
    print(pathfinder.format_summary(pathfinder.summary(g, manifest, blocklist)))
    return EXIT_OK


def load_corpus(directory: str) -> tuple[bytes, ...]:
    d = Path(directory)
    if not d.is_dir():
        raise CliError(f"corpus directory {directory} does not exist")
    files = sorted(p for p in d.iterdir() if p.is_file())
    if not files:
        raise CliError(f"corpus directory {directory} is empty")
    return tuple(p.read_bytes() for p in files)


def cmd_fuzz(args) -> int:
    target = get_target(args.target)
    blocklist = pathfinder.load_blocklist(read_text(args.blocklist)) if args.blocklist else None
    cfg = TrialConfig(
        target=target.name,
        rng_seed=args.rng_seed,
        duration_ms=args.duration_ms,
        blocklist=blocklist,
        initial_corpus=load_corpus(args.corpus) if args.corpus else None,
        map_size=map_size_from_env(),
        wall_clock=args.wall_clock,
        arm="partial" if blocklist is not None else "full",
    )
    result = run_trial(cfg)
    write_atomic(args.out, result.to_json() + "\n")
    hit = sum(v is not None for v in result.first_hit.values())
    print(f"{result.executions} executions, corpus {result.corpus_size}, "
          f"{hit}/{len(result.first_hit)} oracles hit, {result.crashes} crash(es)")
    return EXIT_OK


def cmd_campaign(args) -> int:
    target = get_target(args.target)
    full, partial = run_campaign(
        target.name, args.trials, args.duration_ms, args.rng_seed,
        jobs=args.jobs, ab_identical=args.ab_identical, map_size=map_size_from_env(),
    )
    doc = campaign_document(target.name, full, partial, args.duration_ms, args.rng_seed, args.ab_identical)
    write_atomic(args.out, json.dumps(doc, sort_keys=True, indent=2) + "\n")
    report = build_report(full, partial, args.duration_ms)
    print(render_table({target.name: report}))
    print()
    print(render_oracles(report))
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        doc = json.loads(read_text(args.input))
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.input}: invalid JSON: {exc}") from None
    target, full, partial, duration, censoring = load_campaign(doc)
    report = build_report(full, partial, duration, censoring)
    if args.format == "json":
        print(report.to_json())
    else:
        print(render_table({target: report}))
        print()
        print(render_oracles(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unsafefuzz", description="Partial-instrumentation fuzzing focused on unsafe code."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="write the unsafe-function manifest of Rust sources")
    p.add_argument("--src", nargs="+", required=True, metavar="PATH")
    p.add_argument("--out", required=True)
    p.add_argument("--symbol-map", help="plain<TAB>mangled renames applied to the manifest")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("pathfind", help="compute the block list from call graphs and a manifest")
    p.add_argument("--callgraph", nargs="+", required=True, metavar="FILE")
    p.add_argument("--unsafe", required=True, metavar="MANIFEST")
    p.add_argument("--conservative-indirect", action="store_true")
    p.add_argument("--format", choices=("plain", "afl-denylist"), default="plain")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pathfind)

    p = sub.add_parser("fuzz", help="run one trial against a bundled target")
    p.add_argument("--target", required=True)
    p.add_argument("--blocklist")
    p.add_argument("--duration-ms", type=positive_int, required=True)
    p.add_argument("--rng-seed", type=seed_int, default=0)
    p.add_argument("--corpus", metavar="DIR")
    p.add_argument("--out", required=True)
    p.add_argument("--wall-clock", action="store_true")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("campaign", help="paired full vs partial trials plus statistics")
    p.add_argument("--target", required=True)
    p.add_argument("--trials", type=positive_int, required=True)
    p.add_argument("--duration-ms", type=positive_int, required=True)
    p.add_argument("--rng-seed", type=seed_int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=positive_int, default=1)
    p.add_argument("--ab-identical", action="store_true")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("report", help="render a campaign result file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (CliError, ConfigError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"unsafefuzz: error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
