"""walkerlab command line: validate, report, verify-paper.

Exit codes: 0 success, 1 verification mismatch, 2 input or usage error,
3 report emitted with an indeterminate-exact verdict.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

from .errors import DuplicateId, ExprSyntaxError, ModelError, UnboundParameter, WalkerlabError
from .model.catalog import (
    builtin_catalog,
    find_entry,
    load_catalog,
    merge_catalogs,
    parse_assignment,
    parse_catalog,
    select_entries,
)
from .model.expr import free_names
from .model.homogeneous import instantiate
from .report import build_report, report_dict, report_text, to_json
from .verify import FAIL, PASS, SKIPPED, summary_dict, verify_catalog

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INDETERMINATE = 0, 1, 2, 3
ENV_CATALOG = "WALKERLAB_CATALOG"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 already; keep the message short
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def load_entries(path: str | None):
    """Built-in catalog, overlaid with a user catalog (flag or environment)."""
    entries = builtin_catalog()
    path = path or os.environ.get(ENV_CATALOG)
    if path:
        entries = merge_catalogs(entries, load_catalog(path))
    return entries


def _static_problems(entry) -> list[str]:
    known = set(entry.params) | {n for n, _ in entry.defines}
    problems = []
    bound = set(entry.params)
    for name, e in entry.defines:
        missing = free_names(e) - bound
        if missing:
            problems.append(f"define {name} uses unbound {', '.join(sorted(missing))}")
        bound.add(name)
    for e in entry.expressions():
        missing = free_names(e) - known
        if missing:
            problems.append(f"unbound name(s) {', '.join(sorted(missing))}")
    if not entry.metric:
        problems.append("no metric components")
    if entry.is_full and not entry.brackets:
        problems.append("full entry without brackets")
    return sorted(set(problems))


def cmd_validate(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _err(f"{args.file}: {exc.strerror}")
        return EXIT_USAGE
    try:
        entries = parse_catalog(text)
    except ExprSyntaxError as exc:
        line = exc.lineno if exc.lineno is not None else 0
        col = exc.column if exc.column is not None else exc.offset
        _err(f"{args.file}:{line}:{col}: {exc.msg}")
        return EXIT_USAGE
    except DuplicateId as exc:
        _err(f"{args.file}: {exc}")
        return EXIT_USAGE
    bad = 0
    for e in entries:
        for p in _static_problems(e):
            _err(f"{args.file}:{e.line}:1: entry {e.id}: {p}")
            bad += 1
    if bad:
        return EXIT_USAGE
    full = sum(e.is_full for e in entries)
    print(f"OK {args.file}: {len(entries)} entries ({full} full, {len(entries) - full} stubs)")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        entries = load_entries(args.catalog)
        entry = find_entry(entries, args.id)
        if entry is None:
            _err(f"unknown entry id {args.id!r}")
            return EXIT_USAGE
        params = parse_assignment(args.params or "")
        model = instantiate(entry, params)
    except ExprSyntaxError as exc:
        _err(f"bad input: {exc}")
        return EXIT_USAGE
    except (ModelError, UnboundParameter, DuplicateId, OSError) as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_USAGE
    except WalkerlabError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_USAGE
    rep = build_report(model, oracle=not args.no_oracle)
    timing = not args.no_timing
    if args.format == "json":
        print(to_json(report_dict(rep, timing=timing)))
    else:
        print(report_text(rep, timing=timing))
    return EXIT_INDETERMINATE if rep.indeterminate else EXIT_OK


def _certificate_text(kind: str, verdict: str, cert: dict) -> str:
    if verdict != "none":
        return f"{kind} {verdict}"
    return (f"{kind} none (exhaustive={str(cert.get('exhaustive')).lower()}, "
            f"{cert.get('branches', 0)} branches covering {cert.get('tuple_space', 0)} eigenvalue tuples)")


def cmd_verify_paper(args) -> int:
    try:
        entries = load_entries(args.catalog)
    except (ExprSyntaxError, DuplicateId, OSError) as exc:
        _err(f"cannot load catalog: {exc}")
        return EXIT_USAGE
    chosen = select_entries(entries, args.case)
    if not chosen:
        _err(f"no catalog entry matches {args.case!r}")
        return EXIT_USAGE
    t0 = time.perf_counter()
    results = verify_catalog(chosen, seed=args.seed, trials=args.trials)
    elapsed = time.perf_counter() - t0
    failed = [r for r in results if r.status == FAIL]
    if args.format == "json":
        print(to_json(summary_dict(results, seed=args.seed, trials=args.trials)))
    else:
        for r in results:
            if r.status == SKIPPED:
                print(f"{SKIPPED} {r.id}")
                continue
            print(f"{r.status} {r.id} ({len(r.runs)} runs)")
            for run in r.runs:
                if run.report is None:
                    continue
                label = ", ".join(f"{k}={v}" for k, v in run.params.items()) or "no params"
                w = run.report.walker
                print(f"    [{label}] segre {run.report.segre.render}; "
                      f"{_certificate_text('line', w.line.verdict, w.line.certificate)}; "
                      f"{_certificate_text('plane', w.plane.verdict, w.plane.certificate)}")
            for line in r.failures():
                print(f"    - {line}")
        passed = sum(r.status == PASS for r in results)
        skipped = sum(r.status == SKIPPED for r in results)
        verdict = "PASS" if not failed else "FAIL"
        print(f"{verdict}: {passed} verified, {len(failed)} failed, {skipped} skipped stubs "
              f"(seed {args.seed}, {args.trials} trials, {elapsed:.1f} s)")
    return EXIT_MISMATCH if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="walkerlab", description="Walker structures on homogeneous four-manifolds")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="parse and statically check a catalog file")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("report", help="full geometry report for one entry")
    r.add_argument("id")
    r.add_argument("--catalog", help=f"extra catalog overlaid on the built-in one (default ${ENV_CATALOG})")
    r.add_argument("--params", default="", help="k=v[,k=v...] with rational values")
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("--no-timing", action="store_true", help="omit timing for byte-stable output")
    r.add_argument("--no-oracle", action="store_true", help="skip the floating-point cross-check")
    r.set_defaults(func=cmd_report)

    vp = sub.add_parser("verify-paper", help="check every catalog entry against its expectations")
    vp.add_argument("--case", help="entry id, or a prefix selecting id-* entries")
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--trials", type=int, default=3)
    vp.add_argument("--format", choices=("text", "json"), default="text")
    vp.add_argument("--catalog", help=f"extra catalog overlaid on the built-in one (default ${ENV_CATALOG})")
    vp.set_defaults(func=cmd_verify_paper)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        _err("--trials must be positive")
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
