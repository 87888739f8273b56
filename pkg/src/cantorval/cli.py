"""Command-line front end.

Every subcommand prints one JSON document on standard output.  Exit codes:
0 for a definite answer (a broken star procedure is a definite answer),
2 when the question stays open (depth exhausted, unsupported shape, oracle
mismatch), 1 for bad input or a rejected certificate.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import geometry, render, series, starproc
from .exactnum import encode, parse
from .kakeya import MIXED, classify
from .sweep import q_grid, sweep

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNDECIDED = 2

DEFAULT_ORACLE_DEPTH = 10
DEFAULT_RENDER_DEPTH = 6


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc}") from exc


def _spec_obj(args) -> dict:
    if getattr(args, "spec", None) and getattr(args, "spec_file", None):
        raise InputError("give either --spec or --spec-file, not both")
    if getattr(args, "spec", None):
        return _load_json(args.spec, "--spec")
    if getattr(args, "spec_file", None):
        return _load_json(Path(args.spec_file).read_text(), "--spec-file")
    raise InputError("a series is required (--spec or --spec-file)")


def _series(args) -> series.SeriesSpec:
    return series.from_json(_spec_obj(args))


def _write(path: str, data: bytes) -> None:
    Path(path).write_bytes(data)


# -- subcommands ---------------------------------------------------------


def cmd_analyze(args) -> int:
    s = _series(args)
    verdict = classify(s, args.horizon)
    doc = {
        "command": "analyze",
        "series": s.to_json(),
        "params": {"horizon": args.horizon},
        "kakeya": verdict.to_json(),
        "class": verdict.cls,
        "self_similarity": s.self_similarity().to_json() if s.self_similarity() else None,
        "blocks": None,
    }
    if verdict.cls == MIXED:
        try:
            doc["blocks"] = series.extract_blocks(s, args.horizon).to_json()
        except series.BlockExtractionError as exc:
            doc["blocks_error"] = str(exc)
    _emit(doc)
    return EXIT_OK


def cmd_certify(args) -> int:
    s = _series(args)
    verdict = classify(s)
    policy = starproc.normalize_policy(args.policy)
    doc = {
        "command": "certify",
        "series": s.to_json(),
        "params": {"depth": args.depth, "policy": policy},
        "class": verdict.cls,
        "kakeya": verdict.to_json(),
    }
    if verdict.cls != MIXED:
        doc["outcome"] = verdict.cls
        _emit(doc)
        return EXIT_OK
    try:
        res = starproc.run(s, args.depth, policy)
    except starproc.StarPreconditionError as exc:
        doc["outcome"] = "Unsupported"
        doc["reason"] = str(exc)
        _emit(doc)
        return EXIT_UNDECIDED
    doc["outcome"] = res.outcome
    doc["verdict"] = res.to_json()
    if args.out and res.certificate is not None:
        _write(args.out, (json.dumps(res.certificate.to_json(), indent=2, sort_keys=True) + "\n").encode())
        doc["certificate_path"] = args.out
    _emit(doc)
    return EXIT_UNDECIDED if res.outcome == starproc.EXHAUSTED else EXIT_OK


def cmd_oracle(args) -> int:
    s = _series(args)
    N = args.depth
    cover = geometry.level_cover(s, N)
    census = geometry.gap_census(cover)
    checks = {}
    if N <= 14:
        checks["naive_equal"] = cover.intervals == geometry.naive_cover(s, N)
    if N >= 1:
        coarse = geometry.level_cover(s, N - 1).intervals
        checks["refines_previous"] = all(
            any(c.contains(iv) for c in coarse) for iv in cover.intervals
        )
    doc = {
        "command": "oracle",
        "series": s.to_json(),
        "params": {"depth": N},
        "intervals": len(cover),
        "cover": cover.to_json() if args.full else None,
        "census": [g.to_json() for g in census] if args.full else None,
        "gaps": len(census),
        "measure": encode(geometry.measure(cover)),
        "checks": checks,
    }
    _emit(doc)
    return EXIT_OK if all(checks.values()) else EXIT_UNDECIDED


def cmd_render(args) -> int:
    s = _series(args)
    highlight, family = render.parse_highlight(args.highlight)
    rspec = render.RenderSpec(
        depth=args.depth,
        width=args.width,
        height=args.height,
        highlight=highlight,
        family=family,
        format=args.format,
    )
    data = render.render_levels(s, rspec)
    if not args.out:
        sys.stdout.write(data.decode("ascii"))
        return EXIT_OK
    _write(args.out, data)
    _emit(
        {
            "command": "render",
            "series": s.to_json(),
            "params": {
                "depth": rspec.depth,
                "width": rspec.columns,
                "height": rspec.height,
                "highlight": args.highlight,
                "format": rspec.format,
            },
            "out": args.out,
            "bytes": len(data),
            "sha256": hashlib.sha256(data).hexdigest(),
        }
    )
    return EXIT_OK


def _grid(args):
    if args.qs is not None:
        if args.q_from or args.q_to or args.q_step:
            raise InputError("give either --qs or --q-from/--q-to/--q-step")
        qs = _load_json(args.qs, "--qs")
        if not isinstance(qs, list):
            raise InputError("--qs must be a JSON list")
        return [parse(q) for q in qs]
    if not (args.q_from and args.q_to and args.q_step):
        raise InputError("sweep needs --qs or all of --q-from, --q-to, --q-step")
    return q_grid(args.q_from, args.q_to, args.q_step)


def cmd_sweep(args) -> int:
    family = _spec_obj(args)
    family = {k: v for k, v in family.items() if k != "q"}
    if family.get("type") != "multigeometric":
        raise InputError("sweep needs a multigeometric family")
    qs = _grid(args)
    policy = starproc.normalize_policy(args.policy)
    rows = sweep(family, qs, args.depth, policy, args.jobs)
    data = render.emit_csv(rows)
    if args.format == "csv" and not args.out:
        sys.stdout.write(data.decode("ascii"))
    else:
        if args.out:
            _write(args.out, data)
        _emit(
            {
                "command": "sweep",
                "family": family,
                "params": {"depth": args.depth, "policy": policy, "jobs": args.jobs},
                "out": args.out,
                "rows": [r.to_json() for r in rows],
            }
        )
    undecided = any(r.outcome == starproc.EXHAUSTED for r in rows)
    return EXIT_UNDECIDED if undecided else EXIT_OK


def cmd_mami(args) -> int:
    if args.pattern:
        obj = _load_json(args.pattern, "--pattern")
    elif args.k:
        obj = {"k": args.k, "m": args.m}
    else:
        raise InputError("mami needs --k (and optionally --m) or --pattern")
    pattern = series.block_pattern_from_json(obj)
    s = series.mami_build(pattern, parse(args.a1), args.horizon)
    sim = s.self_similarity()
    _emit(
        {
            "command": "mami",
            "params": {"a1": args.a1, "horizon": args.horizon, "terms": args.terms},
            "series": s.to_json(),
            "blocks": pattern.to_json(),
            "terms": [encode(t) for t in series.first_terms(s, args.terms)],
            "self_similarity": sim.to_json() if sim else None,
            "class": classify(s).cls,
        }
    )
    return EXIT_OK


def cmd_verify_cert(args) -> int:
    raw = _load_json(Path(args.cert).read_text(), "certificate")
    try:
        cert = starproc.Certificate.from_json(raw)
    except (KeyError, TypeError, ValueError) as exc:
        _emit({"command": "verify-cert", "verdict": "rejected", "accepted": False, "reason": f"malformed certificate: {exc}"})
        return EXIT_INPUT
    if args.spec or args.spec_file:
        s = _series(args)
    else:
        s = series.from_json(cert.series)
    ok, reason = starproc.check_certificate(cert, s)
    _emit(
        {
            "command": "verify-cert",
            "series": s.to_json(),
            "verdict": "accepted" if ok else "rejected",
            "accepted": ok,
            "reason": reason,
        }
    )
    return EXIT_OK if ok else EXIT_INPUT


# -- parser --------------------------------------------------------------


def _add_spec(p):
    p.add_argument("--spec", help="series as inline JSON")
    p.add_argument("--spec-file", help="series as a JSON file")


def _add_star(p):
    p.add_argument("--depth", type=int, default=starproc.DEFAULT_DEPTH)
    p.add_argument("--policy", choices=sorted(starproc.POLICY_ALIASES), default="all")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cantorval", description="Achievement sets of multigeometric and Mami series.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="Kakeya class, blocks, self-similarity")
    _add_spec(p)
    p.add_argument("--horizon", type=int, default=series.DEFAULT_HORIZON)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("certify", help="run the star procedure and emit a certificate")
    _add_spec(p)
    _add_star(p)
    p.add_argument("--out", help="write the certificate JSON here")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("oracle", help="brute-force cover at a depth")
    _add_spec(p)
    p.add_argument("--depth", type=int, default=DEFAULT_ORACLE_DEPTH)
    p.add_argument("--full", action="store_true", help="include cover and census intervals")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("render", help="draw construction levels")
    _add_spec(p)
    p.add_argument("--depth", type=int, default=DEFAULT_RENDER_DEPTH)
    p.add_argument("--format", choices=render.FORMATS, default="svg")
    p.add_argument("--highlight", default="none", help="none, census or families(n)")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("sweep", help="classify a multigeometric family over q")
    _add_spec(p)
    _add_star(p)
    p.add_argument("--q-from")
    p.add_argument("--q-to")
    p.add_argument("--q-step")
    p.add_argument("--qs", help="explicit JSON list of q values")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write CSV here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mami", help="build a sequence from a block pattern")
    p.add_argument("--k", help="affine k_n, e.g. '2*n'")
    p.add_argument("--m", default="1", help="constant m_n")
    p.add_argument("--pattern", help='JSON {"preperiod": [[dk, m], ...], "period": [...]}')
    p.add_argument("--a1", default="1")
    p.add_argument("--terms", type=int, default=12)
    p.add_argument("--horizon", type=int, default=40)
    p.set_defaults(func=cmd_mami)

    p = sub.add_parser("verify-cert", help="replay a certificate")
    _add_spec(p)
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_verify_cert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        _emit({"error": {"type": "InputError", "message": str(exc)}})
    except (ValueError, ArithmeticError, OSError) as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}})
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
