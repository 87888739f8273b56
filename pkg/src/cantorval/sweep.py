"""Batch classification of a one-parameter family over a grid of ratios."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .exactnum import QuadValue, encode, parse, sign
from .kakeya import MIXED, classify
from .series import SeriesError, from_json
from .starproc import ALL_SATISFIED, DEFAULT_DEPTH, StarPreconditionError, run

INVALID = "Invalid"
UNSUPPORTED = "Unsupported"


@dataclass(frozen=True)
class SweepRow:
    q: QuadValue
    cls: str
    outcome: Optional[str] = None
    certificate: Optional[str] = None
    steps: int = 0

    def to_json(self):
        return {
            "q": encode(self.q),
            "class": self.cls,
            "outcome": self.outcome,
            "certificate": self.certificate,
            "steps": self.steps,
        }


def q_grid(lo, hi, step) -> list[QuadValue]:
    """``lo, lo+step, ...`` up to and including ``hi`` when it is hit exactly."""
    lo, hi, step = parse(lo), parse(hi), parse(step)
    if sign(step) <= 0:
        raise ValueError("q-step must be positive")
    out = []
    q = lo
    while sign(q - hi) <= 0:
        out.append(q)
        q = q + step
    return out


def analyze_one(family: dict, q, depth: int = DEFAULT_DEPTH, policy: str = ALL_SATISFIED) -> SweepRow:
    q = parse(q)
    try:
        s = from_json({**family, "q": encode(q)})
        verdict = classify(s)
    except SeriesError:
        return SweepRow(q, INVALID)
    if verdict.cls != MIXED:
        return SweepRow(q, verdict.cls)
    try:
        res = run(s, depth, policy)
    except StarPreconditionError:
        return SweepRow(q, verdict.cls, UNSUPPORTED)
    kind = res.certificate.kind if res.certificate is not None else None
    return SweepRow(q, verdict.cls, res.outcome, kind, res.steps)


def _job(args):
    family, q, depth, policy = args
    return analyze_one(family, parse(q), depth, policy)


def sweep(
    family: dict,
    qs: Sequence,
    depth: int = DEFAULT_DEPTH,
    policy: str = ALL_SATISFIED,
    jobs: int = 1,
) -> list[SweepRow]:
    """One row per ``q``, in input order, whatever the worker count."""
    tasks = [(family, encode(parse(q)), depth, policy) for q in qs]
    if jobs <= 1 or len(tasks) <= 1:
        return [_job(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_job, tasks))

