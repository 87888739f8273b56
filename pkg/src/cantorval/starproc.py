"""Exact Star Procedure engine with replayable certificates.

The procedure tracks a finite set of positive values ``M`` (distances inside
overlaps).  At block ``n`` each value must satisfy the star group (*) or the
double-star inequality (**); the overlap ``delta_{k_n - 1}`` must satisfy the
primed group (*').  The next set consists of the left-hand sides of the
satisfied inequalities plus the fresh deltas between blocks ``n`` and ``n+1``.

Running forever is certified in one of two ways, both exact:

* a **cycle**: the open set at step ``n2`` is contained in ``scale`` times the
  open set at an earlier step ``n1`` with the same block phase, so every later
  step is a scaled copy of one already checked;
* a **tail closure**: ``M - 2 * sum_{j >= n} a_{k_j} >= 0``, so ``M`` keeps
  satisfying (**) at every later block and never needs tracking again.

(*) requires ``M < r_{k_n} + r_{k_n+m_n-1} < 2 a_{k_n}``, so it never holds
together with (**); the three policies therefore agree on every input, and a
closed lineage emits nothing but its own (**) successor.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Optional, Union

from .exactnum import QuadValue, encode, parse, sign
from .series import (
    BlockStructure,
    SeriesSpec,
    extract_blocks,
)

ALL_SATISFIED = "AllSatisfied"
PREFER_STAR = "PreferStar"
SEARCH = "Search"
POLICIES = (ALL_SATISFIED, PREFER_STAR, SEARCH)
POLICY_ALIASES = {"all": ALL_SATISFIED, "prefer-star": PREFER_STAR, "search": SEARCH}

STAR = "*"
DOUBLE_STAR = "**"
PRIME = "*'"

DEFAULT_DEPTH = 32
_SEARCH_BRANCH_LIMIT = 64


class StarPreconditionError(ValueError):
    """The series is outside the scope of the procedure."""


def normalize_policy(policy: str) -> str:
    policy = POLICY_ALIASES.get(policy, policy)
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    return policy


def sort_values(values) -> list[QuadValue]:
    return sorted(set(values), key=cmp_to_key(lambda x, y: sign(x - y)))


def _enc_list(values) -> list:
    return [encode(v) for v in values]


# -- data types ----------------------------------------------------------


@dataclass(frozen=True)
class TailClosureRecord:
    value: QuadValue
    from_step: int
    slack: QuadValue

    def to_json(self):
        return {"value": encode(self.value), "from_step": self.from_step, "slack": encode(self.slack)}

    @classmethod
    def from_json(cls, obj) -> TailClosureRecord:
        return cls(parse(obj["value"]), int(obj["from_step"]), parse(obj["slack"]))


@dataclass(frozen=True)
class StarState:
    """``M^n``: the values about to face block ``step``."""

    step: int
    open: tuple[QuadValue, ...]
    closed: tuple[TailClosureRecord, ...] = ()
    policy: str = ALL_SATISFIED

    def __post_init__(self):
        object.__setattr__(self, "open", tuple(sort_values(self.open)))

    def to_json(self):
        return {
            "step": self.step,
            "open": _enc_list(self.open),
            "closed": [c.to_json() for c in self.closed],
            "policy": self.policy,
        }


@dataclass(frozen=True)
class Break:
    step: int
    value: Optional[QuadValue]
    failed: tuple[dict, ...]

    def to_json(self):
        return {
            "step": self.step,
            "value": None if self.value is None else encode(self.value),
            "failed": list(self.failed),
        }


@dataclass(frozen=True)
class Certificate:
    kind: str
    policy: str
    series: dict
    alignment: dict
    n1: int
    n2: int
    scale: QuadValue
    state: tuple[QuadValue, ...]
    closures: tuple[TailClosureRecord, ...]
    trace_digest: str

    def to_json(self):
        return {
            "kind": self.kind,
            "policy": self.policy,
            "series": self.series,
            "alignment": self.alignment,
            "cycle": {
                "n1": self.n1,
                "n2": self.n2,
                "scale": encode(self.scale),
                "normalized_state": _enc_list(self.state),
            },
            "closures": [c.to_json() for c in self.closures],
            "trace_digest": self.trace_digest,
        }

    @classmethod
    def from_json(cls, obj) -> Certificate:
        cyc = obj["cycle"]
        return cls(
            kind=obj["kind"],
            policy=obj["policy"],
            series=obj["series"],
            alignment=obj["alignment"],
            n1=int(cyc["n1"]),
            n2=int(cyc["n2"]),
            scale=parse(cyc["scale"]),
            state=tuple(parse(v) for v in cyc["normalized_state"]),
            closures=tuple(TailClosureRecord.from_json(c) for c in obj["closures"]),
            trace_digest=obj["trace_digest"],
        )


CERTIFIED = "CantorvalCertified"
BREAKS = "Breaks"
EXHAUSTED = "DepthExhausted"


@dataclass(frozen=True)
class StarVerdict:
    outcome: str
    policy: str
    depth: int
    certificate: Optional[Certificate] = None
    broke: Optional[Break] = None
    diagnostics: dict = field(default_factory=dict)
    trace: tuple = ()

    @property
    def steps(self) -> int:
        return len(self.trace)

    def to_json(self):
        out = {"outcome": self.outcome, "policy": self.policy, "depth": self.depth}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.broke is not None:
            out.update(self.broke.to_json())
        if self.diagnostics:
            out["diagnostics"] = self.diagnostics
        out["trace"] = list(self.trace)
        return out


# -- the inequalities ----------------------------------------------------


def star_lhs(M: QuadValue, n: int, s: SeriesSpec, blocks: BlockStructure) -> list[QuadValue]:
    """Left-hand sides of the star group (*) for value ``M`` at block ``n``."""
    k, m = blocks.k(n), blocks.m(n)
    out = [M - s.term(k), s.remainder(k) + s.remainder(k + m - 1) - M]
    run = QuadValue(0)
    for j in range(1, m):
        out.append(M - 2 * s.term(k + j) - run)
        run = run + s.term(k + j)
    return out


def double_star_lhs(M: QuadValue, n: int, s: SeriesSpec, blocks: BlockStructure) -> list[QuadValue]:
    return [M - 2 * s.term(blocks.k(n))]


def prime_lhs(n: int, s: SeriesSpec, blocks: BlockStructure) -> list[QuadValue]:
    """Left-hand sides of (*') for the overlap ``delta_{k_n - 1}``."""
    k, m = blocks.k(n), blocks.m(n)
    d = s.delta(k - 1)
    out = [d - sum((s.term(k + j) for j in range(1, m)), QuadValue(0))]
    run = QuadValue(0)
    for j in range(1, m):
        out.append(2 * s.remainder(k + j) - d + run)
        run = run + s.term(k + j)
    return out


def fresh_deltas(n: int, s: SeriesSpec, blocks: BlockStructure) -> list[QuadValue]:
    """``delta_i`` for ``k_n + m_n <= i < k_{n+1} - 1``."""
    lo = blocks.k(n) + blocks.m(n)
    hi = blocks.k(n + 1) - 1
    return [s.delta(i) for i in range(lo, hi)]


def initial_values(s: SeriesSpec, blocks: BlockStructure) -> list[QuadValue]:
    return [s.delta(i) for i in range(1, blocks.k(1) - 1)]


def _failed(group: str, lhs: list[QuadValue]) -> list[dict]:
    return [
        {"group": group, "line": i + 1, "lhs": encode(v)}
        for i, v in enumerate(lhs)
        if sign(v) <= 0
    ]


def _options(M, n, s, blocks, policy):
    """Admissible successor tuples for ``M``; empty means ``M`` breaks."""
    star = star_lhs(M, n, s, blocks)
    dstar = double_star_lhs(M, n, s, blocks)
    star_ok = all(sign(v) > 0 for v in star)
    dstar_ok = sign(dstar[0]) > 0
    groups = []
    if star_ok:
        groups.append((STAR, tuple(star)))
    if dstar_ok:
        groups.append((DOUBLE_STAR, tuple(dstar)))
    if not groups:
        return [], _failed(STAR, star) + _failed(DOUBLE_STAR, dstar)
    if policy == ALL_SATISFIED:
        rule = "+".join(g for g, _ in groups)
        return [(rule, tuple(v for _, lhs in groups for v in lhs))], []
    if policy == PREFER_STAR:
        return [groups[0]], []
    return groups, []


def _advance(open_values, n, s, blocks, policy):
    """All successor value sets of one step, or a :class:`Break`."""
    per_value = []
    for M in open_values:
        opts, failed = _options(M, n, s, blocks, policy)
        if not opts:
            return Break(n, M, tuple(failed))
        per_value.append([(M, rule, lhs) for rule, lhs in opts])
    prime = prime_lhs(n, s, blocks)
    if any(sign(v) <= 0 for v in prime):
        return Break(n, s.delta(blocks.k(n) - 1), tuple(_failed(PRIME, prime)))
    fresh = fresh_deltas(n, s, blocks)
    successors = []
    for choice in itertools.islice(itertools.product(*per_value), _SEARCH_BRANCH_LIMIT):
        values = [v for _, _, lhs in choice for v in lhs] + prime + fresh
        applied = [{"value": encode(M), "rule": rule} for M, rule, _ in choice]
        successors.append((values, applied, prime, fresh))
    return successors


def star_step(
    state: StarState, s: SeriesSpec, blocks: BlockStructure
) -> Union[StarState, Break]:
    """One literal step of the procedure from ``M^n`` to ``M^{n+1}``."""
    policy = normalize_policy(state.policy)
    if policy == SEARCH:
        policy = PREFER_STAR
    result = _advance(state.open, state.step, s, blocks, policy)
    if isinstance(result, Break):
        return result
    values = result[0][0]
    return StarState(state.step + 1, tuple(values), state.closed, state.policy)


# -- certificates ----------------------------------------------------------


def leader_tail(n: int, s: SeriesSpec, blocks: BlockStructure) -> QuadValue:
    """``sum_{j >= n} a_{k_j}`` in closed form."""
    n_p, P = blocks.first_periodic_block, blocks.blocks_per_period
    head = QuadValue(0)
    start = n
    if n < n_p:
        head = sum((s.term(blocks.k(j)) for j in range(n, n_p)), QuadValue(0))
        start = n_p
    period = sum((s.term(blocks.k(j)) for j in range(start, start + P)), QuadValue(0))
    return head + period / (1 - blocks.ratio)


def tail_closure_check(
    M: QuadValue, step: int, s: SeriesSpec, blocks: BlockStructure
) -> Optional[TailClosureRecord]:
    """Close ``M`` if its (**)-chain stays positive at every later block."""
    slack = M - 2 * leader_tail(step, s, blocks)
    if sign(slack) < 0:
        return None
    return TailClosureRecord(M, step, slack)


def cycle_check(history, blocks: BlockStructure) -> Optional[dict]:
    """Look for a scaled recurrence of the last open state in ``history``.

    ``history`` is a list of :class:`StarState` (``open`` already stripped of
    closed values), ordered by step.  ``blocks`` supplies the alignment of
    block phases with the self-similarity ratio.
    """
    if not history:
        return None
    last = history[-1]
    n2 = last.step
    n_p, P = blocks.first_periodic_block, blocks.blocks_per_period
    if n2 < n_p:
        return None
    target = set(last.open)
    for earlier in reversed(history[:-1]):
        n1 = earlier.step
        if n1 < n_p or (n2 - n1) % P:
            continue
        scale = blocks.ratio ** ((n2 - n1) // P)
        if target <= {scale * v for v in earlier.open}:
            return {"n1": n1, "n2": n2, "scale": scale, "state": earlier.open}
    return None


def _digest(trace) -> str:
    blob = json.dumps(list(trace), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _kind(state, closures) -> str:
    if not closures:
        return "Cycle"
    return "TailClosure" if not state else "Composite"


def _alignment(blocks: BlockStructure) -> dict:
    return blocks.to_json()


def _trace_entry(n, S, closed, applied=None, prime=None, fresh=None) -> dict:
    entry = {
        "step": n,
        "open": _enc_list(sort_values(S)),
        "closed": [c.to_json() for c in closed],
    }
    if applied is not None:
        entry["applied"] = applied
        entry["prime"] = _enc_list(prime)
        entry["fresh"] = _enc_list(fresh)
    return entry


def _diagnostics(history, blocks) -> dict:
    sizes = [len(h.open) for h in history]
    n_p, P = blocks.first_periodic_block, blocks.blocks_per_period
    normalized = []
    for h in history:
        if h.step < n_p or not h.open:
            continue
        c = (h.step - n_p) // P
        scale = blocks.ratio**c
        normalized.append(
            {
                "step": h.step,
                "min": encode(min(h.open) / scale),
                "max": encode(max(h.open) / scale),
            }
        )
    tail = sizes[-(P + 1) :]
    if len(tail) > 1 and tail[-1] > tail[0]:
        trend = "growing"
    elif len(tail) > 1 and tail[-1] < tail[0]:
        trend = "shrinking"
    else:
        trend = "stable"
    return {"open_sizes": sizes, "normalized": normalized[-2 * P :], "open_trend": trend}


def run(
    s: SeriesSpec,
    depth: int = DEFAULT_DEPTH,
    policy: str = ALL_SATISFIED,
    blocks: Optional[BlockStructure] = None,
) -> StarVerdict:
    """Run the procedure until a certificate is found, it breaks, or ``depth``."""
    policy = normalize_policy(policy)
    if not s.is_infinite:
        raise StarPreconditionError("the procedure needs an infinite series")
    if blocks is None:
        try:
            blocks = extract_blocks(s)
        except ValueError as exc:
            raise StarPreconditionError(str(exc)) from exc
    if blocks.k(1) <= 1:
        raise StarPreconditionError("k_1 = 1 (a_1 > r_1) is outside the procedure's scope")

    seen_dead: set = set()
    best: list = []

    def explore(n, S, history, closures, trace):
        closed = [
            rec
            for v in sort_values(S)
            if (rec := tail_closure_check(v, n, s, blocks)) is not None
        ]
        closed_values = {c.value for c in closed}
        O = tuple(v for v in sort_values(S) if v not in closed_values)
        closures = closures + closed
        history = history + [StarState(n, O, (), policy)]
        cyc = cycle_check(history, blocks)
        if cyc is not None:
            trace = trace + [_trace_entry(n, S, closed)]
            cert = Certificate(
                kind=_kind(cyc["state"], closures),
                policy=policy,
                series=s.to_json(),
                alignment=_alignment(blocks),
                n1=cyc["n1"],
                n2=cyc["n2"],
                scale=cyc["scale"],
                state=tuple(cyc["state"]),
                closures=tuple(closures),
                trace_digest=_digest(trace),
            )
            return StarVerdict(CERTIFIED, policy, depth, certificate=cert, trace=tuple(trace))
        if n > depth:
            best.append((history, trace))
            return None
        key = None
        if n >= blocks.first_periodic_block:
            phase = (n - blocks.first_periodic_block) % blocks.blocks_per_period
            c = (n - blocks.first_periodic_block) // blocks.blocks_per_period
            key = (phase, frozenset(v / blocks.ratio**c for v in O))
            if policy == SEARCH and key in seen_dead:
                return None
        result = _advance(O, n, s, blocks, policy)
        if isinstance(result, Break):
            entry = _trace_entry(n, S, closed)
            return StarVerdict(BREAKS, policy, depth, broke=result, trace=tuple(trace + [entry]))
        outcome = None
        for values, applied, prime, fresh in result:
            entry = _trace_entry(n, S, closed, applied, prime, fresh)
            outcome = explore(n + 1, values, history, closures, trace + [entry])
            if outcome is not None and outcome.outcome == CERTIFIED:
                return outcome
        if key is not None:
            seen_dead.add(key)
        return outcome

    verdict = explore(1, initial_values(s, blocks), [], [], [])
    if verdict is not None:
        return verdict
    history, trace = best[0] if best else ([], [])
    return StarVerdict(
        EXHAUSTED,
        policy,
        depth,
        diagnostics=_diagnostics(history, blocks),
        trace=tuple(trace),
    )


def check_certificate(cert: Certificate, s: SeriesSpec) -> tuple[bool, str]:
    """Replay a certificate from scratch; returns ``(accepted, reason)``."""
    try:
        if cert.series != s.to_json():
            return False, "certificate was issued for a different series"
        try:
            policy = normalize_policy(cert.policy)
        except ValueError:
            return False, f"unknown policy {cert.policy!r}"
        blocks = extract_blocks(s)
        if cert.alignment != _alignment(blocks):
            return False, "block alignment does not match the series"
        n_p, P = blocks.first_periodic_block, blocks.blocks_per_period
        n1, n2 = cert.n1, cert.n2
        if not (n_p <= n1 < n2) or (n2 - n1) % P:
            return False, "cycle endpoints are not period-aligned"
        if cert.scale != blocks.ratio ** ((n2 - n1) // P):
            return False, "cycle scale does not match the self-similarity ratio"
        if cert.kind != _kind(cert.state, cert.closures):
            return False, f"certificate kind {cert.kind!r} does not match its contents"

        by_step: dict[int, list[TailClosureRecord]] = {}
        for rec in cert.closures:
            by_step.setdefault(rec.from_step, []).append(rec)
        if any(step < 1 or step > n2 for step in by_step):
            return False, "closure outside the replayed steps"

        S = initial_values(s, blocks)
        trace = []
        O1 = None
        for n in range(1, n2 + 1):
            values = set(S)
            closed = []
            for rec in by_step.get(n, []):
                if rec.value not in values:
                    return False, f"closed value not present at step {n}"
                slack = rec.value - 2 * leader_tail(n, s, blocks)
                if slack != rec.slack or sign(slack) < 0:
                    return False, f"tail-closure slack mismatch at step {n}"
                closed.append(rec)
            # keep the engine's closure order for the digest
            closed.sort(key=cmp_to_key(lambda x, y: sign(x.value - y.value)))
            O = tuple(v for v in sort_values(S) if v not in {c.value for c in closed})
            if n == n1:
                if O != tuple(sort_values(cert.state)):
                    return False, "recorded state differs from the replayed state"
                O1 = O
            if n == n2:
                scaled = {cert.scale * v for v in O1}
                if not set(O) <= scaled:
                    return False, "open state does not recur under the scale"
                trace.append(_trace_entry(n, S, closed))
                break
            result = _advance(O, n, s, blocks, policy)
            if isinstance(result, Break):
                return False, f"procedure breaks at step {n}"
            if len(result) != 1:
                return False, f"ambiguous branch at step {n}"
            values, applied, prime, fresh = result[0]
            trace.append(_trace_entry(n, S, closed, applied, prime, fresh))
            S = values
        if _digest(trace) != cert.trace_digest:
            return False, "trace digest mismatch"
        return True, "accepted"
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        return False, f"malformed certificate: {exc}"


def verify_certificate(cert: Certificate, s: SeriesSpec) -> bool:
    return check_certificate(cert, s)[0]
