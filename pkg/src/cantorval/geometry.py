"""The iterated interval construction and the brute-force subsum oracle.

``I_t`` for a 0/1 address ``t`` is ``[l, l + r_{|t|}]`` where ``l`` is the sum
of the terms selected by ``t``.  Its children ``I_{t0}``, ``I_{t1}`` are
separated by a gap when ``a_{|t|+1} > r_{|t|+1}`` and overlap otherwise.

:func:`level_cover` merges all ``2**N`` intervals of one level exactly, using
integer arrays over a common denominator; :func:`naive_cover` does the same
job one :class:`~cantorval.exactnum.QuadValue` at a time and serves as its
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import lcm
from typing import Optional

import numpy as np

from .exactnum import QuadValue, encode, sign
from .exactnum import floor as exact_floor
from .series import BlockStructure, SeriesSpec, extract_blocks

MAX_DEPTH = 24
_INT64_SAFE = 2**62

FROM_ZERO = "FromZero"
FROM_ONE = "FromOne"
FROM_LEFT = "FromLeftEndpoint"
FROM_RIGHT = "FromRightEndpoint"
NEIGHBOUR = "NeighbourOf"


class DepthError(ValueError):
    """Requested construction depth is outside the supported envelope."""


@dataclass(frozen=True)
class IntervalX:
    lo: QuadValue
    hi: QuadValue

    def __post_init__(self):
        if sign(self.hi - self.lo) < 0:
            raise ValueError("interval endpoints out of order")

    @property
    def length(self) -> QuadValue:
        return self.hi - self.lo

    def contains(self, other: IntervalX) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def to_json(self):
        return {"lo": encode(self.lo), "hi": encode(self.hi)}


@dataclass(frozen=True)
class GapRecord:
    address: str
    order: int
    interval: IntervalX
    provenance: tuple[str, str]

    def to_json(self):
        kind, ref = self.provenance
        out = self.interval.to_json()
        out.update({"order": self.order, "address": self.address, "provenance": kind})
        if ref or kind in (FROM_LEFT, FROM_RIGHT, NEIGHBOUR):
            out["source"] = ref
        return out


@dataclass(frozen=True)
class ChildSplit:
    left: IntervalX
    right: IntervalX
    gap: Optional[GapRecord]
    overlap: Optional[IntervalX]


def _check_address(t: str) -> str:
    if any(c not in "01" for c in t):
        raise ValueError(f"address must be a 0/1 string, got {t!r}")
    if len(t) > MAX_DEPTH + 40:
        raise DepthError(f"address longer than the supported depth: {len(t)}")
    return t


def left_end(s: SeriesSpec, t: str) -> QuadValue:
    return sum((s.term(i + 1) for i, c in enumerate(t) if c == "1"), QuadValue(0))


def interval_at(s: SeriesSpec, t: str) -> IntervalX:
    t = _check_address(t)
    lo = left_end(s, t)
    return IntervalX(lo, lo + s.remainder(len(t)))


def provenance(t: str, blocks: Optional[BlockStructure] = None) -> tuple[str, str]:
    """Where the gap ``G_t`` comes from.

    Block-leading gaps are labelled by their trailing run of equal bits:
    ``G_{u 0...0}`` comes from ``l(I_u)`` and ``G_{u 1...1}`` from ``r(I_u)``.
    Inside a block, ``G_{u b b s}`` with ``|u b| = k_n - 1`` is a neighbour of
    ``G_{u b}``.
    """
    if blocks is not None:
        order = len(t) + 1
        n = blocks.pattern.block_before(order)
        if n >= 1 and order > blocks.k(n) and order < blocks.k(n) + blocks.m(n):
            k = blocks.k(n)
            if len(t) >= k and t[k - 1] == t[k - 2]:
                return NEIGHBOUR, t[: k - 1]
    if not t or set(t) == {"0"}:
        return FROM_ZERO, ""
    if set(t) == {"1"}:
        return FROM_ONE, ""
    last = t[-1]
    stem = t.rstrip(last)
    return (FROM_LEFT if last == "0" else FROM_RIGHT), stem


def _blocks_or_none(s: SeriesSpec) -> Optional[BlockStructure]:
    try:
        return extract_blocks(s)
    except ValueError:
        return None


def child_split(s: SeriesSpec, t: str, blocks: Optional[BlockStructure] = None) -> ChildSplit:
    t = _check_address(t)
    n = len(t)
    parent = interval_at(s, t)
    l0 = parent.lo
    a, r = s.term(n + 1), s.remainder(n + 1)
    left = IntervalX(l0, l0 + r)
    right = IntervalX(l0 + a, parent.hi)
    if sign(a - r) > 0:
        if blocks is None:
            blocks = _blocks_or_none(s)
        gap = GapRecord(t, n + 1, IntervalX(l0 + r, l0 + a), provenance(t, blocks))
        return ChildSplit(left, right, gap, None)
    return ChildSplit(left, right, None, IntervalX(l0 + a, l0 + r))


# -- exact integer encoding ------------------------------------------------


def _radicand(values) -> int:
    ds = {v.d for v in values if v.b != 0}
    if len(ds) > 1:
        raise ValueError("values from different quadratic fields")
    return ds.pop() if ds else 1


def _integer_form(values):
    """Encode values as ``(A_i + B_i sqrt d) / D`` with integers."""
    D = 1
    for v in values:
        D = lcm(D, v.a.denominator, v.b.denominator)
    A = [int(v.a * D) for v in values]
    B = [int(v.b * D) for v in values]
    return A, B, D, _radicand(values)


def _subsums(A, B, F, big: bool):
    """All subsums by doubling: integer parts plus an independent float sum."""
    dt = object if big else np.int64
    sa, sb, sf = np.zeros(1, dtype=dt), np.zeros(1, dtype=dt), np.zeros(1)
    for x, y, f in zip(A, B, F):
        sa = np.concatenate([sa, sa + x])
        sb = np.concatenate([sb, sb + y])
        sf = np.concatenate([sf, sf + f])
    return sa, sb, sf


def _close_float(x: QuadValue) -> float:
    # float(a) + float(b) * sqrt(d) can cancel badly; round the exact value instead
    return float(Fraction(exact_floor(x * 2**80), 2**80))


def _pair_sign(x, y, d: int) -> int:
    return sign(QuadValue(int(x), int(y), d))


def _exact_sort(sa, sb, sf, d: int, eps: float):
    """Sort subsums by exact value, dropping duplicates.

    The float sums give the order; only runs of estimates closer than the
    error bound ``eps`` that hold distinct values are re-sorted exactly.
    """
    if d == 1 and sa.dtype != object:
        sa, idx = np.unique(sa, return_index=True)
        return sa, sb[idx], sf[idx]
    order = np.argsort(sf, kind="stable")
    sa, sb, sf = sa[order], sb[order], sf[order]
    same = (sa[1:] == sa[:-1]) & (sb[1:] == sb[:-1])
    close = np.diff(sf) <= 2 * eps
    if np.any(close & ~same):
        flagged = np.nonzero(close)[0]
        runs = np.split(flagged, np.nonzero(np.diff(flagged) != 1)[0] + 1)
        for run in runs:
            i, j = int(run[0]), int(run[-1]) + 1
            if same[i:j].all():
                continue
            chunk = sorted(
                zip(sa[i : j + 1].tolist(), sb[i : j + 1].tolist(), sf[i : j + 1].tolist()),
                key=cmp_to_key(lambda p, q: _pair_sign(p[0] - q[0], p[1] - q[1], d)),
            )
            sa[i : j + 1] = [c[0] for c in chunk]
            sb[i : j + 1] = [c[1] for c in chunk]
            sf[i : j + 1] = [c[2] for c in chunk]
        same = (sa[1:] == sa[:-1]) & (sb[1:] == sb[:-1])
    keep = np.ones(len(sa), dtype=bool)
    keep[1:] = ~same
    return sa[keep], sb[keep], sf[keep]


def _gap_mask(sa, sb, sf, RA, RB, rf, d: int, eps: float) -> np.ndarray:
    """``True`` where the next subsum starts strictly beyond ``previous + r_N``."""
    est = np.diff(sf) - rf
    out = est > 0
    unsure = np.nonzero(np.abs(est) <= 3 * eps)[0]
    if len(unsure):
        u = np.diff(sa)[unsure] - RA
        v = np.diff(sb)[unsure] - RB
        for pos, x, y in zip(unsure, u.tolist(), v.tolist()):
            out[pos] = (x or y) and _pair_sign(x, y, d) > 0
    return out


@dataclass(frozen=True, eq=False)
class Cover:
    """Sorted, disjoint, maximal intervals of one construction level.

    Endpoints are stored as integer arrays: ``lo = (lo_a + lo_b sqrt d) / D``.
    """

    depth: int
    lo_a: np.ndarray
    lo_b: np.ndarray
    hi_a: np.ndarray
    hi_b: np.ndarray
    D: int
    d: int

    def __len__(self):
        return len(self.lo_a)

    def _value(self, a, b) -> QuadValue:
        return QuadValue(Fraction(int(a), self.D), Fraction(int(b), self.D), self.d)

    @property
    def intervals(self) -> list[IntervalX]:
        return [
            IntervalX(self._value(la, lb), self._value(ha, hb))
            for la, lb, ha, hb in zip(self.lo_a, self.lo_b, self.hi_a, self.hi_b)
        ]

    def __eq__(self, other):
        if isinstance(other, Cover):
            return self.intervals == other.intervals
        if isinstance(other, list):
            return self.intervals == other
        return NotImplemented

    def to_json(self):
        return [iv.to_json() for iv in self.intervals]


def level_cover(s: SeriesSpec, N: int) -> Cover:
    """Exact union of ``I_t`` over all ``t`` of length ``N``."""
    if not 0 <= N <= MAX_DEPTH:
        raise DepthError(f"depth {N} outside 0..{MAX_DEPTH}")
    terms = [s.term(i) for i in range(1, N + 1)]
    rN = s.remainder(N)
    A, B, D, d = _integer_form(terms + [rN])
    RA, RB = A.pop(), B.pop()
    root = isqrt_ceil(d)
    bound = sum(abs(x) + abs(y) * root for x, y in zip(A + [RA], B + [RB]))
    big = bound >= _INT64_SAFE
    F = [_close_float(x) for x in terms]
    # float subsums carry at most one rounding per term and per addition
    eps = 4.0 * (N + 2) * 2.0**-53 * max(_close_float(s.remainder(0)), 1.0)
    sa, sb, sf = _subsums(A, B, F, big)
    sa, sb, sf = _exact_sort(sa, sb, sf, d, eps)
    if len(sa) > 1:
        cut = np.nonzero(_gap_mask(sa, sb, sf, RA, RB, _close_float(rN), d, eps))[0]
    else:
        cut = np.zeros(0, dtype=np.int64)
    starts = np.concatenate([[0], cut + 1]).astype(np.int64)
    ends = np.concatenate([cut, [len(sa) - 1]]).astype(np.int64)
    return Cover(
        depth=N,
        lo_a=sa[starts],
        lo_b=sb[starts],
        hi_a=sa[ends] + RA,
        hi_b=sb[ends] + RB,
        D=D,
        d=d,
    )


def isqrt_ceil(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def naive_cover(s: SeriesSpec, N: int) -> list[IntervalX]:
    """Oracle: build every ``I_t`` separately and merge them one by one."""
    pieces = []
    for bits in range(2**N):
        t = format(bits, f"0{N}b") if N else ""
        pieces.append(interval_at(s, t))
    pieces.sort(key=cmp_to_key(lambda x, y: sign(x.lo - y.lo) or sign(x.hi - y.hi)))
    merged: list[IntervalX] = []
    for iv in pieces:
        if merged and iv.lo <= merged[-1].hi:
            if iv.hi > merged[-1].hi:
                merged[-1] = IntervalX(merged[-1].lo, iv.hi)
        else:
            merged.append(iv)
    return merged


def gap_census(cover) -> list[IntervalX]:
    """Maximal open gaps between consecutive cover intervals."""
    ivs = cover.intervals if isinstance(cover, Cover) else list(cover)
    return [IntervalX(x.hi, y.lo) for x, y in zip(ivs, ivs[1:])]


def measure(cover) -> QuadValue:
    if isinstance(cover, Cover):
        ta = sum(int(x) for x in cover.hi_a) - sum(int(x) for x in cover.lo_a)
        tb = sum(int(x) for x in cover.hi_b) - sum(int(x) for x in cover.lo_b)
        return QuadValue(ta, tb, cover.d) / cover.D
    return sum((iv.length for iv in cover), QuadValue(0))


# -- gap families ----------------------------------------------------------


def gap_at(s: SeriesSpec, t: str, label: tuple[str, str]) -> GapRecord:
    lo = left_end(s, t)
    n = len(t)
    return GapRecord(t, n + 1, IntervalX(lo + s.remainder(n + 1), lo + s.term(n + 1)), label)


def _side_family(s, blocks, n, bit: str):
    k, m = blocks.k(n), blocks.m(n)
    main = bit * (k - 1)
    label = (FROM_ZERO, "") if bit == "0" else (FROM_ONE, "")
    out = [gap_at(s, main, label)]
    if m >= 2:
        out.append(gap_at(s, bit * k, (NEIGHBOUR, main)))
    for length in range(1, m - 1):
        for bits in range(2**length):
            tail = format(bits, f"0{length}b")
            out.append(gap_at(s, bit * k + tail, (NEIGHBOUR, main)))
    return out


def families(s: SeriesSpec, n: int, blocks: Optional[BlockStructure] = None):
    """The gap families ``(L_n, R_n, G_n)``.

    ``G_1 = L_1 + R_1``; ``G_{n+1}`` adds to ``L_{n+1} + R_{n+1}`` the copies
    ``L + max P`` and ``R + min P - r_0`` for every gap ``P`` of the earlier
    families.  Copies are returned with their addresses: translating a gap
    of ``L`` to the right end of ``G_u`` gives the gap at ``u1`` followed by
    zeros, and the ``R`` copy at the left end of ``G_u`` sits at ``u0``
    followed by ones.
    """
    if n < 1:
        raise ValueError("families are indexed from 1")
    if blocks is None:
        blocks = extract_blocks(s)
    r0 = s.remainder(0)
    earlier: dict[str, GapRecord] = {}
    current: list[GapRecord] = []
    Ln = Rn = []
    for i in range(1, n + 1):
        Ln = _side_family(s, blocks, i, "0")
        Rn = _side_family(s, blocks, i, "1")
        fam = {g.address: g for g in Ln + Rn}
        for P in earlier.values():
            u = P.address
            for g in Ln:
                addr = u + "1" + g.address[len(u) + 1 :]
                label = (FROM_LEFT, u + "1") if g.provenance[0] == FROM_ZERO else (
                    NEIGHBOUR, u + "1" + g.provenance[1][len(u) + 1 :]
                )
                moved = gap_at(s, addr, label)
                assert moved.interval == IntervalX(g.interval.lo + P.interval.hi, g.interval.hi + P.interval.hi)
                fam.setdefault(addr, moved)
            for g in Rn:
                addr = u + "0" + g.address[len(u) + 1 :]
                label = (FROM_RIGHT, u + "0") if g.provenance[0] == FROM_ONE else (
                    NEIGHBOUR, u + "0" + g.provenance[1][len(u) + 1 :]
                )
                moved = gap_at(s, addr, label)
                shift = P.interval.lo - r0
                assert moved.interval == IntervalX(g.interval.lo + shift, g.interval.hi + shift)
                fam.setdefault(addr, moved)
        current = sorted(fam.values(), key=cmp_to_key(lambda x, y: sign(x.interval.lo - y.interval.lo)))
        earlier.update(fam)
    return Ln, Rn, current
