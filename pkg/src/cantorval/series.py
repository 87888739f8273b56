"""Closed-form models of decreasing summable sequences.

Three kinds of sequence are supported:

* :class:`MultiGeometric` -- ``(c_1 q, ..., c_m q, c_1 q^2, ...)``
* :class:`Mami` -- the block-prescribed sequence built from ``(k_n), (m_n)``
  by the five-case recipe (see :func:`mami_build`)
* :class:`Explicit` -- a finite list, used only by the interval geometry

Indices are 1-based throughout: ``term(s, 1)`` is the first term and
``remainder(s, n)`` is the tail sum of the terms after index ``n``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .exactnum import QuadValue, encode, parse, sign

DEFAULT_HORIZON = 64


class SeriesError(ValueError):
    """Invalid series description or unsupported query."""


class BlockExtractionError(SeriesError):
    """The block structure of a series could not be determined."""


def _q(x) -> QuadValue:
    return QuadValue.coerce(x)


# -- block patterns ------------------------------------------------------


@dataclass(frozen=True)
class BlockPattern:
    """Eventually periodic description of the blocks ``K_n``.

    Entry ``n`` is ``(dk, m)`` with ``k_n = k_{n-1} + dk`` and ``k_0 = 0``;
    the period repeats forever after the preperiod.  With the convention
    ``m_0 = 1`` the single rule ``dk_n >= m_{n-1} + 1`` covers both
    ``k_1 >= 2`` and ``k_{n+1} > k_n + m_n``.
    """

    preperiod: tuple[tuple[int, int], ...]
    period: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pre = tuple((int(dk), int(m)) for dk, m in self.preperiod)
        per = tuple((int(dk), int(m)) for dk, m in self.period)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)
        if not per:
            raise SeriesError("block pattern needs a nonempty period")
        prev_m = 1
        for dk, m in pre + per + per[:1]:
            if dk < 1 or m < 1:
                raise SeriesError(f"block entries must be positive, got {(dk, m)}")
            if dk < prev_m + 1:
                raise SeriesError(
                    f"block step {dk} does not clear the previous block of length {prev_m}"
                )
            prev_m = m

    @classmethod
    def affine(cls, k_slope: int, k_offset: int, m: int) -> BlockPattern:
        """Blocks ``k_n = k_slope*n + k_offset`` of constant length ``m``."""
        first = (k_slope + k_offset, m)
        if k_offset == 0:
            return cls((), ((k_slope, m),))
        return cls((first,), ((k_slope, m),))

    @property
    def origin(self) -> int:
        return self.k(1)

    @property
    def index_period(self) -> int:
        return sum(dk for dk, _ in self.period)

    def entry(self, n: int) -> tuple[int, int]:
        if n < 1:
            raise IndexError(n)
        if n <= len(self.preperiod):
            return self.preperiod[n - 1]
        return self.period[(n - len(self.preperiod) - 1) % len(self.period)]

    def k(self, n: int) -> int:
        if n == 0:
            return 0
        p0 = len(self.preperiod)
        if n <= p0:
            return sum(dk for dk, _ in self.preperiod[:n])
        base = sum(dk for dk, _ in self.preperiod)
        c, r = divmod(n - p0 - 1, len(self.period))
        return base + c * self.index_period + sum(dk for dk, _ in self.period[: r + 1])

    def m(self, n: int) -> int:
        if n == 0:
            return 1
        return self.entry(n)[1]

    def block_before(self, i: int) -> int:
        """Largest ``n`` with ``k_n <= i`` (0 if ``i < k_1``)."""
        p0 = len(self.preperiod)
        if p0 and i < self.k(p0 + 1):
            n = 0
            while n < p0 and self.k(n + 1) <= i:
                n += 1
            return n
        n = p0
        start = self.k(p0)
        span = self.index_period
        if i - start > 2 * span:
            c = (i - start) // span - 1
            n += c * len(self.period)
        while self.k(n + 1) <= i:
            n += 1
        return n

    def contains(self, i: int) -> bool:
        """Whether index ``i`` belongs to ``K``."""
        n = self.block_before(i)
        return n >= 1 and i < self.k(n) + self.m(n)

    def blocks(self, upto: int) -> list[tuple[int, int]]:
        """``(k_n, m_n)`` for every block starting at or before index ``upto``."""
        out = []
        n = 1
        while self.k(n) <= upto:
            out.append((self.k(n), self.m(n)))
            n += 1
        return out

    def to_json(self):
        return {
            "preperiod": [list(e) for e in self.preperiod],
            "period": [list(e) for e in self.period],
        }


@dataclass(frozen=True)
class SelfSimilarity:
    """``a_{i+period} = ratio * a_i`` and ``r_{i+period} = ratio * r_i`` for ``i >= start``."""

    start: int
    period: int
    ratio: QuadValue

    def to_json(self):
        return {"start": self.start, "period": self.period, "ratio": encode(self.ratio)}


@dataclass(frozen=True)
class BlockStructure:
    """Blocks ``(k_n, m_n)`` of a series plus their periodic alignment.

    For ``n >= first_periodic_block`` every quantity a star step at block
    ``n + blocks_per_period`` reads equals ``ratio`` times its counterpart at
    block ``n``.
    """

    pattern: BlockPattern
    first_periodic_block: int
    blocks_per_period: int
    index_period: int
    ratio: QuadValue
    signs: tuple[int, ...] = field(default=(), compare=False)

    def k(self, n: int) -> int:
        return self.pattern.k(n)

    def m(self, n: int) -> int:
        return self.pattern.m(n)

    def in_K(self, i: int) -> bool:
        return self.pattern.contains(i)

    def to_json(self):
        return {
            "pattern": self.pattern.to_json(),
            "first_periodic_block": self.first_periodic_block,
            "blocks_per_period": self.blocks_per_period,
            "index_period": self.index_period,
            "ratio": encode(self.ratio),
        }


# -- series kinds --------------------------------------------------------


class SeriesSpec:
    """Common interface; see the concrete subclasses."""

    kind = "abstract"

    def term(self, n: int) -> QuadValue:
        raise NotImplementedError

    def remainder(self, n: int) -> QuadValue:
        raise NotImplementedError

    def delta(self, n: int) -> QuadValue:
        return self.remainder(n) - self.term(n)

    def self_similarity(self) -> Optional[SelfSimilarity]:
        return None

    @property
    def is_infinite(self) -> bool:
        return True

    def scaled(self, c) -> SeriesSpec:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class MultiGeometric(SeriesSpec):
    coeffs: tuple[QuadValue, ...]
    q: QuadValue
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    kind = "multigeometric"

    def __post_init__(self):
        coeffs = tuple(_q(c) for c in self.coeffs)
        q = _q(self.q)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "q", q)
        if not coeffs:
            raise SeriesError("multigeometric series needs at least one coefficient")
        if any(sign(c) <= 0 for c in coeffs):
            raise SeriesError("coefficients must be positive")
        if any(sign(x - y) <= 0 for x, y in zip(coeffs, coeffs[1:])):
            raise SeriesError(
                "coefficients must be strictly decreasing; sequences with repeated "
                "terms are not supported"
            )
        if not (sign(q) > 0 and sign(1 - q) > 0):
            raise SeriesError("ratio q must lie in (0, 1)")
        if sign(coeffs[-1] * q - coeffs[0] * q * q) <= 0:
            raise SeriesError("sequence is not strictly decreasing across periods")

    @property
    def total(self) -> QuadValue:
        return sum(self.coeffs, QuadValue(0))

    def _qpow(self, j: int) -> QuadValue:
        key = ("q", j)
        if key not in self._cache:
            self._cache[key] = self.q**j
        return self._cache[key]

    def term(self, n: int) -> QuadValue:
        if n < 1:
            raise SeriesError(f"term index must be >= 1, got {n}")
        j, l = divmod(n - 1, len(self.coeffs))
        return self.coeffs[l] * self._qpow(j + 1)

    def remainder(self, n: int) -> QuadValue:
        if n < 0:
            raise SeriesError(f"remainder index must be >= 0, got {n}")
        key = ("r", n)
        if key not in self._cache:
            j, i = divmod(n, len(self.coeffs))
            tail = sum(self.coeffs[i:], QuadValue(0))
            head = self.total * self.q / (1 - self.q)
            self._cache[key] = self._qpow(j + 1) * (tail + head)
        return self._cache[key]

    def self_similarity(self) -> SelfSimilarity:
        return SelfSimilarity(1, len(self.coeffs), self.q)

    def scaled(self, c) -> MultiGeometric:
        return MultiGeometric(tuple(x * c for x in self.coeffs), self.q)

    def to_json(self) -> dict:
        return {
            "type": "multigeometric",
            "coeffs": [encode(c) for c in self.coeffs],
            "q": encode(self.q),
        }


_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class Mami(SeriesSpec):
    blocks: BlockPattern
    a1: QuadValue
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    kind = "mami"

    def __post_init__(self):
        object.__setattr__(self, "a1", _q(self.a1))
        if sign(self.a1) <= 0:
            raise SeriesError("a1 must be positive")
        if not isinstance(self.blocks, BlockPattern):
            raise SeriesError("blocks must be a BlockPattern")
        sim = self.self_similarity()
        j0 = sim.start + 1
        for j in range(j0, j0 + 2 * sim.period):
            if self.factor(j) != self.factor(j + sim.period):
                raise SeriesError(f"recipe factors are not periodic at index {j}")

    def factor(self, i: int) -> Fraction:
        """The ratio ``a_i / a_{i-1}`` prescribed by the five-case recipe."""
        if i < 2:
            raise SeriesError("recipe factors start at index 2")
        K = self.blocks.contains
        prev, cur, nxt = K(i - 1), K(i), K(i + 1)
        n = self.blocks.block_before(i + 1)  # block that would start at i+1
        starts_next = nxt and not cur and self.blocks.k(n) == i + 1
        starts_here = cur and not prev
        cases = []
        if (not prev and not cur and not nxt) or (prev and cur):
            cases.append(_HALF)
        if starts_next:
            mn = self.blocks.m(n)
            prev_end = self.blocks.k(n - 1) + self.blocks.m(n - 1)
            if i > prev_end:
                cases.append(Fraction(2**mn + 1, 2 ** (mn + 1)))
            if i == prev_end:
                cases.append(Fraction(2**mn + 1, 2 ** (mn + 2)))
        if starts_here:
            mn = self.blocks.m(self.blocks.block_before(i))
            cases.append(Fraction(2**mn, 2**mn + 1))
        if not cur and not nxt and prev:
            cases.append(_QUARTER)
        if len(cases) != 1:
            raise SeriesError(f"recipe case at index {i} is not unique: {len(cases)} cases apply")
        return cases[0]

    def self_similarity(self) -> SelfSimilarity:
        key = "sim"
        if key not in self._cache:
            p0 = len(self.blocks.preperiod)
            start = self.blocks.k(p0 + 1)
            L = self.blocks.index_period
            rho = Fraction(1)
            for j in range(start + 1, start + L + 1):
                rho *= self.factor(j)
            self._cache[key] = SelfSimilarity(start, L, QuadValue(rho))
        return self._cache[key]

    def _raw_term(self, n: int) -> QuadValue:
        terms = self._cache.setdefault("terms", [self.a1])
        while len(terms) < n:
            i = len(terms) + 1
            terms.append(terms[-1] * self.factor(i))
        return terms[n - 1]

    def term(self, n: int) -> QuadValue:
        if n < 1:
            raise SeriesError(f"term index must be >= 1, got {n}")
        sim = self.self_similarity()
        limit = sim.start + sim.period
        if n <= limit:
            return self._raw_term(n)
        c = (n - sim.start - 1) // sim.period
        return sim.ratio**c * self._raw_term(n - c * sim.period)

    def remainder(self, n: int) -> QuadValue:
        if n < 0:
            raise SeriesError(f"remainder index must be >= 0, got {n}")
        key = ("r", n)
        if key in self._cache:
            return self._cache[key]
        sim = self.self_similarity()
        if n >= sim.start:
            window = sum((self.term(i) for i in range(n + 1, n + sim.period + 1)), QuadValue(0))
            value = window / (1 - sim.ratio)
        else:
            head = sum((self.term(i) for i in range(n + 1, sim.start + 1)), QuadValue(0))
            value = head + self.remainder(sim.start)
        self._cache[key] = value
        return value

    def scaled(self, c) -> Mami:
        return Mami(self.blocks, self.a1 * c)

    def to_json(self) -> dict:
        out = {"type": "mami"}
        out.update(self.blocks.to_json())
        out["a1"] = encode(self.a1)
        return out


@dataclass(frozen=True)
class Explicit(SeriesSpec):
    terms: tuple[QuadValue, ...]

    kind = "explicit"

    def __post_init__(self):
        terms = tuple(_q(t) for t in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise SeriesError("explicit series needs at least one term")
        if any(sign(t) <= 0 for t in terms):
            raise SeriesError("terms must be positive")
        if any(sign(x - y) <= 0 for x, y in zip(terms, terms[1:])):
            raise SeriesError("terms must be strictly decreasing")

    @property
    def is_infinite(self) -> bool:
        return False

    def term(self, n: int) -> QuadValue:
        if not 1 <= n <= len(self.terms):
            raise SeriesError(f"term index {n} outside 1..{len(self.terms)}")
        return self.terms[n - 1]

    def remainder(self, n: int) -> QuadValue:
        if not 0 <= n <= len(self.terms):
            raise SeriesError(f"remainder index {n} outside 0..{len(self.terms)}")
        return sum(self.terms[n:], QuadValue(0))

    def scaled(self, c) -> Explicit:
        return Explicit(tuple(t * c for t in self.terms))

    def to_json(self) -> dict:
        return {"type": "explicit", "terms": [encode(t) for t in self.terms]}


# -- module-level operations ---------------------------------------------


def term(s: SeriesSpec, n: int) -> QuadValue:
    return s.term(n)


def remainder(s: SeriesSpec, n: int) -> QuadValue:
    return s.remainder(n)


def delta(s: SeriesSpec, n: int) -> QuadValue:
    return s.delta(n)


def self_similarity(s: SeriesSpec) -> Optional[SelfSimilarity]:
    return s.self_similarity()


def mami_build(blocks: BlockPattern, a1, horizon: int = 40) -> Mami:
    """Build the sequence whose big terms sit exactly on the prescribed blocks.

    Every index is checked to fall under exactly one recipe case, and
    ``a_n > r_n`` is confirmed to coincide with ``n in K`` up to ``horizon``.
    """
    s = Mami(blocks, a1)
    for n in range(1, horizon + 1):
        big = sign(s.delta(n)) < 0
        if big != blocks.contains(n):
            raise SeriesError(f"built sequence disagrees with the block pattern at index {n}")
        if n > 1 and sign(s.term(n - 1) - s.term(n)) <= 0:
            raise SeriesError(f"built sequence is not decreasing at index {n}")
    return s


def delta_signs(s: SeriesSpec, upto: int) -> list[int]:
    """Signs of ``r_i - a_i`` for ``i = 1..upto``."""
    return [sign(s.delta(i)) for i in range(1, upto + 1)]


def periodic_signs(s: SeriesSpec, horizon: int = DEFAULT_HORIZON):
    """Sign prefix and one period of the sign pattern of ``r_i - a_i``.

    Returns ``(signs, sim)`` where ``signs`` covers indices
    ``1..sim.start + sim.period``; beyond that the pattern repeats with period
    ``sim.period`` (scaling by a positive ratio keeps signs).
    """
    if not s.is_infinite:
        raise BlockExtractionError("finite series have no block structure")
    sim = s.self_similarity()
    if sim is None:
        raise BlockExtractionError("series has no exact self-similarity")
    if sim.start + sim.period > horizon:
        raise BlockExtractionError(
            f"sign pattern does not become periodic within horizon {horizon}"
        )
    return delta_signs(s, sim.start + sim.period), sim


def extract_blocks(s: SeriesSpec, horizon: int = DEFAULT_HORIZON) -> BlockStructure:
    """Maximal runs of indices with ``a_i > r_i``, continued periodically."""
    signs, sim = periodic_signs(s, horizon)
    window = signs[sim.start - 1 :]
    if all(x < 0 for x in window):
        raise BlockExtractionError("a_n > r_n for almost all n: Cantor set regime")
    if all(x >= 0 for x in window):
        raise BlockExtractionError("a_n <= r_n for almost all n: finite union regime")
    if not any(x > 0 for x in window):
        raise BlockExtractionError("a_n < r_n holds only finitely often")
    if signs[0] <= 0:
        raise BlockExtractionError("a_1 >= r_1 (k_1 = 1) is not supported")

    L = sim.period

    def big(i: int) -> bool:
        if i <= len(signs):
            return signs[i - 1] < 0
        return signs[sim.start - 1 + (i - sim.start) % L] < 0

    s0 = next(i for i in range(sim.start, sim.start + L) if not big(i))

    def runs(lo: int, hi: int) -> list[tuple[int, int]]:
        out = []
        i = lo
        while i <= hi:
            if big(i):
                j = i
                while big(j):
                    j += 1
                out.append((i, j - i))
                i = j
            else:
                i += 1
        return out

    prefix = runs(1, s0)
    window_blocks = runs(s0 + 1, s0 + L)
    nxt = runs(s0 + L + 1, s0 + 2 * L)
    # the first periodic block keeps its own step; the period starts after it
    seq = prefix + window_blocks + nxt[:1]
    entries = []
    prev_k = 0
    for k, m in seq:
        entries.append((k - prev_k, m))
        prev_k = k
    pre = entries[: len(prefix) + 1]
    per = entries[len(prefix) + 1 :]
    pattern = BlockPattern(tuple(pre), tuple(per))
    return BlockStructure(
        pattern=pattern,
        first_periodic_block=len(prefix) + 1,
        blocks_per_period=len(window_blocks),
        index_period=L,
        ratio=sim.ratio,
        signs=tuple(signs),
    )


# -- JSON ----------------------------------------------------------------

_AFFINE = re.compile(r"^([+-]?\d*)\*?n([+-]\d+)?$")
_CONST = re.compile(r"^[+-]?\d+$")


def parse_affine(text) -> tuple[int, int]:
    """Parse ``"c*n+d"``, ``"n"``, ``"3n-1"`` or a constant into ``(c, d)``."""
    if isinstance(text, int) and not isinstance(text, bool):
        return 0, text
    if not isinstance(text, str):
        raise SeriesError(f"not an affine expression: {text!r}")
    t = text.replace(" ", "")
    if _CONST.match(t):
        return 0, int(t)
    m = _AFFINE.match(t)
    if not m:
        raise SeriesError(f"not an affine expression in n: {text!r}")
    raw = m.group(1)
    slope = int(raw + "1") if raw in ("", "+", "-") else int(raw)
    return slope, int(m.group(2) or 0)


def _pairs(obj, name) -> tuple[tuple[int, int], ...]:
    if not isinstance(obj, list):
        raise SeriesError(f"{name} must be a list of [dk, m] pairs")
    out = []
    for e in obj:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise SeriesError(f"{name} entries must be [dk, m] integer pairs, got {e!r}")
        out.append((e[0], e[1]))
    return tuple(out)


def block_pattern_from_json(obj: dict) -> BlockPattern:
    if "k" in obj or "m" in obj:
        ks, kd = parse_affine(obj.get("k", ""))
        ms, md = parse_affine(obj.get("m", "1"))
        if ks < 1:
            raise SeriesError("k must grow with n, e.g. '2*n'")
        if ms != 0:
            raise SeriesError("m must be constant here; use preperiod/period lists instead")
        return BlockPattern.affine(ks, kd, md)
    return BlockPattern(
        _pairs(obj.get("preperiod", []), "preperiod"), _pairs(obj.get("period"), "period")
    )


def _values(obj, name) -> tuple[QuadValue, ...]:
    if not isinstance(obj, list) or not obj:
        raise SeriesError(f"{name} must be a nonempty list")
    try:
        return tuple(parse(x) for x in obj)
    except ValueError as exc:
        raise SeriesError(f"bad value in {name}: {exc}") from exc


def from_json(obj) -> SeriesSpec:
    """Decode a series description (see README for the accepted forms)."""
    if not isinstance(obj, dict):
        raise SeriesError("series spec must be a JSON object")
    kind = obj.get("type")
    try:
        if kind == "multigeometric":
            return MultiGeometric(_values(obj.get("coeffs"), "coeffs"), parse(obj.get("q")))
        if kind == "mami":
            return mami_build(block_pattern_from_json(obj), parse(obj.get("a1", "1")))
        if kind == "explicit":
            return Explicit(_values(obj.get("terms"), "terms"))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, SeriesError):
            raise
        raise SeriesError(str(exc)) from exc
    raise SeriesError(f"unknown series type {kind!r}")


def geometric(ratio) -> MultiGeometric:
    """The sequence ``ratio, ratio**2, ...``."""
    return MultiGeometric((QuadValue(1),), _q(ratio))


def first_terms(s: SeriesSpec, n: int) -> list[QuadValue]:
    return [s.term(i) for i in range(1, n + 1)]


def partial_sum(values: Iterable[QuadValue]) -> QuadValue:
    return sum(values, QuadValue(0))
