"""Acceptance criteria, one test each.

Every test carries a ``criterion`` marker; the pass/fail line for each is
printed in the pytest summary.  Timing limits are wall-clock and measured
around the work named by the criterion.
"""

import dataclasses
import hashlib
import json
import os
import random
import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

from cantorval.exactnum import QuadValue as Q, encode, sign
from cantorval.geometry import gap_census, level_cover, measure, naive_cover
from cantorval.kakeya import CANTOR_SET, INTERVAL, classify
from cantorval.render import RenderSpec, emit_csv, render_levels
from cantorval.series import BlockPattern, extract_blocks, first_terms, geometric, mami_build, term
from cantorval.starproc import CERTIFIED, Certificate, check_certificate, run, verify_certificate
from cantorval.sweep import sweep
from conftest import CERTIFIED as CERTIFIED_SERIES, ORACLE_SERIES, Q57, SQRT2, gn, mg432, root2
from oracles import identity_failures, identity_pairs

FAMILY = {"type": "multigeometric", "coeffs": ["4", "3", "2"]}
SWEEP_QS = [Q(F(1, 5)), Q(F(2, 11)), Q(F(17, 100)), Q(F(1, 6)), Q57, Q(F(1, 8))]


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


# -- 1 ---------------------------------------------------------------------


@pytest.mark.criterion(1, "E(3,2;1/4) certified; Mami (2n, 1, 3/4) terms exact; < 1 s")
def test_criterion_1():
    with Stopwatch() as sw:
        s = gn()
        res = run(s)
        built = mami_build(BlockPattern.affine(2, 0, 1), Q(F(3, 4)))
        terms = first_terms(built, 41)
    assert res.outcome == CERTIFIED
    assert verify_certificate(res.certificate, s)
    for n in range(1, 21):
        assert terms[2 * n - 1] == F(1, 2) * F(4) ** (1 - n)
        assert terms[2 * n] == F(3, 4) * F(4) ** (-n)
    assert sw.seconds < 1.0


# -- 2 ---------------------------------------------------------------------


@pytest.mark.criterion(2, "E(4,3,2;1/8) certified by a cycle; Mami (3n, 1, 1/2) terms exact; < 1 s")
def test_criterion_2():
    with Stopwatch() as sw:
        s = mg432(F(1, 8))
        res = run(s)
        built = mami_build(BlockPattern.affine(3, 0, 1), Q(F(1, 2)))
    assert res.outcome == CERTIFIED
    assert res.certificate.kind == "Cycle"
    assert verify_certificate(res.certificate, s)
    assert [term(built, n) for n in (2, 3, 4)] == [F(3, 8), F(1, 4), F(1, 16)]
    assert sw.seconds < 1.0


# -- 3 ---------------------------------------------------------------------


@pytest.mark.criterion(3, "E(4,3,2;q) sweep thresholds, closures, the cubic identity; < 10 s")
def test_criterion_3():
    with Stopwatch() as sw:
        rows = sweep(FAMILY, SWEEP_QS)
    assert sw.seconds < 10.0
    by_q = {r.q: r for r in rows}
    assert by_q[F(1, 5)].cls == INTERVAL
    assert by_q[F(2, 11)].cls == INTERVAL
    for q in (F(17, 100), F(1, 6), Q57, F(1, 8)):
        assert by_q[q].outcome == CERTIFIED, q

    for q in (F(17, 100), F(1, 6)):
        cert = run(mg432(q)).certificate
        assert cert.closures, q
        assert verify_certificate(cert, mg432(q))
    sixth = run(mg432(F(1, 6))).certificate
    assert any(c.slack == 0 for c in sixth.closures)
    assert all(c.slack > 0 for c in run(mg432(F(17, 100))).certificate.closures)

    q = Q57
    cert = run(mg432(q)).certificate
    assert cert.kind == "Cycle"
    assert -8 * q**3 + 3 * q**2 + 6 * q - 1 == 0


# -- 4 ---------------------------------------------------------------------


@pytest.mark.criterion(4, "quadratic-field example: blocks 2n/1, exact signs, certified; < 1 s")
def test_criterion_4():
    with Stopwatch() as sw:
        s = root2()
        b = extract_blocks(s)
        res = run(s, blocks=b)
    assert [(b.k(n), b.m(n)) for n in range(1, 21)] == [(2 * n, 1) for n in range(1, 21)]
    assert sign(7 - 5 * SQRT2) == -1
    assert sign(2 - SQRT2) == 1
    q = (2 - SQRT2) / 2
    assert s.delta(2) == (7 - 5 * SQRT2) * q
    assert s.delta(1) == (2 - SQRT2) * q
    assert res.outcome == CERTIFIED
    assert verify_certificate(res.certificate, s)
    assert sw.seconds < 1.0


# -- 5 ---------------------------------------------------------------------


@pytest.mark.criterion(5, "Kakeya baselines: halves give [0,1], thirds give 2^N - 1 gaps and (2/3)^N/2")
def test_criterion_5():
    halves, thirds = geometric(F(1, 2)), geometric(F(1, 3))
    assert classify(halves).cls == INTERVAL
    assert level_cover(halves, 10).intervals == [level_cover(halves, 0).intervals[0]]
    assert level_cover(halves, 10).to_json() == [{"lo": "0", "hi": "1"}]
    assert classify(thirds).cls == CANTOR_SET
    for N in range(0, 13):
        c = level_cover(thirds, N)
        assert len(gap_census(c)) == 2**N - 1
        assert measure(c) == F(2, 3) ** N / 2


# -- 6 ---------------------------------------------------------------------


@pytest.mark.criterion(6, "covers equal the naive merge for N <= 14; endpoint identities on 10^3 addresses")
def test_criterion_6():
    for name in sorted(ORACLE_SERIES):
        s = ORACLE_SERIES[name]()
        for N in range(0, 15):
            assert level_cover(s, N).intervals == naive_cover(s, N), (name, N)
        b = extract_blocks(s)
        rng = random.Random(f"identities-{name}")
        for t, j in identity_pairs(b, rng, 1000):
            assert identity_failures(s, b, t, j, rng.randint(1, 6)) == [], (name, t, j)


# -- 7 ---------------------------------------------------------------------


def genuine_certificates():
    out = {}
    for name in sorted(CERTIFIED_SERIES):
        s = CERTIFIED_SERIES[name]()
        out[name] = (run(s).certificate, s)
    return out


def mutations(genuine, count=100, seed=7):
    """Seeded list of ``(label, certificate, series)`` that must all fail."""
    rng = random.Random(seed)
    names = sorted(genuine)
    with_closures = [n for n in names if genuine[n][0].closures]
    out = []
    while len(out) < count:
        kind = ("slack", "period", "series")[len(out) % 3]
        if kind == "slack":
            name = rng.choice(with_closures)
            cert, s = genuine[name]
            i = rng.randrange(len(cert.closures))
            bump = F(rng.choice([-1, 1]) * rng.randint(1, 1000), 10 ** rng.randint(1, 12))
            recs = list(cert.closures)
            recs[i] = dataclasses.replace(recs[i], slack=recs[i].slack + bump)
            out.append((f"{name}: slack {bump}", dataclasses.replace(cert, closures=tuple(recs)), s))
        elif kind == "period":
            name = rng.choice(names)
            cert, s = genuine[name]
            shift = rng.choice([-1, 1, 2, 3])
            if cert.n2 + shift <= cert.n1:
                shift = 1
            how = rng.randrange(3)
            if how == 0:
                bad = dataclasses.replace(cert, n2=cert.n2 + shift)
            elif how == 1:
                bad = dataclasses.replace(cert, n1=cert.n1 + abs(shift), n2=cert.n2 + abs(shift) + 1)
            else:
                bad = dataclasses.replace(cert, scale=cert.scale * cert.scale)
            out.append((f"{name}: period {how}/{shift}", bad, s))
        else:
            name = rng.choice(names)
            cert, s = genuine[name]
            other = s
            while other == s:
                other = mg432(F(rng.randint(1001, 1999), 10000))
            if rng.random() < 0.5:
                cert = dataclasses.replace(cert, series=other.to_json())
            out.append((f"{name}: series {other.to_json()['q']}", cert, other))
    return out


@pytest.mark.criterion(7, "100 mutated certificates rejected; genuine ones from criteria 1-4 accepted")
def test_criterion_7():
    genuine = genuine_certificates()
    for name, (cert, s) in genuine.items():
        assert verify_certificate(cert, s), name
        assert verify_certificate(Certificate.from_json(json.loads(json.dumps(cert.to_json()))), s)
    muts = mutations(genuine)
    assert len(muts) == 100
    accepted = [label for label, cert, s in muts if verify_certificate(cert, s)]
    assert accepted == []


# -- 8 ---------------------------------------------------------------------


def random_pattern(rng):
    """A valid pattern with steps k_{n+1} - k_n and lengths m_n at most 5."""
    pre_len, per_len = rng.randint(0, 2), rng.randint(1, 3)
    entries, prev_m = [], 1
    for _ in range(pre_len + per_len):
        m = rng.randint(1, 4)
        entries.append((rng.randint(prev_m + 1, 5), m))
        prev_m = m
    pre, per = entries[:pre_len], entries[pre_len:]
    lo = max(per[-1][1] + 1, 2 if not pre else 1)
    if per[0][0] < lo:
        per[0] = (lo, per[0][1])
    return BlockPattern(tuple(pre), tuple(per))


def random_patterns(count=50, seed=2024):
    rng = random.Random(seed)
    return [random_pattern(rng) for _ in range(count)]


@pytest.mark.criterion(8, "50 random block patterns: a_n > r_n exactly on K, every run certified")
def test_criterion_8():
    for pattern in random_patterns():
        s = mami_build(pattern, Q(1), horizon=40)
        for n in range(1, 41):
            assert (s.term(n) > s.remainder(n)) == pattern.contains(n), (pattern, n)
        res = run(s)
        assert res.outcome == CERTIFIED, pattern.to_json()
        ok, reason = check_certificate(res.certificate, s)
        assert ok, reason


# -- 9 ---------------------------------------------------------------------


def artifacts() -> dict:
    """Every JSON and SVG output produced by criteria 1-8, as bytes."""

    def js(obj):
        return json.dumps(obj, sort_keys=True, indent=2).encode()

    out = {}
    for name in sorted(CERTIFIED_SERIES):
        s = CERTIFIED_SERIES[name]()
        out[f"verdict-{name}"] = js(run(s).to_json())
        out[f"class-{name}"] = js(classify(s).to_json())
    rows = sweep(FAMILY, SWEEP_QS)
    out["sweep.json"] = js([r.to_json() for r in rows])
    out["sweep.csv"] = emit_csv(rows)
    out["mami-gn"] = js([encode(t) for t in first_terms(mami_build(BlockPattern.affine(2, 0, 1), Q(F(3, 4))), 40)])
    out["blocks-root2"] = js(extract_blocks(root2()).to_json())
    out["census-thirds"] = js([g.to_json() for g in gap_census(level_cover(geometric(F(1, 3)), 8))])
    for name in sorted(ORACLE_SERIES):
        out[f"cover-{name}"] = js(level_cover(ORACLE_SERIES[name](), 10).to_json())
    muts = mutations(genuine_certificates())
    out["mutations"] = js([[label, verify_certificate(c, s)] for label, c, s in muts])
    out["patterns"] = js([[p.to_json(), run(mami_build(p, Q(1), horizon=40)).to_json()] for p in random_patterns()])
    out["gn.svg"] = render_levels(gn(), RenderSpec(6))
    out["gn-families.svg"] = render_levels(gn(), RenderSpec(6, highlight="families", family=2))
    out["q57-census.svg"] = render_levels(mg432(Q57), RenderSpec(8, highlight="census"))
    return out


def digest() -> dict:
    return {k: hashlib.sha256(v).hexdigest() for k, v in sorted(artifacts().items())}


@pytest.mark.criterion(9, "repeated runs give byte-identical JSON and SVG")
def test_criterion_9():
    first = artifacts()
    second = artifacts()
    assert first == second
    # a fresh interpreter with a different hash seed
    here = Path(__file__).parent
    code = "import json, sys; sys.path.insert(0, sys.argv[1]); import test_acceptance as t; print(json.dumps(t.digest()))"
    env = {**os.environ, "PYTHONHASHSEED": "12345"}
    proc = subprocess.run([sys.executable, "-c", code, str(here)], capture_output=True, text=True, env=env, check=True)
    fresh = json.loads(proc.stdout)
    assert fresh == {k: hashlib.sha256(v).hexdigest() for k, v in sorted(first.items())}
