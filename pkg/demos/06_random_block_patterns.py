#!/usr/bin/env python3
"""Any admissible block pattern can be realised, and the result certifies.

We draw random patterns, build the sequence, check that a_n > r_n happens
exactly on the prescribed indices, and run the star procedure.

Run from the repository root:  python3 demos/06_random_block_patterns.py
"""

import random

from cantorval.exactnum import QuadValue
from cantorval.series import BlockPattern, mami_build
from cantorval.starproc import run, verify_certificate

rng = random.Random(11)


def draw():
    pre_len, per_len = rng.randint(0, 2), rng.randint(1, 3)
    entries, prev_m = [], 1
    for _ in range(pre_len + per_len):
        m = rng.randint(1, 4)
        entries.append((rng.randint(prev_m + 1, 5), m))
        prev_m = m
    pre, per = entries[:pre_len], entries[pre_len:]
    lo = max(per[-1][1] + 1, 1 if pre else 2)
    per[0] = (max(per[0][0], lo), per[0][1])
    return BlockPattern(tuple(pre), tuple(per))


for _ in range(12):
    p = draw()
    s = mami_build(p, QuadValue(1))
    exact = all((s.term(n) > s.remainder(n)) == p.contains(n) for n in range(1, 41))
    res = run(s)
    ok = verify_certificate(res.certificate, s) if res.certificate else False
    K = [n for n in range(1, 25) if p.contains(n)]
    print(f"K starts {K[:8]}  blocks exact={exact}  {res.outcome:<18} {res.certificate.kind:<11} verified={ok}")
