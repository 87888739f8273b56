#!/usr/bin/env python3
"""The classic Cantorval E(3,2;1/4), from its terms to a checked certificate.

Run from the repository root:  python3 demos/02_guthrie_nymann.py
"""

import json
from fractions import Fraction

from cantorval.exactnum import QuadValue
from cantorval.kakeya import classify
from cantorval.series import BlockPattern, MultiGeometric, extract_blocks, first_terms, mami_build
from cantorval.starproc import run, verify_certificate

s = MultiGeometric((QuadValue(3), QuadValue(2)), QuadValue(Fraction(1, 4)))
print("terms:", [str(t) for t in first_terms(s, 8)])
print("delta_1 .. delta_6:", [str(s.delta(n)) for n in range(1, 7)])

# mixed regime: every even index has a_n > r_n, so the blocks are k_n = 2n, m_n = 1
verdict = classify(s)
blocks = extract_blocks(s)
print("class:", verdict.cls, " blocks:", [(blocks.k(n), blocks.m(n)) for n in range(1, 5)])

# the same sequence comes out of the block-pattern builder with a_1 = 3/4
built = mami_build(BlockPattern.affine(2, 0, 1), QuadValue(Fraction(3, 4)))
assert first_terms(built, 30) == first_terms(s, 30)
print("builder reproduces the terms: yes")

res = run(s)
print("\nstar procedure:", res.outcome, "after", res.steps, "steps")
for entry in res.trace:
    print("  step", entry["step"], "open values", entry["open"])

cert = res.certificate
print("\ncertificate:")
print(json.dumps(cert.to_json()["cycle"], indent=2))
print("replay accepts it:", verify_certificate(cert, s))
