"""Exact analysis of achievement sets of positive series.

The package classifies ``E(a_n)`` (interval, finite union, Cantor set or the
mixed regime), runs the star procedure with replayable certificates for the
mixed regime, and provides a brute-force subsum oracle with renderers.
"""

from .exactnum import QuadValue, Rational, sign, to_decimal
from .geometry import families, gap_census, interval_at, level_cover, measure
from .kakeya import classify
from .series import MultiGeometric, Mami, Explicit, extract_blocks, from_json, mami_build
from .starproc import check_certificate, run, verify_certificate

__all__ = [
    "QuadValue",
    "Rational",
    "sign",
    "to_decimal",
    "MultiGeometric",
    "Mami",
    "Explicit",
    "from_json",
    "mami_build",
    "extract_blocks",
    "classify",
    "run",
    "check_certificate",
    "verify_certificate",
    "interval_at",
    "level_cover",
    "gap_census",
    "families",
    "measure",
]
