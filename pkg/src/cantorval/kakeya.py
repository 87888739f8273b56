"""Kakeya's classification from the sign pattern of ``r_n - a_n``."""

from __future__ import annotations

from dataclasses import dataclass, field

from .series import DEFAULT_HORIZON, SeriesError, SeriesSpec, periodic_signs

INTERVAL = "Interval"
FINITE_UNION = "FiniteUnionOfIntervals"
CANTOR_SET = "CantorSet"
MIXED = "Mixed"

_GLYPH = {1: "+", 0: "0", -1: "-"}


@dataclass(frozen=True)
class KakeyaVerdict:
    cls: str
    witness: dict = field(default_factory=dict)

    def to_json(self):
        return {"class": self.cls, "witness": self.witness}


def classify(s: SeriesSpec, horizon: int = DEFAULT_HORIZON) -> KakeyaVerdict:
    """Interval / finite union / Cantor set, or ``Mixed`` when neither
    ``a_n <= r_n`` nor ``a_n > r_n`` holds for almost all ``n``.

    ``a_n = r_n`` counts on the interval side.  "Almost all" is read off the
    exact periodic continuation of the sign pattern, never from a sample.
    """
    if not s.is_infinite:
        raise SeriesError("classification needs an infinite series")
    signs, sim = periodic_signs(s, horizon)
    prefix = signs[: sim.start - 1]
    window = signs[sim.start - 1 :]
    witness = {
        "start": sim.start,
        "period": sim.period,
        "prefix": "".join(_GLYPH[x] for x in prefix),
        "pattern": "".join(_GLYPH[x] for x in window),
    }
    if all(x >= 0 for x in signs):
        return KakeyaVerdict(INTERVAL, witness)
    if all(x >= 0 for x in window):
        witness["exceptions"] = [i + 1 for i, x in enumerate(prefix) if x < 0]
        return KakeyaVerdict(FINITE_UNION, witness)
    if all(x < 0 for x in window):
        witness["exceptions"] = [i + 1 for i, x in enumerate(prefix) if x >= 0]
        return KakeyaVerdict(CANTOR_SET, witness)
    return KakeyaVerdict(MIXED, witness)
