"""Structured check results and their JSON form.

Serialized CheckReport (stable field names)::

    {
      "check_id": str,
      "params": {name: value},
      "verdict": "PASS" | "FAIL" | "INCONCLUSIVE",
      "margin": {"num": str, "den": str}
              | {"lo": str, "hi": str, "precision": int, "lo_approx": str, "hi_approx": str}
              | null,
      "witnesses": [{name: value}],
      "elapsed_ms": int | null,
      "constants_used": {name: value},
      "details": {name: value}
    }

Rationals appear as "p/q" strings (or plain integers); dyadic endpoints as
"m*2^e" strings, which are exact.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Union

from ..exact_arith import (
    Dyadic,
    DyadicInterval,
    Verdict,
    as_interval,
    certified_compare,
    format_rational,
    to_scientific,
)

Margin = Union[Fraction, DyadicInterval, None]


class CheckVerdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


def combine(verdicts) -> CheckVerdict:
    verdicts = list(verdicts)
    if any(v is CheckVerdict.FAIL for v in verdicts):
        return CheckVerdict.FAIL
    if any(v is CheckVerdict.INCONCLUSIVE for v in verdicts):
        return CheckVerdict.INCONCLUSIVE
    return CheckVerdict.PASS


def certify_le(
    build: Callable[[int], tuple],
    precision: int,
    max_precision: int,
    strict: bool = False,
) -> tuple[CheckVerdict, DyadicInterval, int]:
    """Decide lhs <= rhs (lhs < rhs when ``strict``) with doubling precision.

    ``build(p)`` returns ``(lhs, rhs)`` as rationals or intervals computed at
    precision ``p``.  Returns the verdict, the enclosure of ``rhs - lhs`` and
    the precision at which the decision was made.
    """
    p = precision
    while True:
        lhs, rhs = build(p)
        lhs, rhs = as_interval(lhs, p), as_interval(rhs, p)
        if strict:
            v = certified_compare(lhs, rhs)
            verdict = {Verdict.LESS: CheckVerdict.PASS, Verdict.NOT_LESS: CheckVerdict.FAIL}.get(v)
        else:
            v = certified_compare(rhs, lhs)
            verdict = {Verdict.NOT_LESS: CheckVerdict.PASS, Verdict.LESS: CheckVerdict.FAIL}.get(v)
        if verdict is not None or p >= max_precision:
            return verdict or CheckVerdict.INCONCLUSIVE, rhs - lhs, p
        p = min(2 * p, max_precision)


def to_jsonable(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, DyadicInterval):
        return interval_json(value)
    if isinstance(value, Dyadic):
        return str(value)
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, float):
        return repr(value)
    return value if isinstance(value, str) else str(value)


def interval_json(iv: DyadicInterval) -> dict:
    return {
        "lo": str(iv.lo),
        "hi": str(iv.hi),
        "precision": iv.precision,
        "lo_approx": to_scientific(iv.lo),
        "hi_approx": to_scientific(iv.hi),
    }


def margin_json(m: Margin) -> Optional[dict]:
    if m is None:
        return None
    if isinstance(m, DyadicInterval):
        return interval_json(m)
    m = Fraction(m)
    return {"num": str(m.numerator), "den": str(m.denominator)}


def margin_from_json(d: Optional[dict]) -> Margin:
    if d is None:
        return None
    if "num" in d:
        return Fraction(int(d["num"]), int(d["den"]))
    return DyadicInterval(parse_dyadic(d["lo"]), parse_dyadic(d["hi"]), int(d["precision"]))


def parse_dyadic(text: str) -> Dyadic:
    man, exp = text.split("*2^")
    return Dyadic(int(man), int(exp))


@dataclass
class CheckReport:
    check_id: str
    params: dict
    verdict: CheckVerdict
    margin: Margin = None
    witnesses: list = field(default_factory=list)
    elapsed_ms: Optional[int] = None
    constants_used: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict is CheckVerdict.PASS

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "check_id": self.check_id,
            "params": to_jsonable(self.params),
            "verdict": self.verdict.value,
            "margin": margin_json(self.margin),
            "witnesses": to_jsonable(self.witnesses),
            "elapsed_ms": self.elapsed_ms if timing else None,
            "constants_used": to_jsonable(self.constants_used),
            "details": to_jsonable(self.details),
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)

    def summary(self) -> str:
        m = self.margin
        if isinstance(m, DyadicInterval):
            ms = f"[{to_scientific(m.lo, 6)}, {to_scientific(m.hi, 6)}]"
        elif m is None:
            ms = "-"
        else:
            ms = format_rational(m) if len(str(m)) < 40 else f"~{float(m):.6g}"
        return f"{self.check_id:<26} {self.verdict.value:<13} margin={ms}"


@dataclass
class SearchReport:
    """Outcome of a sharpness search over a (k, n) grid."""

    grid: dict
    A: Fraction
    eps: Fraction
    best_A: Optional[DyadicInterval]
    best_cell: Optional[dict]
    witnesses: list
    cells: int
    inconclusive: list = field(default_factory=list)
    elapsed_ms: Optional[int] = None
    precision: int = 0

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "grid": to_jsonable(self.grid),
            "A": format_rational(self.A),
            "epsilon": format_rational(self.eps),
            "best_A": margin_json(self.best_A),
            "best_cell": to_jsonable(self.best_cell),
            "witnesses": to_jsonable(self.witnesses),
            "cells": self.cells,
            "inconclusive": to_jsonable(self.inconclusive),
            "precision": self.precision,
            "elapsed_ms": self.elapsed_ms if timing else None,
        }
