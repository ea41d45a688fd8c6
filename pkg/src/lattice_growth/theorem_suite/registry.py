"""Parameter declarations, validation and dispatch for named checks.

Every check is a plain function taking keyword parameters and returning an
:class:`Outcome`.  The registry records, per parameter, the full-level default,
an optional quick-level value and the accepted range.  Values may be given as
Python objects or as strings (the CLI path); rationals are written ``p/q``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

from ..exact_arith import parse_rational
from .report import CheckReport, CheckVerdict, Margin


class CheckError(ValueError):
    """Unknown check id or invalid parameters."""


@dataclass(frozen=True)
class Param:
    default: Any
    kind: str = "int"  # int | rational | ints | rationals
    lo: Any = None
    hi: Any = None
    quick: Any = None
    help: str = ""

    def value(self, level: str) -> Any:
        if level == "quick" and self.quick is not None:
            return self.quick
        return self.default

    def coerce(self, name: str, raw: Any) -> Any:
        try:
            if self.kind == "int":
                v = _to_int(raw)
                self._check_range(name, v)
                return v
            if self.kind == "rational":
                v = _to_rational(raw)
                self._check_range(name, v)
                return v
            items = _split(raw)
            conv = _to_int if self.kind == "ints" else _to_rational
            vals = [conv(x) for x in items]
            for v in vals:
                self._check_range(name, v)
            return vals
        except CheckError:
            raise
        except (TypeError, ValueError) as exc:
            raise CheckError(f"parameter {name!r}: {exc}") from exc

    def _check_range(self, name: str, v) -> None:
        if self.lo is not None and v < self.lo:
            raise CheckError(f"parameter {name!r}={v} is below the minimum {self.lo}")
        if self.hi is not None and v > self.hi:
            raise CheckError(f"parameter {name!r}={v} exceeds the maximum {self.hi}")


def _to_int(raw) -> int:
    if isinstance(raw, bool):
        raise TypeError("booleans are not integers here")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, Fraction) and raw.denominator == 1:
        return int(raw)
    if isinstance(raw, str):
        return int(raw.strip())
    raise TypeError(f"expected an integer, got {raw!r}")


def _to_rational(raw) -> Fraction:
    if isinstance(raw, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(raw, (int, Fraction)):
        return Fraction(raw)
    if isinstance(raw, str):
        return parse_rational(raw)
    raise TypeError(f"expected a rational (int, Fraction or 'p/q'), got {raw!r}")


def _split(raw) -> list:
    if isinstance(raw, str):
        return [s for s in (t.strip() for t in raw.split(",")) if s]
    if isinstance(raw, (list, tuple)):
        return list(raw)
    return [raw]


@dataclass
class Outcome:
    verdict: CheckVerdict
    margin: Margin = None
    witnesses: list = field(default_factory=list)
    constants_used: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CheckDef:
    check_id: str
    func: Callable[..., Outcome]
    params: dict
    summary: str = ""
    # composite names accepted as shorthand: "k" sets both k_min and k_max
    aliases: dict = field(default_factory=dict)


REGISTRY: dict[str, CheckDef] = {}


def register(check_id: str, summary: str, **params: Param):
    def deco(func):
        REGISTRY[check_id] = CheckDef(check_id, func, params, summary)
        return func

    return deco


def _expand_aliases(defn: CheckDef, given: dict) -> dict:
    out = {}
    for key, val in given.items():
        if key in defn.params:
            out[key] = val
            continue
        targets = [t for t in (f"{key}_min", f"{key}_max") if t in defn.params]
        if not targets:
            raise CheckError(f"check {defn.check_id!r} has no parameter {key!r}")
        for t in targets:
            out.setdefault(t, val)
    return out


def resolve_params(check_id: str, given: Optional[dict] = None, level: str = "full") -> dict:
    if check_id not in REGISTRY:
        raise CheckError(f"unknown check id {check_id!r}; known: {', '.join(sorted(REGISTRY))}")
    if level not in ("quick", "full"):
        raise CheckError(f"unknown level {level!r}")
    defn = REGISTRY[check_id]
    given = _expand_aliases(defn, dict(given or {}))
    params = {}
    for name, param in defn.params.items():
        raw = given[name] if name in given else param.value(level)
        params[name] = param.coerce(name, raw)
    for lo_name in [n for n in params if n.endswith("_min")]:
        hi_name = lo_name[:-4] + "_max"
        if hi_name in params and params[lo_name] > params[hi_name]:
            raise CheckError(f"{lo_name}={params[lo_name]} exceeds {hi_name}={params[hi_name]}")
    return params


def run_check(check_id: str, params: Optional[dict] = None, level: str = "full") -> CheckReport:
    """Run one registered check; unknown ids and out-of-range values raise CheckError."""
    resolved = resolve_params(check_id, params, level)
    start = time.perf_counter()
    out = REGISTRY[check_id].func(**resolved)
    elapsed = int(round((time.perf_counter() - start) * 1000))
    if out.verdict is CheckVerdict.FAIL and not out.witnesses:
        raise AssertionError(f"{check_id}: FAIL without a witness")
    return CheckReport(
        check_id=check_id,
        params=resolved,
        verdict=out.verdict,
        margin=out.margin,
        witnesses=out.witnesses,
        elapsed_ms=elapsed,
        constants_used=out.constants_used,
        details=out.details,
    )
