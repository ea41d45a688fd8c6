"""Named, parameterized checks with structured reports, and the sharpness search."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

from . import checks as _checks  # noqa: F401  (populates the registry)
from .checks import check_binomial_family, check_comparison, check_recursion_consistency
from .registry import REGISTRY, CheckError, Param, resolve_params, run_check
from .report import CheckReport, CheckVerdict, SearchReport, combine
from .sharpness import n_multiples, sharpness_search

__all__ = [
    "REGISTRY",
    "CheckError",
    "CheckReport",
    "CheckVerdict",
    "Param",
    "SearchReport",
    "aggregate",
    "check_binomial_family",
    "check_comparison",
    "check_recursion_consistency",
    "check_ids",
    "combine",
    "n_multiples",
    "resolve_params",
    "run_all",
    "run_check",
    "sharpness_search",
]


def check_ids() -> list[str]:
    return list(REGISTRY)


def _run_one(args):
    check_id, level, overrides = args
    return run_check(check_id, overrides, level)


def run_all(level: str = "quick", overrides: dict | None = None, jobs: int = 1) -> list[CheckReport]:
    """Run every registered check at its ``level`` grid, in registry order.

    ``overrides`` maps check ids to parameter dicts that replace the level
    defaults (the configuration-file path of the CLI).
    """
    if level not in ("quick", "full"):
        raise CheckError(f"unknown level {level!r}")
    overrides = overrides or {}
    unknown = set(overrides) - set(REGISTRY)
    if unknown:
        raise CheckError(f"unknown check ids in configuration: {sorted(unknown)}")
    tasks = [(cid, level, overrides.get(cid)) for cid in REGISTRY]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, os.cpu_count() or 1)) as pool:
            return list(pool.map(_run_one, tasks))
    return [_run_one(t) for t in tasks]


def aggregate(reports) -> CheckVerdict:
    return combine(r.verdict for r in reports)
