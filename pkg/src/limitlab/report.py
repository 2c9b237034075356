"""Claim-check result records shared by the verification modules."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .core import rat_str


def jsonable(value):
    """Recursively convert Fractions inside a counterexample to "num/den" strings."""
    if isinstance(value, Fraction):
        return rat_str(value)
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


@dataclass(frozen=True)
class ClaimResult:
    """One verified claim: its identifier, outcome, and first counterexample."""

    claim: str
    passed: bool
    counterexample: Optional[dict] = None


class ClaimLog:
    """Accumulates per-claim outcomes, keeping the first counterexample of each."""

    def __init__(self, claims: Iterable[str]):
        self._order = list(claims)
        self._failed: dict[str, dict] = {}

    def check(self, claim: str, ok: bool, **context) -> bool:
        if claim not in self._order:
            self._order.append(claim)
        if not ok and claim not in self._failed:
            self._failed[claim] = jsonable(context)
        return ok

    def results(self) -> list[ClaimResult]:
        return [
            ClaimResult(c, c not in self._failed, self._failed.get(c))
            for c in self._order
        ]


def all_passed(results: Iterable[ClaimResult]) -> bool:
    return all(r.passed for r in results)
