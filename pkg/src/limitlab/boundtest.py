"""Slope-threshold finite tests over sorted prefixes of a translation table.

For sharpness i, a pair of sample points whose secant slope reaches
``2**(i+1)`` contributes a short interval just right of the later point;
the union of all such intervals over a prefix stays below measure
``2**-(i+1)``.  This module builds those tests, the greedy stair indices
that control the bound, and verifies the whole family of structural claims
exactly.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .approx import Scenario, TranslationTable
from .core import (
    EMPTY_INTERVAL,
    ONE,
    ZERO,
    FiniteTest,
    Interval,
    OracleFailure,
    PreconditionError,
    decomposition_contains,
    merge_intervals,
    midpoints,
    rat,
)
from .report import ClaimLog, ClaimResult


@dataclass(frozen=True)
class SortedPrefix:
    """The first n+1 enumeration elements of a table, sorted, with a (1, 1) sentinel.

    ``qs`` and ``gvals`` hold the real sample points; ``q(n+1)`` and
    ``gval(n+1)`` return the sentinel.
    """

    qs: tuple[Fraction, ...]
    gvals: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.qs:
            raise ValueError("prefix needs at least one point")
        if any(a >= b for a, b in zip(self.qs, self.qs[1:])):
            raise ValueError("points must be strictly increasing")
        if any(a > b for a, b in zip(self.gvals, self.gvals[1:])):
            raise ValueError("values must be nondecreasing")
        if self.qs[-1] >= ONE:
            raise ValueError("all points must lie below 1")

    @staticmethod
    def from_table(table: TranslationTable, n: int) -> "SortedPrefix":
        if not 0 <= n < len(table):
            raise PreconditionError(f"prefix size {n} outside the enumeration")
        mapping = table.mapping
        qs = sorted(table.enumeration[: n + 1])
        return SortedPrefix(tuple(qs), tuple(mapping[q] for q in qs))

    @property
    def n(self) -> int:
        return len(self.qs) - 1

    def q(self, j: int) -> Fraction:
        return ONE if j == self.n + 1 else self.qs[j]

    def gval(self, j: int) -> Fraction:
        return ONE if j == self.n + 1 else self.gvals[j]


@dataclass(frozen=True)
class StairIndices:
    """The greedy index chain 0 = i_0 < i_1 < ... < i_s plus the virtual terminal."""

    indices: tuple[int, ...]
    terminal: int

    @property
    def s(self) -> int:
        return len(self.indices) - 1

    def extended(self) -> tuple[int, ...]:
        return self.indices + (self.terminal,)


def threshold(i: int) -> Fraction:
    """The slope cutoff for sharpness i."""
    return Fraction(2 ** (i + 1))


def _slope_at_least(prefix: SortedPrefix, k: int, m: int, bound: Fraction) -> bool:
    # (g_m - g_k) / (q_m - q_k) >= bound, by cross multiplication
    return prefix.gval(m) - prefix.gval(k) >= bound * (prefix.q(m) - prefix.q(k))


def _slope_at_most(prefix: SortedPrefix, k: int, m: int, bound: Fraction) -> bool:
    return prefix.gval(m) - prefix.gval(k) <= bound * (prefix.q(m) - prefix.q(k))


def interval_ikm(prefix: SortedPrefix, k: int, m: int, i: int) -> Interval:
    """The slope-test interval for the (k, m) pair at sharpness i, clipped to [0, 1].

    Empty unless k < m and the secant slope from k to m reaches the cutoff;
    otherwise ``[q_m, q_k + (g_m - g_k)/2^(i+1)]``.
    """
    n = prefix.n
    if not (0 <= k <= n and 0 <= m <= n):
        raise PreconditionError(f"indices ({k}, {m}) outside 0..{n}")
    if m <= k:
        return EMPTY_INTERVAL
    thr = threshold(i)
    if not _slope_at_least(prefix, k, m, thr):
        return EMPTY_INTERVAL
    hi = prefix.q(k) + (prefix.gval(m) - prefix.gval(k)) / thr
    return Interval(prefix.q(m), min(hi, ONE))


def build_tin(prefix: SortedPrefix, i: int) -> FiniteTest:
    """The finite test of all pair intervals, in lexicographic (k, m) order."""
    n = prefix.n
    return FiniteTest(
        tuple(
            interval_ikm(prefix, k, m, i)
            for k in range(n + 1)
            for m in range(k + 1, n + 1)
        )
    )


def union_yin(prefix: SortedPrefix, i: int) -> tuple[Interval, ...]:
    """Canonical disjoint decomposition of the union of the test's intervals."""
    return merge_intervals(build_tin(prefix, i).intervals)


def stair_indices(prefix: SortedPrefix, i: int) -> StairIndices:
    """Greedy left-to-right stair: each next index is the least one reachable
    with secant slope at most the cutoff; the virtual terminal is n + 1."""
    thr = threshold(i)
    n = prefix.n
    indices = [0]
    while True:
        j = indices[-1]
        nxt = None
        for m in range(j + 1, n + 1):
            if _slope_at_most(prefix, j, m, thr):
                nxt = m
                break
        if nxt is None:
            break
        indices.append(nxt)
    return StairIndices(tuple(indices), n + 1)


def _interval_matrix(prefix: SortedPrefix, i: int) -> list[list[Interval]]:
    n = prefix.n
    return [
        [
            interval_ikm(prefix, k, m, i) if k < m else EMPTY_INTERVAL
            for m in range(n + 1)
        ]
        for k in range(n + 1)
    ]


def _interval_subset(a: Interval, b: Interval) -> bool:
    return b.contains_interval(a)


def verify_bound_claims(
    scenario: Scenario, i_max: int, n_max: int
) -> list[ClaimResult]:
    """Verify the structural claims of the slope-test construction, exactly.

    For every sharpness i <= i_max and prefix size n <= n_max:

    * measure-bound: the union measure stays strictly below 2^-(i+1);
    * prefix-nesting: the union grows with the prefix;
    * window-equivalence: within each window [q_m, q_{m+1}), a row k < m
      covers a point somewhere iff its (k, m) interval covers it;
    * pair-containment: the two slope-comparison containment implications;
    * stair-domination: every column is dominated by the stair index below it;
    * stair-gap-empty: the union avoids each stair gap.

    Sample points are exhaustive: every construction endpoint plus one
    interior point per maximal constant segment.
    """
    table = scenario.g
    if not table.is_monotone():
        raise PreconditionError("scenario table must be monotone")
    if not 0 <= n_max < len(table):
        raise PreconditionError("n_max outside the enumeration")
    log = ClaimLog(
        [
            "measure-bound",
            "prefix-nesting",
            "window-equivalence",
            "pair-containment",
            "stair-domination",
            "stair-gap-empty",
        ]
    )
    for i in range(i_max + 1):
        thr = threshold(i)
        bound = Fraction(1, 2 ** (i + 1))
        prev_decomp: Optional[tuple[Interval, ...]] = None
        for n in range(n_max + 1):
            prefix = SortedPrefix.from_table(table, n)
            ivs = _interval_matrix(prefix, i)
            decomp = merge_intervals(iv for row in ivs for iv in row)
            mu = sum((c.hi - c.lo for c in decomp), ZERO)
            log.check("measure-bound", mu < bound, i=i, n=n, measure=mu)
            if prev_decomp is not None:
                log.check(
                    "prefix-nesting",
                    decomposition_contains(prev_decomp, decomp),
                    i=i,
                    n=n,
                )
            prev_decomp = decomp
            _check_window_equivalence(log, prefix, ivs, i, n)
            _check_pair_containment(log, prefix, ivs, thr, i, n)
            stairs = stair_indices(prefix, i)
            _check_stair_domination(log, prefix, ivs, stairs, i, n)
            _check_stair_gaps(log, prefix, decomp, stairs, thr, i, n)
    return log.results()


def _check_window_equivalence(log, prefix, ivs, i, n) -> None:
    rows = [merge_intervals(row) for row in ivs]
    row_los = [[c.lo for c in row] for row in rows]
    criticals = set(prefix.qs) | {ONE}
    for row in ivs:
        for iv in row:
            if not iv.is_empty:
                criticals.add(iv.lo)
                criticals.add(iv.hi)
    grid = sorted(criticals)
    samples = grid + midpoints(grid)
    qs_ext = list(prefix.qs) + [ONE]
    for x in samples:
        if not prefix.qs[0] <= x < ONE:
            continue
        m = bisect_right(qs_ext, x) - 1
        for k in range(m):
            idx = bisect_right(row_los[k], x) - 1
            anywhere = idx >= 0 and x <= rows[k][idx].hi
            here = ivs[k][m].contains(x)
            if not log.check(
                "window-equivalence", anywhere == here, i=i, n=n, k=k, m=m, x=x
            ):
                return


def _check_pair_containment(log, prefix, ivs, thr, i, n) -> None:
    for k in range(n + 1):
        for l in range(k + 1, n + 1):
            rise = prefix.gval(l) - prefix.gval(k)
            run = prefix.q(l) - prefix.q(k)
            if rise <= thr * run:
                for m in range(l + 1, n + 1):
                    log.check(
                        "pair-containment",
                        _interval_subset(ivs[k][m], ivs[l][m]),
                        i=i, n=n, k=k, l=l, m=m, direction="shallow",
                    )
            if rise >= thr * run:
                for m in range(n + 1):
                    log.check(
                        "pair-containment",
                        _interval_subset(ivs[l][m], ivs[k][m]),
                        i=i, n=n, k=k, l=l, m=m, direction="steep",
                    )


def _check_stair_domination(log, prefix, ivs, stairs, i, n) -> None:
    ext = stairs.extended()
    for pos, ij in enumerate(stairs.indices):
        nxt = ext[pos + 1]
        for k in range(min(nxt, n + 1)):
            log.check(
                "stair-domination",
                ivs[k][ij].is_empty,
                i=i, n=n, j=pos, k=k, part="empty-column",
            )
            for m in range(ij + 1, n + 1):
                log.check(
                    "stair-domination",
                    _interval_subset(ivs[k][m], ivs[ij][m]),
                    i=i, n=n, j=pos, k=k, m=m, part="containment",
                )


def _check_stair_gaps(log, prefix, decomp, stairs, thr, i, n) -> None:
    ext = stairs.extended()
    for pos, ij in enumerate(stairs.indices):
        nxt = ext[pos + 1]
        gap_lo = prefix.q(ij) + (prefix.gval(nxt) - prefix.gval(ij)) / thr
        gap_hi = prefix.q(nxt)
        if gap_lo >= gap_hi:
            continue
        clear = all(
            comp.hi <= gap_lo or comp.lo >= gap_hi for comp in decomp
        )
        log.check(
            "stair-gap-empty", clear, i=i, n=n, j=pos, gap=[gap_lo, gap_hi]
        )


def locate_witness(
    scenario: Scenario, i: int, q, pM
) -> Optional[Interval]:
    """Find the test interval that traps ``beta`` when the Solovay bound fails at q.

    Given enumeration members ``q < pM < beta`` where the bound with
    constant ``2**-i`` is violated at ``q`` and the table has grown by more
    than ``2**-(i+1) * (beta - q)`` at ``pM``, returns the pair interval of
    the size-``M`` test containing ``beta`` (``M`` the enumeration index of
    ``pM``).  Returns ``None`` when the bound is not violated at ``q``;
    raises ``OracleFailure`` if the containment check fails.
    """
    q, pM = rat(q), rat(pM)
    table = scenario.g
    enum = list(table.enumeration)
    if q not in enum or pM not in enum:
        raise PreconditionError("q and pM must be enumeration members")
    K, M = enum.index(q), enum.index(pM)
    if K >= M:
        raise PreconditionError("q must be enumerated before pM")
    if not q < pM < scenario.beta:
        raise PreconditionError("need q < pM < beta")
    mapping = table.mapping
    slack = scenario.beta - q
    if scenario.alpha - mapping[q] < Fraction(1, 2**i) * slack:
        return None
    if not mapping[pM] - mapping[q] > Fraction(1, 2 ** (i + 1)) * slack:
        raise PreconditionError("table growth at pM is below the required margin")
    prefix = SortedPrefix.from_table(table, M)
    k = prefix.qs.index(q)
    m = prefix.qs.index(pM)
    witness = interval_ikm(prefix, k, m, i)
    right = prefix.q(k) + (prefix.gval(m) - prefix.gval(k)) / threshold(i)
    if not (
        prefix.q(m) < scenario.beta < right
        and witness.contains(scenario.beta)
    ):
        raise OracleFailure(
            f"witness interval at (k={k}, m={m}) does not contain beta={scenario.beta}"
        )
    return witness
