"""Translation tables, left-c.e. approximation sequences, and their constructions.

The substrate for every scenario: a pair of nondecreasing rational
approximation sequences with explicit rational limits, a finite sampled
translation table with its own enumeration order, and exact checks of the
Solovay-style conditions relating them.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    ONE,
    ZERO,
    Fraction,
    PreconditionError,
    rat,
    rat_str,
)


@dataclass(frozen=True)
class LeftCeApproximation:
    """A finite nondecreasing rational sequence with a declared limit.

    Terms stay strictly below the limit unless ``stabilizes`` is set, in
    which case a final suffix may sit exactly at the limit.
    """

    terms: tuple[Fraction, ...]
    limit: Fraction
    stabilizes: bool = False

    def __post_init__(self) -> None:
        terms = tuple(rat(t) for t in self.terms)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "limit", rat(self.limit))
        if not terms:
            raise ValueError("approximation needs at least one term")
        if any(a > b for a, b in zip(terms, terms[1:])):
            raise ValueError("terms must be nondecreasing")
        if not (ZERO <= self.limit <= ONE):
            raise ValueError(f"limit {self.limit} outside [0, 1]")
        if self.stabilizes:
            if any(t > self.limit for t in terms):
                raise ValueError("terms may not exceed the limit")
        elif any(t >= self.limit for t in terms):
            raise ValueError("terms must stay strictly below the limit")

    def __len__(self) -> int:
        return len(self.terms)

    def to_json(self) -> list[str]:
        return [rat_str(t) for t in self.terms]


@dataclass(frozen=True)
class TranslationTable:
    """A finite sampled translation function with an explicit enumeration order.

    ``enumeration`` lists the keys without repetition in the order they are
    enumerated; ``values`` is aligned with it.  Keys and values live in
    [0, 1).  Setting ``monotone`` asserts and validates that sorting the
    keys sorts the values nondecreasingly.
    """

    enumeration: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    monotone: bool = False

    def __post_init__(self) -> None:
        enum = tuple(rat(q) for q in self.enumeration)
        vals = tuple(rat(v) for v in self.values)
        object.__setattr__(self, "enumeration", enum)
        object.__setattr__(self, "values", vals)
        if len(enum) != len(vals):
            raise ValueError("enumeration and values must align")
        if len(set(enum)) != len(enum):
            raise ValueError("enumeration must not repeat keys")
        for q in enum:
            if not (ZERO <= q < ONE):
                raise ValueError(f"key {q} outside [0, 1)")
        for v in vals:
            if not (ZERO <= v < ONE):
                raise ValueError(f"value {v} outside [0, 1)")
        if self.monotone and not self.is_monotone():
            raise ValueError("table declared monotone but values decrease")

    @property
    def mapping(self) -> dict[Fraction, Fraction]:
        return dict(zip(self.enumeration, self.values))

    def __len__(self) -> int:
        return len(self.enumeration)

    def __contains__(self, q) -> bool:
        return rat(q) in set(self.enumeration)

    def g(self, q) -> Fraction:
        q = rat(q)
        for key, val in zip(self.enumeration, self.values):
            if key == q:
                return val
        raise PreconditionError(f"{q} is not a key of the table")

    def sorted_items(self) -> list[tuple[Fraction, Fraction]]:
        return sorted(zip(self.enumeration, self.values))

    def is_monotone(self) -> bool:
        items = self.sorted_items()
        return all(a[1] <= b[1] for a, b in zip(items, items[1:]))

    def to_json(self) -> dict:
        return {
            "entries": [[rat_str(q), rat_str(v)] for q, v in zip(self.enumeration, self.values)],
            "enumeration": [rat_str(q) for q in self.enumeration],
        }

    @staticmethod
    def from_json(obj: dict, monotone: bool = False) -> "TranslationTable":
        entries = {rat(q): rat(v) for q, v in obj["entries"]}
        enum = tuple(rat(q) for q in obj["enumeration"])
        if set(enum) != set(entries):
            raise ValueError("enumeration must cover exactly the entry keys")
        return TranslationTable(enum, tuple(entries[q] for q in enum), monotone)


def table_from_items(
    items: Iterable[tuple], monotone: bool = False
) -> TranslationTable:
    pairs = [(rat(q), rat(v)) for q, v in items]
    return TranslationTable(
        tuple(q for q, _ in pairs), tuple(v for _, v in pairs), monotone
    )


@dataclass(frozen=True)
class Scenario:
    """One bundled experiment input: limits, approximations, table, constants."""

    alpha: Fraction
    beta: Fraction
    a: LeftCeApproximation
    b: LeftCeApproximation
    g: TranslationTable
    c: Fraction
    d: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", rat(self.alpha))
        object.__setattr__(self, "beta", rat(self.beta))
        object.__setattr__(self, "c", rat(self.c))
        object.__setattr__(self, "d", rat(self.d))
        if not (ZERO <= self.alpha <= ONE and ZERO <= self.beta <= ONE):
            raise ValueError("alpha and beta must lie in [0, 1]")
        if self.a.limit != self.alpha or self.b.limit != self.beta:
            raise ValueError("approximation limits must match alpha and beta")
        if self.c < ZERO or self.d < ZERO:
            raise ValueError("constants must be nonnegative")

    def to_json(self) -> dict:
        return {
            "alpha": rat_str(self.alpha),
            "beta": rat_str(self.beta),
            "a": self.a.to_json(),
            "b": self.b.to_json(),
            "g": self.g.to_json(),
            "c": rat_str(self.c),
            "d": rat_str(self.d),
        }

    @staticmethod
    def from_json(obj: dict) -> "Scenario":
        return Scenario(
            alpha=rat(obj["alpha"]),
            beta=rat(obj["beta"]),
            a=LeftCeApproximation(tuple(rat(t) for t in obj["a"]), rat(obj["alpha"])),
            b=LeftCeApproximation(tuple(rat(t) for t in obj["b"]), rat(obj["beta"])),
            g=TranslationTable.from_json(obj["g"]),
            c=rat(obj["c"]),
            d=rat(obj["d"]),
        )

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class CheckReport:
    """Outcome of an exact condition check with the offending keys or indices."""

    passed: bool
    violations: tuple


def check_solovay_condition(
    g: TranslationTable, alpha, beta, c
) -> CheckReport:
    """Test ``0 < alpha - g(q) < c*(beta - q)`` exactly at every key of ``g``.

    Every key must lie strictly below ``beta``.
    """
    alpha, beta, c = rat(alpha), rat(beta), rat(c)
    violations = []
    for q, gq in zip(g.enumeration, g.values):
        if q >= beta:
            raise PreconditionError(f"key {q} is not below beta={beta}")
        gap = alpha - gq
        if not (ZERO < gap < c * (beta - q)):
            violations.append(q)
    return CheckReport(not violations, tuple(violations))


def check_index_condition(
    a: LeftCeApproximation, b: LeftCeApproximation, c
) -> CheckReport:
    """Test ``alpha - a_n < c*(beta - b_n)`` exactly for every index n."""
    if len(a) != len(b):
        raise PreconditionError("approximations must have the same length")
    c = rat(c)
    violations = tuple(
        n
        for n, (an, bn) in enumerate(zip(a.terms, b.terms))
        if not a.limit - an < c * (b.limit - bn)
    )
    return CheckReport(not violations, violations)


def _last_index_at_most(b: LeftCeApproximation, q: Fraction) -> int:
    """max{n : b_n <= q}, or -1 when every term exceeds q."""
    best = -1
    for n, bn in enumerate(b.terms):
        if bn <= q:
            best = n
    return best


def monotonize(
    a: LeftCeApproximation, b: LeftCeApproximation, queries: Sequence
) -> TranslationTable:
    """The nondecreasing table ``q -> a[max{n : b_n <= q}]`` at the given queries.

    Queries below ``b_0`` have no defined index and are rejected.
    Duplicate queries collapse to their first occurrence.
    """
    if len(a) != len(b):
        raise PreconditionError("approximations must have the same length")
    enum: list[Fraction] = []
    vals: list[Fraction] = []
    seen = set()
    for raw in queries:
        q = rat(raw)
        if q in seen:
            continue
        seen.add(q)
        idx = _last_index_at_most(b, q)
        if idx < 0:
            raise PreconditionError(f"query {q} is below b_0={b.terms[0]}")
        enum.append(q)
        vals.append(a.terms[idx])
    return TranslationTable(tuple(enum), tuple(vals), monotone=True)


def sandwich_functions(
    a: LeftCeApproximation, b: LeftCeApproximation, queries: Sequence
) -> tuple[TranslationTable, TranslationTable]:
    """The bracketing tables ``f(q) = max{a_0, a[max{t : b_t < q}]}`` and
    ``h(q) = a[min{t : b_t > q}]``.

    ``h`` is partial on finite data: queries with no ``b_t > q`` are simply
    absent from its table.  For every index n with both sides defined,
    ``f(b_n) <= a_n <= h(b_n)``.
    """
    if len(a) != len(b):
        raise PreconditionError("approximations must have the same length")
    f_enum: list[Fraction] = []
    f_vals: list[Fraction] = []
    h_enum: list[Fraction] = []
    h_vals: list[Fraction] = []
    seen = set()
    for raw in queries:
        q = rat(raw)
        if q in seen:
            continue
        seen.add(q)
        below = [t for t, bt in enumerate(b.terms) if bt < q]
        f_enum.append(q)
        f_vals.append(max(a.terms[0], a.terms[max(below)]) if below else a.terms[0])
        above = [t for t, bt in enumerate(b.terms) if bt > q]
        if above:
            h_enum.append(q)
            h_vals.append(a.terms[min(above)])
    f = TranslationTable(tuple(f_enum), tuple(f_vals), monotone=True)
    h = TranslationTable(tuple(h_enum), tuple(h_vals), monotone=True)
    return f, h


@dataclass(frozen=True)
class NonmonotoneBuild:
    """Result of the oscillating-table construction.

    ``dyadic`` and ``ternary`` record the constructed branch points as
    (n, k, q) triples; ``fallback`` the remaining points; ``truncated``
    the (branch, n, k) combinations skipped because the data ran out.
    """

    table: TranslationTable
    dyadic: tuple[tuple[int, int, Fraction], ...]
    ternary: tuple[tuple[int, int, Fraction], ...]
    fallback: tuple[Fraction, ...]
    truncated: tuple[tuple[str, int, int], ...]


def build_nonmonotone(
    a: LeftCeApproximation,
    b: LeftCeApproximation,
    c,
    depth: int,
    extra_queries: Sequence = (),
) -> NonmonotoneBuild:
    """Build the oscillating translation table from an approximation pair.

    For every n >= 1 and 1 <= k <= depth with n + k inside the data:

    * at ``b_n + (b_{n+1} - b_n)/2^k`` the value is ``a_{n+k}``;
    * at ``b_n - (b_n - b_{n-1})/3^k`` the value is ``a_{n+k} - c*(b_{n+k} - b_n)``.

    All other requested points (the ``b_n`` themselves plus
    ``extra_queries``) fall back to ``a[min{n : b_n >= q}]``.  Combinations
    reaching past the data are dropped and recorded as truncated.  The
    output need not be monotone.
    """
    if len(a) != len(b):
        raise PreconditionError("approximations must have the same length")
    if depth < 1:
        raise PreconditionError("depth must be at least 1")
    c = rat(c)
    last = len(b) - 1
    entries: dict[Fraction, Fraction] = {}
    order: list[Fraction] = []
    dyadic: list[tuple[int, int, Fraction]] = []
    ternary: list[tuple[int, int, Fraction]] = []
    truncated: list[tuple[str, int, int]] = []

    def put(q: Fraction, value: Fraction, source: str) -> None:
        if q in entries:
            if entries[q] != value:
                raise PreconditionError(
                    f"constructed points collide at {q} with conflicting values"
                )
            return
        entries[q] = value
        order.append(q)

    for n in range(1, last + 1):
        for k in range(1, depth + 1):
            if n + k > last:
                truncated.append(("dyadic", n, k))
                truncated.append(("ternary", n, k))
                continue
            if n + 1 <= last and b.terms[n] != b.terms[n + 1]:
                q = b.terms[n] + (b.terms[n + 1] - b.terms[n]) / 2**k
                put(q, a.terms[n + k], "dyadic")
                dyadic.append((n, k, q))
            if b.terms[n - 1] != b.terms[n]:
                q = b.terms[n] - (b.terms[n] - b.terms[n - 1]) / 3**k
                value = a.terms[n + k] - c * (b.terms[n + k] - b.terms[n])
                put(q, value, "ternary")
                ternary.append((n, k, q))

    fallback: list[Fraction] = []
    for raw in tuple(b.terms) + tuple(extra_queries):
        q = rat(raw)
        if q in entries:
            continue
        candidates = [n for n, bn in enumerate(b.terms) if bn >= q]
        if not candidates:
            truncated.append(("fallback", -1, -1))
            continue
        put(q, a.terms[min(candidates)], "fallback")
        fallback.append(q)

    table = TranslationTable(
        tuple(order), tuple(entries[q] for q in order), monotone=False
    )
    return NonmonotoneBuild(
        table, tuple(dyadic), tuple(ternary), tuple(fallback), tuple(truncated)
    )


def ratio_sequence(
    g: TranslationTable, alpha, beta, qs: Sequence
) -> list[tuple[Fraction, Fraction]]:
    """Exact ratios ``(alpha - g(q)) / (beta - q)`` in input order."""
    alpha, beta = rat(alpha), rat(beta)
    mapping = g.mapping
    out = []
    for raw in qs:
        q = rat(raw)
        if q not in mapping:
            raise PreconditionError(f"{q} is not a key of the table")
        if q >= beta:
            raise PreconditionError(f"{q} is not below beta={beta}")
        out.append((q, (alpha - mapping[q]) / (beta - q)))
    return out
