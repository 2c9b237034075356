"""Exact rational intervals, finite interval tests, and covering step functions.

Everything here is value semantics over ``fractions.Fraction``: no floats,
no mutation, all comparisons exact.  A finite test is an ordered tuple of
intervals (duplicates and empties allowed); its measure can be computed two
independent ways, directly as a sum of lengths and by integrating the
covering step function, and the two must agree exactly.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)

CLOSED = "closed"
HALF_OPEN_LEFT = "half-open-left"
_KINDS = (CLOSED, HALF_OPEN_LEFT)


class DomainError(ValueError):
    """An argument lies outside the unit-interval domain of an operation."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""


class OracleFailure(RuntimeError):
    """A verified postcondition was falsified.  Never expected on valid input."""


def rat(value: RationalLike) -> Fraction:
    """Parse a rational from a Fraction, int, or canonical "num/den" string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    raise TypeError(f"cannot interpret {value!r} as a rational")


def rat_str(value: Fraction) -> str:
    """Serialize a rational as canonical "num/den" (lowest terms, den > 0)."""
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Interval:
    """A rational-endpoint interval, closed ``[lo, hi]`` or half-open ``(lo, hi]``.

    Any interval with ``lo > hi`` is empty; a half-open interval with
    ``lo == hi`` is empty too, while the closed ``[q, q]`` is a nonempty
    point of measure zero.
    """

    lo: Fraction
    hi: Fraction
    kind: str = CLOSED

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown interval kind {self.kind!r}")
        if not isinstance(self.lo, Fraction) or not isinstance(self.hi, Fraction):
            object.__setattr__(self, "lo", rat(self.lo))
            object.__setattr__(self, "hi", rat(self.hi))

    @property
    def is_empty(self) -> bool:
        if self.kind == HALF_OPEN_LEFT:
            return self.lo >= self.hi
        return self.lo > self.hi

    @property
    def measure(self) -> Fraction:
        return max(self.hi - self.lo, ZERO)

    def contains(self, x: Fraction) -> bool:
        if self.is_empty:
            return False
        if self.kind == HALF_OPEN_LEFT:
            return self.lo < x <= self.hi
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        """Set containment ``other`` within ``self`` (closed intervals only)."""
        if other.is_empty:
            return True
        if self.is_empty:
            return False
        if self.kind != CLOSED or other.kind != CLOSED:
            raise ValueError("containment is defined here for closed intervals")
        return self.lo <= other.lo and other.hi <= self.hi

    def to_json(self) -> dict:
        return {"lo": rat_str(self.lo), "hi": rat_str(self.hi), "kind": self.kind}

    @staticmethod
    def from_json(obj: dict) -> "Interval":
        return Interval(rat(obj["lo"]), rat(obj["hi"]), obj.get("kind", CLOSED))


#: The canonical empty interval (lo > hi).
EMPTY_INTERVAL = Interval(ONE, ZERO)


def closed(lo: RationalLike, hi: RationalLike) -> Interval:
    return Interval(rat(lo), rat(hi))


@dataclass(frozen=True)
class FiniteTest:
    """An ordered tuple of intervals; order is significant, empties count as slots."""

    intervals: tuple[Interval, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "intervals", tuple(self.intervals))

    def __len__(self) -> int:
        return len(self.intervals)

    def to_json(self) -> list:
        return [iv.to_json() for iv in self.intervals]


EMPTY_TEST = FiniteTest(())


def make_test(pairs: Iterable[tuple[RationalLike, RationalLike]]) -> FiniteTest:
    """Build a test of closed intervals from (lo, hi) pairs."""
    return FiniteTest(tuple(closed(lo, hi) for lo, hi in pairs))


@dataclass(frozen=True)
class StepFunction:
    """An exact piecewise-constant function on [0, 1].

    ``breakpoints`` is strictly increasing with first 0 and last 1; the
    function takes ``segment_values[i]`` on the open segment between
    breakpoints ``i`` and ``i+1``, and ``point_values[i]`` at breakpoint
    ``i``.  Point values carry no measure.
    """

    breakpoints: tuple[Fraction, ...]
    segment_values: tuple[int, ...]
    point_values: tuple[int, ...]

    def __post_init__(self) -> None:
        bps = self.breakpoints
        if len(bps) < 2 or bps[0] != ZERO or bps[-1] != ONE:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(self.segment_values) != len(bps) - 1:
            raise ValueError("need one segment value per open segment")
        if len(self.point_values) != len(bps):
            raise ValueError("need one point value per breakpoint")

    def __call__(self, x: RationalLike) -> int:
        x = rat(x)
        if x < ZERO or x > ONE:
            raise DomainError(f"{x} outside [0, 1]")
        idx = bisect_right(self.breakpoints, x) - 1
        if self.breakpoints[idx] == x:
            return self.point_values[idx]
        return self.segment_values[idx]

    def integral(self) -> Fraction:
        """Exact integral over [0, 1]; breakpoint values contribute nothing."""
        total = ZERO
        for a, b, v in zip(self.breakpoints, self.breakpoints[1:], self.segment_values):
            if v:
                total += (b - a) * v
        return total


def covering_function(test: FiniteTest) -> StepFunction:
    """The step function counting how many intervals of ``test`` contain each point.

    Closed/half-open membership is taken literally, so endpoint counts are
    exact.  Nonempty intervals must lie within [0, 1].
    """
    live = []
    points = {ZERO, ONE}
    for iv in test.intervals:
        if iv.is_empty:
            continue
        if iv.lo < ZERO or iv.hi > ONE:
            raise DomainError(f"interval [{iv.lo}, {iv.hi}] has an endpoint outside [0, 1]")
        live.append(iv)
        points.add(iv.lo)
        points.add(iv.hi)
    bps = tuple(sorted(points))
    point_values = tuple(sum(1 for iv in live if iv.contains(b)) for b in bps)
    seg_values = []
    for a, b in zip(bps, bps[1:]):
        mid = (a + b) / 2
        seg_values.append(sum(1 for iv in live if iv.contains(mid)))
    return StepFunction(bps, tuple(seg_values), point_values)


def test_measure(test: FiniteTest) -> Fraction:
    """Sum of interval lengths (order and multiplicity included)."""
    total = ZERO
    for iv in test.intervals:
        if iv.hi > iv.lo:
            total += iv.hi - iv.lo
    return total


def measure_via_integral(test: FiniteTest) -> Fraction:
    """The measure of ``test`` recomputed by integrating its covering function."""
    return covering_function(test).integral()


def merge_intervals(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    """Canonical disjoint decomposition of a union of closed intervals.

    Touching components merge (closed sets sharing an endpoint form one
    component); degenerate points survive as ``[q, q]`` components.
    """
    live = sorted(
        ((iv.lo, iv.hi) for iv in intervals if not iv.is_empty),
        key=lambda p: (p[0], p[1]),
    )
    out: list[tuple[Fraction, Fraction]] = []
    for lo, hi in live:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return tuple(Interval(lo, hi) for lo, hi in out)


def union_measure(intervals: Iterable[Interval]) -> Fraction:
    """Lebesgue measure of the union, by an endpoint sweep."""
    total = ZERO
    for comp in merge_intervals(intervals):
        total += comp.hi - comp.lo
    return total


def decomposition_contains(
    inner: Sequence[Interval], outer: Sequence[Interval]
) -> bool:
    """Whether every component of ``inner`` lies inside some component of ``outer``.

    Both arguments must be disjoint sorted decompositions as produced by
    ``merge_intervals``.
    """
    los = [c.lo for c in outer]
    for comp in inner:
        idx = bisect_right(los, comp.lo) - 1
        if idx < 0 or comp.hi > outer[idx].hi:
            return False
    return True


def decomposition_covers_point(components: Sequence[Interval], x: Fraction) -> bool:
    """Membership of ``x`` in a disjoint sorted decomposition, by bisection."""
    idx = bisect_right([c.lo for c in components], x) - 1
    return idx >= 0 and x <= components[idx].hi


def midpoints(points: Sequence[Fraction]) -> list[Fraction]:
    """Midpoints of consecutive distinct values in a sorted sequence."""
    return [(a + b) / 2 for a, b in zip(points, points[1:]) if a < b]
