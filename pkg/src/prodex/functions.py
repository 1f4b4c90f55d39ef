"""Bounded tail-structured functions on the product space.

Three families are provided, each exposing `bounds_over`: a certified
enclosure of the function over a constrained set of points.  The same
method serves point evaluation (everything pinned), cylinder oscillation
(prefix pinned, rest free) and mixed queries used by the hull search
(prefix pinned, a window free, a base point beyond).

Enclosures are exact rationals.  The only soft verdicts come from the
all-or-nothing indicator family on lazily sampled points: agreement of
the unrealized tail cannot be decided from a prefix, so the verdict
"value 1" carries a residual probability bound eta for the event that an
unrealized coordinate misses its target.  All other enclosures, and all
mismatch verdicts, are hard (eta = 0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import ValidationError
from .model import (
    LazyPoint,
    PeriodicStream,
    PointSpec,
    SpaceFamily,
    SymbolRule,
    _root_of,
    streams_eventually_equal,
)
from .numeric import F0, F1, Interval, Rational, as_fraction

#: default bound on how deep a lazily sampled point may be realized
DEFAULT_HORIZON = 64


@dataclass(frozen=True)
class ValueBounds:
    """Enclosure [lo, hi] of function values, with residual risk eta.

    eta > 0 marks a soft verdict: the enclosure holds unless an event of
    probability at most eta occurs in the unrealized tail of a lazily
    sampled point.
    """

    lo: Fraction
    hi: Fraction
    eta: Fraction = F0

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValidationError(f"invalid bounds [{self.lo}, {self.hi}]")
        if self.eta < 0:
            raise ValidationError("eta must be nonnegative")

    @classmethod
    def point(cls, value: Rational, eta: Rational = 0) -> "ValueBounds":
        v = as_fraction(value)
        return cls(v, v, as_fraction(eta))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


def _read_limit(rest: PointSpec, horizon: int) -> Optional[int]:
    """Largest index that may be read from `rest`; None means unlimited.

    Reading a described or finitely modified point is a rule lookup and
    costs nothing; realizing a lazily sampled point is capped by the
    horizon (modified coordinates above it are already known, so the cap
    is raised to cover them).
    """
    root, depth = _root_of(rest)
    if isinstance(root, LazyPoint):
        return max(horizon, depth)
    return None


class TailFunction:
    """A bounded function with certified cylinder enclosures."""

    family = "abstract"
    has_exact_oracle = False

    range_lo: Fraction
    range_hi: Fraction

    def bounds_over(self, prefix: tuple, rest: Optional[PointSpec] = None,
                    rest_from: Optional[int] = None,
                    horizon: int = DEFAULT_HORIZON) -> ValueBounds:
        """Enclosure of f over points with coordinates 1..len(prefix)
        equal to prefix, coordinates >= rest_from equal to rest, and the
        window in between (all of the tail, when rest is None) free."""
        raise NotImplementedError

    def eval_soft(self, x: PointSpec, horizon: int = DEFAULT_HORIZON) -> ValueBounds:
        """Value of f at x, soft verdicts allowed (see module docstring)."""
        return self.bounds_over((), rest=x, rest_from=1, horizon=horizon)


def eval_function(f: TailFunction, x: PointSpec,
                  horizon: int = DEFAULT_HORIZON) -> ValueBounds:
    """Value of f at x from its first `horizon` coordinates, hard bounds.

    Returns a width-0 enclosure when the inspected prefix (plus any
    finite tail description) determines the value; otherwise the
    tightest hard interval.  Soft indicator verdicts are widened to the
    range, since the unrealized tail could break them.
    """
    vb = f.eval_soft(x, horizon=horizon)
    if vb.eta > 0:
        return ValueBounds(f.range_lo, f.range_hi)
    return vb


def _resolve_range(explicit, derived_lo: Fraction, derived_hi: Fraction):
    if explicit is None:
        return derived_lo, derived_hi
    lo, hi = as_fraction(explicit[0]), as_fraction(explicit[1])
    if lo > hi:
        raise ValidationError(f"range lower bound {lo} exceeds upper bound {hi}")
    if lo > derived_lo or hi < derived_hi:
        raise ValidationError(
            f"declared range [{float(lo)}, {float(hi)}] does not bound the "
            f"function (needs [{float(derived_lo)}, {float(derived_hi)}])"
        )
    return lo, hi


# ---------------------------------------------------------------------------
# Cylinder functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cylinder(TailFunction):
    """Function of the first `depth` coordinates, given by a value table."""

    depth: int
    table: Mapping[tuple, Fraction]
    range_lo: Fraction = None
    range_hi: Fraction = None

    family = "cylinder"
    has_exact_oracle = False

    def __post_init__(self):
        if self.depth < 0:
            raise ValidationError("cylinder depth must be >= 0")
        if not self.table:
            raise ValidationError("cylinder table must be nonempty")
        for key in self.table:
            if len(key) != self.depth:
                raise ValidationError(
                    f"cylinder table key {key!r} has length {len(key)}, "
                    f"expected {self.depth}"
                )
        values = list(self.table.values())
        lo, hi = _resolve_range(
            None if self.range_lo is None else (self.range_lo, self.range_hi),
            min(values), max(values))
        object.__setattr__(self, "range_lo", lo)
        object.__setattr__(self, "range_hi", hi)

    @classmethod
    def from_entries(cls, depth: int, entries, value_range=None) -> "Cylinder":
        table = {tuple(k): as_fraction(v) for k, v in entries}
        lo, hi = (None, None) if value_range is None else value_range
        return cls(depth, table,
                   None if lo is None else as_fraction(lo),
                   None if hi is None else as_fraction(hi))

    @classmethod
    def from_callable(cls, symbols_per_coordinate: Sequence[Sequence],
                      fn, value_range=None) -> "Cylinder":
        depth = len(symbols_per_coordinate)
        entries = [
            (combo, fn(*combo))
            for combo in itertools.product(*symbols_per_coordinate)
        ]
        return cls.from_entries(depth, entries, value_range)

    def value_at_prefix(self, prefix: tuple) -> Fraction:
        key = tuple(prefix[:self.depth])
        try:
            return self.table[key]
        except KeyError:
            raise ValidationError(f"prefix {key!r} not covered by cylinder table")

    def bounds_over(self, prefix, rest=None, rest_from=None,
                    horizon=DEFAULT_HORIZON) -> ValueBounds:
        m = len(prefix)
        if m >= self.depth:
            return ValueBounds.point(self.value_at_prefix(prefix))
        pinned = {}
        if rest is not None:
            start = m + 1 if rest_from is None else rest_from
            limit = _read_limit(rest, horizon)
            for i in range(max(start, m + 1), self.depth + 1):
                if limit is None or i <= limit:
                    pinned[i] = rest.coordinate(i)
        lo = hi = None
        for key, value in self.table.items():
            if tuple(key[:m]) != tuple(prefix):
                continue
            if any(key[i - 1] != sym for i, sym in pinned.items()):
                continue
            if lo is None or value < lo:
                lo = value
            if hi is None or value > hi:
                hi = value
        if lo is None:
            raise ValidationError(
                f"no cylinder table entry is consistent with prefix {prefix!r}"
            )
        return ValueBounds(lo, hi)


def cylinder_sum(f: Cylinder, g: Cylinder) -> Cylinder:
    """Pointwise sum of two cylinder functions of equal depth."""
    if f.depth != g.depth:
        raise ValidationError("cylinder sum requires equal depths")
    if set(f.table) != set(g.table):
        raise ValidationError("cylinder sum requires identical prefix domains")
    return Cylinder(f.depth, {k: f.table[k] + g.table[k] for k in f.table})


# ---------------------------------------------------------------------------
# Discounted sums
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeometricWeights:
    """Summable weight sequence w_i = coef * ratio**i, 0 < ratio < 1."""

    coef: Fraction
    ratio: Fraction

    def __post_init__(self):
        if not (0 < self.ratio < 1):
            raise ValidationError("weight ratio must lie strictly between 0 and 1")
        if self.coef <= 0:
            raise ValidationError("weight coefficient must be positive")

    @classmethod
    def of(cls, coef: Rational, ratio: Rational) -> "GeometricWeights":
        return cls(as_fraction(coef), as_fraction(ratio))

    def weight_at(self, i: int) -> Fraction:
        return self.coef * self.ratio**i

    def tail_sum(self, m: int) -> Fraction:
        """sum_{i > m} w_i, exact."""
        return self.coef * self.ratio**(m + 1) / (1 - self.ratio)

    def periodic_tail_sum(self, first: int, period: int) -> Fraction:
        """sum_{t >= 0} w_{first + t*period}, exact."""
        return self.coef * self.ratio**first / (1 - self.ratio**period)


@dataclass(frozen=True, eq=False)
class DiscountedSum(TailFunction):
    """f(x) = sum_i w_i * score(x_i) with geometric weights."""

    weights: GeometricWeights
    scores: Mapping
    range_lo: Fraction = None
    range_hi: Fraction = None

    family = "discounted_sum"
    has_exact_oracle = True

    def __post_init__(self):
        if not self.scores:
            raise ValidationError("discounted sum needs at least one scored symbol")
        object.__setattr__(
            self, "scores", {s: as_fraction(v) for s, v in self.scores.items()})
        total = self.weights.tail_sum(0)
        lo, hi = _resolve_range(
            None if self.range_lo is None else (self.range_lo, self.range_hi),
            total * self.score_min, total * self.score_max)
        object.__setattr__(self, "range_lo", lo)
        object.__setattr__(self, "range_hi", hi)

    @property
    def score_min(self) -> Fraction:
        return min(self.scores.values())

    @property
    def score_max(self) -> Fraction:
        return max(self.scores.values())

    def score_of(self, symbol) -> Fraction:
        try:
            return self.scores[symbol]
        except KeyError:
            raise ValidationError(f"symbol {symbol!r} has no score")

    def _spread(self, mass: Fraction):
        return mass * self.score_min, mass * self.score_max

    def bounds_over(self, prefix, rest=None, rest_from=None,
                    horizon=DEFAULT_HORIZON) -> ValueBounds:
        lo = hi = sum(
            (self.weights.weight_at(i) * self.score_of(s)
             for i, s in enumerate(prefix, start=1)), F0)
        m = len(prefix)
        if rest is None:
            dlo, dhi = self._spread(self.weights.tail_sum(m))
            return ValueBounds(lo + dlo, hi + dhi)
        start = m + 1 if rest_from is None else max(rest_from, m + 1)
        # free window between the prefix and the pinned rest
        window_mass = self.weights.tail_sum(m) - self.weights.tail_sum(start - 1)
        wlo, whi = self._spread(window_mass)
        lo, hi = lo + wlo, hi + whi
        # pinned rest: explicit reads up to K, closed form or spread beyond
        stream = rest.eventual_stream()
        limit = _read_limit(rest, horizon)
        if stream is not None:
            k = max(start - 1, stream.start - 1)
            exact = sum(
                (self.weights.weight_at(i) * self.score_of(rest.coordinate(i))
                 for i in range(start, k + 1)), F0)
            period = len(stream.symbols)
            for off in range(period):
                first = k + 1 + off
                exact += (self.score_of(stream.symbol_at(first))
                          * self.weights.periodic_tail_sum(first, period))
            return ValueBounds(lo + exact, hi + exact)
        k = max(start - 1, limit)
        exact = sum(
            (self.weights.weight_at(i) * self.score_of(rest.coordinate(i))
             for i in range(start, k + 1)), F0)
        dlo, dhi = self._spread(self.weights.tail_sum(k))
        return ValueBounds(lo + exact + dlo, hi + exact + dhi)


# ---------------------------------------------------------------------------
# Product indicators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProductIndicator(TailFunction):
    """f(x) = 1 when every coordinate hits its target symbol, else 0."""

    spaces: SpaceFamily
    targets_head: tuple
    targets_tail: SymbolRule

    family = "product_indicator"
    has_exact_oracle = True
    range_lo = F0
    range_hi = F1

    def __post_init__(self):
        for i, sym in enumerate(self.targets_head, start=1):
            if sym not in self.spaces.space_at(i):
                raise ValidationError(
                    f"target head[{i - 1}]: symbol {sym!r} not in coordinate {i}"
                )
        stream = self.targets_stream()
        for off, sym in enumerate(stream.symbols):
            if sym not in self.spaces.space_at(stream.start + off):
                raise ValidationError(
                    f"target tail: symbol {sym!r} not in coordinate "
                    f"{stream.start + off}"
                )

    def target_at(self, i: int):
        if i <= len(self.targets_head):
            return self.targets_head[i - 1]
        return self.targets_tail.symbol_at(i, len(self.targets_head))

    def targets_stream(self) -> PeriodicStream:
        return self.targets_tail.stream(len(self.targets_head))

    def _tail_match(self, rest: PointSpec, start: int, horizon: int):
        """Do coordinates >= start of rest all hit their targets?

        Returns (verdict, eta): verdict False is hard; verdict True
        carries the residual bound for unrealized lazy coordinates.
        """
        stream = rest.eventual_stream()
        targets = self.targets_stream()
        if stream is not None:
            k = max(start - 1, stream.start - 1, targets.start - 1)
            for i in range(start, k + 1):
                if rest.coordinate(i) != self.target_at(i):
                    return False, F0
            return streams_eventually_equal(stream, targets), F0
        root, depth = _root_of(rest)
        measure = root.measure
        k = max(start - 1, horizon, depth, targets.start - 1)
        for i in range(start, k + 1):
            if rest.coordinate(i) != self.target_at(i):
                return False, F0
        eta = F0
        boundary = max(k, measure.head_len)
        for i in range(k + 1, boundary + 1):
            eta += 1 - measure.coordinate_measure(i).weight_of(self.target_at(i))
        eta += measure.tail.disagreement_bound(targets, boundary, measure.head_len)
        return True, min(eta, F1)

    def bounds_over(self, prefix, rest=None, rest_from=None,
                    horizon=DEFAULT_HORIZON) -> ValueBounds:
        m = len(prefix)
        for i, sym in enumerate(prefix, start=1):
            if sym != self.target_at(i):
                return ValueBounds.point(0)
        if rest is None:
            deviation = self.spaces.any_alternatives_beyond(m)
            return ValueBounds(F0 if deviation else F1, F1)
        start = m + 1 if rest_from is None else max(rest_from, m + 1)
        free_deviation = any(
            self.spaces.space_at(i).size >= 2 for i in range(m + 1, start))
        matched, eta = self._tail_match(rest, start, horizon)
        if not matched:
            return ValueBounds.point(0)
        if free_deviation:
            return ValueBounds(F0, F1)
        return ValueBounds(F1, F1, eta)
