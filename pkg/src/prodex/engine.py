"""Certified expectation engine.

`expect` encloses E_mu[f] for a product or hybrid measure in an exact
rational interval.  Two routes:

* exact oracles for the discounted-sum and product-indicator families,
  evaluating tail contributions in closed form (width 0 or below 1e-12);
* generic best-first refinement of the prefix tree, each node scored by
  (cylinder measure x oscillation bound) and leaves pruned as soon as
  their enclosure width hits zero.  Dirac coordinates are substituted,
  never branched, so hybrid measures keep the tree narrow past the
  switch index.

Accumulation is exact (Fractions), so results are independent of
evaluation order and identical across thread counts.  Results carry a
residual probability `eta`, nonzero only when an indicator verdict
rests on the unrealized tail of a lazily sampled point.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import UnsupportedTailError, ValidationError
from .functions import (
    DEFAULT_HORIZON,
    DiscountedSum,
    ProductIndicator,
    TailFunction,
    ValueBounds,
)
from .model import (
    DiracAssignment,
    HybridMeasure,
    LazyPoint,
    MeasureAssignment,
    ProductMeasure,
    _root_of,
)
from .numeric import F0, F1, Interval, Rational, as_fraction

Measure = Union[ProductMeasure, HybridMeasure]

CERTIFIED = "certified"
BUDGET_EXHAUSTED = "budget_exhausted"

DEFAULT_NODE_BUDGET = 200_000
DEFAULT_ETA_TARGET = Fraction(1, 10**6)


@dataclass(frozen=True)
class ExpectationResult:
    """Certified enclosure of an expectation."""

    interval: Interval
    nodes_expanded: int
    status: str
    eta: Fraction = F0
    oracle_used: bool = False

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    @property
    def midpoint(self) -> Fraction:
        return self.interval.midpoint

    @property
    def width(self) -> Fraction:
        return self.interval.width


def osc_bound(f: TailFunction, prefix) -> Fraction:
    """Sound upper bound on sup f - inf f over the cylinder of `prefix`."""
    return f.bounds_over(tuple(prefix)).width


def _switch_index(mu: Measure) -> Optional[int]:
    return mu.switch_index if isinstance(mu, HybridMeasure) else None


def _assignment(mu: Measure, i: int):
    if isinstance(mu, HybridMeasure):
        return mu.assignment_at(i)
    return MeasureAssignment(mu.coordinate_measure(i))


def _indicator_horizon(f: ProductIndicator, point, explicit: Optional[int],
                       eta_target: Fraction) -> int:
    """Realization depth for indicator verdicts on a lazy point."""
    if explicit is not None:
        return explicit
    root, depth = _root_of(point)
    if not isinstance(root, LazyPoint):
        return DEFAULT_HORIZON
    measure = root.measure
    targets = f.targets_stream()
    try:
        needed = measure.tail.horizon_for_disagreement(
            targets, eta_target, measure.head_len)
    except UnsupportedTailError:
        needed = None
    return max(DEFAULT_HORIZON, depth, measure.head_len,
               targets.start - 1, needed or 0)


def exact_expectation_product_indicator(
        f: ProductIndicator, mu: Measure, horizon: Optional[int] = None,
        eta_target: Rational = DEFAULT_ETA_TARGET) -> ValueBounds:
    """Closed-form E_mu[f] for a product indicator.

    Every coordinate contributes its weight on the target symbol (Dirac
    coordinates contribute exactly 0 or 1); the infinite tail product is
    evaluated in closed form or enclosed to width below 1e-12.  Raises
    UnsupportedTailError when the measure tail rule has no closed form.
    """
    if not isinstance(f, ProductIndicator):
        raise ValidationError("exact indicator oracle needs a ProductIndicator")
    eta_target = as_fraction(eta_target)
    targets = f.targets_stream()

    if isinstance(mu, HybridMeasure):
        product = F1
        for i in range(1, mu.switch_index):
            a = mu.assignment_at(i)
            if isinstance(a, DiracAssignment):
                if a.point.coordinate(i) != f.target_at(i):
                    return ValueBounds.point(0)
            else:
                product *= a.measure.weight_of(f.target_at(i))
                if product == 0:
                    return ValueBounds.point(0)
        h = _indicator_horizon(f, mu.tail_point, horizon, eta_target)
        matched, eta = f._tail_match(mu.tail_point, mu.switch_index, h)
        if not matched:
            return ValueBounds.point(0)
        return ValueBounds(product, product, eta)

    boundary = max(mu.head_len, targets.start - 1)
    product = F1
    for i in range(1, boundary + 1):
        product *= mu.coordinate_measure(i).weight_of(f.target_at(i))
        if product == 0:
            return ValueBounds.point(0)
    tail = mu.tail.indicator_tail_product(targets, boundary, mu.head_len)
    return ValueBounds(product * tail.lo, product * tail.hi)


def _discounted_oracle(f: DiscountedSum, mu: Measure,
                       horizon: Optional[int]) -> ValueBounds:
    """E_mu[f] = sum_i w_i E_i[score], coordinate by coordinate."""
    h = DEFAULT_HORIZON if horizon is None else horizon
    if isinstance(mu, HybridMeasure):
        head = F0
        for i in range(1, mu.switch_index):
            a = mu.assignment_at(i)
            w = f.weights.weight_at(i)
            if isinstance(a, DiracAssignment):
                head += w * f.score_of(a.point.coordinate(i))
            else:
                head += w * a.measure.mean_score(f.score_of)
        # family logic handles the pinned tail; strip its free-window spread
        vb = f.bounds_over((), rest=mu.tail_point, rest_from=mu.switch_index,
                           horizon=h)
        window = f.weights.tail_sum(0) - f.weights.tail_sum(mu.switch_index - 1)
        return ValueBounds(head + vb.lo - window * f.score_min,
                           head + vb.hi - window * f.score_max)
    head = F0
    for i in range(1, mu.head_len + 1):
        head += f.weights.weight_at(i) * mu.coordinate_measure(i).mean_score(f.score_of)
    probe = mu.head_len + 1
    tail = mu.tail.mean_tail_sum(
        f.weights.coef, f.weights.ratio, f.score_of, mu.head_len,
        mu.head_len, mu.spaces.space_at(probe))
    return ValueBounds(head + tail.lo, head + tail.hi)


def _try_oracle(f: TailFunction, mu: Measure, horizon: Optional[int],
                eta_target: Fraction) -> Optional[ValueBounds]:
    try:
        if isinstance(f, ProductIndicator):
            return exact_expectation_product_indicator(f, mu, horizon, eta_target)
        if isinstance(f, DiscountedSum):
            return _discounted_oracle(f, mu, horizon)
    except UnsupportedTailError:
        return None
    return None


def expect(f: TailFunction, mu: Measure, tol: Rational = Fraction(1, 10**9),
           node_budget: int = DEFAULT_NODE_BUDGET, use_oracle: bool = True,
           horizon: Optional[int] = None,
           eta_target: Rational = DEFAULT_ETA_TARGET) -> ExpectationResult:
    """Certified enclosure of E_mu[f] of width at most 2*tol.

    Returns status `budget_exhausted` (with a still-sound interval) when
    the node budget runs out, or when the best achievable enclosure at
    the realization horizon is wider than 2*tol.
    """
    tol = as_fraction(tol)
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if node_budget < 1:
        raise ValidationError("node budget must be positive")
    eta_target = as_fraction(eta_target)

    if use_oracle:
        vb = _try_oracle(f, mu, horizon, eta_target)
        if vb is not None:
            status = CERTIFIED if vb.width <= 2 * tol else BUDGET_EXHAUSTED
            return ExpectationResult(vb.interval, 0, status, vb.eta, True)

    switch = _switch_index(mu)
    h = horizon if horizon is not None else DEFAULT_HORIZON
    if isinstance(f, ProductIndicator) and isinstance(mu, HybridMeasure):
        h = _indicator_horizon(f, mu.tail_point, horizon, eta_target)

    settled_lo = settled_hi = settled_eta = F0
    frontier_lo = frontier_hi = F0
    heap = []

    def place(prefix: tuple, rank: tuple, weight: Fraction):
        nonlocal settled_lo, settled_hi, settled_eta, frontier_lo, frontier_hi
        nxt = len(prefix) + 1
        if switch is not None and nxt >= switch:
            vb = f.bounds_over(prefix, rest=mu.tail_point, rest_from=nxt,
                               horizon=h)
            settled_lo += weight * vb.lo
            settled_hi += weight * vb.hi
            settled_eta += weight * vb.eta
            return
        vb = f.bounds_over(prefix)
        if vb.width == 0:
            settled_lo += weight * vb.lo
            settled_hi += weight * vb.hi
            settled_eta += weight * vb.eta
            return
        frontier_lo += weight * vb.lo
        frontier_hi += weight * vb.hi
        heapq.heappush(heap, (-(weight * vb.width), rank, prefix, weight, vb))

    place((), (), F1)
    nodes = 0
    status = CERTIFIED

    def total_width() -> Fraction:
        return (settled_hi + frontier_hi) - (settled_lo + frontier_lo)

    while heap and total_width() > 2 * tol:
        if nodes >= node_budget:
            status = BUDGET_EXHAUSTED
            break
        _, rank, prefix, weight, vb = heapq.heappop(heap)
        frontier_lo -= weight * vb.lo
        frontier_hi -= weight * vb.hi
        nodes += 1
        i = len(prefix) + 1
        a = _assignment(mu, i)
        if isinstance(a, DiracAssignment):
            sym = a.point.coordinate(i)
            place(prefix + (sym,), rank + (0,), weight)
        else:
            for pos, (sym, w) in enumerate(a.measure.items()):
                if w == 0:
                    continue
                place(prefix + (sym,), rank + (pos,), weight * w)

    if not heap and total_width() > 2 * tol:
        status = BUDGET_EXHAUSTED
    interval = Interval(settled_lo + frontier_lo, settled_hi + frontier_hi)
    return ExpectationResult(interval, nodes, status, settled_eta, False)
