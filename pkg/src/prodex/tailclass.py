"""Tail-equivalence machinery: hulls, class certification, mixing certificates.

Changing finitely many coordinates of a point keeps it in the same tail
class, so the span of f over depth-m modifications is an inner estimate
of the class hull.  When that span straddles a target value r, walking
from the low witness to the high witness one coordinate at a time must
cross r between two adjacent points that differ in a single coordinate;
mixing those two symbols with the right weight hits r exactly.  This is
the constructive content behind `construct_weak_zero`: the certificate
it returns realizes E[f] with a measure that randomizes in exactly one
coordinate and is Dirac everywhere else.

Certification is one-sided by design: a hull that straddles r certifies
membership, but no finite search can rule r out of the full hull over
unbounded-depth modifications, so the negative direction is reported as
undetermined rather than certified.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .engine import DEFAULT_NODE_BUDGET, expect
from .errors import (
    NotStraddlingError,
    StraddleNotFoundError,
    ValidationError,
)
from .functions import DEFAULT_HORIZON, TailFunction, ValueBounds
from .model import (
    CoordinateMeasure,
    LazyPoint,
    PointSpec,
    ProductMeasure,
    SpaceFamily,
    agreement_index,
    modify_point,
    splice_prefix,
)
from .numeric import DETERMINED_WIDTH, F0, F1, Rational, as_fraction
from .seeds import derive_seed

DEFAULT_ENUMERATION_BUDGET = 2**20
DEFAULT_RETRIES = 8

Z0_CERTIFIED = "z0_certified"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class HullEstimate:
    """Span of f over modifications of coordinates 1..depth of a base point.

    `exhaustive` runs report the exact span; budget-exceeded runs fall
    back to bound-guided coordinate search and report achieved (inner)
    endpoints.  Both endpoints are witnessed by concrete points.
    """

    depth: int
    lo: Fraction
    hi: Fraction
    witness_min: PointSpec
    witness_max: PointSpec
    exhaustive: bool
    eta: Fraction = F0

    def contains(self, value: Rational) -> bool:
        v = as_fraction(value)
        return self.lo <= v <= self.hi


@dataclass(frozen=True)
class ClassVerdict:
    verdict: str
    depth: int
    reference: Fraction
    hull: HullEstimate

    @property
    def certified(self) -> bool:
        return self.verdict == Z0_CERTIFIED


@dataclass(frozen=True, eq=False)
class WeakApproxCertificate:
    """Single-coordinate mixing certificate achieving the value r.

    The measure that is Dirac on `point` everywhere except coordinate
    `coordinate`, where it mixes symbol_low (weight alpha) with
    symbol_high (weight 1 - alpha), has expectation exactly `achieved`.
    """

    point: PointSpec
    coordinate: int
    alpha: Fraction
    tau: CoordinateMeasure
    achieved: Fraction
    symbol_low: object
    symbol_high: object
    value_low: Fraction
    value_high: Fraction
    eta: Fraction = F0

    def __post_init__(self):
        if not (0 <= self.alpha <= 1):
            raise ValidationError(f"mixing weight {self.alpha} outside [0, 1]")

    def mixed_value(self, f: TailFunction,
                    horizon: int = DEFAULT_HORIZON) -> Fraction:
        """Re-evaluate alpha*f(z_low) + (1-alpha)*f(z_high) directly."""
        low = _determined_value(f, self.point, horizon)
        high_point = modify_point(self.point, {self.coordinate: self.symbol_high})
        high = _determined_value(f, high_point, horizon)
        return self.alpha * low.midpoint + (1 - self.alpha) * high.midpoint


def _determined_value(f: TailFunction, x: PointSpec,
                      horizon: int) -> ValueBounds:
    vb = f.eval_soft(x, horizon=horizon)
    if vb.width > DETERMINED_WIDTH:
        raise ValidationError(
            f"function value not determinable at horizon {horizon} "
            f"(enclosure width {float(vb.width)})"
        )
    return vb


def hull_estimate(f: TailFunction, x: PointSpec, m: int, spaces: SpaceFamily,
                  enumeration_budget: int = DEFAULT_ENUMERATION_BUDGET,
                  horizon: int = DEFAULT_HORIZON) -> HullEstimate:
    """Span of f over all modifications of coordinates 1..m of x.

    Exhaustive enumeration while the modification count fits the budget;
    beyond it, a bound-guided per-coordinate search (exact for the
    built-in families, whose cylinder bounds are attained).
    """
    if m < 0:
        raise ValidationError("hull depth must be >= 0")
    base = _determined_value(f, x, horizon)
    if m == 0:
        return HullEstimate(0, base.midpoint, base.midpoint, x, x, True, base.eta)

    symbol_lists = [spaces.space_at(i).symbols for i in range(1, m + 1)]
    count = 1
    for syms in symbol_lists:
        count *= len(syms)

    if count <= enumeration_budget:
        lo = hi = None
        wmin = wmax = None
        eta = F0
        for combo in itertools.product(*symbol_lists):
            pt = modify_point(x, dict(enumerate(combo, start=1)))
            vb = _determined_value(f, pt, horizon)
            eta = max(eta, vb.eta)
            v = vb.midpoint
            if lo is None or v < lo:
                lo, wmin = v, pt
            if hi is None or v > hi:
                hi, wmax = v, pt
        return HullEstimate(m, lo, hi, wmin, wmax, True, eta)

    wmin, vmin, eta_min = _guided_witness(f, x, m, spaces, horizon, maximize=False)
    wmax, vmax, eta_max = _guided_witness(f, x, m, spaces, horizon, maximize=True)
    return HullEstimate(m, vmin, vmax, wmin, wmax, False, max(eta_min, eta_max))


def _guided_witness(f: TailFunction, x: PointSpec, m: int, spaces: SpaceFamily,
                    horizon: int, maximize: bool):
    """Build a witness coordinate by coordinate, following cylinder bounds.

    At coordinate i the symbol optimizing the enclosure of f over
    (chosen prefix, free window to m, base point beyond) is kept; ties
    prefer the base point's own symbol, then space order.
    """
    prefix = []
    for i in range(1, m + 1):
        own = x.coordinate(i)
        symbols = [own] + [s for s in spaces.space_at(i).symbols if s != own]
        best_sym, best_score = None, None
        for s in symbols:
            vb = f.bounds_over(tuple(prefix) + (s,), rest=x, rest_from=m + 1,
                               horizon=horizon)
            score = vb.hi if maximize else -vb.lo
            if best_score is None or score > best_score:
                best_sym, best_score = s, score
        prefix.append(best_sym)
    witness = modify_point(x, dict(enumerate(prefix, start=1)))
    vb = _determined_value(f, witness, horizon)
    return witness, vb.midpoint, vb.eta


def classify(f: TailFunction, sigma: ProductMeasure, x: PointSpec, r: Rational,
             m: int, enumeration_budget: int = DEFAULT_ENUMERATION_BUDGET,
             horizon: int = DEFAULT_HORIZON) -> ClassVerdict:
    """Certify r inside the depth-m modification hull of x, if it is.

    Finite modifications never leave the tail class of x, so a hull
    containing r soundly certifies class membership of r's level.  The
    converse cannot be decided at finite depth: everything else is
    reported undetermined (never a negative certificate).
    """
    rv = as_fraction(r)
    hull = hull_estimate(f, x, m, sigma.spaces, enumeration_budget, horizon)
    verdict = Z0_CERTIFIED if hull.contains(rv) else UNDETERMINED
    return ClassVerdict(verdict, m, rv, hull)


def construct_weak_zero(f: TailFunction, sigma: ProductMeasure, x: PointSpec,
                        y: PointSpec, r: Rational,
                        horizon: int = DEFAULT_HORIZON) -> WeakApproxCertificate:
    """Single-coordinate mixing certificate from a straddling pair.

    Requires f(x) <= r <= f(y) and tail-equivalent x, y.  Walks the
    chain z_k = (y_1, .., y_{k-1}, x_k, x_{k+1}, ..) from z_1 = x to
    z_{n+1} = y, finds the first adjacent pair straddling r (they differ
    in exactly coordinate k) and solves the mixing weight exactly.
    """
    rv = as_fraction(r)
    n = agreement_index(x, y)
    values = []
    points = []
    eta = F0
    for k in range(1, n + 2):
        zk = splice_prefix(x, y, k)
        vb = _determined_value(f, zk, horizon)
        points.append(zk)
        values.append(vb.midpoint)
        eta = max(eta, vb.eta)
    fx, fy = values[0], values[-1]
    if not fx <= rv <= fy:
        raise NotStraddlingError(
            f"f(x) = {float(fx)}, f(y) = {float(fy)} do not straddle r = {float(rv)}"
        )
    # adjacent intervals share endpoints, so their union is one interval
    # that must cover [f(x), f(y)]; checked on every run
    union_lo, union_hi = min(values), max(values)
    if union_lo > fx or union_hi < fy:
        raise ValidationError("z-walk intervals fail to cover [f(x), f(y)]")

    if n == 0:
        k, v_low, v_high = 1, fx, fx
        sym_low = sym_high = x.coordinate(1)
    else:
        k = None
        for j in range(n):
            lo, hi = min(values[j], values[j + 1]), max(values[j], values[j + 1])
            if lo <= rv <= hi:
                k = j + 1
                break
        if k is None:  # unreachable given the covering check
            raise NotStraddlingError("no adjacent pair straddles r")
        v_low, v_high = values[k - 1], values[k]
        sym_low, sym_high = x.coordinate(k), y.coordinate(k)

    if v_high == v_low:
        alpha = F1
    else:
        alpha = (v_high - rv) / (v_high - v_low)
    achieved = alpha * v_low + (1 - alpha) * v_high
    if achieved != rv:
        raise ValidationError("mixing weight failed to reproduce r exactly")

    space = sigma.spaces.space_at(k)
    weights = []
    for s in space.symbols:
        w = F0
        if s == sym_low:
            w += alpha
        if s == sym_high:
            w += 1 - alpha
        weights.append(w)
    tau = CoordinateMeasure(k, space.symbols, tuple(weights))
    return WeakApproxCertificate(
        point=points[k - 1], coordinate=k, alpha=alpha, tau=tau,
        achieved=achieved, symbol_low=sym_low, symbol_high=sym_high,
        value_low=v_low, value_high=v_high, eta=eta)


def weak_zero_from_sample(f: TailFunction, sigma: ProductMeasure,
                          tol: Rational = Fraction(1, 10**9),
                          m: int = 1, seed: int = 0, *,
                          retries: int = DEFAULT_RETRIES,
                          enumeration_budget: int = DEFAULT_ENUMERATION_BUDGET,
                          horizon: int = DEFAULT_HORIZON,
                          node_budget: int = DEFAULT_NODE_BUDGET,
                          reference: Optional[Fraction] = None
                          ) -> WeakApproxCertificate:
    """Sample points under sigma until a depth-m hull straddles E[f].

    The target r is the midpoint of the certified enclosure of E[f]
    (the certificate then achieves r exactly and the true expectation
    within the enclosure width).  Each retry uses a fresh substream.
    """
    if m < 1:
        raise ValidationError("hull depth must be >= 1")
    if reference is None:
        result = expect(f, sigma, tol, node_budget=node_budget, horizon=horizon)
        r = result.midpoint
    else:
        r = as_fraction(reference)
    for attempt in range(retries):
        x = LazyPoint(derive_seed(seed, "weak-sample", attempt), sigma)
        hull = hull_estimate(f, x, m, sigma.spaces, enumeration_budget, horizon)
        if hull.contains(r):
            return construct_weak_zero(f, sigma, hull.witness_min,
                                       hull.witness_max, r, horizon)
    raise StraddleNotFoundError(m, retries)
