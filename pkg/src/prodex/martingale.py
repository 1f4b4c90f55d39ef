"""The reverse-martingale sequence g_n and the strong approximation finder.

g_n(x) is the expectation of f when coordinates below n keep their
original measures and coordinates from n on are pinned to x.  For n = 1
every coordinate is pinned, so g_1(x) = f(x); as n grows the sequence
converges to E[f] for almost every sampled x, and `find_strong_approx`
searches for the first n where |g_n(x) - E[f]| <= epsilon is certified.

Comparisons are decided on interval separation only: a verdict is
issued when the two enclosures admit no other answer, otherwise the
index is reported undecided.  No membership claim ever rests on
numerical slack.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .engine import (
    DEFAULT_ETA_TARGET,
    DEFAULT_NODE_BUDGET,
    ExpectationResult,
    expect,
)
from .errors import ToleranceConfigError, ValidationError
from .functions import TailFunction
from .model import HybridMeasure, PointSpec, ProductMeasure
from .numeric import F0, Interval, Rational, abs_difference, as_fraction

FOUND = "found"
NOT_FOUND = "not_found"
INCONCLUSIVE = "inconclusive"

YES = "yes"
NO = "no"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class TraceEntry:
    n: int
    interval: Interval
    eta: Fraction = F0


@dataclass(frozen=True)
class MartingaleTrace:
    """Enclosures of g_1(x) .. g_N(x) plus the reference E[f]."""

    entries: tuple
    reference: ExpectationResult

    def __post_init__(self):
        for pos, e in enumerate(self.entries, start=1):
            if e.n != pos:
                raise ValidationError("trace entries must be indexed 1..N")


@dataclass(frozen=True)
class StrongApproxResult:
    """Outcome of scanning g_1 .. g_{n_max} against |g_n - E[f]| <= epsilon.

    `found` requires every smaller index to be certified violating; if
    any smaller index was undecided the scan reports `inconclusive`
    instead (with `first_certified` as a diagnostic), so no index is
    ever silently skipped.
    """

    epsilon: Fraction
    outcome: str
    n: Optional[int]
    undecided: tuple
    n_max: int
    eta: Fraction = F0
    first_certified: Optional[int] = None
    found_value: Optional[Interval] = None

    @property
    def is_found(self) -> bool:
        return self.outcome == FOUND


def g_n(f: TailFunction, sigma: ProductMeasure, x: PointSpec, n: int,
        tol: Rational = Fraction(1, 10**9), *, node_budget: int = DEFAULT_NODE_BUDGET,
        use_oracle: bool = True, horizon: Optional[int] = None,
        eta_target: Rational = DEFAULT_ETA_TARGET) -> ExpectationResult:
    """Enclosure of g_n(x) = E[f] under sigma_1 x .. x sigma_{n-1} x x_n x ..."""
    if n < 1:
        raise ValidationError("martingale index must be >= 1")
    hybrid = HybridMeasure.measures_then_point(sigma, x, n)
    return expect(f, hybrid, tol, node_budget=node_budget, use_oracle=use_oracle,
                  horizon=horizon, eta_target=eta_target)


def trace(f: TailFunction, sigma: ProductMeasure, x: PointSpec, n_max: int,
          tol: Rational = Fraction(1, 10**9), *, node_budget: int = DEFAULT_NODE_BUDGET,
          use_oracle: bool = True, horizon: Optional[int] = None,
          eta_target: Rational = DEFAULT_ETA_TARGET) -> MartingaleTrace:
    """Trace of g_n(x) for n = 1..n_max with the reference E[f]."""
    if n_max < 1:
        raise ValidationError("trace length must be >= 1")
    entries = []
    for n in range(1, n_max + 1):
        res = g_n(f, sigma, x, n, tol, node_budget=node_budget,
                  use_oracle=use_oracle, horizon=horizon, eta_target=eta_target)
        entries.append(TraceEntry(n, res.interval, res.eta))
    reference = expect(f, sigma, tol, node_budget=node_budget,
                       use_oracle=use_oracle, horizon=horizon,
                       eta_target=eta_target)
    return MartingaleTrace(tuple(entries), reference)


def compare_to_epsilon(value: ExpectationResult, reference: ExpectationResult,
                       epsilon: Fraction) -> str:
    """Definite verdict on |value - reference| <= epsilon, if any."""
    d = abs_difference(value.interval, reference.interval)
    if d.hi <= epsilon:
        return YES
    if d.lo > epsilon:
        return NO
    return UNDECIDED


def find_strong_approx(f: TailFunction, sigma: ProductMeasure, x: PointSpec,
                       epsilon: Rational, n_max: int,
                       tol: Rational = Fraction(1, 10**9), *,
                       node_budget: int = DEFAULT_NODE_BUDGET,
                       use_oracle: bool = True, horizon: Optional[int] = None,
                       eta_target: Rational = DEFAULT_ETA_TARGET,
                       reference: Optional[ExpectationResult] = None
                       ) -> StrongApproxResult:
    """Smallest certified n <= n_max with |g_n(x) - E[f]| <= epsilon.

    `reference` may carry a precomputed enclosure of E[f] (verification
    campaigns share it across samples); when omitted it is computed here.
    """
    eps = as_fraction(epsilon)
    if eps < 0:
        raise ValidationError("epsilon must be nonnegative")
    tol_f = as_fraction(tol)
    if eps > 0 and tol_f >= eps / 4:
        raise ToleranceConfigError(
            f"tol {float(tol_f)} leaves no certification headroom for "
            f"epsilon {float(eps)} (need tol < epsilon/4)"
        )
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    if reference is None:
        reference = expect(f, sigma, tol_f, node_budget=node_budget,
                           use_oracle=use_oracle, horizon=horizon,
                           eta_target=eta_target)
    undecided = []
    eta = reference.eta
    for n in range(1, n_max + 1):
        res = g_n(f, sigma, x, n, tol_f, node_budget=node_budget,
                  use_oracle=use_oracle, horizon=horizon, eta_target=eta_target)
        eta = max(eta, res.eta)
        verdict = compare_to_epsilon(res, reference, eps)
        if verdict == YES:
            if undecided:
                return StrongApproxResult(
                    eps, INCONCLUSIVE, None, tuple(undecided), n_max, eta,
                    first_certified=n, found_value=res.interval)
            return StrongApproxResult(
                eps, FOUND, n, (), n_max, eta, first_certified=n,
                found_value=res.interval)
        if verdict == UNDECIDED:
            undecided.append(n)
    if undecided:
        return StrongApproxResult(eps, INCONCLUSIVE, None, tuple(undecided),
                                  n_max, eta)
    return StrongApproxResult(eps, NOT_FOUND, None, (), n_max, eta)
