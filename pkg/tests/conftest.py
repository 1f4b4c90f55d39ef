"""Shared builders for the test suite.

Expected values in the tests are frozen from independent oracles
(partial products, enumeration, closed-form geometric sums) computed
here or inline, never from the code paths under test.
"""

from fractions import Fraction
from math import prod

import pytest

from prodex.functions import (
    Cylinder,
    DiscountedSum,
    GeometricWeights,
    ProductIndicator,
)
from prodex.model import (
    ConstantMeasureTail,
    ConstantSymbol,
    CoordinateMeasure,
    DescribedPoint,
    ProductMeasure,
    SpaceFamily,
    formula_tail,
    uniform_measure,
)

F = Fraction


def binary_spaces(head_count: int = 0) -> SpaceFamily:
    return SpaceFamily.uniform((0, 1), head_count)


def uniform_tail() -> ConstantMeasureTail:
    return ConstantMeasureTail(uniform_measure(1, (0, 1)))


def const_bernoulli_tail(p_one) -> ConstantMeasureTail:
    p = F(p_one)
    return ConstantMeasureTail(
        CoordinateMeasure.from_weights(1, (0, 1), (1 - p, p)))


def uniform_sigma(head_weights=()) -> ProductMeasure:
    """Binary product measure: given head Bernoulli(p) weights, uniform tail."""
    spaces = binary_spaces()
    head = tuple(
        CoordinateMeasure.from_weights(i, (0, 1), (1 - F(p), F(p)))
        for i, p in enumerate(head_weights, start=1)
    )
    return ProductMeasure(spaces, head, uniform_tail())


def geometric_sigma() -> ProductMeasure:
    """sigma_i puts 1 - 2**-i on symbol 1 at every coordinate."""
    return ProductMeasure(binary_spaces(), (), formula_tail("geometric_bernoulli"))


def indicator_all_ones(spaces=None) -> ProductIndicator:
    return ProductIndicator(spaces or binary_spaces(), (), ConstantSymbol(1))


def mix_cylinder() -> Cylinder:
    """f(x) = 0.7*x1 + 0.3*x2 over binary coordinates."""
    return Cylinder.from_callable(
        [(0, 1), (0, 1)], lambda a, b: F(7, 10) * a + F(3, 10) * b)


def discounted_unit() -> DiscountedSum:
    """f(x) = sum_i 2**-i * x_i."""
    return DiscountedSum(GeometricWeights.of(1, F(1, 2)), {0: 0, 1: 1})


def all_ones_point() -> DescribedPoint:
    return DescribedPoint((), ConstantSymbol(1))


def all_zeros_point() -> DescribedPoint:
    return DescribedPoint((), ConstantSymbol(0))


def partial_product(n: int) -> Fraction:
    """Independent oracle: prod_{i=1}^{n} (1 - 2**-i), exact."""
    return prod((F(2**i - 1, 2**i) for i in range(1, n + 1)), start=F(1))


def geometric_indicator_envelope(terms: int = 60):
    """Independent enclosure of prod_{i=1}^{inf} (1 - 2**-i).

    The remaining factors beyond `terms` lie in [1 - 2**-terms, 1].
    """
    p = partial_product(terms)
    return p * (1 - F(1, 2**terms)), p


@pytest.fixture
def sigma_uniform():
    return uniform_sigma()


@pytest.fixture
def sigma_geometric():
    return geometric_sigma()
