import random

import pytest
from sympy.polys.domains import QQ

from diffop import DiffOp
from exactnum import LaurentPoly, RationalFunction
from grammar import parse_operator
from psdo import PsdOp

SEED = 20240611


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture
def op():
    """Parse operator text over QQ."""
    return parse_operator


def _random_scalar(rng):
    return QQ(rng.randint(-5, 5), rng.choice([1, 1, 1, 2, 3]))


def random_laurent(rng, low, high, terms=2):
    return LaurentPoly.from_dict({rng.randint(low, high): _random_scalar(rng) for _ in range(terms)})


def random_operator(rng, order, low=-4, high=0, rational=False):
    """Monic operator with coefficients bounded at infinity."""
    coefficients = {order: 1}
    for k in range(order):
        poly = random_laurent(rng, low, high)
        if poly.is_zero():
            continue
        c = RationalFunction.from_laurent(poly)
        if rational and rng.random() < 0.3:
            shift = LaurentPoly.from_dict({1: 1, 0: rng.randint(1, 4)})
            c = c / RationalFunction.from_laurent(shift)
        coefficients[k] = c
    return DiffOp.from_dict(coefficients, QQ)


@pytest.fixture
def make_operator(rng):
    def build(order, **kwargs):
        return random_operator(rng, order, **kwargs)
    return build


def random_psdo(rng, top, depth):
    """Monic pseudo-differential operator known down to d^(top - depth)."""
    coefficients = {top: RationalFunction.constant(1)}
    for j in range(top - depth, top):
        poly = random_laurent(rng, -3, 1)
        if not poly.is_zero():
            coefficients[j] = RationalFunction.from_laurent(poly)
    return PsdOp(coefficients, top - depth, QQ)


@pytest.fixture
def make_psdo(rng):
    def build(top, depth):
        return random_psdo(rng, top, depth)
    return build
