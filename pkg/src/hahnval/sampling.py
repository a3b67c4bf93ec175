"""Seeded random elements for sweeps and property checks."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .groups import GroupElement, GroupShape
from .series import Series

COEFF_RANGE = 8


def _window(shape: GroupShape, lo: Optional[int], hi: Optional[int], width: int = 6):
    if shape.is_scalar:
        return 0, 0
    lo = shape.lo if lo is None else lo
    hi = shape.hi if hi is None else hi
    if lo is None:
        lo = hi - width + 1
    if hi is None:
        hi = lo + width - 1
    return lo, hi


def _coeff(shape: GroupShape, i: int, rng: random.Random, bound: int) -> Fraction:
    c = Fraction(rng.choice([k for k in range(-bound, bound + 1) if k]))
    kind = shape.component_at(i)
    if kind == "dyadic" and rng.random() < 0.4:
        c /= 1 << rng.randint(1, 4)
    elif kind == "rat" and rng.random() < 0.4:
        c /= rng.randint(2, 7)
    return c


def random_group_element(shape: GroupShape, rng: random.Random, lo: Optional[int] = None,
                         hi: Optional[int] = None, support: int = 3, bound: int = COEFF_RANGE,
                         k_range: int = 1) -> GroupElement:
    """Random element with at most ``support`` finite-part entries in ``[lo, hi]``."""
    a, b = _window(shape, lo, hi)
    coeffs = {}
    for _ in range(rng.randint(0, support)):
        i = rng.randint(a, b)
        coeffs[i] = _coeff(shape, i, rng, bound)
    k = rng.randint(-k_range, k_range) if shape.extended else 0
    return GroupElement(shape, coeffs, k)


def random_nonzero_element(shape: GroupShape, rng: random.Random, **kw) -> GroupElement:
    while True:
        g = random_group_element(shape, rng, **kw)
        if g:
            return g


def random_positive_element(shape: GroupShape, rng: random.Random, **kw) -> GroupElement:
    return abs(random_nonzero_element(shape, rng, **kw))


def orbit_element(shape: GroupShape, rng: random.Random) -> GroupElement:
    """An element near the limit-point generator orbit of an extended sum:
    ``+-(partial sums of a/2)`` plus a small perturbation."""
    ell = shape.lo + rng.randint(0, 4)
    base = GroupElement(shape, {i: 1 for i in range(shape.lo, ell + 1)})
    if rng.random() < 0.5:
        base = -base
    return base + random_group_element(shape, rng, support=1, bound=2, k_range=0)


def random_series(shape: GroupShape, rng: random.Random, support: int = 4, positive: bool = False,
                  orbit: bool = False) -> Series:
    """Exact series with up to ``support`` terms and coefficients in ``[-8, 8] \\ {0}``.

    ``positive`` restricts exponents to positive group elements.
    """
    terms = {}
    for _ in range(rng.randint(1, support)):
        if orbit and shape.extended and rng.random() < 0.5:
            g = orbit_element(shape, rng)
        else:
            g = random_group_element(shape, rng)
        if positive:
            while not g > shape.zero():
                g = random_positive_element(shape, rng) if rng.random() < 0.7 else abs(g) if g else g
        terms[g] = Fraction(rng.choice([k for k in range(-COEFF_RANGE, COEFF_RANGE + 1) if k]))
    return Series(shape, terms)


def random_positive_series(shape: GroupShape, rng: random.Random, support: int = 3) -> Series:
    """A random exact element of the maximal ideal."""
    return random_series(shape, rng, support=support, positive=True)
