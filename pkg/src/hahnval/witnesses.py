"""Witness generators and checkers for closedness and regularity.

Two families of groups that are *not* closed in their divisible hull are
supported constructively:

* extended Hahn sums ``(Hahn sum over omega of Z) + aZ`` with ``|coef| >= 2``
  (the canonical instance being ``G_EX`` with limit point ``a/2``), and
* Hahn sums with dyadic components whose index window has a largest index
  (including the scalar dyadic group), with limit points such as ``1_0 / 3``.

All searches are budgeted; exhausting a budget raises
:class:`~hahnval.errors.SearchExhausted` or yields an ``inconclusive``
verdict, never a negative answer.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import PreconditionError, SearchExhausted, UnsupportedShape
from .groups import (
    GroupElement,
    GroupShape,
    is_discrete,
    is_dyadic,
    is_n_divisible,
    known_closed,
)

#: Budgets for witness searches.
MAX_SUPPORT = 8
MAX_COEFF_BITS = 16
MAX_CANDIDATES = 10_000


@dataclass(frozen=True)
class LimitPointWitness:
    """A point of the divisible hull outside ``G`` together with a generator.

    ``generator(b)`` returns ``g`` in ``G`` with ``point - b < g < point``
    (``side == "left"``) or ``point < g < point + b`` (``side == "right"``).
    """

    shape: GroupShape
    point: GroupElement
    side: str
    generator: Callable[[GroupElement], GroupElement] = field(compare=False, repr=False)
    description: str = ""

    def __call__(self, bound: GroupElement) -> GroupElement:
        if bound.sign() <= 0:
            raise PreconditionError("the bound must be positive")
        return self.generator(bound)

    def sandwich_holds(self, bound: GroupElement, g: GroupElement) -> bool:
        if not self.shape.contains(g):
            return False
        if self.side == "left":
            return self.point - bound < g < self.point
        return self.point < g < self.point + bound

    def negated(self) -> "LimitPointWitness":
        """Witness for ``-point`` on the opposite side."""
        gen = self.generator
        side = "right" if self.side == "left" else "left"
        return LimitPointWitness(self.shape, -self.point, side, lambda b: -gen(b),
                                 f"negation of: {self.description}")


# -- extended Hahn sums -------------------------------------------------------

def _ext_limit_point_generator(shape: GroupShape, point: GroupElement, side: str):
    """Generator for a hull point of an extended sum whose effective coefficients are
    integers with an eventually constant tail ``e`` not divisible by ``coef``."""
    coef = shape.coef
    tail = coef * point.k
    if Fraction(tail).denominator != 1 or any(Fraction(c).denominator != 1 for _, c in point.coeffs):
        return None
    tail = int(tail)
    if tail % coef == 0:
        return None
    # tail of the approximant: the nearest multiple of coef on the requested side
    k_g = tail // coef if side == "left" else -((-tail) // coef)
    top = point.coeffs[-1][0] if point.coeffs else shape.lo

    def gen(bound: GroupElement) -> GroupElement:
        last = max(bound.vmin() + 1, top)
        coeffs = {i: point.effective(i) - coef * k_g for i in range(shape.lo, last + 1)}
        return GroupElement(shape, coeffs, k_g)

    return gen


# -- dyadic components ----------------------------------------------------------

def _dyadic_approx(p: Fraction, k: int, side: str) -> Fraction:
    scaled = p * (1 << k)
    m = math.floor(scaled) if side == "left" else math.ceil(scaled)
    return Fraction(m, 1 << k)


def _dyadic_limit_point_generator(shape: GroupShape, point: GroupElement, side: str):
    top = shape.hi
    if top is None or shape.component_at(top) != "dyadic":
        return None
    bad = [i for i, c in point.coeffs if not _component_ok(shape, i, c)]
    if bad != [top]:
        return None
    p = Fraction(point.coeff(top))
    rest = tuple((i, c) for i, c in point.coeffs if i != top)

    def gen(bound: GroupElement) -> GroupElement:
        # smallest dyadic level 2^-k whose one-sided approximant satisfies the sandwich
        cap = 0
        if bound.vmin() == top:
            cap = Fraction(bound.lead()).denominator.bit_length() + 1
        for k in range(cap + 1):
            d = _dyadic_approx(p, k, side)
            g = GroupElement(shape, rest + ((top, d),))
            if (point - bound < g) if side == "left" else (g < point + bound):
                return g
        raise AssertionError("dyadic approximation failed to meet its own bound")

    return gen


def _component_ok(shape, i, c):
    kind = shape.component_at(i)
    if kind == "rat":
        return True
    if kind == "int":
        return Fraction(c).denominator == 1
    return is_dyadic(c)


def limit_point_witness(shape: GroupShape, point: Optional[GroupElement] = None,
                        side: str = "left") -> LimitPointWitness:
    """Limit point of ``G`` in its divisible hull with an explicit approximation generator.

    Without ``point`` the canonical one is used: ``a/2`` for extended sums
    with coefficient 2 and ``1_top / 3`` for dyadic Hahn sums.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if shape.extended and shape.component == "int":
        if point is None:
            if abs(shape.coef) < 2:
                raise UnsupportedShape("coefficient of a must be at least 2 in absolute value")
            point = shape.distinguished() / shape.coef
        gen = _ext_limit_point_generator(shape, point, side)
        desc = "truncations of the effective coefficient sequence"
    elif shape.hi is not None and shape.component_at(shape.hi) == "dyadic" and not shape.extended:
        if point is None:
            point = shape.unit(shape.hi) / 3
        gen = _dyadic_limit_point_generator(shape, point, side)
        desc = "one-sided dyadic approximation at the least archimedean class"
    else:
        raise UnsupportedShape(f"no limit-point generator for {shape}")
    shape.check(point)
    if gen is None or shape.contains(point):
        raise UnsupportedShape(f"{point} is not a limit point handled for {shape}")
    return LimitPointWitness(shape, point, side, gen, desc)


def limit_point_for_quotient(value: GroupElement, n: int, side: str = "left") -> LimitPointWitness:
    """Witness for ``value / n`` or raise :class:`UnsupportedShape`."""
    return limit_point_witness(value.shape, value / n, side)


# -- regularity ---------------------------------------------------------------------

def least_prime_above(n: int) -> int:
    q = n + 1
    while q < 2 or any(q % d == 0 for d in range(2, math.isqrt(q) + 1)):
        q += 1
    return q


@dataclass(frozen=True)
class RegularityCounterexample:
    n: int
    ell: int
    q: int
    low: GroupElement
    high: GroupElement
    reason: str
    sampled: int = 0
    failures: Tuple[GroupElement, ...] = ()

    @property
    def verified(self) -> bool:
        return not self.failures


def _sample_interval_point(shape: GroupShape, ell: int, q: int, rng: random.Random) -> GroupElement:
    """A random ``z`` with ``q*1_ell < z < q*1_ell + 1_{ell+1}`` (rejection sampling)."""
    one = shape.unit(ell + 1)
    zero = shape.zero()
    a = shape.distinguished()
    while True:
        w = zero
        mode = rng.randrange(3)
        if mode == 0:
            # leading 1 at ell+1 followed by a negative tail
            w = one + shape.unit(ell + 2 + rng.randrange(4), -rng.randint(1, 9))
        elif mode == 1:
            m = rng.choice((-2, -1, 1, 2))
            cut = ell + 1 + rng.randrange(4)
            w = m * (a - GroupElement(shape, {i: shape.coef for i in range(shape.lo, cut + 1)}))
        for _ in range(rng.randrange(4)):
            w = w + shape.unit(ell + 2 + rng.randrange(6), rng.randint(-9, 9))
        if zero < w < one:
            return shape.unit(ell, q) + w


def regularity_counterexample(shape: GroupShape, n: int, ell: int, samples: int = 0,
                              seed: int = 0) -> RegularityCounterexample:
    """Interval of the convex subgroup ``{vmin >= ell}`` free of ``n``-divisible elements."""
    if not shape.extended or shape.component != "int" or shape.lo != 0:
        raise UnsupportedShape("regularity counterexamples are built for extended sums over omega")
    if n < 2:
        raise PreconditionError("n must be at least 2")
    if ell < shape.lo:
        raise PreconditionError("ell outside the index range")
    q = least_prime_above(n)
    low = shape.unit(ell, q)
    high = low + shape.unit(ell + 1)
    rng = random.Random(seed)
    failures = []
    for _ in range(samples):
        z = _sample_interval_point(shape, ell, q, rng)
        ok = low < z < high and z.effective(ell) == q and not is_n_divisible(z, n)[0]
        if not ok:
            failures.append(z)
    reason = (f"every z in the interval has effective coefficient {q} at index {ell}, "
              f"and {n} does not divide the prime {q}")
    return RegularityCounterexample(n, ell, q, low, high, reason, samples, tuple(failures))


def find_n_divisible_between(shape: GroupShape, low: GroupElement, high: GroupElement, n: int,
                             index: Optional[int] = None,
                             budget: int = MAX_CANDIDATES) -> Optional[GroupElement]:
    """Search ``w`` in ``nG`` with ``low < w < high`` of the form ``low + m * 2^-j * 1_index``.

    At each dyadic level ``j`` only ``n`` consecutive multiples are needed.
    Dyadic components only; returns ``None`` when the budget is spent.
    """
    if index is None:
        index = shape.hi
    if index is None or shape.component_at(index) != "dyadic":
        raise UnsupportedShape("interval search is implemented for dyadic components")
    tried = 0
    for j in range(MAX_COEFF_BITS + 1):
        step = shape.unit(index, Fraction(1, 1 << j))
        for m in range(1, n + 1):
            w = low + step * m
            if not w < high:
                break
            tried += 1
            if is_n_divisible(w, n)[0]:
                return w
            if tried >= budget:
                return None
    return None


def sampled_regularity(shape: GroupShape, n: int, samples: int, seed: int = 0,
                       index: Optional[int] = None) -> dict:
    """Check ``n``-regularity of the convex subgroup at ``index`` on random intervals."""
    if index is None:
        index = shape.hi
    rng = random.Random(seed)
    found = 0
    misses = []
    for _ in range(samples):
        a = Fraction(rng.randint(-1 << 12, 1 << 12), 1 << rng.randint(0, 10))
        width = Fraction(rng.randint(1, 64), 1 << rng.randint(0, 12))
        low = shape.unit(index, a)
        high = shape.unit(index, a + width)
        w = find_n_divisible_between(shape, low, high, n, index)
        if w is None:
            misses.append((low, high))
        else:
            found += 1
    return {"n": n, "samples": samples, "found": found, "inconclusive": misses}


@dataclass(frozen=True)
class ClosednessWitness:
    """Output of :func:`prop_closedness_witness`."""

    a: GroupElement
    n: int
    ell: int
    witness: LimitPointWitness
    regularity: dict
    nondivisible: bool


def prop_closedness_witness(shape: GroupShape, ell: int, n: int, samples: int = 50,
                            seed: int = 0, budget: int = MAX_CANDIDATES) -> ClosednessWitness:
    """Turn an ``n``-regular, non-``n``-divisible convex subgroup into a limit point.

    ``C = {g : vmin(g) >= ell}``.  For a bound ``h`` the generator picks a
    positive ``b`` in ``C`` below ``n*h``, finds an ``n``-divisible ``nz`` in
    ``(a - b, a)`` and returns ``z``, so ``a/n - h < z < a/n``.
    """
    if n < 2:
        raise PreconditionError("n must be at least 2: every group is 1-divisible")
    if is_discrete(shape)[0]:
        raise PreconditionError(f"{shape} is discretely ordered")
    if not shape.in_range(ell) or shape.component_at(ell) != "dyadic":
        raise UnsupportedShape("closedness witnesses are searched in dyadic components")
    if shape.hi is None or ell != shape.hi:
        # (1_ell, 1_ell + 1_{ell+1}) has no n-divisible element when ell is not the top index
        raise PreconditionError(f"the convex subgroup at index {ell} is not {n}-regular")
    reg = sampled_regularity(shape, n, samples, seed, ell)
    if reg["inconclusive"]:
        raise SearchExhausted(f"could not confirm {n}-regularity on samples at index {ell}")
    a = None
    for m in range(1, MAX_CANDIDATES):
        cand = shape.unit(ell, m)
        if not is_n_divisible(cand, n)[0]:
            a = cand
            break
    if a is None:
        raise SearchExhausted("no element outside nG found in C")
    return _closedness_from(shape, a, n, ell, reg, budget)


def _closedness_from(shape, a, n, ell, reg, budget):
    point = a / n
    unit = shape.unit(ell)

    def gen(h: GroupElement) -> GroupElement:
        nh = h * n
        if nh.vmin() < ell:
            b = unit
        else:
            j = Fraction(nh.effective(ell)).denominator.bit_length()
            b = shape.unit(ell, Fraction(1, 1 << j))
        w = find_n_divisible_between(shape, a - b, a, n, ell, budget)
        if w is None:
            raise SearchExhausted("no n-divisible element found in (a - b, a)")
        return is_n_divisible(w, n)[1]

    witness = LimitPointWitness(shape, point, "left", gen,
                                f"{n}-divisible elements below {a} within shrinking bounds")
    return ClosednessWitness(a, n, ell, witness, reg, True)


# -- the closedness axiom on samples -------------------------------------------------

def _rounding_decision(shape: GroupShape, a: GroupElement, n: int, b: GroupElement):
    """Exact decision of ``exists g: |a - n g| < b`` for plain Hahn sums.

    With ``j = vmin(b)``, ``g`` must equal ``a/n`` below ``j``, and at ``j``
    the remainder ``a_j - n g_j`` must undercut ``b_j`` (ties are broken by
    the next coordinate when one exists).  Returns ``(found, witness)``.
    """
    j = b.vmin()
    q = {}
    for i, c in a.coeffs:
        if i < j:
            qi = Fraction(c) / n
            if not _component_ok(shape, i, qi):
                return False, None
            q[i] = qi
    kind = shape.component_at(j)
    aj = Fraction(a.coeff(j))
    bj = Fraction(b.coeff(j))
    if kind == "rat":
        q[j] = aj / n
        return True, GroupElement(shape, q)
    if kind == "dyadic":
        k = 0
        while True:
            d = _dyadic_approx(aj / n, k, "left")
            if abs(aj - n * d) < bj:
                q[j] = d
                return True, GroupElement(shape, q)
            k += 1
    best = round(aj / n)
    r = aj - n * best
    if abs(r) < bj:
        q[j] = best
        return True, GroupElement(shape, q)
    if abs(r) > bj or not shape.in_range(j + 1):
        return False, None
    q[j] = best
    nxt = j + 1
    an, bn = Fraction(a.coeff(nxt)), Fraction(b.coeff(nxt))
    if r > 0:
        q[nxt] = math.floor((an - bn) / n) + 1
    else:
        q[nxt] = math.ceil((an + bn) / n) - 1
    g = GroupElement(shape, q)
    assert abs(a - n * g) < b
    return True, g


@dataclass(frozen=True)
class AxiomSample:
    a: GroupElement
    b: GroupElement
    antecedent: Optional[bool]
    consequent: bool
    witness: Optional[GroupElement]

    @property
    def value(self) -> Optional[bool]:
        if self.consequent or self.antecedent is False:
            return True
        if self.antecedent is None:
            return None
        return False


def sampled_closedness_axiom(shape: GroupShape, n: int,
                             samples: Sequence[Tuple[GroupElement, GroupElement]],
                             seed: int = 0) -> dict:
    """Evaluate ``(forall b>0 exists g |a - n g| < b) -> a in nG`` on given pairs."""
    rng = random.Random(seed)
    results: List[AxiomSample] = []
    for a, b in samples:
        if b.sign() <= 0:
            raise PreconditionError("b must be positive")
        div, q = is_n_divisible(a, n)
        ante, witness = (True, q) if div else _antecedent_search(shape, a, n, b, rng)
        results.append(AxiomSample(a, b, ante, div, witness))
    closed = known_closed(shape)
    false_count = sum(1 for r in results if r.value is False)
    inconclusive = sum(1 for r in results if r.value is None)
    consistent = not (closed is True and false_count)
    return {
        "shape": str(shape),
        "n": n,
        "results": results,
        "false": false_count,
        "inconclusive": inconclusive,
        "known_closed": closed,
        "consistent": consistent,
    }


def _antecedent_search(shape, a, n, b, rng):
    if not shape.extended:
        return _rounding_decision(shape, a, n, b)
    try:
        w = limit_point_witness(shape, a / n, "left")
    except UnsupportedShape:
        w = None
    if w is not None:
        g = w(b / n)
        if abs(a - n * g) < b:
            return True, g
    return _bounded_search(shape, a, n, b, rng)


def _bounded_search(shape, a, n, b, rng):
    """Randomised bounded search around rounded approximations of ``a/n``."""
    target = a / n
    top = max([i for i, _ in target.coeffs] + [b.vmin(), shape.lo or 0]) + 1
    lo = shape.lo if shape.lo is not None else min([i for i, _ in target.coeffs] + [b.vmin()])
    for _ in range(MAX_CANDIDATES):
        coeffs = {}
        for i in range(lo, top + 1):
            base = Fraction(target.effective(i))
            coeffs[i] = math.floor(base) + rng.randint(-1, 1)
        k = 0
        if shape.extended:
            k = math.floor(Fraction(target.k)) + rng.randint(-1, 1)
            coeffs = {i: c - shape.coef * k for i, c in coeffs.items()}
        coeffs = dict(list(coeffs.items())[:MAX_SUPPORT])
        g = GroupElement(shape, coeffs, k)
        if abs(a - n * g) < b:
            return True, g
    return None, None
