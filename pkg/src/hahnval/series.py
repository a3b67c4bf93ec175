"""Group rings ``k[G]`` and truncated Hahn series over ``k = Q``.

A :class:`Series` holds finitely many terms ``c * t^g`` together with a
cutoff ``C``.  The represented Hahn series agrees with the stored terms on
every exponent ``< C``; nothing is known at exponents ``>= C``.  A cutoff
of ``None`` means the element is exact, i.e. an element of the group ring.

Precision propagates like ball arithmetic on the value group::

    cut(r + s) = min(cut r, cut s)
    cut(r * s) = min(cut r + v(s), cut s + v(r))

where ``v`` of an operand without known terms is bounded below by its own
cutoff.  Comparisons that the available precision cannot settle raise
:class:`~hahnval.errors.IndeterminateError`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import IndeterminateError, NotInValuationRing, PrecisionError, ShapeMismatch
from .groups import Coeff, GroupElement, GroupShape, as_rational

#: Bound on geometric-series terms and Newton steps.
MAX_STEPS = 64


def order_key(g: GroupElement):
    """Sort key realising the group order.

    For plain Hahn sums the key is a tuple, so sorting avoids Python-level
    comparisons; extended sums use the element itself.
    """
    if g.shape.extended:
        return g
    out = [(1, -i, c) if c > 0 else (-1, i, c) for i, c in g.coeffs]
    out.append((0,))
    return tuple(out)


def gmin(a: Optional[GroupElement], b: Optional[GroupElement]) -> Optional[GroupElement]:
    """Minimum with ``None`` standing for ``+inf``."""
    if a is None:
        return b
    if b is None:
        return a
    return a if a <= b else b


def gadd(a: Optional[GroupElement], b: Optional[GroupElement]) -> Optional[GroupElement]:
    if a is None or b is None:
        return None
    return a + b


def _below(g: GroupElement, cut: Optional[GroupElement]) -> bool:
    return cut is None or g < cut


class Series:
    """A truncated Hahn series ``sum c_g t^g + O(t^cutoff)`` (exact when ``cutoff is None``)."""

    __slots__ = ("shape", "terms", "cutoff", "_sorted")

    def __init__(self, shape: GroupShape, terms: Mapping[GroupElement, Coeff] | Iterable = (),
                 cutoff: Optional[GroupElement] = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[GroupElement, Coeff] = {}
        for g, c in items:
            shape.check(g)
            acc[g] = acc.get(g, 0) + as_rational(c)
        if cutoff is not None:
            shape.check(cutoff)
        self.shape = shape
        self.terms = {g: c for g, c in acc.items() if c and _below(g, cutoff)}
        self.cutoff = cutoff
        self._sorted = None

    @classmethod
    def _raw(cls, shape, terms, cutoff):
        obj = object.__new__(cls)
        obj.shape = shape
        obj.terms = terms
        obj.cutoff = cutoff
        obj._sorted = None
        return obj

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, shape: GroupShape, cutoff: Optional[GroupElement] = None) -> "Series":
        return cls._raw(shape, {}, cutoff)

    @classmethod
    def const(cls, shape: GroupShape, c: Coeff = 1) -> "Series":
        c = as_rational(c)
        return cls._raw(shape, {shape.zero(): c} if c else {}, None)

    @classmethod
    def monomial(cls, g: GroupElement, c: Coeff = 1) -> "Series":
        c = as_rational(c)
        return cls._raw(g.shape, {g: c} if c else {}, None)

    # -- inspection ------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.cutoff is None

    def items(self) -> List[Tuple[GroupElement, Coeff]]:
        """Terms in increasing exponent order."""
        s = self._sorted
        if s is None:
            s = self._sorted = sorted(self.terms.items(), key=lambda t: order_key(t[0]))
        return s

    def support(self) -> List[GroupElement]:
        return [g for g, _ in self.items()]

    def coeff(self, g: GroupElement) -> Coeff:
        if self.cutoff is not None and not g < self.cutoff:
            raise IndeterminateError(f"coefficient at {g} lies beyond the cutoff {self.cutoff}")
        return self.terms.get(g, 0)

    def is_exact_zero(self) -> bool:
        return not self.terms and self.cutoff is None

    def __bool__(self):
        return bool(self.terms) or self.cutoff is not None

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.terms == other.terms and self.cutoff == other.cutoff and self.shape == other.shape

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.cutoff))

    def __repr__(self):
        from .literals import format_series
        return f"Series({format_series(self)})"

    def __str__(self):
        from .literals import format_series
        return format_series(self)

    def valuation(self) -> Optional[GroupElement]:
        """Least exponent (``None`` for the exact zero)."""
        if self.terms:
            return self.items()[0][0]
        if self.cutoff is None:
            return None
        raise IndeterminateError(f"no term below the cutoff {self.cutoff}; valuation unknown")

    def valuation_bound(self) -> Optional[GroupElement]:
        """``v`` when known, else the cutoff (a lower bound)."""
        if self.terms:
            return self.items()[0][0]
        return self.cutoff

    def lead(self) -> Tuple[GroupElement, Coeff]:
        if not self.terms:
            self.valuation()
            raise ValueError("the zero series has no leading term")
        return self.items()[0]

    def sign(self) -> int:
        if not self.terms:
            if self.cutoff is None:
                return 0
            raise IndeterminateError("sign is not determined at this precision")
        c = self.items()[0][1]
        return 1 if c > 0 else -1

    # -- arithmetic ------------------------------------------------------
    def _same(self, other):
        if other.shape is not self.shape and other.shape != self.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")

    def _lift(self, other):
        if isinstance(other, Series):
            self._same(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Series.const(self.shape, other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        cut = gmin(self.cutoff, other.cutoff)
        d = {}
        for src in (self.terms, other.terms):
            for g, c in src.items():
                if cut is not None and not g < cut:
                    continue
                s = d.get(g, 0) + c
                if s:
                    d[g] = s
                else:
                    del d[g]
        return Series._raw(self.shape, d, cut)

    __radd__ = __add__

    def __neg__(self):
        return Series._raw(self.shape, {g: -c for g, c in self.terms.items()}, self.cutoff)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c: Coeff) -> "Series":
        c = as_rational(c)
        if not c:
            return Series._raw(self.shape, {}, self.cutoff)
        return Series._raw(self.shape, {g: as_rational(x * c) for g, x in self.terms.items()}, self.cutoff)

    def shift(self, g: GroupElement) -> "Series":
        """Multiplication by the monomial ``t^g``."""
        self.shape.check(g)
        return Series._raw(self.shape, {h + g: c for h, c in self.terms.items()}, gadd(self.cutoff, g))

    def product_cutoff(self, other: "Series") -> Optional[GroupElement]:
        if self.is_exact_zero() or other.is_exact_zero():
            return None
        if self.cutoff is not None and other.cutoff is not None and not self.terms and not other.terms:
            raise PrecisionError("product of two operands without any known term")
        return gmin(gadd(self.cutoff, other.valuation_bound()), gadd(other.cutoff, self.valuation_bound()))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, Series):
            return NotImplemented
        self._same(other)
        cut = self.product_cutoff(other)
        if self.is_exact_zero() or other.is_exact_zero():
            return Series._raw(self.shape, {}, None)
        a, b = self.items(), other.items()
        if len(a) > len(b):
            a, b = b, a
        d: Dict[GroupElement, Coeff] = {}
        for g, c in a:
            for h, e in b:
                x = g + h
                if cut is not None and not x < cut:
                    # exponents only grow along b
                    break
                s = d.get(x, 0) + c * e
                if s:
                    d[x] = s
                else:
                    del d[x]
        return Series._raw(self.shape, {g: as_rational(c) for g, c in d.items()}, cut)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Series.const(self.shape, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def truncate(self, cut: Optional[GroupElement]) -> "Series":
        if cut is None:
            return self
        new = gmin(self.cutoff, cut)
        return Series._raw(self.shape, {g: c for g, c in self.terms.items() if g < new}, new)

    def residue(self) -> Coeff:
        """Image in the residue field ``Q``."""
        zero = self.shape.zero()
        if self.terms:
            v = self.items()[0][0]
            if v < zero:
                raise NotInValuationRing(f"valuation {v} is negative")
        elif self.cutoff is not None and not zero < self.cutoff:
            raise IndeterminateError("residue is not determined at this precision")
        return self.terms.get(zero, 0)

    def known_at_least(self, bound: GroupElement) -> bool:
        """True iff the series is known to have valuation ``>= bound``."""
        if self.cutoff is not None and self.cutoff < bound:
            return False
        return not self.terms or not self.items()[0][0] < bound

    def agrees_with(self, other: "Series", cut: Optional[GroupElement] = None) -> bool:
        """Equality of all coefficients below ``cut`` and both cutoffs."""
        self._same(other)
        c = gmin(gmin(self.cutoff, other.cutoff), cut)
        return self.truncate(c).terms == other.truncate(c).terms

    def invert(self, target: Optional[GroupElement] = None) -> "Series":
        return series_invert(self, target)


# -- group rings ------------------------------------------------------------

def ring_element(shape: GroupShape, terms) -> Series:
    """Exact element of ``k[G]``."""
    return Series(shape, terms, None)


def ring_arith(op: str, r: Series, s: Optional[Series] = None) -> Series:
    if op == "add":
        return r + s
    if op == "neg":
        return -r
    if op == "mul":
        return r * s
    raise ValueError(f"unknown ring operation {op!r}")


def series_valuation(s: Series) -> Optional[GroupElement]:
    return s.valuation()


def residue(s: Series) -> Coeff:
    return s.residue()


def order_compare(r: Series, s: Series) -> str:
    return "<=>"[(r - s).sign() + 1]


def is_unit(r: Series) -> bool:
    """Units of ``k[G]`` are exactly the nonzero monomials."""
    if not r.exact:
        raise PrecisionError("unit test is defined for exact group-ring elements")
    return len(r.terms) == 1


def reachable_multiple(step: GroupElement, target: GroupElement, limit: int = MAX_STEPS) -> Optional[int]:
    """Least ``m <= limit`` with ``m * step >= target`` (``step > 0``), else ``None``."""
    if not target > step.shape.zero():
        return 1
    for m in range(1, limit + 1):
        if step * m >= target:
            return m
    return None


def series_invert(s: Series, target: Optional[GroupElement] = None) -> Series:
    """Inverse of ``s`` such that ``s * u - 1`` is known to vanish below ``target``.

    ``s = c t^v (1 + w)`` with ``v(w) > 0``; ``u`` is the truncated geometric
    series ``c^-1 t^-v sum (-w)^k``.  Exact monomials invert exactly.
    """
    v = s.valuation()
    if v is None:
        raise ZeroDivisionError("inverse of the zero series")
    _, c = s.items()[0]
    if s.exact and len(s.terms) == 1:
        return Series._raw(s.shape, {-v: as_rational(1 / Fraction(c))}, None)
    if target is None:
        raise PrecisionError("a target cutoff is needed to invert a non-monomial series")
    rel = target  # precision of 1/(1+w) relative to the unit part
    if s.cutoff is not None and s.cutoff - v < rel:
        raise PrecisionError(f"input known only below {s.cutoff}; cannot reach {target}")
    inv_c = 1 / Fraction(c)
    w = s.shift(-v).scale(inv_c) - 1
    w = w.truncate(rel)
    acc = Series._raw(s.shape, {s.shape.zero(): 1}, rel)
    if w.terms:
        vw = w.items()[0][0]
        if reachable_multiple(vw, rel) is None:
            raise PrecisionError(
                f"{MAX_STEPS} geometric-series terms of valuation {vw} do not reach {rel}")
        term = acc
        neg_w = -w
        for _ in range(MAX_STEPS):
            term = (term * neg_w).truncate(rel)
            if not term.terms:
                break
            acc = acc + term
    acc = acc.truncate(gmin(rel, w.cutoff))
    return acc.shift(-v).scale(inv_c)
