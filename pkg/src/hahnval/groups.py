"""Ordered abelian groups built from Hahn sums.

Every supported group is modelled as a Hahn sum over a convex window of
integer indices with a scalar component group at each index (``int``,
``dyadic`` or ``rat``), optionally enlarged by one distinguished element
``a = sum_{i >= lo} coef * 1_i`` of infinite support.  An element is stored
as a finite map ``index -> coefficient`` together with the integer (or, in
the divisible hull, rational) multiple ``k`` of ``a``.

Ordering follows the Hahn-sum rule: ``x > 0`` iff the coefficient at the
least index of the support is positive.  For the extended sums the
*effective* coefficient at index ``i`` is ``c(i) + coef * k``.

The same class represents elements of the divisible hull; membership in
the group proper is tested with :meth:`GroupShape.contains`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Optional, Tuple, Union

from .errors import PreconditionError, ShapeMismatch, UnsupportedShape

Coeff = Union[int, Fraction]

SCALAR_KINDS = ("int", "dyadic", "rat")


def as_rational(c) -> Coeff:
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return as_rational(Fraction(c.numerator, c.denominator))
    if isinstance(c, str):
        return as_rational(Fraction(c))
    raise TypeError(f"not an exact rational: {c!r}")


def is_dyadic(c: Coeff) -> bool:
    den = Fraction(c).denominator
    return den & (den - 1) == 0


def _scalar_ok(kind: str, c: Coeff) -> bool:
    if kind == "rat":
        return True
    if kind == "int":
        return Fraction(c).denominator == 1
    return is_dyadic(c)


@dataclass(frozen=True)
class GroupShape:
    """Description of a configured ordered abelian group.

    ``lo``/``hi`` bound the index window (``None`` meaning unbounded).
    ``component`` is the scalar kind used at every index; ``right`` is
    only set for lexicographic pairs, where index 0 carries ``component``
    and index 1 carries ``right``.
    """

    kind: str
    lo: Optional[int] = 0
    hi: Optional[int] = 0
    component: str = "int"
    right: Optional[str] = None
    coef: int = 0
    base: Optional["GroupShape"] = None

    def __post_init__(self):
        kind = self.kind
        if kind in SCALAR_KINDS:
            if (self.lo, self.hi) != (0, 0) or self.component != kind:
                raise UnsupportedShape(f"malformed scalar shape {self!r}")
            return
        if self.component not in SCALAR_KINDS:
            raise UnsupportedShape("component shapes must be scalar (int, dyadic, rat)")
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise UnsupportedShape("empty index range")
        if kind == "extsum":
            if self.lo is None or self.hi is not None:
                # over -omega the distinguished element would not have well-ordered support
                raise UnsupportedShape("extended Hahn sums need an index range of the form [lo, +inf)")
            if self.coef == 0:
                raise UnsupportedShape("distinguished coefficient must be nonzero")
        elif kind == "lex":
            if (self.lo, self.hi) != (0, 1) or self.right not in SCALAR_KINDS:
                raise UnsupportedShape("lex pairs use indices 0 (left) and 1 (right)")
        elif kind == "quotient":
            b = self.base
            if b is None or b.kind != "hahnsum":
                raise UnsupportedShape("quotients are only formed from Hahn sums")
            if not b.in_range(self.hi) or self.lo != b.lo or self.component != b.component:
                raise UnsupportedShape("quotient cut index outside the base range")
        elif kind != "hahnsum":
            raise UnsupportedShape(f"unknown group kind {kind!r}")

    # -- structure -------------------------------------------------------
    @property
    def is_scalar(self) -> bool:
        return self.kind in SCALAR_KINDS

    @property
    def extended(self) -> bool:
        return self.kind == "extsum"

    def in_range(self, i: int) -> bool:
        return (self.lo is None or i >= self.lo) and (self.hi is None or i <= self.hi)

    def component_at(self, i: int) -> str:
        if self.kind == "lex" and i == 1:
            return self.right
        return self.component

    def contains(self, x: "GroupElement") -> bool:
        """True iff ``x`` (a divisible-hull element) lies in the group itself."""
        self.check(x)
        if self.extended and Fraction(x.k).denominator != 1:
            return False
        return all(_scalar_ok(self.component_at(i), c) for i, c in x.coeffs)

    def check(self, x: "GroupElement") -> None:
        if x.shape is not self and x.shape != self:
            raise ShapeMismatch(f"element of {x.shape} used where {self} expected")

    # -- constructors ----------------------------------------------------
    def zero(self) -> "GroupElement":
        return GroupElement(self)

    def unit(self, i: int = 0, c: Coeff = 1) -> "GroupElement":
        """``c * 1_i``."""
        return GroupElement(self, {i: c})

    def elem(self, coeffs: Union[Mapping[int, Coeff], Iterable, Coeff] = (), k: Coeff = 0) -> "GroupElement":
        if not isinstance(coeffs, (Mapping, list, tuple)):
            coeffs = {0: coeffs} if coeffs else {}
        return GroupElement(self, coeffs, k)

    def distinguished(self) -> "GroupElement":
        if not self.extended:
            raise UnsupportedShape("only extended Hahn sums have a distinguished element")
        return GroupElement(self, (), 1)

    def __str__(self) -> str:
        return shape_to_text(self)


def _bound_text(b, neg):
    if b is None:
        return "-inf" if neg else "inf"
    return str(b)


def shape_to_text(shape: GroupShape) -> str:
    k = shape.kind
    if shape.is_scalar:
        return k
    if k == "lex":
        return f"(lex {shape.component} {shape.right})"
    if k == "quotient":
        return f"(quotient {shape_to_text(shape.base)} {shape.hi})"
    if shape.lo == 0 and shape.hi is None:
        rng = "omega"
    elif shape.lo is None and shape.hi == 0:
        rng = "-omega"
    else:
        rng = f"{_bound_text(shape.lo, True)} {_bound_text(shape.hi, False)}"
    if k == "extsum":
        return f"(extsum {rng} {shape.component} {shape.coef})"
    return f"(hahnsum {rng} {shape.component})"


INT = GroupShape("int", component="int")
RAT = GroupShape("rat", component="rat")
DYADIC = GroupShape("dyadic", component="dyadic")


def hahn_sum(lo: Optional[int], hi: Optional[int], component: str = "int") -> GroupShape:
    return GroupShape("hahnsum", lo, hi, component)


def ext_hahn_sum(lo: int, component: str = "int", coef: int = 2) -> GroupShape:
    return GroupShape("extsum", lo, None, component, coef=coef)


def lex_pair(left: str = "int", right: str = "int") -> GroupShape:
    return GroupShape("lex", 0, 1, left, right=right)


def quotient(base: GroupShape, cut: int) -> GroupShape:
    return GroupShape("quotient", base.lo, cut, base.component, base=base)


#: ``G = (Hahn sum over omega of Z) + aZ`` with ``a = sum 2 * 1_n``.
G_EX = ext_hahn_sum(0, "int", 2)
#: Hahn sum of Z over -omega (discretely ordered).
NEG_OMEGA_INT = hahn_sum(None, 0, "int")
#: Hahn sum of the dyadic rationals over -omega.
NEG_OMEGA_DYADIC = hahn_sum(None, 0, "dyadic")


class GroupElement:
    """An element ``c + k*a`` of a configured group or of its divisible hull.

    Instances are immutable and canonical: ``coeffs`` is a tuple of
    ``(index, coefficient)`` pairs sorted by index with no zero entries, so
    structural equality coincides with equality in the group.
    """

    __slots__ = ("shape", "coeffs", "k", "_hash")

    def __init__(self, shape: GroupShape, coeffs=(), k: Coeff = 0):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict = {}
        for i, c in items:
            if not isinstance(i, int) or isinstance(i, bool):
                raise TypeError(f"index must be an integer, got {i!r}")
            if not shape.in_range(i):
                raise PreconditionError(f"index {i} outside the range of {shape}")
            acc[i] = acc.get(i, 0) + as_rational(c)
        k = as_rational(k)
        if k and not shape.extended:
            raise UnsupportedShape(f"{shape} has no distinguished element")
        self.shape = shape
        self.coeffs = tuple(sorted((i, as_rational(c)) for i, c in acc.items() if c))
        self.k = k
        self._hash = None

    @classmethod
    def _raw(cls, shape, coeffs, k):
        obj = object.__new__(cls)
        obj.shape = shape
        obj.coeffs = coeffs
        obj.k = k
        obj._hash = None
        return obj

    # -- basic protocol --------------------------------------------------
    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((self.coeffs, self.k))
        return h

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.coeffs == other.coeffs and self.k == other.k and (
            self.shape is other.shape or self.shape == other.shape)

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __repr__(self):
        from .literals import format_group
        return f"GroupElement({self.shape}, {format_group(self)})"

    def __str__(self):
        from .literals import format_group
        return format_group(self)

    def __bool__(self):
        return bool(self.coeffs) or bool(self.k)

    def is_zero(self) -> bool:
        return not self.coeffs and not self.k

    def coeff(self, i: int) -> Coeff:
        """Stored finite-part coefficient at index ``i``."""
        for j, c in self.coeffs:
            if j == i:
                return c
        return 0

    def effective(self, i: int) -> Coeff:
        """Coefficient of the represented Hahn-product element at index ``i``."""
        c = self.coeff(i)
        if self.k and self.shape.in_range(i):
            c += self.shape.coef * self.k
        return c

    # -- arithmetic ------------------------------------------------------
    def _same(self, other):
        if not isinstance(other, GroupElement):
            raise TypeError(f"cannot combine a group element with {type(other).__name__}")
        if other.shape is not self.shape and other.shape != self.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        self._same(other)
        if not other.coeffs:
            coeffs = self.coeffs
        elif not self.coeffs:
            coeffs = other.coeffs
        else:
            d = dict(self.coeffs)
            for i, c in other.coeffs:
                s = d.get(i, 0) + c
                if s:
                    d[i] = s
                else:
                    del d[i]
            coeffs = tuple(sorted(d.items()))
        return GroupElement._raw(self.shape, coeffs, self.k + other.k)

    def __neg__(self):
        return GroupElement._raw(self.shape, tuple((i, -c) for i, c in self.coeffs), -self.k)

    def __sub__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, n):
        if isinstance(n, GroupElement) or isinstance(n, bool):
            return NotImplemented
        n = as_rational(n)
        if not n:
            return GroupElement._raw(self.shape, (), 0)
        return GroupElement._raw(self.shape, tuple((i, as_rational(c * n)) for i, c in self.coeffs),
                                 as_rational(self.k * n))

    __rmul__ = __mul__

    def __truediv__(self, n):
        n = as_rational(n)
        if not n:
            raise ZeroDivisionError("division of a group element by zero")
        return self * (1 / Fraction(n))

    # -- order -----------------------------------------------------------
    def vmin(self) -> Optional[int]:
        """Least index with nonzero effective coefficient, ``None`` for zero (= +inf)."""
        if not self.k:
            return self.coeffs[0][0] if self.coeffs else None
        base = self.shape.coef * self.k
        d = dict(self.coeffs)
        i = self.shape.lo
        while True:
            if d.get(i, 0) + base:
                return i
            i += 1

    def lead(self) -> Coeff:
        i = self.vmin()
        return 0 if i is None else self.effective(i)

    def sign(self) -> int:
        c = self.lead()
        return (c > 0) - (c < 0)

    def cmp(self, other: "GroupElement") -> int:
        self._same(other)
        if self.k == other.k:
            return _cmp_sparse(self.coeffs, other.coeffs)
        return (self - other).sign()

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def coordinates(self) -> dict:
        """Q-linear coordinates used for rank and lattice computations."""
        out = {("i", i): c for i, c in self.coeffs}
        if self.k:
            out[("k",)] = self.k
        return out


def _cmp_sparse(a, b) -> int:
    ia = ib = 0
    la, lb = len(a), len(b)
    while True:
        if ia == la:
            if ib == lb:
                return 0
            return -1 if b[ib][1] > 0 else 1
        if ib == lb:
            return 1 if a[ia][1] > 0 else -1
        i, c = a[ia]
        j, d = b[ib]
        if i < j:
            return 1 if c > 0 else -1
        if j < i:
            return -1 if d > 0 else 1
        if c != d:
            return 1 if c > d else -1
        ia += 1
        ib += 1


def from_coordinates(shape: GroupShape, coords: Mapping) -> GroupElement:
    k = 0
    items = []
    for key, c in coords.items():
        if key == ("k",):
            k = c
        else:
            items.append((key[1], c))
    return GroupElement(shape, items, k)


# -- functional interface ------------------------------------------------------

def group_arith(op: str, x: GroupElement, y=None) -> GroupElement:
    """``op`` is one of ``add``, ``neg``, ``scalar`` (``y`` is then the integer factor)."""
    if op == "add":
        return x + y
    if op == "neg":
        return -x
    if op == "scalar":
        if isinstance(x, int) and isinstance(y, GroupElement):
            x, y = y, x
        return x * y
    raise ValueError(f"unknown group operation {op!r}")


def group_cmp(x: GroupElement, y: GroupElement) -> str:
    return "<=>"[x.cmp(y) + 1]


def vmin_support(x: GroupElement) -> Optional[int]:
    return x.vmin()


def is_n_divisible(x: GroupElement, n: int) -> Tuple[bool, Optional[GroupElement]]:
    """Decide ``x in nG`` and return the quotient when it exists.

    The finite part and the multiple of ``a`` are determined uniquely by the
    element, so divisibility is coordinatewise.
    """
    if n < 1:
        raise PreconditionError("n must be a positive integer")
    q = x / n
    if x.shape.contains(q):
        return True, q
    return False, None


def quotient_project(x: GroupElement, cut: int) -> GroupElement:
    """Image of ``x`` under ``H -> H / {g : vmin(g) > cut}``, as a truncated representative."""
    s = x.shape
    if s.kind == "quotient":
        if cut > s.hi:
            raise PreconditionError("cut index outside the quotient range")
        s = s.base
    if s.kind != "hahnsum":
        raise UnsupportedShape("quotient_project needs a Hahn sum")
    if not s.in_range(cut):
        raise PreconditionError(f"cut index {cut} outside the range of {s}")
    target = quotient(s, cut)
    return GroupElement._raw(target, tuple((i, c) for i, c in x.coeffs if i <= cut), 0)


def lift_from_quotient(x: GroupElement) -> GroupElement:
    """Canonical representative of a quotient element inside the base group."""
    if x.shape.kind != "quotient":
        return x
    return GroupElement._raw(x.shape.base, x.coeffs, 0)


def is_discrete(shape: GroupShape) -> Tuple[bool, Optional[GroupElement]]:
    """Return ``(True, least positive element)`` or ``(False, None)``."""
    k = shape.kind
    if k in ("int", "dyadic", "rat"):
        return (True, shape.unit(0)) if k == "int" else (False, None)
    if k == "extsum":
        return False, None
    if k == "lex":
        return (True, shape.unit(1)) if shape.right == "int" else (False, None)
    # hahnsum / quotient: the least archimedean class sits at the largest index
    if shape.component == "int" and shape.hi is not None:
        return True, shape.unit(shape.hi)
    return False, None


def known_closed(shape: GroupShape) -> Optional[bool]:
    """Closedness in the divisible hull for the configured families (``None``: not known).

    A non-dyadic coefficient can only be approached when it sits in the
    least archimedean class, i.e. at the largest index of the window.
    """
    k = shape.kind
    if k == "rat" or shape.component == "rat" and shape.right in (None, "rat"):
        return True
    if k == "extsum":
        if shape.component == "int":
            # tails (coef*k)/n that are integers but not multiples of coef are limit points
            return abs(shape.coef) < 2
        return None
    if k == "lex":
        return shape.right != "dyadic"
    if k == "dyadic":
        return False
    return not (shape.component == "dyadic" and shape.hi is not None)
