"""Finitely generated subgroups, prime certificates and exact division in ``k[G]``.

Divisibility of group-ring elements is decided by moving to Laurent
polynomials: the exponents occurring in ``d`` and ``r`` generate a free
abelian group ``H``; a Hermite-normal-form basis of ``H`` identifies
``k[H]`` with ``k[x_1^{+-1}, ..., x_rho^{+-1}]``.  Since ``k[G]`` is free
over ``k[H]``, ``d | r`` in ``k[G]`` iff it holds in ``k[H]``.  After
shifting both sides by monomials (units) into ``k[x]`` with no monomial
factor on the divisor, one multivariate division with a single divisor
decides the question: the remainder vanishes iff ``d | r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import CertificateRejected, PrecisionError
from .groups import GroupElement, GroupShape, from_coordinates
from .series import Series

Vector = List[int]


# -- integer and rational linear algebra ---------------------------------------

def rational_rank(vectors: Sequence[Sequence[Fraction]]) -> Tuple[int, List[int]]:
    """Rank over Q by exact Gaussian elimination; also returns the pivot columns."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    pivots: List[int] = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][col]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col] / p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    return r, pivots


def hnf_basis(rows: Sequence[Sequence[int]]) -> List[Vector]:
    """Row Hermite normal form of the lattice spanned by ``rows`` (zero rows dropped).

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``.
    """
    work = [list(r) for r in rows if any(r)]
    ncols = len(rows[0]) if rows else 0
    basis: List[Vector] = []
    pivcols: List[int] = []
    for col in range(ncols):
        active = [r for r in work if r[col]]
        rest = [r for r in work if not r[col]]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            head = active[0]
            nxt = [head]
            for r in active[1:]:
                q = r[col] // head[col]
                r = [a - q * b for a, b in zip(r, head)]
                if r[col]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        if active:
            row = active[0]
            if row[col] < 0:
                row = [-a for a in row]
            for i, b in enumerate(basis):
                q = b[col] // row[col]
                if q:
                    basis[i] = [x - q * y for x, y in zip(b, row)]
            basis.append(row)
            pivcols.append(col)
        work = rest
    return basis


def basis_coordinates(basis: Sequence[Vector], v: Sequence[int]) -> Vector:
    """Integer coordinates of ``v`` in an echelon basis (``ValueError`` if outside the lattice)."""
    v = list(v)
    out = []
    for b in basis:
        col = next(i for i, x in enumerate(b) if x)
        q, rem = divmod(v[col], b[col])
        if rem:
            raise ValueError("vector is not in the lattice")
        out.append(q)
        if q:
            v = [x - q * y for x, y in zip(v, b)]
    if any(v):
        raise ValueError("vector is not in the lattice")
    return out


# -- coordinates of group elements ---------------------------------------------

def coordinate_keys(elems: Sequence[GroupElement]) -> List[tuple]:
    keys = set()
    for g in elems:
        keys.update(g.coordinates())
    return sorted(keys, key=lambda k: (len(k), k))


def coordinate_matrix(elems: Sequence[GroupElement], keys=None) -> Tuple[List[tuple], List[List[Fraction]]]:
    keys = coordinate_keys(elems) if keys is None else keys
    rows = []
    for g in elems:
        c = g.coordinates()
        rows.append([Fraction(c.get(k, 0)) for k in keys])
    return keys, rows


def _common_denominator(rows) -> int:
    d = 1
    for r in rows:
        for x in r:
            d = d * x.denominator // gcd(d, x.denominator)
    return d


# -- prime certificates --------------------------------------------------------

@dataclass(frozen=True)
class PrimeCertificate:
    """Evidence that ``element`` satisfies the support criterion for primality:
    ``0`` is in the support and the other exponents are Q-linearly independent."""

    element: Series
    support: Tuple[GroupElement, ...]
    rank: int
    pivots: Tuple[int, ...]

    def recheck(self) -> bool:
        try:
            again = prime_certificate(self.element)
        except CertificateRejected:
            return False
        return again.support == self.support and again.rank == self.rank

    def to_json(self):
        from .literals import format_group, format_series
        return {"element": format_series(self.element),
                "nonzero_support": [format_group(g) for g in self.support],
                "rank": self.rank,
                # primality in k[div G] is shown; the descent to k[G] is not re-proved
                "transfer_to_group_ring": "assumed"}


def prime_certificate(r: Series) -> PrimeCertificate:
    if not r.exact:
        raise CertificateRejected("not-exact", "prime certificates need group-ring elements")
    zero = r.shape.zero()
    if zero not in r.terms:
        raise CertificateRejected("zero-not-in-support", "0 is not in the support")
    others = tuple(g for g in r.support() if g != zero)
    if len(others) < 2:
        raise CertificateRejected("too-few-points", f"only {len(others)} nonzero support point(s)")
    _, rows = coordinate_matrix(others)
    rank, pivots = rational_rank(rows)
    if rank < len(others):
        raise CertificateRejected("dependent-support",
                                  f"rank {rank} < {len(others)}: support is Q-linearly dependent")
    return PrimeCertificate(r, others, rank, tuple(pivots))


# -- Laurent embedding -----------------------------------------------------------

Poly = Dict[Tuple[int, ...], Fraction]


@dataclass
class LaurentEmbedding:
    """Identification of ``k[H]`` with Laurent polynomials in ``rho`` variables."""

    shape: GroupShape
    keys: List[tuple]
    denom: int
    basis: List[Vector]

    @classmethod
    def for_elements(cls, shape: GroupShape, elems: Sequence[GroupElement]) -> "LaurentEmbedding":
        keys, rows = coordinate_matrix(elems)
        denom = _common_denominator(rows)
        ints = [[int(x * denom) for x in r] for r in rows]
        return cls(shape, keys, denom, hnf_basis(ints))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def exponent(self, g: GroupElement) -> Tuple[int, ...]:
        c = g.coordinates()
        v = [int(Fraction(c.get(k, 0)) * self.denom) for k in self.keys]
        return tuple(basis_coordinates(self.basis, v))

    def element(self, e: Sequence[int]) -> GroupElement:
        v = [0] * len(self.keys)
        for m, b in zip(e, self.basis):
            if m:
                v = [x + m * y for x, y in zip(v, b)]
        coords = {k: Fraction(x, self.denom) for k, x in zip(self.keys, v) if x}
        return from_coordinates(self.shape, coords)

    def to_laurent(self, s: Series) -> Poly:
        return {self.exponent(g): Fraction(c) for g, c in s.terms.items()}

    def from_laurent(self, p: Poly) -> Series:
        return Series(self.shape, {self.element(e): c for e, c in p.items()})


def _shift_to_polynomial(p: Poly) -> Tuple[Poly, Tuple[int, ...]]:
    rho = len(next(iter(p)))
    low = tuple(min(e[i] for e in p) for i in range(rho))
    return {tuple(a - b for a, b in zip(e, low)): c for e, c in p.items()}, low


def poly_divide(num: Poly, den: Poly) -> Tuple[Poly, Poly]:
    """Multivariate division by a single divisor under lex order: ``num = q*den + r``.

    No term of ``r`` is divisible by the leading monomial of ``den``, so
    ``r == {}`` iff ``den`` divides ``num``.
    """
    lm = max(den)
    lc = den[lm]
    rem = dict(num)
    quo: Poly = {}
    out: Poly = {}
    while rem:
        m = max(rem)
        c = rem.pop(m)
        if all(a >= b for a, b in zip(m, lm)):
            f = c / lc
            shift = tuple(a - b for a, b in zip(m, lm))
            quo[shift] = quo.get(shift, 0) + f
            for e, d in den.items():
                if e == lm:
                    continue
                t = tuple(a + b for a, b in zip(e, shift))
                v = rem.get(t, 0) - f * d
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
        else:
            out[m] = c
    return {e: c for e, c in quo.items() if c}, out


def ring_divides(d: Series, r: Series) -> Tuple[bool, Optional[Series]]:
    """Decide ``d | r`` in ``k[G]``; returns the quotient when it exists."""
    if not d.exact or not r.exact:
        raise PrecisionError("divisibility is decided for exact group-ring elements")
    if not d.terms:
        raise ZeroDivisionError("divisor is zero")
    d._same(r)
    if not r.terms:
        return True, Series.zero(d.shape)
    emb = LaurentEmbedding.for_elements(d.shape, list(d.terms) + list(r.terms))
    pd, sd = _shift_to_polynomial(emb.to_laurent(d))
    pr, sr = _shift_to_polynomial(emb.to_laurent(r))
    quo, rem = poly_divide(pr, pd)
    if rem:
        return False, None
    offset = tuple(a - b for a, b in zip(sr, sd))
    q = {tuple(a + b for a, b in zip(e, offset)): c for e, c in quo.items()}
    qs = emb.from_laurent(q)
    if qs * d != r:
        raise AssertionError("Laurent quotient failed to reproduce the dividend")
    return True, qs


def sympy_divides(d: Series, r: Series) -> bool:
    """Independent check of ``d | r`` with sympy over the raw coordinates.

    Exponents are scaled by a common denominator (an injective homomorphism
    into ``Z^m``) without any basis reduction, and sympy performs the
    polynomial division.
    """
    import sympy

    elems = list(d.terms) + list(r.terms)
    keys, rows = coordinate_matrix(elems)
    denom = _common_denominator(rows)
    gens = sympy.symbols(f"x0:{max(len(keys), 1)}")

    def to_expr(s: Series):
        vecs = {g: [int(x * denom) for x in coordinate_matrix([g], keys)[1][0]] for g in s.terms}
        low = [min(v[i] for v in vecs.values()) for i in range(len(keys))]
        expr = 0
        for g, c in s.terms.items():
            mono = sympy.Integer(1)
            for x, e, lo in zip(gens, vecs[g], low):
                mono *= x ** (e - lo)
            expr += sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) * mono
        return sympy.Poly(expr, *gens, domain="QQ")

    if not r.terms:
        return True
    _, rem = to_expr(r).div(to_expr(d))
    return rem.is_zero
