"""Polynomials over truncated Hahn series, Newton lifting of simple residue roots,
and the Eisenstein irreducibility certificate."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import CertificateRejected, PrecisionError, PreconditionError, ShapeMismatch
from .groups import GroupElement, GroupShape
from .lattice import PrimeCertificate, prime_certificate, ring_divides, sympy_divides
from .series import MAX_STEPS, Series


class Polynomial:
    """Dense polynomial ``sum coeffs[i] * T^i`` with :class:`Series` coefficients."""

    __slots__ = ("coeffs", "shape")

    def __init__(self, coeffs: Sequence[Series]):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("a polynomial needs at least one coefficient")
        shape = coeffs[0].shape
        for c in coeffs:
            if c.shape != shape:
                raise ShapeMismatch("polynomial coefficients over different groups")
        while len(coeffs) > 1 and coeffs[-1].is_exact_zero():
            coeffs.pop()
        self.coeffs = coeffs
        self.shape = shape

    @classmethod
    def from_rationals(cls, shape: GroupShape, coeffs: Sequence) -> "Polynomial":
        return cls([Series.const(shape, c) for c in coeffs])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __repr__(self):
        from .literals import format_polynomial
        return f"Polynomial({format_polynomial(self)})"

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial([Series.const(self.shape, 0)])
        return Polynomial([c.scale(i) for i, c in enumerate(self.coeffs) if i])

    def eval(self, y: Series, cut: Optional[GroupElement] = None) -> Series:
        """Horner evaluation, truncating intermediate values at ``cut``."""
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = (acc * y + c).truncate(cut)
        return acc.truncate(cut)

    def is_monic(self) -> bool:
        lead = self.coeffs[-1]
        return lead.exact and lead == Series.const(self.shape, 1)


# -- rational polynomials ---------------------------------------------------

def rat_eval(coeffs: Sequence[Fraction], r) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * r + c
    return acc


def rat_derivative(coeffs: Sequence[Fraction]) -> List[Fraction]:
    return [Fraction(i * c) for i, c in enumerate(coeffs) if i] or [Fraction(0)]


def residue_poly(f: Polynomial) -> List[Fraction]:
    """Coefficientwise residue (raises :class:`NotInValuationRing` when some ``v < 0``)."""
    out = [Fraction(c.residue()) for c in f.coeffs]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def simple_root_check(fbar: Sequence, r) -> bool:
    r = Fraction(r)
    return rat_eval(fbar, r) == 0 and rat_eval(rat_derivative(fbar), r) != 0


# -- Newton lifting --------------------------------------------------------------

@dataclass(frozen=True)
class LiftResult:
    """Root of ``f`` known below ``target``; ``residual`` is ``None`` for an exact root."""

    root: Series
    residual: Optional[GroupElement]
    steps: int
    target: Optional[GroupElement]
    history: Tuple[GroupElement, ...] = field(default=())

    @property
    def exact(self) -> bool:
        return self.residual is None

    def doubling_holds(self) -> bool:
        """Residual valuations at least double from one Newton step to the next."""
        h = self.history
        return all(h[i + 1] >= h[i] * 2 for i in range(len(h) - 1))

    def to_json(self):
        from .literals import format_group, format_series
        return {
            "root": format_series(self.root),
            "residual_valuation": None if self.residual is None else format_group(self.residual),
            "steps": self.steps,
            "target": None if self.target is None else format_group(self.target),
            "history": [format_group(g) for g in self.history],
        }


def hensel_lift(f: Polynomial, r0, target: Optional[GroupElement], max_steps: int = MAX_STEPS,
                start: Optional[Series] = None) -> LiftResult:
    """Newton iteration ``y <- y - f(y)/f'(y)`` from the residue root ``r0`` until
    ``v(f(y)) >= target``.

    ``start`` is an optional better first approximation with residue ``r0``.
    """
    r0 = Fraction(r0)
    fbar = residue_poly(f)
    if not simple_root_check(fbar, r0):
        raise PreconditionError(f"{r0} is not a simple root of the residue polynomial")
    zero = f.shape.zero()
    if target is not None and not target > zero:
        raise PreconditionError("the target cutoff must be positive")
    for i, c in enumerate(f.coeffs):
        if c.cutoff is not None and (target is None or c.cutoff < target):
            raise PrecisionError(f"coefficient of T^{i} is only known below {c.cutoff}")
    fp = f.derivative()
    y = Series.const(f.shape, r0)
    if start is not None:
        if start.residue() != r0:
            raise PreconditionError("start value does not have the requested residue")
        y = start
    if y.exact and all(c.exact for c in f.coeffs) and f.eval(y).is_exact_zero():
        return LiftResult(y, None, 0, target, ())
    history: List[GroupElement] = []
    for step in range(max_steps + 1):
        fy = f.eval(y, target)
        if target is None:
            raise PrecisionError("an exact root was not found and no target cutoff was given")
        if fy.known_at_least(target):
            return LiftResult(y, target, step, target, tuple(history))
        if not fy.terms:
            raise PrecisionError(f"residual known only below {fy.cutoff}")
        e = fy.valuation()
        history.append(e)
        if step == 0 and not e * (1 << max_steps) >= target:
            raise PrecisionError(f"residual {e} cannot reach {target} in {max_steps} Newton steps")
        if step == max_steps:
            break
        u = fp.eval(y, target).invert(target - e)
        y = (y - fy * u).truncate(target)
    raise PrecisionError(f"Newton iteration exceeded {max_steps} steps")


def newton_family(shape: GroupShape, n: int, c: Series) -> Polynomial:
    """``T^n - T^(n-1) - c``."""
    if n < 2:
        raise PreconditionError("degree must be at least 2")
    coeffs = [Series.const(shape, 0) for _ in range(n + 1)]
    coeffs[0] = -c
    coeffs[n - 1] = Series.const(shape, -1)
    coeffs[n] = Series.const(shape, 1)
    return Polynomial(coeffs)


# -- Eisenstein ----------------------------------------------------------------

@dataclass(frozen=True)
class EisensteinCertificate:
    poly: Polynomial
    prime: Series
    prime_certificate: PrimeCertificate
    divides: Tuple[bool, ...]
    square_divides_constant: bool
    oracle_agrees: bool

    def recheck(self) -> bool:
        try:
            again = eisenstein_check(self.poly, self.prime)
        except CertificateRejected:
            return False
        return again.divides == self.divides and not again.square_divides_constant

    def to_json(self):
        from .literals import format_polynomial, format_series
        return {
            "polynomial": format_polynomial(self.poly),
            "prime": format_series(self.prime),
            "prime_certificate": self.prime_certificate.to_json(),
            "prime_divides_coefficient": list(self.divides),
            "square_divides_constant": self.square_divides_constant,
            "oracle_agrees": self.oracle_agrees,
        }


def eisenstein_check(g: Polynomial, a: Series) -> EisensteinCertificate:
    """Verify the Eisenstein conditions for ``g`` at the prime ``a``.

    Every divisibility verdict is cross-checked against :func:`sympy_divides`.
    """
    if not g.is_monic():
        raise CertificateRejected("not-monic", "leading coefficient must be exactly 1")
    if any(not c.exact for c in g.coeffs):
        raise CertificateRejected("not-exact", "coefficients must be group-ring elements")
    cert = prime_certificate(a)
    divides = []
    agree = True
    for i, c in enumerate(g.coeffs[:-1]):
        ok = ring_divides(a, c)[0]
        agree &= ok == sympy_divides(a, c)
        divides.append(ok)
        if not ok:
            raise CertificateRejected("coefficient-not-divisible",
                                      f"prime does not divide the coefficient of T^{i}")
    a2 = a * a
    sq = ring_divides(a2, g.coeffs[0])[0]
    agree &= sq == sympy_divides(a2, g.coeffs[0])
    if not agree:
        raise AssertionError("Laurent division disagrees with the sympy oracle")
    if sq:
        raise CertificateRejected("square-divides-constant", "prime squared divides the constant term")
    return EisensteinCertificate(g, a, cert, tuple(divides), sq, agree)
