"""A one-parameter definition of the valuation ring from a non-closed value group.

Fix ``eps`` and ``n`` such that ``v(eps)`` is not ``n``-divisible but
``v(eps)/n`` is a left-sided limit point of the value group.  Then

* ``exists y: y^n - y^(n-1) = eps x^n`` holds iff ``v(eps x^n) > 0``;
* ``Psi = {eps x^n : v(eps x^n) > 0}``;
* ``Omega = {x^n - x^(n-1) : exists y, exists z in Psi, z(y^n - y^(n-1)) = x^n - x^(n-1)}``
  equals the maximal ideal, and ``x`` lies in the valuation ring iff
  ``x * Omega`` is contained in ``Omega``.

Every positive answer carries a Newton-lifted witness; every negative answer
of the formula records the value-group identity that would contradict the
non-divisibility of ``v(eps)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import CertificateRejected, PrecisionError, PreconditionError, UnsupportedShape
from .groups import GroupElement, GroupShape, is_n_divisible
from .hensel import LiftResult, Polynomial, hensel_lift, newton_family
from .series import Series
from .witnesses import LimitPointWitness, limit_point_witness

#: Working cutoff is ``(1 + DEFAULT_MARGIN) * v`` for a positive value ``v``.
DEFAULT_MARGIN = 4


def working_cutoff(value: GroupElement, margin: int = DEFAULT_MARGIN,
                   available: Optional[GroupElement] = None) -> GroupElement:
    """``(1 + margin) * value``, capped by the precision actually available."""
    target = value * (1 + margin)
    if available is not None and available < target:
        if not value < available:
            raise PrecisionError(f"input known only below {available}, not beyond {value}")
        target = available
    return target


def rational_nth_root(c, n: int) -> Optional[Fraction]:
    """Exact ``n``-th root in Q, or ``None``."""
    c = Fraction(c)
    if c < 0 and n % 2 == 0:
        return None
    sign = -1 if c < 0 else 1
    roots = []
    for part in (abs(c.numerator), c.denominator):
        r = round(part ** (1.0 / n))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** n == part:
                roots.append(cand)
                break
        else:
            # float rounding fallback for large inputs
            lo, hi = 0, part + 1
            while lo < hi:
                mid = (lo + hi) // 2
                if mid ** n < part:
                    lo = mid + 1
                else:
                    hi = mid
            if lo ** n != part:
                return None
            roots.append(lo)
    return sign * Fraction(roots[0], roots[1])


def _validation_bounds(shape: GroupShape, point: GroupElement) -> List[GroupElement]:
    """A spread of positive bounds across archimedean classes."""
    out = []
    if shape.extended:
        top = max([shape.lo] + [i for i, _ in point.coeffs])
        out += [shape.unit(i) for i in range(shape.lo, top + 4)]
        out.append(shape.distinguished())
    else:
        hi = shape.hi if shape.hi is not None else 0
        lo = hi - 3 if shape.lo is None else max(shape.lo, hi - 3)
        out += [shape.unit(i) for i in range(lo, hi + 1)]
        out += [shape.unit(hi, Fraction(1, 1 << j)) for j in range(1, 8)
                if shape.component_at(hi) != "int"]
    return out


def validate_witness(w: LimitPointWitness, extra: Sequence[GroupElement] = ()) -> None:
    for b in list(_validation_bounds(w.shape, w.point)) + list(extra):
        g = w(b)
        if not w.sandwich_holds(b, g):
            raise CertificateRejected("witness-sandwich", f"generator output {g} fails for bound {b}")


@dataclass(frozen=True)
class ParameterCertificate:
    """``v(eps)`` is not ``n``-divisible and ``v(eps)/n`` is a left-sided limit point."""

    shape: GroupShape
    epsilon: Series
    value: GroupElement
    n: int
    witness: LimitPointWitness
    reduced: bool = False

    def to_json(self):
        from .literals import format_group, format_series
        return {
            "epsilon": format_series(self.epsilon),
            "value": format_group(self.value),
            "n": self.n,
            "limit_point": format_group(self.witness.point),
            "side": self.witness.side,
            "inverted_parameter": self.reduced,
            "n_divisible": False,
        }


def certify_parameter(shape: GroupShape, value: GroupElement, n: int,
                      epsilon: Optional[Series] = None,
                      witness: Optional[LimitPointWitness] = None) -> ParameterCertificate:
    """Certify ``eps`` (default ``t^value``) as a defining parameter.

    If only a right-sided witness is available, ``eps`` is replaced by
    ``eps^-1``: then ``-value/n`` is a left-sided limit point.
    """
    if n < 2:
        raise PreconditionError("n must be at least 2")
    shape.check(value)
    if not shape.contains(value):
        raise PreconditionError(f"{value} is not an element of {shape}")
    if is_n_divisible(value, n)[0]:
        raise CertificateRejected("divisible", f"{value} is {n}-divisible")
    if epsilon is None:
        epsilon = Series.monomial(value)
    elif epsilon.valuation() != value:
        raise PreconditionError("epsilon does not have the stated valuation")
    point = value / n
    if witness is None:
        try:
            witness = limit_point_witness(shape, point, "left")
        except UnsupportedShape:
            witness = limit_point_witness(shape, point, "right")
    if witness.point != point:
        raise CertificateRejected("witness-point", "witness is for a different point")
    validate_witness(witness)
    if witness.side == "left":
        return ParameterCertificate(shape, epsilon, value, n, witness)
    inv = epsilon.invert() if epsilon.exact and len(epsilon.terms) == 1 else \
        epsilon.invert(working_cutoff(abs(value)) - value)
    left = witness.negated()
    validate_witness(left)
    return ParameterCertificate(shape, inv, -value, n, left, reduced=True)


# -- Phi ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiCertificate:
    x: Series
    verdict: bool
    value: Optional[GroupElement]
    witness: Optional[LiftResult] = None
    obstruction: Optional[Dict] = None

    def to_json(self):
        from .literals import format_group, format_series
        out = {"x": format_series(self.x), "verdict": self.verdict,
               "value": None if self.value is None else format_group(self.value)}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.obstruction is not None:
            ob = dict(self.obstruction)
            ob["value"] = format_group(ob["value"])
            out["obstruction"] = ob
        return out


def decide_phi(x: Series, cert: ParameterCertificate, margin: int = DEFAULT_MARGIN) -> PhiCertificate:
    """Decide ``exists y: y^n - y^(n-1) = eps x^n`` with a certificate either way."""
    n = cert.n
    shape = cert.shape
    one = Series.const(shape, 1)
    if x.is_exact_zero():
        return PhiCertificate(x, True, None, LiftResult(one, None, 0, None, ()))
    c = cert.epsilon * x ** n
    V = c.valuation()
    zero = shape.zero()
    if V > zero:
        target = working_cutoff(V, margin, c.cutoff)
        lift = hensel_lift(newton_family(shape, n, c), 1, target)
        if lift.residual is not None and lift.residual < target:
            raise AssertionError("lift stopped short of the working cutoff")
        return PhiCertificate(x, True, V, lift)
    # any solution y would fall into one of three cases on v(y)
    divisible = is_n_divisible(V, n)[0]
    obstruction = {
        "value": V,
        "case1": "needs v(eps x^n) > 0",
        "case2": {"needs": "v(eps x^n) = 0, i.e. v(eps) = -n v(x)", "holds": V == zero},
        "case3": {"needs": "v(eps x^n) in nG, i.e. v(eps) = n (v(y) - v(x))", "holds": divisible},
        "tags": ["case2", "case3"],
    }
    if V == zero or divisible:
        raise AssertionError("value-group obstruction failed: v(eps) would be n-divisible")
    return PhiCertificate(x, False, V, obstruction=obstruction)


# -- Psi ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PsiWitness:
    """``w = eps * x^n`` with ``x = r * t^q * u`` (``u`` a principal unit)."""

    w: Series
    x: Series
    exponent: GroupElement
    leading_root: Fraction
    unit_lift: Optional[LiftResult]


def psi_member(w: Series, cert: ParameterCertificate, margin: int = DEFAULT_MARGIN
               ) -> Tuple[bool, Optional[PsiWitness], str]:
    """``(member, witness, reason)`` for ``w in Psi``."""
    shape, n = cert.shape, cert.n
    if w.is_exact_zero():
        return True, PsiWitness(w, Series.zero(shape), shape.zero(), Fraction(0), None), "zero"
    V = w.valuation()
    if not V > shape.zero():
        return False, None, "valuation not positive"
    ok, q = is_n_divisible(V - cert.value, n)
    if not ok:
        return False, None, "v(w) - v(eps) is not n-divisible"
    # relative precision of w / (c t^V)
    avail = None if w.cutoff is None else w.cutoff - V
    if cert.epsilon.exact and len(cert.epsilon.terms) == 1:
        eps_inv = cert.epsilon.invert()
    else:
        eps_inv = cert.epsilon.invert(working_cutoff(V, margin, w.cutoff) - cert.value)
    ratio = (w * eps_inv).shift(-(q * n))
    lead = Fraction(ratio.lead()[1])
    r = rational_nth_root(lead, n)
    if r is None:
        # over Q the leading coefficient must itself be an n-th power
        return False, None, "leading coefficient has no rational n-th root"
    u = ratio.scale(1 / lead)
    if u.exact and u == Series.const(shape, 1):
        x = Series.monomial(q, r)
        return True, PsiWitness(w, x, q, r, None), "monomial"
    dev = (u - 1).valuation_bound()
    target = working_cutoff(dev, margin, avail)
    f = Polynomial([-u] + [Series.const(shape, 0)] * (n - 1) + [Series.const(shape, 1)])
    lift = hensel_lift(f, 1, target)
    x = lift.root.shift(q).scale(r)
    return True, PsiWitness(w, x, q, r, lift), "unit root lifted"


# -- Omega --------------------------------------------------------------------------

@dataclass(frozen=True)
class OmegaTriple:
    """Claimed ``z (y^n - y^(n-1)) = x^n - x^(n-1)`` below ``cutoff``."""

    x: Series
    z: Series
    y: Series
    cutoff: GroupElement


@dataclass(frozen=True)
class OmegaCertificate:
    a: Series
    x: LiftResult
    g_b: GroupElement
    b: Series
    z: Series
    y: LiftResult
    cutoff: GroupElement

    @property
    def triple(self) -> OmegaTriple:
        return OmegaTriple(self.x.root, self.z, self.y.root, self.cutoff)

    def value_checks(self, cert: ParameterCertificate) -> Dict[str, bool]:
        """The valuation inequalities, evaluated exactly in the value group."""
        va = self.a.valuation()
        vz = cert.value - self.g_b * cert.n
        point = cert.value / cert.n
        return {
            "limit_sandwich": point - va / cert.n < self.g_b < point,
            "v(z) > 0": vz > vz.shape.zero(),
            "v(z) < v(a)": vz < va,
            "v(z) matches z": self.z.valuation() == vz,
        }

    def to_json(self):
        from .literals import format_group, format_series
        return {
            "a": format_series(self.a),
            "x": self.x.to_json(),
            "v(b)": format_group(self.g_b),
            "z": format_series(self.z),
            "y": self.y.to_json(),
            "cutoff": format_group(self.cutoff),
        }


def omega_witness(a: Series, cert: ParameterCertificate, margin: int = DEFAULT_MARGIN) -> OmegaCertificate:
    """Constructive proof of ``a in Omega`` for ``a`` in the maximal ideal."""
    shape, n = cert.shape, cert.n
    va = a.valuation()
    if va is None or not va > shape.zero():
        raise PreconditionError("a is not in the maximal ideal")
    W = working_cutoff(va, margin, a.cutoff)
    xl = hensel_lift(newton_family(shape, n, a), 1, W)
    h = va / n
    g_b = cert.witness(h)
    if not cert.witness.sandwich_holds(h, g_b):
        raise AssertionError("limit-point generator violated its sandwich")
    b = Series.monomial(g_b)
    z = cert.epsilon * b.invert() ** n
    vz = z.valuation()
    a_over_z = a * z.invert(W - vz) if not (z.exact and len(z.terms) == 1) else a * z.invert()
    yl = hensel_lift(newton_family(shape, n, a_over_z), 1, W - vz)
    oc = OmegaCertificate(a, xl, g_b, b, z, yl, W)
    bad = [k for k, ok in oc.value_checks(cert).items() if not ok]
    if bad:
        raise AssertionError(f"omega certificate failed its own checks: {bad}")
    verify_triple(oc.triple, cert)
    return oc


def verify_triple(t: OmegaTriple, cert: ParameterCertificate) -> Series:
    """Check a claimed membership triple; returns ``u = x^n - x^(n-1)``."""
    n = cert.n
    W = t.cutoff
    u = (t.x ** n - t.x ** (n - 1)).truncate(W)
    lhs = (t.z * (t.y ** n - t.y ** (n - 1))).truncate(W)
    if u.cutoff is not None and u.cutoff < W or lhs.cutoff is not None and lhs.cutoff < W:
        raise CertificateRejected("precision", "identity is not known up to the claimed cutoff")
    if not u.agrees_with(lhs, W):
        raise CertificateRejected("identity", "z (y^n - y^(n-1)) differs from x^n - x^(n-1)")
    vu = u.valuation_bound()
    if vu is not None and not vu < W:
        raise CertificateRejected("precision", "cutoff does not exceed the value being certified")
    member, _, reason = psi_member(t.z, cert)
    if not member:
        raise CertificateRejected("z-not-in-psi", reason)
    return u


def omega_member_forward(u: Union[Series, OmegaTriple], cert: ParameterCertificate) -> bool:
    """Forward inclusion: a verified triple forces ``v(u) > 0``."""
    zero = cert.shape.zero()
    if isinstance(u, Series):
        v = u.valuation()
        return v is None or v > zero
    value = verify_triple(u, cert)
    v = value.valuation()
    if v is not None and not v > zero:
        raise AssertionError("verified triple with v(u) <= 0 contradicts non-divisibility of v(eps)")
    return True


# -- valuation ring ---------------------------------------------------------------

@dataclass
class OvReport:
    """``verdict`` is ``v(x) >= 0``; ``consistent`` says the sampled universal agrees with it."""

    verdict: bool
    samples: int
    consistent: bool
    failing: List[Tuple[str, str]] = field(default_factory=list)

    def to_json(self):
        return {"verdict": self.verdict, "samples": self.samples, "consistent": self.consistent,
                "failing_u": [list(p) for p in self.failing]}


def ov_member(x: Series, cert: ParameterCertificate, budget: int = 8, seed: int = 0,
              margin: int = DEFAULT_MARGIN) -> OvReport:
    """``v(x) >= 0`` together with a sampled check of ``x * Omega <= Omega``.

    When ``v(x) < 0`` the sample includes ``u = t^-v(x)``, for which ``xu``
    is a unit and so leaves the maximal ideal.
    """
    from .literals import format_series
    from .sampling import random_positive_series

    shape = cert.shape
    zero = shape.zero()
    vx = x.valuation()
    verdict = vx is None or vx >= zero
    rng = random.Random(seed)
    us: List[Series] = []
    if vx is not None and vx < zero:
        us.append(Series.monomial(-vx))
    while len(us) < budget:
        us.append(random_positive_series(shape, rng))
    failing = []
    for u in us:
        omega_witness(u, cert, margin)
        w = x * u
        inside = w.is_exact_zero() or w.valuation() > zero
        if inside and not w.is_exact_zero():
            inside = omega_member_forward(omega_witness(w, cert, margin).triple, cert)
        if not inside:
            failing.append((format_series(u), format_series(w)))
    return OvReport(verdict, len(us), (not failing) == verdict, failing)
