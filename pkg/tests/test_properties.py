"""Property tests for the algebraic invariants of every layer."""

from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from hahnval.definability import certify_parameter, decide_phi, omega_member_forward, omega_witness
from hahnval.errors import PrecisionError
from hahnval.groups import (
    G_EX,
    NEG_OMEGA_DYADIC,
    NEG_OMEGA_INT,
    GroupElement,
    hahn_sum,
    is_n_divisible,
    lex_pair,
    quotient_project,
)
from hahnval.hensel import hensel_lift, newton_family
from hahnval.lattice import ring_divides, sympy_divides
from hahnval.literals import format_group, format_series, parse_group, parse_series
from hahnval.series import Series, gmin

H7 = hahn_sum(-7, 0)
LEX = lex_pair()
SHAPES = {
    "ext": (G_EX, range(0, 6)),
    "negomega": (NEG_OMEGA_INT, range(-5, 1)),
    "dyadic": (NEG_OMEGA_DYADIC, range(-5, 1)),
    "lex": (LEX, range(0, 2)),
    "window": (H7, range(-7, 1)),
}


def coeff_for(shape, draw):
    if shape.component == "dyadic":
        return Fraction(draw(st.integers(-8, 8)), 2 ** draw(st.integers(0, 3)))
    return Fraction(draw(st.integers(-6, 6)))


@st.composite
def elements(draw, key):
    shape, idx = SHAPES[key]
    idx = list(idx)
    chosen = draw(st.lists(st.sampled_from(idx), max_size=4, unique=True))
    coeffs = {i: coeff_for(shape, draw) for i in chosen}
    k = draw(st.integers(-2, 2)) if shape.extended else 0
    return GroupElement(shape, coeffs, k)


@st.composite
def triples(draw, key=None):
    key = key or draw(st.sampled_from(sorted(SHAPES)))
    return tuple(draw(elements(key)) for _ in range(3))


@st.composite
def ring_elements(draw, key="ext", nonneg=False, max_terms=3):
    shape = SHAPES[key][0]
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        g = draw(elements(key))
        if nonneg and g < shape.zero():
            g = -g
        terms[g] = Fraction(draw(st.integers(-5, 5)))
    return Series(shape, terms)


# -- groups ---------------------------------------------------------------------

@given(triples())
def test_group_axioms(xyz):
    x, y, z = xyz
    zero = x.shape.zero()
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    assert x + (-x) == zero
    if x < y:
        assert x + z < y + z


@given(triples())
def test_vmin_law(xyz):
    x, y, _ = xyz
    s = x + y
    if s.is_zero():
        return
    vx, vy = x.vmin(), y.vmin()
    bound = min(v for v in (vx, vy) if v is not None)
    assert s.vmin() >= bound
    if vx is not None and vy is not None and vx != vy:
        assert s.vmin() == min(vx, vy)


@given(triples())
def test_canonical(xyz):
    x, y, _ = xyz
    s = x + y
    assert all(c != 0 for _, c in s.coeffs)
    assert (x.cmp(y) == 0) == ((x.coeffs, x.k) == (y.coeffs, y.k))


@given(st.sampled_from(sorted(SHAPES)).flatmap(elements), st.integers(1, 6))
def test_divisibility_quotient(x, n):
    ok, q = is_n_divisible(x, n)
    if ok:
        assert q * n == x
    assert is_n_divisible(x * n, n)[0]


@given(triples("window"), st.integers(-7, 0))
def test_quotient_project_homomorphism(xyz, cut):
    x, y, _ = xyz
    p = lambda g: quotient_project(g, cut)
    assert p(x + y) == p(x) + p(y)
    assert quotient_project(p(x), cut) == p(x)


# -- series -------------------------------------------------------------------------

@given(ring_elements(), ring_elements(), ring_elements())
def test_ring_axioms(r, s, u):
    assert (r * s) * u == r * (s * u)
    assert r * (s + u) == r * s + r * u
    assert r * s == s * r


@given(ring_elements(), ring_elements())
def test_valuation_laws(r, s):
    assert (r.valuation() is None) == r.is_exact_zero()
    if r.is_exact_zero() or s.is_exact_zero():
        return
    assert (r * s).valuation() == r.valuation() + s.valuation()
    if not (r + s).is_exact_zero():
        assert (r + s).valuation() >= gmin(r.valuation(), s.valuation())


@given(ring_elements(), ring_elements())
def test_order_compatibility(r, s):
    if r.sign() > 0 and s.sign() > 0:
        assert (r + s).sign() > 0 and (r * s).sign() > 0


@given(ring_elements(nonneg=True), ring_elements(), elements("ext"), st.integers(1, 5))
def test_valuation_ring_convex(y, rest, g, c):
    # a positive element outside O_v lies above all of O_v
    zero = G_EX.zero()
    assume(g < zero)
    x = Series.monomial(g, c) + rest.truncate(None)
    assume(not x.is_exact_zero() and x.valuation() == g and x.sign() > 0)
    assert y.is_exact_zero() or y.valuation() >= zero
    assert (x - y).sign() > 0 and (x + y).sign() > 0


@given(ring_elements(), ring_elements(), elements("ext"), elements("ext"))
def test_truncation_soundness(r, s, c1, c2):
    rt, st_ = r.truncate(c1), s.truncate(c2)
    total = rt + st_
    assert total.agrees_with(r + s, total.cutoff)
    if not rt.terms and not st_.terms and rt.cutoff is not None and st_.cutoff is not None:
        with pytest.raises(PrecisionError):
            rt * st_
        return
    prod = rt * st_
    assert prod.agrees_with(r * s, prod.cutoff)


@given(ring_elements(nonneg=True), st.integers(1, 6))
def test_invert(s, m):
    unit = 1 + s.truncate(None)
    tail = unit - 1
    assume(not tail.is_exact_zero() and tail.valuation() > G_EX.zero())
    target = tail.valuation() * m
    inv = unit.invert(target)
    assert (unit * inv - 1).known_at_least(target)


@given(ring_elements("negomega", max_terms=2), ring_elements("negomega", max_terms=2))
def test_ring_divides_against_sympy(d, q):
    assume(not d.is_exact_zero())
    r = d * q
    ok, quo = ring_divides(d, r)
    assert ok and quo * d == r
    r2 = r + Series.monomial(NEG_OMEGA_INT.unit(-5, 7))
    ok2, quo2 = ring_divides(d, r2)
    assert ok2 == sympy_divides(d, r2)
    if ok2:
        assert quo2 * d == r2


# -- literals -------------------------------------------------------------------------

@given(st.sampled_from(sorted(SHAPES)).flatmap(elements))
def test_group_literal_roundtrip(x):
    assert parse_group(format_group(x), x.shape) == x


@given(ring_elements(), st.one_of(st.none(), elements("ext")))
def test_series_literal_roundtrip(s, cut):
    s = s.truncate(cut)
    assert parse_series(format_series(s), s.shape) == s


# -- hensel --------------------------------------------------------------------------

def _positive(g):
    return g if g > G_EX.zero() else -g


@given(elements("ext"), st.sampled_from([2, 3, 5]), st.integers(1, 4))
def test_lift_soundness_and_uniqueness(g, n, m):
    assume(not g.is_zero())
    g = _positive(g)
    c = Series.monomial(g, 3)
    f = newton_family(G_EX, n, c)
    T = g * (2 ** m)
    a = hensel_lift(f, 1, T)
    b = hensel_lift(f, 1, T)
    assert f.eval(a.root, T).known_at_least(T)
    assert a.root.residue() == 1
    assert a.root.agrees_with(b.root, T)
    assert a.doubling_holds()


# -- definability ----------------------------------------------------------------------

CERT = certify_parameter(G_EX, G_EX.distinguished(), 2)


@given(ring_elements(max_terms=4))
def test_phi_matches_sign_test(x):
    assume(not x.is_exact_zero())
    expected = (CERT.epsilon * x * x).valuation() > G_EX.zero()
    assert decide_phi(x, CERT).verdict == expected


@given(ring_elements(nonneg=True), ring_elements(nonneg=True))
def test_multiplicative_stability(x, u):
    x = 1 + x
    u = u.shift(G_EX.unit(0))
    assume(not x.is_exact_zero() and not u.is_exact_zero())
    assert omega_member_forward(omega_witness(x * u, CERT).triple, CERT)
