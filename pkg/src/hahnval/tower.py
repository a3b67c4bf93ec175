"""Finite-depth model of an inverse-limit field built from stacked Hahn-series stages.

Stage ``m`` lives in ``Q((H_m))`` with ``H_m`` the Hahn sum of ``A`` over the
indices ``-2m+1 .. 0``; all stages are embedded in ``H_M`` for the configured
depth ``M``.  The block added at stage ``m`` is ``(-2m+1, -2m+2)``: it is the
most significant one, so ``Q((H_m)) = Q((H_{m-1}))((A x A))``.

``psi(i, i-1)`` is the residue map of the block valuation of stage ``i``
(``INF`` outside its valuation ring).  A tower element is the tuple of all
projections of a top-stage series.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import CertificateRejected, IndeterminateError, PreconditionError
from .groups import GroupElement, GroupShape, hahn_sum, lift_from_quotient, quotient_project
from .hensel import (
    Polynomial,
    eisenstein_check,
    hensel_lift,
    residue_poly,
    simple_root_check,
)
from .lattice import prime_certificate
from .series import Series, gmin


class _Inf:
    """Marker for the point at infinity of a place."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Inf, ())


INF = _Inf()
Coord = Union[Series, _Inf]


@dataclass(frozen=True)
class TowerConfig:
    component: str = "int"
    depth: int = 4
    margin: int = 4

    def __post_init__(self):
        if self.depth < 1:
            raise PreconditionError("depth must be at least 1")
        if self.margin < 1:
            raise PreconditionError("margin must be at least 1")

    @property
    def shape(self) -> GroupShape:
        return hahn_sum(-2 * self.depth + 1, 0, self.component)

    def block(self, m: int) -> Tuple[int, int]:
        return (-2 * m + 1, -2 * m + 2)

    def stage_window(self, m: int) -> Tuple[int, int]:
        return (-2 * m + 1, 0)

    def in_stage(self, g: GroupElement, m: int) -> bool:
        lo = -2 * m + 1
        return all(i >= lo for i, _ in g.coeffs)

    def to_json(self):
        return {"component": self.component, "depth": self.depth, "margin": self.margin}


def _block_part(g: GroupElement, lo: int, hi: int) -> Tuple:
    return tuple((i, c) for i, c in g.coeffs if lo <= i <= hi)


def _sign_of(part: Tuple) -> int:
    if not part:
        return 0
    return 1 if part[0][1] > 0 else -1


def stage_valuation_sign(x: Series, i: int) -> int:
    """Sign of the stage-``i`` block valuation of ``x`` (``+1`` for zero)."""
    lo = -2 * i + 1
    if x.terms:
        return _sign_of(_block_part(x.items()[0][0], lo, lo + 1))
    if x.cutoff is None:
        return 1
    if _sign_of(_block_part(x.cutoff, lo, lo + 1)) > 0:
        return 1
    raise IndeterminateError(f"stage-{i} valuation not determined below {x.cutoff}")


def residue_step(x: Coord, i: int) -> Coord:
    """``psi(i, i-1)``."""
    if x is INF:
        return INF
    lo = -2 * i + 1
    s = stage_valuation_sign(x, i)
    if s < 0:
        return INF
    if s > 0:
        return Series.zero(x.shape)
    terms = {g: c for g, c in x.terms.items() if not _block_part(g, lo, lo + 1)}
    cut = x.cutoff
    if cut is not None:
        # block-zero exponents are all known once the cutoff has a positive block part
        cs = _sign_of(_block_part(cut, lo, lo + 1))
        if cs < 0:
            raise IndeterminateError("residue not determined at this precision")
        cut = None if cs > 0 else cut
    return Series(x.shape, terms, cut)


def psi_project(x: Coord, i: int, j: int) -> Coord:
    """``psi(i, j) = psi(j+1, j) o ... o psi(i, i-1)``."""
    if j > i or j < 0:
        raise PreconditionError("need 0 <= j <= i")
    for k in range(i, j, -1):
        x = residue_step(x, k)
    return x


def direct_projection(x: Series, i: int, j: int) -> Coord:
    """One-shot ``psi(i, j)``: read the sign of the leading exponent restricted to
    the blocks of stages ``j+1 .. i`` (independent of :func:`residue_step`)."""
    lo, hi = -2 * i + 1, -2 * j
    if not x.terms:
        if x.cutoff is None:
            return x
        raise IndeterminateError("no known term")
    s = _sign_of(_block_part(x.items()[0][0], lo, hi))
    if s < 0:
        return INF
    if s > 0:
        return Series.zero(x.shape)
    return Series(x.shape, {g: c for g, c in x.terms.items() if not _block_part(g, lo, hi)}, None
                  if x.cutoff is None else _direct_cut(x.cutoff, lo, hi))


def _direct_cut(cut, lo, hi):
    s = _sign_of(_block_part(cut, lo, hi))
    if s > 0:
        return None
    if s < 0:
        raise IndeterminateError("residue not determined at this precision")
    return cut


@dataclass(frozen=True)
class TowerElement:
    """Coordinates ``x_0 .. x_M`` (``INF`` markers only below the first series)."""

    config: TowerConfig
    coords: Tuple[Coord, ...]

    def __post_init__(self):
        if len(self.coords) != self.config.depth + 1:
            raise PreconditionError("wrong number of coordinates")
        if all(c is INF for c in self.coords):
            raise PreconditionError("the all-infinite tuple is not an element")
        seen = False
        for c in self.coords:
            if c is INF and seen:
                raise PreconditionError("INF above a finite coordinate")
            seen |= c is not INF

    def __getitem__(self, m: int) -> Coord:
        return self.coords[m]

    @property
    def top(self) -> Series:
        return self.coords[-1]

    def compatible(self) -> bool:
        """``psi(i, i-1)(x_i) = x_(i-1)``, on the common precision for truncated coordinates."""
        for i in range(self.config.depth, 0, -1):
            p = residue_step(self.coords[i], i)
            q = self.coords[i - 1]
            if (p is INF) != (q is INF):
                return False
            if p is not INF and not p.agrees_with(q):
                return False
        return True

    def is_zero(self) -> bool:
        t = self.top
        return t.is_exact_zero()

    def to_json(self):
        from .literals import format_series
        return ["inf" if c is INF else format_series(c) for c in self.coords]


def make_tower(x: Series, config: TowerConfig) -> TowerElement:
    """All projections of a top-stage series."""
    if x.shape != config.shape:
        raise PreconditionError(f"series must live over {config.shape}")
    coords: List[Coord] = [x]
    cur: Coord = x
    for i in range(config.depth, 0, -1):
        cur = residue_step(cur, i)
        coords.append(cur)
    return TowerElement(config, tuple(reversed(coords)))


@dataclass(frozen=True)
class TowerValue:
    """``v_n`` of a tower element together with its valuation-ring flags.

    ``value`` keeps the entries at indices ``<= -2n`` (the quotient
    representative); ``boundary`` marks ``n = M`` where no index survives.
    """

    n: int
    v0: Optional[GroupElement]
    value: Optional[GroupElement]
    in_ring: bool
    in_ideal: bool
    boundary: bool


def tower_valuation(x: TowerElement, n: int) -> TowerValue:
    cfg = x.config
    if not 0 <= n <= cfg.depth:
        raise PreconditionError("n outside 0..M")
    top = x.top
    zero = cfg.shape.zero()
    in_ring = x[n] is not INF
    in_ideal = in_ring and x[n].is_exact_zero()
    if top.is_exact_zero():
        return TowerValue(n, None, None, True, True, n == cfg.depth)
    v0 = top.valuation()
    boundary = -2 * n < cfg.shape.lo
    if n == 0:
        value = v0
    elif boundary:
        value = zero
    else:
        value = lift_from_quotient(quotient_project(v0, -2 * n))
    # the place flags must match the sign of the projected value
    if in_ring != (value >= zero) or in_ideal != (value > zero):
        raise AssertionError("place coordinates disagree with the projected valuation")
    return TowerValue(n, v0, value, in_ring, in_ideal, boundary)


# -- certificates ----------------------------------------------------------------

@dataclass
class StageCertificate:
    kind: str
    payload: Dict
    ok: bool = True
    failures: List[str] = field(default_factory=list)

    def to_json(self):
        from .literals import to_json_value
        return {"kind": self.kind, "ok": self.ok, "failures": list(self.failures),
                "payload": to_json_value(self.payload)}


def _stage_cutoff(coeffs: Sequence[Series], margin: int) -> Optional[GroupElement]:
    vals = [c.valuation() for c in coeffs if not c.is_exact_zero()]
    if not vals:
        return None
    v = vals[0]
    for w in vals[1:]:
        v = gmin(v, w)
    return v * (1 + margin)


def _root_polynomial(shape: GroupShape, n: int, coeffs: Sequence[Series]) -> Polynomial:
    """``T^(n+1) + T^n + a^(n-1) T^(n-1) + ... + a^(0)``."""
    cs = list(coeffs) + [Series.const(shape, 1), Series.const(shape, 1)]
    return Polynomial(cs)


def lift_root_through_stages(coeffs: Sequence[TowerElement], n: int,
                             config: Optional[TowerConfig] = None) -> Tuple[TowerElement, StageCertificate]:
    """Root of ``f`` with residue ``-1`` at every stage, lifted stage by stage.

    ``coeffs`` are ``a^(0), ..., a^(n-1)``, all in the maximal ideal of ``v_n``.
    """
    if len(coeffs) != n:
        raise PreconditionError(f"expected {n} coefficients a^(0..{n - 1})")
    config = config or (coeffs[0].config if coeffs else TowerConfig())
    if n < 1 or n + 1 > config.depth:
        raise PreconditionError("need 1 <= n and n + 1 <= depth")
    shape = config.shape
    for j, a in enumerate(coeffs):
        if not tower_valuation(a, n).in_ideal:
            raise PreconditionError(f"a^({j}) is not in the maximal ideal of v_{n}")
    roots: List[Series] = []
    stages = []
    failures = []
    minus_one = Series.const(shape, -1)
    for i in range(config.depth + 1):
        a_i = [a[i] for a in coeffs]
        f_i = _root_polynomial(shape, n, a_i)
        if i <= n:
            # coefficients in the maximal ideal of v_n vanish here; -1 is an exact simple root
            if any(not c.is_exact_zero() for c in a_i):
                failures.append(f"stage {i}: coefficients do not vanish")
            y = minus_one
            res = f_i.eval(y)
            residual = None if res.is_exact_zero() else res.valuation()
            stages.append({"stage": i, "cutoff": None, "residual": residual, "root": y, "steps": 0})
            roots.append(y)
            continue
        fbar = residue_poly(f_i)
        if not simple_root_check(fbar, -1):
            failures.append(f"stage {i}: -1 is not a simple residue root")
        T = _stage_cutoff(a_i, config.margin)
        start = roots[-1].truncate(T)
        lift = hensel_lift(f_i, -1, T, start=start)
        y = lift.root
        # residue compatibility with the previous stage
        back = residue_step(y, i)
        if back is INF or not back.agrees_with(roots[-1]):
            failures.append(f"stage {i}: residue of the lifted root differs from stage {i - 1}")
        if lift.residual is not None and T is not None and lift.residual < T:
            failures.append(f"stage {i}: residual below cutoff")
        stages.append({"stage": i, "cutoff": T, "residual": lift.residual, "root": y,
                       "steps": lift.steps, "history": list(lift.history)})
        roots.append(y)
    root = TowerElement(config, tuple(roots))
    cert = StageCertificate("RootLift", {"n": n, "coefficients": [a.top for a in coeffs],
                                         "stages": stages}, not failures, failures)
    return root, cert


def is_prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, int(q ** 0.5) + 1))


def smooth_numbers(p: int, bound: int) -> List[int]:
    """All integers in ``[1, bound]`` whose prime factors are ``<= p``."""
    primes = [r for r in range(2, p + 1) if is_prime(r)]
    out = {1}
    frontier = [1]
    while frontier:
        nxt = []
        for m in frontier:
            for r in primes:
                k = m * r
                if k <= bound and k not in out:
                    out.add(k)
                    nxt.append(k)
        frontier = nxt
    return sorted(out)


def eisenstein_family(shape: GroupShape, q: int, bh: GroupElement, bl: GroupElement
                      ) -> Tuple[Series, Polynomial]:
    """``a = t^bh + t^bl + 1`` and ``g = T^q + a T^(q-1) + a t^bh (T^(q-2) + ... + 1)``."""
    a = Series.monomial(bh) + Series.monomial(bl) + 1
    atb = a * Series.monomial(bh)
    coeffs = [atb] * (q - 1) + [a, Series.const(shape, 1)]
    return a, Polynomial(coeffs)


def non_henselian_certificate(m: int, p: int, q: int, b: Union[int, Fraction] = 1,
                              config: Optional[TowerConfig] = None,
                              smooth_bound: int = 10_000) -> StageCertificate:
    """Data showing that ``g`` has a simple residue root but is irreducible of prime degree ``q``."""
    config = config or TowerConfig()
    if not is_prime(q):
        raise CertificateRejected("q-not-prime", f"{q} is not prime")
    if p < 2 or q <= p:
        raise CertificateRejected("q-not-above-p", f"need q > p >= 2, got p={p}, q={q}")
    if not 1 <= m <= config.depth:
        raise PreconditionError("stage outside 1..M")
    shape = config.shape
    lo, hi = config.block(m)
    bh, bl = shape.unit(lo, b), shape.unit(hi, b)
    if not bh > shape.zero():
        raise PreconditionError("b must be positive")
    a, g = eisenstein_family(shape, q, bh, bl)
    pc = prime_certificate(a)
    ec = eisenstein_check(g, a)
    fbar = residue_poly(g)
    expected = [Fraction(0)] * (q - 1) + [Fraction(1), Fraction(1)]
    failures = []
    if fbar != expected:
        failures.append("residue polynomial is not T^q + T^(q-1)")
    if not simple_root_check(fbar, -1):
        failures.append("-1 is not a simple residue root")
    start = g.eval(Series.const(shape, -1))
    cutoff = start.valuation() * (1 + config.margin)
    lift = hensel_lift(g, -1, cutoff)
    smooth = smooth_numbers(p, smooth_bound)
    hits = [k for k in smooth if k % q == 0]
    if hits:
        failures.append(f"{q} divides {hits[0]}")
    payload = {
        "stage": m, "p": p, "q": q, "b": Fraction(b),
        "a": a, "g": g,
        "prime_certificate": pc, "eisenstein": ec,
        "residue_polynomial": [str(c) for c in fbar],
        "residue_derivative_at_root": str(_rat_deriv_at(fbar, -1)),
        "lift": lift,
        "degree_fact": {"smooth_checked": len(smooth), "bound": smooth_bound, "divisible_by_q": len(hits),
                        "reason": "q is a prime larger than every prime factor of a degree in M"},
    }
    return StageCertificate("NonHenselian", payload, not failures, failures)


def _rat_deriv_at(fbar, r):
    from .hensel import rat_derivative, rat_eval
    return rat_eval(rat_derivative(fbar), Fraction(r))


def recheck_non_henselian(cert: StageCertificate) -> bool:
    """Re-verify a non-henselianity certificate from its payload alone."""
    P = cert.payload
    a, g, lift = P["a"], P["g"], P["lift"]
    try:
        prime_certificate(a)
        eisenstein_check(g, a)
    except CertificateRejected:
        return False
    fbar = residue_poly(g)
    if not simple_root_check(fbar, -1) or lift.root.residue() != -1:
        return False
    if not g.eval(lift.root, lift.target).known_at_least(lift.target):
        return False
    q, p = P["q"], P["p"]
    return is_prime(q) and q > p and all(k % q for k in smooth_numbers(p, P["degree_fact"]["bound"]))


def value_group_report(config: TowerConfig, n: int, samples: int = 100, seed: int = 0) -> StageCertificate:
    """Check ``v_0(units of O_n)`` lies in the indices ``-2n+1 .. 0`` and monomial surjectivity of ``v_n``."""
    from .sampling import random_group_element, random_series

    if not 0 <= n <= config.depth:
        raise PreconditionError("n outside 0..M")
    shape = config.shape
    rng = random.Random(seed)
    failures = []
    units_checked = 0
    lo_unit = -2 * n + 1
    # (a) units: direct samples with v_0 in the window, and random elements filtered by x_n
    for k in range(samples):
        if n > 0:
            g = random_group_element(shape, rng, lo=lo_unit, hi=0, support=2)
        else:
            g = shape.zero()
        x = Series.monomial(g, rng.choice([-3, -2, -1, 1, 2, 3]))
        if rng.random() < 0.5:
            x = x * (1 + random_series(shape, rng, positive=True))
        t = make_tower(x, config)
        if t[n] is INF or t[n].is_exact_zero():
            failures.append(f"unit sample {k}: x_n not a unit")
        v0 = tower_valuation(t, n).v0
        if any(i < lo_unit for i, _ in v0.coeffs):
            failures.append(f"unit sample {k}: v_0 outside the window")
        units_checked += 1
        y = random_series(shape, rng)
        ty = make_tower(y, config)
        if ty[n] is not INF and not ty[n].is_exact_zero():
            units_checked += 1
            if any(i < lo_unit for i, _ in tower_valuation(ty, n).v0.coeffs):
                failures.append(f"random unit {k}: v_0 outside the window")
    # (b) surjectivity onto the sampled part of the value group
    hits = 0
    boundary = -2 * n < shape.lo
    for k in range(samples):
        if boundary:
            h = shape.zero()
        else:
            h = random_group_element(shape, rng, lo=shape.lo, hi=-2 * n, support=3)
        tv = tower_valuation(make_tower(Series.monomial(h), config), n)
        if tv.value != h:
            failures.append(f"value {h} has no monomial preimage")
        else:
            hits += 1
    payload = {"n": n, "depth": config.depth, "units_checked": units_checked,
               "surjectivity_hits": hits, "samples": samples, "boundary": boundary,
               "unit_window": [lo_unit, 0], "value_window": [shape.lo, -2 * n]}
    return StageCertificate("ValueGroup", payload, not failures, failures)
