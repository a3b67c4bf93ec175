"""Verification suites and the JSON report format.

A suite is a list of named checks.  Each check returns ``(ok, payload)``;
precision underflows become ``"underflow"`` records instead of crashes.
Records are sorted by name and carry no timing, so a report is
byte-identical across runs with the same configuration; timings live in a
separate section that :meth:`Report.to_json` can leave out.
"""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .errors import CertificateRejected, PrecisionError, PreconditionError
from .groups import (
    G_EX,
    NEG_OMEGA_DYADIC,
    NEG_OMEGA_INT,
    RAT,
    DYADIC,
    GroupShape,
    hahn_sum,
    is_discrete,
    is_n_divisible,
    lex_pair,
)
from .literals import canonical_json, format_group, format_series
from .sampling import (
    random_group_element,
    random_positive_element,
    random_positive_series,
    random_series,
)
from .series import Series

SCHEMA = "hahnval.report/1"
SUITES = ("group-props", "series-laws", "hensel", "defform", "tower")
DEVIATIONS = ("residue field and coefficients are the rationals, not the reals",)
MAX_EXAMPLES = 5


@dataclass(frozen=True)
class SuiteConfig:
    suite: str = "all"
    seed: int = 0
    samples: Optional[int] = None  # None: each check uses its own default size
    depth: int = 4
    margin: int = 4
    component: str = "int"
    literals: Tuple[Tuple[str, str], ...] = ()  # (shape, literal) pairs checked for round trips
    output: Optional[str] = None

    def __post_init__(self):
        if self.suite not in SUITES + ("all",):
            raise ValueError(f"unknown suite {self.suite!r}")
        if self.samples is not None and self.samples < 0:
            raise ValueError("samples must be non-negative")
        if self.depth < 2:
            raise ValueError("depth must be at least 2")
        if self.margin < 1:
            raise ValueError("margin must be at least 1")
        if self.component not in ("int", "rat", "dyadic"):
            raise ValueError(f"unknown component {self.component!r}")

    def size(self, default: int) -> int:
        return default if self.samples is None else self.samples

    def rng(self, name: str) -> random.Random:
        # per-check streams keep checks independent of run order
        return random.Random(f"{self.seed}:{name}")

    def to_json(self):
        d = asdict(self)
        d.pop("output")
        d["literals"] = [list(p) for p in self.literals]
        return d


@dataclass
class Record:
    name: str
    anchor: str
    verdict: str  # "pass" | "fail" | "underflow"
    payload: Dict

    def to_json(self):
        return {"name": self.name, "anchor": self.anchor, "verdict": self.verdict,
                "payload": self.payload}


@dataclass
class Report:
    suite: str
    config: SuiteConfig
    records: List[Record] = field(default_factory=list)
    timing: Dict[str, float] = field(default_factory=dict)

    @property
    def summary(self) -> Dict[str, int]:
        out = {"total": len(self.records), "pass": 0, "fail": 0, "underflow": 0}
        for r in self.records:
            out[r.verdict] += 1
        return out

    @property
    def exit_code(self) -> int:
        s = self.summary
        if s["fail"]:
            return 1
        if s["underflow"]:
            return 3
        return 0

    def record(self, name: str) -> Record:
        return next(r for r in self.records if r.name == name)

    def to_json(self, timing: bool = True):
        out = {
            "schema": SCHEMA,
            "suite": self.suite,
            "config": self.config.to_json(),
            "deviations": list(DEVIATIONS),
            "records": [r.to_json() for r in sorted(self.records, key=lambda r: r.name)],
            "summary": self.summary,
        }
        if timing:
            out["timing"] = {k: round(v, 3) for k, v in sorted(self.timing.items())}
        return out

    def dumps(self, timing: bool = True) -> str:
        return canonical_json(self.to_json(timing), indent=2)

    def render_text(self, timing: bool = True) -> str:
        lines = [f"suite {self.suite} (seed {self.config.seed})"]
        for r in sorted(self.records, key=lambda r: r.name):
            t = self.timing.get(r.name) if timing else None
            lines.append(f"  {r.verdict.upper():9} {r.name}" + (f"  [{t:.2f}s]" if t is not None else ""))
        s = self.summary
        lines.append(f"{s['pass']}/{s['total']} passed, {s['fail']} failed, {s['underflow']} underflow")
        return "\n".join(lines)


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    anchor: str
    run: Callable[[SuiteConfig], Tuple[bool, Dict]]


CHECKS: List[Check] = []


def check(suite: str, name: str, anchor: str):
    def deco(fn):
        CHECKS.append(Check(name, suite, anchor, fn))
        return fn
    return deco


def _examples(items) -> List:
    return [str(x) for x in items[:MAX_EXAMPLES]]


# -- group properties ---------------------------------------------------------------

@check("group-props", "ext.not-2-divisible", "extended Hahn sum: a is not 2-divisible")
def _ext_not_divisible(cfg):
    a = G_EX.distinguished()
    ok, q = is_n_divisible(a, 2)
    return not ok, {"element": format_group(a), "n": 2, "divisible": ok}


@check("group-props", "ext.limit-point-sandwich", "extended Hahn sum: a/2 is a left-sided limit point")
def _ext_sandwich(cfg):
    from .witnesses import limit_point_witness
    rng = cfg.rng("ext.limit-point-sandwich")
    w = limit_point_witness(G_EX)
    bad = []
    n = cfg.size(1000)
    for _ in range(n):
        b = random_positive_element(G_EX, rng, hi=8)
        g = w(b)
        if not w.sandwich_holds(b, g):
            bad.append(format_group(b))
    return not bad, {"point": format_group(w.point), "samples": n, "failures": _examples(bad)}


@check("group-props", "ext.regularity-counterexamples", "extended Hahn sum: not n-regular")
def _ext_regularity(cfg):
    from .witnesses import regularity_counterexample
    per = cfg.size(500)
    rows = []
    ok = True
    for n in (2, 3, 5):
        for ell in range(4):
            r = regularity_counterexample(G_EX, n, ell, samples=per, seed=cfg.seed)
            ok &= r.verified
            rows.append({"n": n, "ell": ell, "q": r.q, "low": format_group(r.low),
                         "high": format_group(r.high), "sampled": r.sampled,
                         "divisible_found": len(r.failures)})
    return ok, {"intervals": rows}


@check("group-props", "dyadic.regular-not-3-divisible",
       "dyadic Hahn sum over -omega: regular on samples, 1_0 not 3-divisible")
def _dyadic_regular(cfg):
    from .witnesses import sampled_regularity
    G = NEG_OMEGA_DYADIC
    out = {}
    ok = True
    for n in (2, 3, 5):
        rep = sampled_regularity(G, n, cfg.size(200), cfg.seed)
        ok &= not rep["inconclusive"]
        out[f"n={n}"] = {"found": rep["found"], "samples": rep["samples"],
                         "inconclusive": len(rep["inconclusive"])}
    div = is_n_divisible(G.unit(0), 3)[0]
    return ok and not div, {"regularity": out, "1_0 3-divisible": div}


@check("group-props", "dyadic.closedness-witness",
       "dyadic Hahn sum: regular and not divisible gives a limit point")
def _dyadic_closedness(cfg):
    from .witnesses import prop_closedness_witness
    G = NEG_OMEGA_DYADIC
    cw = prop_closedness_witness(G, 0, 3, samples=cfg.size(50), seed=cfg.seed)
    rng = cfg.rng("dyadic.closedness-witness")
    bad = []
    n = cfg.size(200)
    for _ in range(n):
        h = random_positive_element(G, rng, lo=-3)
        g = cw.witness(h)
        if not cw.witness.sandwich_holds(h, g):
            bad.append(format_group(h))
    return not bad, {"a": format_group(cw.a), "point": format_group(cw.witness.point),
                     "samples": n, "failures": _examples(bad)}


@check("group-props", "discrete.least-positive",
       "Hahn sum of Z over -omega is discrete with least positive element 1_0")
def _discrete(cfg):
    disc, least = is_discrete(NEG_OMEGA_INT)
    found = brute_force_below_unit(width=8, support=4, bound=8)
    ok = disc and least == NEG_OMEGA_INT.unit(0) and found == 0
    return ok, {"discrete": disc, "least_positive": None if least is None else format_group(least),
                "brute_force": {"indices": [-7, 0], "max_support": 4, "max_coefficient": 8,
                                "positive_below_1_0": found}}


def brute_force_below_unit(width: int = 8, support: int = 4, bound: int = 8) -> int:
    """Count elements ``0 < x < 1_0`` among all vectors on indices ``-width+1 .. 0``
    with at most ``support`` nonzero entries in ``[-bound, bound]``.

    Dense numpy evaluation of the lexicographic sign; independent of the
    library's order code.
    """
    import itertools

    import numpy as np

    vals = np.array([c for c in range(-bound, bound + 1) if c], dtype=np.int64)
    total = 0
    for k in range(1, support + 1):
        grid = np.array(list(itertools.product(range(len(vals)), repeat=k)), dtype=np.int64)
        coeffs = vals[grid]
        for cols in itertools.combinations(range(width), k):
            x = np.zeros((len(coeffs), width), dtype=np.int64)
            x[:, cols] = coeffs
            unit = np.zeros(width, dtype=np.int64)
            unit[-1] = 1  # column width-1 is index 0; column 0 is the most significant
            total += int(np.count_nonzero(_lex_positive(x) & _lex_positive(unit - x)))
    return total


def _lex_positive(m):
    import numpy as np
    nz = m != 0
    first = np.argmax(nz, axis=1)
    lead = m[np.arange(len(m)), first]
    return nz.any(axis=1) & (lead > 0)


@check("group-props", "group.laws", "ordered abelian group axioms")
def _group_laws(cfg):
    rng = cfg.rng("group.laws")
    shapes = _law_shapes()
    n = cfg.size(10_000)
    bad = []
    for G in shapes:
        for _ in range(n):
            x, y, z = (random_group_element(G, rng) for _ in range(3))
            m = rng.randint(-5, 5)
            laws = {
                "assoc": (x + y) + z == x + (y + z),
                "comm": x + y == y + x,
                "identity": x + G.zero() == x,
                "inverse": x + (-x) == G.zero(),
                "scalar": (x + y) * m == x * m + y * m,
                "trichotomy": [x < y, x == y, x > y].count(True) == 1,
                "translation": (not x < y) or x + z < y + z,
                "sign": (x > G.zero()) == (x.sign() == 1),
                "divisible": _div_law(x, rng),
            }
            for law, ok in laws.items():
                if not ok:
                    bad.append(f"{law}: {G} {format_group(x)} {format_group(y)} {format_group(z)}")
    return not bad, {"instances": n * len(shapes), "per_shape": n, "shapes": [str(s) for s in shapes],
                     "failures": _examples(bad)}


def _div_law(x, rng):
    n = rng.randint(2, 5)
    ok, q = is_n_divisible(x * n, n)
    if not ok or q != x:
        return False
    ok, q = is_n_divisible(x, n)
    return not ok or q * n == x


def _law_shapes() -> List[GroupShape]:
    return [G_EX, NEG_OMEGA_INT, NEG_OMEGA_DYADIC, hahn_sum(-3, 3, "rat"), lex_pair("int", "int"),
            RAT, DYADIC]


# -- series laws ---------------------------------------------------------------------

def _series_law_sweep(cfg, name, body):
    rng = cfg.rng(name)
    shapes = _law_shapes()
    n = cfg.size(10_000)
    bad = []
    for k in range(n):
        G = shapes[k % len(shapes)]
        for law, ok in body(G, rng).items():
            if not ok:
                bad.append(f"{law} over {G}")
    return not bad, {"instances": n, "failures": _examples(bad)}


@check("series-laws", "series.ring-laws", "group ring and Hahn field: ring axioms")
def _ring_laws(cfg):
    def body(G, rng):
        r, s, u = (random_series(G, rng, support=3) for _ in range(3))
        one = Series.const(G, 1)
        return {
            "add-assoc": (r + s) + u == r + (s + u),
            "add-comm": r + s == s + r,
            "neg": (r + (-r)).is_exact_zero(),
            "mul-assoc": (r * s) * u == r * (s * u),
            "mul-comm": r * s == s * r,
            "distrib": r * (s + u) == r * s + r * u,
            "one": r * one == r,
        }
    return _series_law_sweep(cfg, "series.ring-laws", body)


@check("series-laws", "series.valuation-laws", "min-support valuation axioms")
def _valuation_laws(cfg):
    def body(G, rng):
        r, s = random_series(G, rng, support=3), random_series(G, rng, support=3)
        vr, vs = r.valuation(), s.valuation()
        p, q = r * s, r + s
        vq = q.valuation()
        return {
            "mult": p.valuation() == vr + vs,
            "ultrametric": vq is None or vq >= min(vr, vs),
            "strict": vr == vs or vq == min(vr, vs),
            "residue": (r * s).valuation() != G.zero() or r.valuation() != G.zero()
            or s.valuation() != G.zero() or (r * s).residue() == r.residue() * s.residue(),
        }
    return _series_law_sweep(cfg, "series.valuation-laws", body)


@check("series-laws", "series.order-laws", "ordered field: positive cone")
def _order_laws(cfg):
    def body(G, rng):
        r, s = random_series(G, rng, support=3), random_series(G, rng, support=3)
        zero = Series.zero(G)
        pr, ps = r.sign() > 0, s.sign() > 0
        return {
            "trichotomy": [r.sign() == 1, r.is_exact_zero(), r.sign() == -1].count(True) == 1,
            "add": not (pr and ps) or (r + s).sign() > 0,
            "mul": not (pr and ps) or (r * s).sign() > 0,
            "square": (r * r).sign() > 0,
            "compare": (r.sign() == (r - zero).sign()),
        }
    return _series_law_sweep(cfg, "series.order-laws", body)


@check("series-laws", "series.truncation-soundness", "truncated arithmetic never overclaims precision")
def _truncation_laws(cfg):
    def body(G, rng):
        r, s = random_series(G, rng, support=4), random_series(G, rng, support=4)
        c1 = random_group_element(G, rng, support=2)
        c2 = random_group_element(G, rng, support=2)
        rt, st = r.truncate(c1), s.truncate(c2)
        out = {}
        for op, exact, approx in (("add", r + s, rt + st), ("mul", r * s, _safe_mul(rt, st))):
            if approx is None:
                continue
            out[op] = approx.agrees_with(exact.truncate(approx.cutoff), approx.cutoff)
        w = random_positive_series(G, rng)
        unit = Series.const(G, 1) + w
        T = w.valuation() * rng.randint(1, 6)
        inv = unit.invert(T)
        out["invert"] = (inv * unit).agrees_with(Series.const(G, 1), T)
        return out
    return _series_law_sweep(cfg, "series.truncation-soundness", body)


def _safe_mul(a, b):
    try:
        return a * b
    except PrecisionError:
        return None


# -- Hensel ------------------------------------------------------------------------

@check("hensel", "hensel.newton-family", "Newton lifting on T^n - T^(n-1) - c")
def _newton_family_check(cfg):
    from .definability import working_cutoff
    from .hensel import hensel_lift, newton_family
    rng = cfg.rng("hensel.newton-family")
    per = cfg.size(100)
    bad = []
    stats = {}
    for n in (2, 3, 5):
        steps = 0
        zero_branch = {"lifted": 0, "rejected": 0}
        for _ in range(per):
            c = random_positive_series(G_EX, rng)
            f = newton_family(G_EX, n, c)
            T = working_cutoff(c.valuation(), cfg.margin)
            one = hensel_lift(f, 1, T)
            steps += one.steps
            if not one.doubling_holds():
                bad.append(f"n={n}: no doubling for c={format_series(c)}")
            if not f.eval(one.root, T).known_at_least(T) or one.root.residue() != 1:
                bad.append(f"n={n}: root check failed for c={format_series(c)}")
            if n == 2:
                zero = hensel_lift(f, 0, T)
                zero_branch["lifted"] += 1
                if zero.root.agrees_with(one.root, T) or zero.root.residue() != 0:
                    bad.append(f"0-branch not separated for c={format_series(c)}")
            else:
                # 0 is a root of multiplicity n-1 of T^n - T^(n-1): simple-root lifting must refuse
                try:
                    hensel_lift(f, 0, T)
                    bad.append(f"n={n}: multiple root 0 was accepted")
                except PreconditionError:
                    zero_branch["rejected"] += 1
        stats[f"n={n}"] = {"samples": per, "newton_steps": steps, "zero_branch": zero_branch}
    return not bad, {"stats": stats, "failures": _examples(bad)}


@check("hensel", "hensel.eisenstein-nonhenselian",
       "degree-5 Eisenstein polynomial with a simple residue root")
def _nonhenselian(cfg):
    from .tower import TowerConfig, non_henselian_certificate, recheck_non_henselian
    tc = TowerConfig(cfg.component, cfg.depth, cfg.margin)
    cert = non_henselian_certificate(1, 3, 5, 1, tc)
    again = recheck_non_henselian(cert)
    return cert.ok and again, {"certificate": cert.to_json(), "recheck": again}


# -- definability --------------------------------------------------------------------

def _ext_parameter():
    from .definability import certify_parameter
    return certify_parameter(G_EX, G_EX.distinguished(), 2)


def _phi_sweep(cert, rng, count, margin, orbit):
    from .definability import decide_phi
    shape = cert.shape
    agree = positive = 0
    bad = []
    for _ in range(count):
        x = random_series(shape, rng, support=5, orbit=orbit)
        pc = decide_phi(x, cert, margin)
        c = cert.epsilon * x ** cert.n
        truth = c.is_exact_zero() or c.valuation() > shape.zero()
        if pc.verdict != truth:
            bad.append(f"verdict mismatch at x={format_series(x)}")
            continue
        agree += 1
        if pc.verdict and pc.witness is not None and pc.value is not None:
            positive += 1
            from .hensel import newton_family
            T = pc.witness.target
            res = newton_family(shape, cert.n, c).eval(pc.witness.root, T)
            if not res.known_at_least(T) or T < pc.value * (1 + margin):
                bad.append(f"witness below working cutoff at x={format_series(x)}")
    return agree, positive, bad


@check("defform", "defform.phi-equivalence", "formula phi agrees with v(eps x^n) > 0")
def _phi_equivalence(cfg):
    cert = _ext_parameter()
    n = cfg.size(1000)
    agree, positive, bad = _phi_sweep(cert, cfg.rng("defform.phi-equivalence"), n, cfg.margin, True)
    return not bad and agree == n, {"parameter": cert.to_json(), "samples": n, "agreements": agree,
                                    "positive_verdicts": positive, "failures": _examples(bad)}


@check("defform", "defform.phi-equivalence-dyadic",
       "formula phi over the dyadic Hahn sum with a closedness-derived parameter")
def _phi_equivalence_dyadic(cfg):
    from .definability import certify_parameter
    G = NEG_OMEGA_DYADIC
    cert = certify_parameter(G, G.unit(0), 3)
    n = cfg.size(500)
    agree, positive, bad = _phi_sweep(cert, cfg.rng("defform.phi-equivalence-dyadic"), n,
                                      cfg.margin, False)
    return not bad and agree == n, {"parameter": cert.to_json(), "samples": n, "agreements": agree,
                                    "positive_verdicts": positive, "failures": _examples(bad)}


@check("defform", "defform.omega-certificates", "every element of the maximal ideal lies in Omega")
def _omega_sweep(cfg):
    from .definability import omega_witness
    cert = _ext_parameter()
    rng = cfg.rng("defform.omega-certificates")
    n = cfg.size(1000)
    bad = []
    for _ in range(n):
        a = random_positive_series(G_EX, rng)
        oc = omega_witness(a, cert, cfg.margin)
        if not all(oc.value_checks(cert).values()):
            bad.append(format_series(a))
    return not bad, {"samples": n, "certified": n - len(bad), "failures": _examples(bad)}


FORGERIES = ("unit-z", "negative-z", "perturb-x", "perturb-y")


def forge_triple(oc, cert, kind: str, rng: random.Random):
    """Mutate a valid certificate triple into one that must be rejected."""
    from .definability import OmegaTriple
    from .hensel import hensel_lift, newton_family
    G, n = cert.shape, cert.n
    t = oc.triple
    W = t.cutoff
    if kind in ("unit-z", "negative-z"):
        g = G.zero() if kind == "unit-z" else -random_positive_element(G, rng, hi=4)
        z = Series.monomial(g, rng.choice([1, 2, 3]))
        target = W - g
        ratio = oc.a * z.invert()
        y = hensel_lift(newton_family(G, n, ratio), 1, target).root
        return OmegaTriple(t.x, z, y, W)
    if kind == "perturb-x":
        return OmegaTriple(t.x + Series.monomial(oc.a.valuation(), rng.choice([1, -1])), t.z, t.y, W)
    if kind == "perturb-y":
        return OmegaTriple(t.x, t.z, t.y + rng.choice([1, -1]), W)
    raise ValueError(kind)


@check("defform", "defform.forgeries-rejected", "forged Omega triples are rejected")
def _forgeries(cfg):
    from .definability import omega_member_forward, omega_witness
    cert = _ext_parameter()
    rng = cfg.rng("defform.forgeries-rejected")
    n = cfg.size(200)
    reasons: Dict[str, int] = {}
    accepted = []
    for k in range(n):
        a = random_positive_series(G_EX, rng)
        oc = omega_witness(a, cert, cfg.margin)
        kind = FORGERIES[k % len(FORGERIES)]
        forged = forge_triple(oc, cert, kind, rng)
        try:
            omega_member_forward(forged, cert)
            accepted.append(f"{kind}: a={format_series(a)}")
        except CertificateRejected as e:
            reasons[e.reason] = reasons.get(e.reason, 0) + 1
    return not accepted, {"samples": n, "rejections": dict(sorted(reasons.items())),
                          "accepted": _examples(accepted)}


@check("defform", "defform.valuation-ring", "x Omega inside Omega exactly on the valuation ring")
def _ov_check(cfg):
    from .definability import ov_member
    cert = _ext_parameter()
    rng = cfg.rng("defform.valuation-ring")
    n = cfg.size(40)
    bad = []
    inside = 0
    for k in range(n):
        x = random_series(G_EX, rng, support=3)
        rep = ov_member(x, cert, budget=3, seed=cfg.seed + k, margin=cfg.margin)
        vx = x.valuation()
        inside += rep.verdict
        if rep.verdict != (vx >= G_EX.zero()) or not rep.consistent:
            bad.append(format_series(x))
    return not bad, {"samples": n, "in_ring": inside, "failures": _examples(bad)}


# -- tower ---------------------------------------------------------------------------

def _tower_config(cfg):
    from .tower import TowerConfig
    return TowerConfig(cfg.component, cfg.depth, cfg.margin)


def _random_top(tc, rng):
    return random_series(tc.shape, rng, support=4)


@check("tower", "tower.place-composition", "stepwise residue maps compose to the direct projection")
def _place_composition(cfg):
    from .tower import INF, direct_projection, psi_project
    tc = _tower_config(cfg)
    rng = cfg.rng("tower.place-composition")
    n = cfg.size(1000)
    M = tc.depth
    bad = []
    inf = 0
    for _ in range(n):
        x = _random_top(tc, rng)
        i = rng.randint(0, M)
        j = rng.randint(0, i)
        stepwise = psi_project(psi_project(x, M, i), i, j)
        direct = direct_projection(x, M, j)
        inf += direct is INF
        if (stepwise is INF) != (direct is INF) or (direct is not INF and stepwise != direct):
            bad.append(f"i={i} j={j} x={format_series(x)}")
    return not bad, {"samples": n, "infinite": inf, "failures": _examples(bad)}


@check("tower", "tower.ideal-chain", "maximal ideals shrink and rings grow along the tower")
def _ideal_chain(cfg):
    from .tower import make_tower, tower_valuation
    tc = _tower_config(cfg)
    rng = cfg.rng("tower.ideal-chain")
    n = cfg.size(1000)
    bad = []
    for _ in range(n):
        x = make_tower(_random_top(tc, rng), tc)
        for k in range(tc.depth):
            a, b = tower_valuation(x, k), tower_valuation(x, k + 1)
            if (b.in_ideal and not a.in_ideal) or (a.in_ring and not b.in_ring):
                bad.append(f"n={k} x={format_series(x.top)}")
    y = make_tower(_random_top(tc, rng), tc)
    z = make_tower(_random_top(tc, rng), tc)
    hom = (y.top * z.top).valuation() == y.top.valuation() + z.top.valuation()
    return not bad and hom, {"samples": n, "failures": _examples(bad)}


def random_ideal_coefficient(tc, n, rng):
    """Top-stage series whose tower element lies in the maximal ideal of ``v_n``."""
    from .tower import make_tower
    G = tc.shape
    lo = G.lo
    g = random_positive_element(G, rng, lo=lo, hi=-2 * n, support=2)
    x = Series.monomial(g, rng.choice([-2, -1, 1, 2]))
    if rng.random() < 0.5:
        x = x * (Series.const(G, 1) + random_positive_series(G, rng, support=2))
    return make_tower(x, tc)


@check("tower", "tower.root-lifting", "simple residue roots lift stage by stage")
def _root_lifting(cfg):
    from .tower import lift_root_through_stages
    tc = _tower_config(cfg)
    rng = cfg.rng("tower.root-lifting")
    per = cfg.size(10)
    out = {}
    bad = []
    for n in (1, 2):
        ok = 0
        for _ in range(per):
            coeffs = [random_ideal_coefficient(tc, n, rng) for _ in range(n)]
            root, cert = lift_root_through_stages(coeffs, n, tc)
            if cert.ok and root.compatible():
                ok += 1
            else:
                bad.append(f"n={n}: {cert.failures}")
        out[f"n={n}"] = {"samples": per, "lifted": ok}
    return not bad, {"results": out, "failures": _examples(bad)}


@check("tower", "tower.value-groups", "value groups and units of each place")
def _value_groups(cfg):
    from .tower import value_group_report
    tc = _tower_config(cfg)
    out = {}
    ok = True
    for n in range(tc.depth):
        rep = value_group_report(tc, n, cfg.size(100), cfg.seed)
        ok &= rep.ok
        out[f"n={n}"] = {**rep.payload, "failures": _examples(rep.failures)}
    return ok, out


@check("tower", "tower.nonhenselian-recheck", "non-henselian certificate re-verified from its payload")
def _tower_nonhenselian(cfg):
    from .tower import non_henselian_certificate, recheck_non_henselian
    tc = _tower_config(cfg)
    results = {}
    ok = True
    for m in range(1, tc.depth + 1):
        cert = non_henselian_certificate(m, 3, 5, 1, tc)
        again = recheck_non_henselian(cert)
        ok &= cert.ok and again
        results[f"stage {m}"] = {"ok": cert.ok, "recheck": again}
    return ok, results


# -- runner --------------------------------------------------------------------------

def checks_for(suite: str) -> List[Check]:
    if suite == "all":
        return list(CHECKS)
    return [c for c in CHECKS if c.suite == suite]


def run_check(c: Check, cfg: SuiteConfig) -> Tuple[Record, float]:
    t0 = time.perf_counter()
    try:
        ok, payload = c.run(cfg)
        verdict = "pass" if ok else "fail"
    except PrecisionError as e:
        verdict, payload = "underflow", {"error": str(e)}
    except Exception as e:  # a crash is a failed check, reported with its message
        verdict, payload = "fail", {"error": f"{type(e).__name__}: {e}"}
    return Record(c.name, c.anchor, verdict, payload), time.perf_counter() - t0


def literal_roundtrips(cfg: SuiteConfig) -> Tuple[bool, Dict]:
    """``parse(serialize(x)) == x`` for the configured literals."""
    from .literals import eval_expr, format_group, format_polynomial, parse_shape
    rows = []
    ok = True
    for shape_text, text in cfg.literals:
        shape = parse_shape(shape_text)
        kind, value = eval_expr(text, shape)
        fmt = {"group": format_group, "series": format_series, "polynomial": format_polynomial}[kind]
        again = eval_expr(fmt(value), shape)[1]
        ok &= again == value
        rows.append({"shape": shape_text, "literal": text, "kind": kind, "canonical": fmt(value),
                     "stable": again == value})
    return ok, {"literals": rows}


def run_suite(cfg: SuiteConfig, only: Optional[List[str]] = None) -> Report:
    """Run every check of ``cfg.suite`` (or the named subset) and assemble a report."""
    report = Report(cfg.suite, cfg)
    if cfg.literals:
        c = Check("literals.roundtrip", cfg.suite, "canonical literal round trip", literal_roundtrips)
        rec, dt = run_check(c, cfg)
        report.records.append(rec)
        report.timing[c.name] = dt
    for c in checks_for(cfg.suite):
        if only is not None and c.name not in only:
            continue
        rec, dt = run_check(c, cfg)
        report.records.append(rec)
        report.timing[c.name] = dt
    report.records.sort(key=lambda r: r.name)
    return report
