"""Acceptance gate: one test per criterion, each timed against its budget.

Every criterion prints a ``criterion N: PASS|FAIL`` line; the lines are
repeated in the terminal summary.
"""

import time

import pytest

from hahnval.groups import G_EX, NEG_OMEGA_INT, is_discrete, is_n_divisible
from hahnval.suites import SuiteConfig, run_suite
from hahnval.tower import non_henselian_certificate, recheck_non_henselian, smooth_numbers

SEED = 0


@pytest.fixture
def gate(request):
    lines = request.config._acceptance_lines

    def run(number, budget, body):
        start = time.perf_counter()
        ok, detail = False, ""
        try:
            body()
            ok = True
        except AssertionError as e:
            detail = str(e).splitlines()[0] if str(e) else "assertion failed"
            raise
        finally:
            dt = time.perf_counter() - start
            in_time = dt < budget
            verdict = "PASS" if ok and in_time else "FAIL"
            why = "" if ok else f" [{detail}]"
            if ok and not in_time:
                why = " [over budget]"
            line = f"criterion {number}: {verdict} ({dt:.1f}s, budget {budget}s){why}"
            print(line)
            lines.append(line)
        assert dt < budget, f"criterion {number} took {dt:.1f}s, budget {budget}s"

    return run


def suite_records(*names):
    report = run_suite(SuiteConfig("all", seed=SEED), only=list(names))
    recs = {r.name: r for r in report.records}
    assert set(recs) == set(names), f"missing checks: {set(names) - set(recs)}"
    for r in recs.values():
        assert r.verdict == "pass", f"{r.name}: {r.verdict} {r.payload}"
    return recs


def test_criterion_1_phi_equivalence(gate):
    def body():
        rec = suite_records("defform.phi-equivalence")["defform.phi-equivalence"]
        p = rec.payload
        assert p["samples"] == 1000 and p["agreements"] == 1000
        assert p["positive_verdicts"] > 0 and not p["failures"]
        assert p["parameter"]["n"] == 2
    gate(1, 30, body)


def test_criterion_2_omega_sweep(gate):
    def body():
        recs = suite_records("defform.omega-certificates", "defform.forgeries-rejected")
        om = recs["defform.omega-certificates"].payload
        assert om["samples"] == 1000 and om["certified"] == 1000
        fg = recs["defform.forgeries-rejected"].payload
        assert fg["samples"] == 200 and not fg["accepted"]
        assert sum(fg["rejections"].values()) == 200
    gate(2, 60, body)


def test_criterion_3_extended_sum(gate):
    def body():
        assert is_n_divisible(G_EX.distinguished(), 2) == (False, None)
        recs = suite_records("ext.not-2-divisible", "ext.limit-point-sandwich",
                             "ext.regularity-counterexamples")
        lp = recs["ext.limit-point-sandwich"].payload
        assert lp["samples"] == 1000 and not lp["failures"]
        rows = recs["ext.regularity-counterexamples"].payload["intervals"]
        assert {(r["n"], r["ell"]) for r in rows} == {(n, l) for n in (2, 3, 5) for l in range(4)}
        assert all(r["sampled"] == 500 and r["divisible_found"] == 0 for r in rows)
    gate(3, 10, body)


def test_criterion_4_dyadic(gate):
    def body():
        recs = suite_records("dyadic.regular-not-3-divisible", "dyadic.closedness-witness",
                             "defform.phi-equivalence-dyadic")
        assert recs["dyadic.regular-not-3-divisible"].payload["1_0 3-divisible"] is False
        cw = recs["dyadic.closedness-witness"].payload
        assert cw["point"] == "{0:1/3}" and not cw["failures"]
        ph = recs["defform.phi-equivalence-dyadic"].payload
        assert ph["samples"] == 500 and ph["agreements"] == 500
        assert ph["parameter"]["n"] == 3
    gate(4, 15, body)


def test_criterion_5_newton_family(gate):
    def body():
        p = suite_records("hensel.newton-family")["hensel.newton-family"].payload
        assert not p["failures"]
        assert {k: v["samples"] for k, v in p["stats"].items()} == {"n=2": 100, "n=3": 100, "n=5": 100}
        assert p["stats"]["n=2"]["zero_branch"]["lifted"] == 100
    gate(5, 20, body)


def test_criterion_6_tower(gate):
    def body():
        recs = suite_records("tower.place-composition", "tower.ideal-chain", "tower.root-lifting",
                             "tower.value-groups")
        assert recs["tower.place-composition"].payload["samples"] == 1000
        assert recs["tower.ideal-chain"].payload["samples"] == 1000
        lifts = recs["tower.root-lifting"].payload["results"]
        assert set(lifts) == {"n=1", "n=2"}
        assert all(v["lifted"] == v["samples"] > 0 for v in lifts.values())
        vg = recs["tower.value-groups"].payload
        assert all(vg[f"n={n}"]["surjectivity_hits"] == 100 for n in range(4))
    gate(6, 60, body)


def test_criterion_7_nonhenselian(gate):
    def body():
        cert = non_henselian_certificate(1, 3, 5, 1)
        assert cert.ok, cert.failures
        P = cert.payload
        assert P["prime_certificate"] is not None
        assert P["eisenstein"].oracle_agrees
        assert P["residue_polynomial"] == ["0", "0", "0", "0", "1", "1"]
        assert P["residue_derivative_at_root"] == "1"
        lift = P["lift"]
        assert lift.residual >= lift.target and lift.root.residue() == -1
        assert all(k % 5 for k in smooth_numbers(3, 10_000))
        assert recheck_non_henselian(cert)
        suite_records("hensel.eisenstein-nonhenselian")
    gate(7, 5, body)


def test_criterion_8_discrete(gate):
    def body():
        assert is_discrete(NEG_OMEGA_INT) == (True, NEG_OMEGA_INT.unit(0))
        p = suite_records("discrete.least-positive")["discrete.least-positive"].payload
        assert p["least_positive"] == "{0:1}"
        bf = p["brute_force"]
        assert bf["positive_below_1_0"] == 0 and bf["max_support"] == 4 and bf["max_coefficient"] == 8
    gate(8, 5, body)


def test_criterion_9_law_suites(gate):
    names = ("group.laws", "series.ring-laws", "series.valuation-laws", "series.order-laws",
             "series.truncation-soundness")

    def body():
        recs = suite_records(*names)
        assert recs["group.laws"].payload["per_shape"] == 10_000
        for n in names[1:]:
            assert recs[n].payload["instances"] == 10_000
    gate(9, 60, body)
