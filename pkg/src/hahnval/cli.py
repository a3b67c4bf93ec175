"""Command-line front end.

Exit codes: 0 success, 1 failed check or rejected certificate, 2 bad
configuration or literal, 3 precision underflow.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from .errors import CertificateRejected, HahnError, LiteralSyntaxError, PrecisionError
from .literals import (
    canonical_json,
    eval_expr,
    format_group,
    format_polynomial,
    format_rational,
    format_series,
    parse_group,
    parse_polynomial,
    parse_rational,
    parse_series,
    parse_shape,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_PRECISION = 0, 1, 2, 3
DEFAULT_EXT = "(extsum omega int 2)"


class ConfigError(Exception):
    pass


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


def _emit(obj, args) -> None:
    text = canonical_json(obj, indent=2)
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    print(text)


# -- subcommands --------------------------------------------------------------------

def cmd_group(args) -> int:
    from .groups import is_n_divisible

    shape = parse_shape(args.shape)
    x = parse_group(args.literal, shape, hull=args.hull)
    out = {"shape": str(shape), "value": format_group(x), "vmin": x.vmin(), "sign": x.sign(),
           "in_group": shape.contains(x)}
    if args.divisible:
        ok, q = is_n_divisible(x, args.divisible)
        out["divisible"] = {"n": args.divisible, "holds": ok, "quotient": None if q is None else format_group(q)}
    if args.compare:
        y = parse_group(args.compare, shape, hull=args.hull)
        out["compare"] = {"other": format_group(y), "order": "<" if x < y else ">" if x > y else "="}
    _emit(out, args)
    return EXIT_OK


def cmd_series(args) -> int:
    shape = parse_shape(args.shape)
    s = parse_series(args.literal, shape)
    if args.cutoff:
        s = s.truncate(parse_group(args.cutoff, shape))
    out = {"shape": str(shape), "value": format_series(s)}
    if s.is_exact_zero():
        out["valuation"] = None
    else:
        v = s.valuation()
        out["valuation"] = format_group(v)
        out["sign"] = s.sign()
        if v >= shape.zero():
            out["residue"] = format_rational(s.residue())
    if args.invert:
        target = parse_group(args.invert, shape)
        out["inverse"] = format_series(s.invert(target))
    _emit(out, args)
    return EXIT_OK


def cmd_hensel(args) -> int:
    from .hensel import hensel_lift, residue_poly

    shape = parse_shape(args.shape)
    f = parse_polynomial(args.polynomial, shape)
    target = parse_group(args.cutoff, shape) if args.cutoff else None
    r0 = parse_rational(args.root)
    lift = hensel_lift(f, r0, target)
    out = {"polynomial": format_polynomial(f), "residue_polynomial": [format_rational(c) for c in residue_poly(f)],
           "root_residue": format_rational(r0), "lift": lift.to_json(), "doubling": lift.doubling_holds()}
    _emit(out, args)
    return EXIT_OK


def cmd_defform(args) -> int:
    from . import definability as D

    shape = parse_shape(args.shape)
    eps = parse_group(args.eps, shape) if args.eps else shape.distinguished()
    cert = D.certify_parameter(shape, eps, args.n)
    out = {"parameter": cert.to_json(), "mode": args.mode}
    if args.mode == "certify":
        pass
    else:
        x = parse_series(args.literal, shape)
        if args.mode == "phi":
            out["result"] = D.decide_phi(x, cert, args.margin).to_json()
        elif args.mode == "psi":
            ok, w, reason = D.psi_member(x, cert, args.margin)
            out["result"] = {"member": ok, "reason": reason,
                             "x": None if w is None else format_series(w.x)}
        elif args.mode == "omega":
            out["result"] = D.omega_witness(x, cert, args.margin).to_json()
        elif args.mode == "ov":
            out["result"] = D.ov_member(x, cert, args.samples, args.seed, args.margin).to_json()
    _emit(out, args)
    return EXIT_OK


def cmd_tower(args) -> int:
    from .tower import (
        TowerConfig,
        make_tower,
        non_henselian_certificate,
        recheck_non_henselian,
        tower_valuation,
        value_group_report,
    )

    cfg = TowerConfig(args.component, args.depth, args.margin)
    if args.element:
        x = make_tower(parse_series(args.element, cfg.shape), cfg)
        vals = []
        for n in range(cfg.depth + 1):
            tv = tower_valuation(x, n)
            vals.append({"n": n, "value": None if tv.value is None else format_group(tv.value),
                         "in_ring": tv.in_ring, "in_ideal": tv.in_ideal, "boundary": tv.boundary})
        out = {"config": cfg.to_json(), "coordinates": x.to_json(), "valuations": vals}
        _emit(out, args)
        return EXIT_OK
    if args.value_group is not None:
        cert = value_group_report(cfg, args.value_group, args.samples, args.seed)
        _emit({"config": cfg.to_json(), "certificate": cert.to_json()}, args)
        return EXIT_OK if cert.ok else EXIT_FAIL
    cert = non_henselian_certificate(args.stage, args.p, args.q, parse_rational(args.b), cfg)
    again = recheck_non_henselian(cert)
    _emit({"config": cfg.to_json(), "certificate": cert.to_json(), "recheck": again}, args)
    return EXIT_OK if cert.ok and again else EXIT_FAIL


def load_config(path: str) -> dict:
    """Read a JSON suite configuration; malformed JSON or literals are reported by position."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: {e.msg} at line {e.lineno}, column {e.colno}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    known = {"suite", "seed", "samples", "depth", "margin", "component", "literals"}
    extra = set(data) - known
    if extra:
        raise ConfigError(f"{path}: unknown keys {sorted(extra)}")
    lits = []
    for i, item in enumerate(data.get("literals", [])):
        try:
            shape_text, text = item["shape"], item["literal"]
            eval_expr(text, parse_shape(shape_text))
        except (KeyError, TypeError):
            raise ConfigError(f"{path}: literals[{i}] needs 'shape' and 'literal'") from None
        except LiteralSyntaxError as e:
            raise ConfigError(f"{path}: literals[{i}]: {e}") from None
        lits.append((shape_text, text))
    data["literals"] = tuple(lits)
    return data


def cmd_suite(args) -> int:
    from .suites import SuiteConfig, run_suite

    base = load_config(args.config) if args.config else {}
    params = {
        "suite": args.name or base.get("suite", "all"),
        "seed": _pick(args.seed, base.get("seed"), _env_int("HAHNVAL_SEED", 0)),
        "samples": _pick(args.samples, base.get("samples"), _env_int("HAHNVAL_SAMPLES", None)),
        "depth": _pick(args.depth, base.get("depth"), _env_int("HAHNVAL_DEPTH", 4)),
        "margin": _pick(args.cutoff, base.get("margin"), 4),
        "component": _pick(args.component, base.get("component"), "int"),
        "literals": base.get("literals", ()),
    }
    try:
        cfg = SuiteConfig(output=args.json, **params)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None
    report = run_suite(cfg)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(report.dumps(timing=not args.no_timing) + "\n")
    if args.text:
        print(report.render_text(timing=not args.no_timing))
    else:
        print(report.dumps(timing=not args.no_timing))
    return report.exit_code


def _pick(*vals):
    return next((v for v in vals if v is not None), None)


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hahnval", description="Exact Hahn-series valuation toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, shape_default=DEFAULT_EXT):
        sp.add_argument("--shape", default=shape_default, help="group shape s-expression")
        sp.add_argument("--json", metavar="PATH", help="also write the JSON result to PATH")

    g = sub.add_parser("group", help="evaluate a group literal")
    g.add_argument("literal")
    common(g)
    g.add_argument("--divisible", type=int, metavar="N", help="test n-divisibility")
    g.add_argument("--compare", metavar="LITERAL", help="compare with another element")
    g.add_argument("--hull", action="store_true", help="allow divisible-hull elements")
    g.set_defaults(func=cmd_group)

    s = sub.add_parser("series", help="evaluate a series literal")
    s.add_argument("literal")
    common(s)
    s.add_argument("--cutoff", metavar="GROUP", help="truncate at this exponent")
    s.add_argument("--invert", metavar="GROUP", help="invert to this target cutoff")
    s.set_defaults(func=cmd_series)

    h = sub.add_parser("hensel", help="lift a simple residue root")
    h.add_argument("polynomial", help="coefficient list [c0, c1, ...]")
    common(h)
    h.add_argument("--root", default="1", help="rational residue root")
    h.add_argument("--cutoff", metavar="GROUP", help="target cutoff")
    h.set_defaults(func=cmd_hensel)

    d = sub.add_parser("defform", help="certificates for the one-parameter definition")
    d.add_argument("literal", nargs="?", default="0")
    common(d)
    d.add_argument("--eps", metavar="GROUP", help="v(eps); default the distinguished element a")
    d.add_argument("--n", type=int, default=2)
    d.add_argument("--mode", choices=("certify", "phi", "psi", "omega", "ov"), default="phi")
    d.add_argument("--margin", type=int, default=4)
    d.add_argument("--samples", type=int, default=8)
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_defform)

    t = sub.add_parser("tower", help="finite-depth tower certificates")
    t.add_argument("--depth", type=int, default=None)
    t.add_argument("--component", default="int", choices=("int", "rat", "dyadic"))
    t.add_argument("--stage", type=int, default=1)
    t.add_argument("--p", type=int, default=3)
    t.add_argument("--q", type=int, default=5)
    t.add_argument("--b", default="1")
    t.add_argument("--margin", type=int, default=4)
    t.add_argument("--element", metavar="SERIES", help="project a top-stage series instead")
    t.add_argument("--value-group", type=int, metavar="N", help="value-group report for v_N")
    t.add_argument("--samples", type=int, default=100)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--json", metavar="PATH")
    t.set_defaults(func=cmd_tower)

    r = sub.add_parser("suite", help="run a verification suite")
    r.add_argument("name", nargs="?", choices=("group-props", "series-laws", "hensel", "defform", "tower", "all"))
    r.add_argument("--seed", type=int)
    r.add_argument("--samples", type=int)
    r.add_argument("--depth", type=int)
    r.add_argument("--cutoff", type=int, metavar="MARGIN", help="working-cutoff margin")
    r.add_argument("--component", choices=("int", "rat", "dyadic"))
    r.add_argument("--config", metavar="PATH", help="JSON configuration file")
    r.add_argument("--json", metavar="PATH", help="write the report to PATH")
    r.add_argument("--text", action="store_true", help="print a text rendering instead of JSON")
    r.add_argument("--no-timing", action="store_true", help="omit the timing section")
    r.set_defaults(func=cmd_suite)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "depth", 0) is None and args.command == "tower":
        try:
            args.depth = _env_int("HAHNVAL_DEPTH", 4)
        except ConfigError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, LiteralSyntaxError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except PrecisionError as e:
        print(f"precision underflow: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except CertificateRejected as e:
        print(f"rejected: {e.reason}" + (f" ({e.detail})" if e.detail else ""), file=sys.stderr)
        return EXIT_FAIL
    except HahnError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
