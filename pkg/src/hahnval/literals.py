"""Text literals and canonical JSON for shapes, group elements, series and polynomials.

Grammar (whitespace is free between tokens)::

    rational := ['-'] digits ['/' digits]
    shape    := 'int' | 'rat' | 'dyadic'
              | '(' 'hahnsum' range comp ')' | '(' 'extsum' range comp int ')'
              | '(' 'lex' comp comp ')' | '(' 'quotient' shape int ')'
    range    := 'omega' | '-omega' | bound bound        bound := int | '-inf' | 'inf'
    group    := '{' [int ':' rational (',' int ':' rational)*] '}' [('+'|'-') rational '*' 'a']
              | rational                                  (scalar shapes only)
    series   := '0' | term (('+'|'-') term)* ['(' 'cut' group ')']
    term     := rational ['*' 't^{' group '}'] | 't^{' group '}'
    poly     := '[' series (',' series)* ']'
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, List, Optional, Tuple

from .errors import HahnError, LiteralSyntaxError
from .groups import SCALAR_KINDS, GroupElement, GroupShape, shape_to_text


def format_rational(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def parse_rational(text: str) -> Fraction:
    p = _Parser(text)
    r = p.rational()
    p.end()
    return r


def format_group(x: GroupElement) -> str:
    body = "{" + ",".join(f"{i}:{format_rational(c)}" for i, c in x.coeffs) + "}"
    if x.k:
        k = Fraction(x.k)
        sign = "-" if k < 0 else "+"
        body += f" {sign} {format_rational(abs(k))}*a"
    return body


class _Parser:
    """Small recursive-descent parser with position-aware errors."""

    def __init__(self, text: str, hull: bool = False):
        self.text = text
        self.pos = 0
        self.hull = hull

    # -- lexing ----------------------------------------------------------
    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self._skip()
        return self.text.startswith(s, self.pos)

    def accept(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.accept(s):
            self.fail(f"expected {s!r}")

    def fail(self, msg: str):
        self._skip()
        raise LiteralSyntaxError(msg, self.text, self.pos)

    def end(self):
        self._skip()
        if self.pos != len(self.text):
            self.fail("unexpected trailing input")

    def word(self) -> str:
        self._skip()
        m = re.compile(r"-?[A-Za-z_]+").match(self.text, self.pos)
        if not m:
            self.fail("expected a keyword")
        self.pos = m.end()
        return m.group(0)

    def integer(self) -> int:
        self._skip()
        m = re.compile(r"-?\d+").match(self.text, self.pos)
        if not m:
            self.fail("expected an integer")
        self.pos = m.end()
        return int(m.group(0))

    def rational(self) -> Fraction:
        self._skip()
        start = self.pos
        m = re.compile(r"-?\d+(?:\s*/\s*-?\d+)?").match(self.text, self.pos)
        if not m:
            self.fail("expected a rational number")
        num, _, den = m.group(0).partition("/")
        if den and int(den) == 0:
            raise LiteralSyntaxError("zero denominator", self.text, start)
        self.pos = m.end()
        return Fraction(int(num), int(den) if den else 1)

    def at_rational(self) -> bool:
        self._skip()
        return bool(re.compile(r"-?\d").match(self.text, self.pos))

    # -- shapes ----------------------------------------------------------
    def component(self) -> str:
        w = self.word()
        if w not in SCALAR_KINDS:
            self.fail(f"unknown component {w!r}")
        return w

    def bound(self, low: bool) -> Optional[int]:
        if self.accept("-inf") if low else self.accept("inf"):
            return None
        return self.integer()

    def shape(self) -> GroupShape:
        from . import groups as G
        if not self.accept("("):
            w = self.word()
            if w not in SCALAR_KINDS:
                self.fail(f"unknown shape {w!r}")
            return {"int": G.INT, "rat": G.RAT, "dyadic": G.DYADIC}[w]
        start = self.pos
        head = self.word()
        try:
            if head in ("hahnsum", "extsum"):
                if self.accept("-omega"):
                    lo, hi = None, 0
                elif self.accept("omega"):
                    lo, hi = 0, None
                else:
                    lo, hi = self.bound(True), self.bound(False)
                comp = self.component()
                if head == "extsum":
                    coef = self.integer()
                    out = GroupShape("extsum", lo, hi, comp, coef=coef)
                else:
                    out = GroupShape("hahnsum", lo, hi, comp)
            elif head == "lex":
                left = self.component()
                out = G.lex_pair(left, self.component())
            elif head == "quotient":
                base = self.shape()
                out = G.quotient(base, self.integer())
            else:
                self.pos = start
                self.fail(f"unknown shape constructor {head!r}")
        except HahnError as e:
            if isinstance(e, LiteralSyntaxError):
                raise
            raise LiteralSyntaxError(str(e), self.text, start) from None
        self.expect(")")
        return out

    # -- group elements --------------------------------------------------
    def group(self, shape: GroupShape) -> GroupElement:
        start = self.pos
        if not self.peek("{"):
            if shape.is_scalar and self.at_rational():
                return _make(self, shape, {0: self.rational()}, 0, start)
            self.fail("expected a group literal '{...}'")
        self.expect("{")
        coeffs = {}
        if not self.accept("}"):
            while True:
                i = self.integer()
                self.expect(":")
                if i in coeffs:
                    self.fail(f"duplicate index {i}")
                coeffs[i] = self.rational()
                if self.accept("}"):
                    break
                self.expect(",")
        k = Fraction(0)
        save = self.pos
        if self.peek("+") or self.peek("-"):
            neg = self.text[self.pos] == "-"
            self.pos += 1
            if self.at_rational() and not self.peek("-"):
                k = self.rational()
                if self.accept("*") and self.accept("a"):
                    k = -k if neg else k
                else:
                    self.pos = save
                    k = Fraction(0)
            else:
                self.pos = save
        return _make(self, shape, coeffs, k, start)

    # -- series ------------------------------------------------------------
    def term(self, shape: GroupShape, neg: bool):
        c = Fraction(1)
        if self.at_rational():
            c = self.rational()
            if not self.accept("*"):
                return shape.zero(), -c if neg else c
        self.expect("t^{")
        g = self.group(shape)
        self.expect("}")
        return g, -c if neg else c

    def series(self, shape: GroupShape):
        from .series import Series
        terms = []
        neg = self.accept("-")
        terms.append(self.term(shape, neg))
        while True:
            if self.accept("+"):
                terms.append(self.term(shape, False))
            elif self.peek("-") and not self.peek("-inf"):
                self.pos += 1
                terms.append(self.term(shape, True))
            else:
                break
        cutoff = None
        if self.accept("("):
            if self.word() != "cut":
                self.fail("expected 'cut'")
            cutoff = self.group(shape)
            self.expect(")")
        acc = {}
        for g, c in terms:
            acc[g] = acc.get(g, 0) + c
        return Series(shape, acc, cutoff)

    def polynomial(self, shape: GroupShape):
        from .hensel import Polynomial
        self.expect("[")
        coeffs = [self.series(shape)]
        while self.accept(","):
            coeffs.append(self.series(shape))
        self.expect("]")
        return Polynomial(coeffs)


def _make(p: _Parser, shape, coeffs, k, start) -> GroupElement:
    try:
        x = GroupElement(shape, coeffs, k)
    except (HahnError, TypeError) as e:
        raise LiteralSyntaxError(str(e), p.text, start) from None
    if not p.hull and not shape.contains(x):
        raise LiteralSyntaxError(f"{format_group(x)} is not an element of {shape}", p.text, start)
    return x


def parse_shape(text: str) -> GroupShape:
    p = _Parser(text)
    s = p.shape()
    p.end()
    return s


def parse_group(text: str, shape: GroupShape, hull: bool = False) -> GroupElement:
    """Parse a group literal; ``hull=True`` admits divisible-hull elements."""
    p = _Parser(text, hull)
    x = p.group(shape)
    p.end()
    return x


def parse_series(text: str, shape: GroupShape):
    p = _Parser(text)
    s = p.series(shape)
    p.end()
    return s


def parse_polynomial(text: str, shape: GroupShape):
    p = _Parser(text)
    f = p.polynomial(shape)
    p.end()
    return f


def format_series(s) -> str:
    parts: List[str] = []
    zero = s.shape.zero()
    for g, c in s.items():
        c = Fraction(c)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if g == zero:
            body = format_rational(mag)
        elif mag == 1:
            body = f"t^{{{format_group(g)}}}"
        else:
            body = f"{format_rational(mag)}*t^{{{format_group(g)}}}"
        parts.append((sign, body))
    if not parts:
        out = "0"
    else:
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
    if s.cutoff is not None:
        out += f" (cut {format_group(s.cutoff)})"
    return out


def format_polynomial(f) -> str:
    return "[" + ", ".join(format_series(c) for c in f.coeffs) + "]"


# -- canonical JSON -------------------------------------------------------------

def group_to_json(x: GroupElement) -> dict:
    return {"coeffs": [[i, format_rational(c)] for i, c in x.coeffs], "k": format_rational(x.k)}


def group_from_json(obj, shape: GroupShape) -> GroupElement:
    return GroupElement(shape, [(int(i), Fraction(c)) for i, c in obj["coeffs"]], Fraction(obj["k"]))


def series_to_json(s) -> dict:
    return {
        "cutoff": None if s.cutoff is None else group_to_json(s.cutoff),
        "shape": shape_to_text(s.shape),
        "terms": [[group_to_json(g), format_rational(c)] for g, c in s.items()],
    }


def series_from_json(obj):
    from .series import Series
    shape = parse_shape(obj["shape"])
    cut = None if obj["cutoff"] is None else group_from_json(obj["cutoff"], shape)
    return Series(shape, [(group_from_json(g, shape), Fraction(c)) for g, c in obj["terms"]], cut)


def to_json_value(obj: Any) -> Any:
    """Recursively convert library values into JSON-compatible data."""
    from .series import Series
    from .hensel import Polynomial
    if isinstance(obj, GroupElement):
        return {"group": shape_to_text(obj.shape), **group_to_json(obj)}
    if isinstance(obj, Series):
        return series_to_json(obj)
    if isinstance(obj, Polynomial):
        return {"poly": [series_to_json(c) for c in obj.coeffs]}
    if isinstance(obj, GroupShape):
        return shape_to_text(obj)
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, dict):
        return {str(k): to_json_value(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json_value(v) for v in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return obj


def canonical_json(obj: Any, indent: Optional[int] = None) -> str:
    return json.dumps(to_json_value(obj), sort_keys=True, indent=indent,
                      separators=(",", ":") if indent is None else (",", ": "))


def eval_expr(literal: str, shape: GroupShape) -> Tuple[str, Any]:
    """Parse a group, series or polynomial literal and return ``(kind, value)``."""
    text = literal.strip()
    if text.startswith("["):
        return "polynomial", parse_polynomial(text, shape)
    if text.startswith("{"):
        try:
            return "group", parse_group(text, shape)
        except LiteralSyntaxError:
            pass
    return "series", parse_series(text, shape)
