"""Potential expressions: parsing to rational normal form, and printing.

Grammar: complex literals (2, 1.5i, 3+2i), the variable x, operators
+ - * / ^ (integer powers), parentheses, and the single opaque token
exp(1/x).  Everything except exp(1/x) reduces to one numerator/denominator
polynomial pair, computed in exact rational complex arithmetic so that
parse -> print -> parse is an identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ExpressionError, NonRational
from .potential import EssentialExpPotential, RationalPotential, rational

__all__ = ["parse_potential", "potential_source"]


@dataclass(frozen=True)
class _QC:
    """Complex number with exact rational parts."""

    re: Fraction
    im: Fraction

    def __add__(self, o: "_QC") -> "_QC":
        return _QC(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "_QC") -> "_QC":
        return _QC(self.re - o.re, self.im - o.im)

    def __mul__(self, o: "_QC") -> "_QC":
        return _QC(self.re * o.re - self.im * o.im,
                   self.re * o.im + self.im * o.re)

    def __truediv__(self, o: "_QC") -> "_QC":
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError
        return _QC((self.re * o.re + self.im * o.im) / d,
                   (self.im * o.re - self.re * o.im) / d)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


_ZERO = _QC(Fraction(0), Fraction(0))
_ONE = _QC(Fraction(1), Fraction(0))

# a rational function is (numerator, denominator), ascending coefficients
_Rat = tuple[list[_QC], list[_QC]]


def _ptrim(p: list[_QC]) -> list[_QC]:
    while p and not p[-1]:
        p = p[:-1]
    return p


def _padd(a: list[_QC], b: list[_QC]) -> list[_QC]:
    out = [_ZERO] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] = out[i] + c
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return _ptrim(out)


def _pmul(a: list[_QC], b: list[_QC]) -> list[_QC]:
    if not a or not b:
        return []
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if not ca:
            continue
        for j, cb in enumerate(b):
            out[i + j] = out[i + j] + ca * cb
    return _ptrim(out)


def _pneg(a: list[_QC]) -> list[_QC]:
    return [_ZERO - c for c in a]


_ESSENTIAL = "essential"  # sentinel value for the exp(1/x) leaf


_TOKEN = re.compile(
    r"\s*(?:(?P<exp>exp\s*\(\s*1\s*/\s*x\s*\))"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ExpressionError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        if m.lastgroup == "exp":
            tokens.append(("exp", m.group("exp"), start))
        elif m.lastgroup == "num":
            # a trailing i glues to the literal: 2i, 1.5i
            end = m.end()
            if end < len(text) and text[end] == "i":
                tokens.append(("imag", m.group("num"), start))
                pos = end + 1
                continue
            tokens.append(("num", m.group("num"), start))
        elif m.lastgroup == "name":
            name = m.group("name")
            if name == "x":
                tokens.append(("x", name, start))
            elif name == "i":
                tokens.append(("imag", "1", start))
            else:
                raise ExpressionError(f"unknown name {name!r}", start)
        else:
            tokens.append((m.group("op"), m.group("op"), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.k]

    def take(self, kind: str | None = None) -> tuple[str, str, int]:
        tok = self.tokens[self.k]
        if kind is not None and tok[0] != kind:
            raise ExpressionError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        self.k += 1
        return tok

    # expr := term (('+'|'-') term)*
    def expr(self):
        value = self.term()
        while self.peek()[0] in "+-":
            op, _, off = self.take()
            rhs = self.term()
            value = self._combine(value, rhs, op, off)
        return value

    # term := unary (('*'|'/') unary)*
    def term(self):
        value = self.unary()
        while self.peek()[0] in "*/":
            op, _, off = self.take()
            rhs = self.unary()
            value = self._combine(value, rhs, op, off)
        return value

    def unary(self):
        sign = 1
        while self.peek()[0] in "+-":
            op, _, off = self.take()
            if op == "-":
                sign = -sign
        value = self.power()
        if sign < 0:
            if value == _ESSENTIAL:
                raise NonRational("exp(1/x) cannot be combined with other terms", off)
            value = (_pneg(value[0]), value[1])
        return value

    def power(self):
        value = self.atom()
        if self.peek()[0] != "^":
            return value
        _, _, off = self.take()
        if value == _ESSENTIAL:
            raise NonRational("exp(1/x) cannot be combined with other terms", off)
        sign = 1
        if self.peek()[0] == "-":
            self.take()
            sign = -1
        kind, lit, noff = self.take("num")
        if "." in lit or "e" in lit or "E" in lit:
            raise ExpressionError("exponent must be an integer", noff)
        k = int(lit)
        num, den = [_ONE], [_ONE]
        for _ in range(k):
            num, den = _pmul(num, value[0]), _pmul(den, value[1])
        if sign < 0:
            num, den = den, num
        if not den:
            raise ExpressionError("division by the zero polynomial", noff)
        return (num, den)

    def atom(self):
        kind, lit, off = self.peek()
        if kind == "num":
            self.take()
            q = _QC(Fraction(lit), Fraction(0))
            return ([q] if q else [], [_ONE])
        if kind == "imag":
            self.take()
            q = _QC(Fraction(0), Fraction(lit))
            return ([q] if q else [], [_ONE])
        if kind == "x":
            self.take()
            return ([_ZERO, _ONE], [_ONE])
        if kind == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value
        if kind == "exp":
            self.take()
            return _ESSENTIAL
        raise ExpressionError(f"expected a value, found {lit!r}", off)

    def _combine(self, a, b, op: str, off: int):
        if a == _ESSENTIAL or b == _ESSENTIAL:
            raise NonRational("exp(1/x) cannot be combined with other terms", off)
        pa, qa = a
        pb, qb = b
        if op == "+":
            return (_padd(_pmul(pa, qb), _pmul(pb, qa)), _pmul(qa, qb))
        if op == "-":
            return (_padd(_pmul(pa, qb), _pneg(_pmul(pb, qa))), _pmul(qa, qb))
        if op == "*":
            return (_pmul(pa, pb), _pmul(qa, qb))
        num, den = _pmul(pa, qb), _pmul(qa, pb)
        if not den:
            raise ExpressionError("division by the zero polynomial", off)
        return (num, den)


def parse_potential(text: str) -> RationalPotential | EssentialExpPotential:
    """Parse an expression to rational normal form (or the essential leaf)."""
    if not text.strip():
        raise ExpressionError("empty potential expression", 0)
    parser = _Parser(text)
    value = parser.expr()
    kind, lit, off = parser.peek()
    if kind != "end":
        raise ExpressionError(f"unexpected trailing {lit!r}", off)
    if value == _ESSENTIAL:
        return EssentialExpPotential()
    num, den = value
    if not den:
        raise ExpressionError("division by the zero polynomial", 0)
    return rational([c.to_complex() for c in num] or [0.0],
                    [c.to_complex() for c in den])


def _number_text(v: float) -> str:
    return str(int(v)) if v == int(v) else repr(v)


def _coeff_text(c: complex) -> str:
    if c.imag == 0:
        return _number_text(c.real)
    if c.real == 0:
        return _number_text(c.imag) + "i"
    sign = "+" if c.imag > 0 else "-"
    return f"({_number_text(c.real)}{sign}{_number_text(abs(c.imag))}i)"


def _poly_text(coeffs: tuple[complex, ...]) -> str:
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        if k == 0:
            terms.append(_coeff_text(c))
        else:
            x = "x" if k == 1 else f"x^{k}"
            terms.append(x if c == 1 else f"{_coeff_text(c)}*{x}")
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out


def potential_source(pot: RationalPotential | EssentialExpPotential) -> str:
    """Canonical expression text; parses back to an identical potential."""
    if isinstance(pot, EssentialExpPotential):
        return "exp(1/x)"
    num = _poly_text(pot.numer)
    if pot.denom == (1 + 0j,):
        return num
    if " " in num:
        num = f"({num})"
    return f"{num}/({_poly_text(pot.denom)})"
