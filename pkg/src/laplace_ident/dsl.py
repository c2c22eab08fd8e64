"""Text format for piecewise exp-poly-trig functions.

A function is either a bare expression in ``t`` (one piece on ``[0, inf)``)
or a block::

    piecewise {
      [0, 1): exp(t);
      [1, inf): (e^-1 - 1)*exp(t);
    }

Expressions are folded into canonical terms while parsing, so anything that
multiplies out to sums of ``c t^k exp(r t) cos/sin(w t)`` is accepted and
everything else is rejected with a ``NotRepresentable`` error naming the
offending subexpression.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

from .errors import LaplaceIdentError
from .fnmodel import (COS, NONE, SIN, Piece, PiecewiseExpPoly, multiply_terms,
                      normalize_terms, power_terms, scale_terms, term)

SYNTAX, NOT_REPRESENTABLE, BAD_INTERVAL, OVERLAP = "Syntax", "NotRepresentable", "BadInterval", "Overlap"
MAX_POWER = 64
BOUND_TOL = 1e-12


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


class ParseError(LaplaceIdentError):
    def __init__(self, kind: str, span: SourceSpan, message: str):
        super().__init__(f"{kind} at {span.line}:{span.column}: {message}")
        self.kind = kind
        self.span = span
        self.message = message


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()\[\],:;{}])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str   # num, name, op, end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out, pos = [], 0
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:
            raise ParseError(SYNTAX, _span(text, pos, 1), f"unexpected character {text[pos]!r}")
        if mt.lastgroup != "ws":
            out.append(_Tok(mt.lastgroup, mt.group(), pos))
        pos = mt.end()
    out.append(_Tok("end", "", len(text)))
    return out


def _span(text: str, start: int, length: int) -> SourceSpan:
    line = text.count("\n", 0, start) + 1
    col = start - (text.rfind("\n", 0, start) + 1) + 1
    eol = text.find("\n", start)
    room = (len(text) if eol < 0 else eol) - start
    return SourceSpan(line, col, max(1, min(length, room)))


@dataclass(frozen=True)
class _Val:
    """Folded subexpression: canonical terms plus the source range it came from."""

    terms: tuple
    start: int
    end: int

    @property
    def is_const(self) -> bool:
        return all(t.tpow == 0 and t.is_polynomial for t in self.terms)

    @property
    def const(self) -> float:
        return math.fsum(t.coeff for t in self.terms)

    def linear(self) -> Optional[tuple]:
        """``(alpha, beta)`` if the value is ``alpha + beta t``, else ``None``."""
        if not all(t.is_polynomial and t.tpow <= 1 for t in self.terms):
            return None
        alpha = sum(t.coeff for t in self.terms if t.tpow == 0)
        beta = sum(t.coeff for t in self.terms if t.tpow == 1)
        return alpha, beta


def _const_terms(c: float) -> tuple:
    if not math.isfinite(c):
        raise ValueError("constant is not finite")
    return (term(c),) if c else ()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        if t.kind != "end":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "name")

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.fail(SYNTAX, f"expected {text!r}, found {self._desc(self.tok)}")
        return self.advance()

    def _desc(self, t: _Tok) -> str:
        return "end of input" if t.kind == "end" else repr(t.text)

    def fail(self, kind: str, message: str, start: Optional[int] = None, end: Optional[int] = None):
        if start is None:
            start, end = self.tok.pos, self.tok.pos + max(1, len(self.tok.text))
        raise ParseError(kind, _span(self.text, start, max(1, end - start)), message)

    def bad(self, v: _Val, message: str):
        self.fail(NOT_REPRESENTABLE, f"{message}: {self.text[v.start:v.end]!r}", v.start, v.end)

    def folded(self, fn, span: tuple, *args):
        """Run a constant fold, reporting overflow against the subexpression."""
        try:
            return fn(*args)
        except (ValueError, OverflowError) as exc:
            reason = "value overflows" if isinstance(exc, OverflowError) else str(exc)
            self.fail(NOT_REPRESENTABLE, f"{reason}: {self.text[span[0]:span[1]]!r}", *span)

    # grammar
    def function(self) -> PiecewiseExpPoly:
        if self.at("piecewise"):
            f = self.block()
        else:
            v = self.expr()
            f = PiecewiseExpPoly.from_terms(v.terms)
        if self.tok.kind != "end":
            self.fail(SYNTAX, f"unexpected {self._desc(self.tok)} after the function")
        return f

    def block(self) -> PiecewiseExpPoly:
        self.advance()
        self.expect("{")
        pieces: list[Piece] = []
        prev_hi: Optional[float] = None
        while not self.at("}"):
            if self.tok.kind == "end":
                self.fail(SYNTAX, "unterminated piecewise block, expected '}'")
            open_tok = self.expect("[")
            lo, lo_s, lo_e = self.bound(allow_inf=False)
            self.expect(",")
            hi, hi_s, hi_e = self.bound(allow_inf=True)
            self.expect(")")
            self.expect(":")
            body = self.expr()
            self.expect(";")
            if prev_hi is not None and math.isinf(prev_hi):
                self.fail(BAD_INTERVAL, "no piece may follow one that runs to inf", open_tok.pos, open_tok.pos + 1)
            if not lo < hi:
                self.fail(BAD_INTERVAL, f"empty interval [{lo:g}, {hi:g})", lo_s, hi_e)
            if prev_hi is None:
                if abs(lo) > BOUND_TOL:
                    self.fail(BAD_INTERVAL, f"the first piece must start at 0, not {lo:g}", lo_s, lo_e)
                lo = 0.0
            elif abs(lo - prev_hi) <= BOUND_TOL * max(1.0, abs(lo)):
                lo = prev_hi
            elif lo < prev_hi:
                self.fail(OVERLAP, f"piece starts at {lo:g} before the previous one ends at {prev_hi:g}", lo_s, lo_e)
            else:
                self.fail(BAD_INTERVAL, f"gap between {prev_hi:g} and {lo:g}", lo_s, lo_e)
            pieces.append(Piece(lo, body.terms))
            prev_hi = hi
        close = self.advance()
        if not pieces:
            self.fail(SYNTAX, "a piecewise block needs at least one piece", close.pos, close.pos + 1)
        if not math.isinf(prev_hi):
            self.fail(BAD_INTERVAL, f"pieces stop at {prev_hi:g}; the last one must run to inf",
                      close.pos, close.pos + 1)
        return PiecewiseExpPoly(tuple(pieces))

    def bound(self, allow_inf: bool) -> tuple:
        start = self.tok.pos
        if self.at("inf"):
            t = self.advance()
            if not allow_inf:
                self.fail(BAD_INTERVAL, "inf may only close the last piece", t.pos, t.pos + 3)
            return math.inf, t.pos, t.pos + 3
        v = self.expr()
        if not v.is_const:
            self.bad(v, "interval bounds must be constants")
        c = v.const
        if c < 0:
            self.fail(BAD_INTERVAL, f"negative bound {c:g}", start, v.end)
        return c, start, v.end

    def expr(self) -> _Val:
        left = self.product()
        while self.at("+") or self.at("-"):
            sign = 1.0 if self.advance().text == "+" else -1.0
            right = self.product()
            left = _Val(normalize_terms(left.terms + scale_terms(right.terms, sign)), left.start, right.end)
        return left

    def product(self) -> _Val:
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            right = self.unary()
            if op == "*":
                terms = multiply_terms(left.terms, right.terms)
            else:
                if not right.is_const:
                    self.bad(right, "division by a non-constant")
                if right.const == 0.0:
                    self.bad(right, "division by zero")
                terms = scale_terms(left.terms, 1.0 / right.const)
            left = _Val(terms, left.start, right.end)
        return left

    def unary(self) -> _Val:
        if self.at("-") or self.at("+"):
            t = self.advance()
            v = self.unary()
            terms = scale_terms(v.terms, -1.0) if t.text == "-" else v.terms
            return _Val(terms, t.pos, v.end)
        return self.power()

    def power(self) -> _Val:
        base = self.atom()
        if not self.at("^"):
            return base
        self.advance()
        ex = self.unary()   # right associative, and allows e^-1
        span = (base.start, ex.end)
        if not ex.is_const:
            if base.is_const and base.const > 0:
                lin = ex.linear()
                if lin is None:
                    self.bad(ex, "exponent must be affine in t")
                k = math.log(base.const)
                return _Val(self.folded(_exp_terms, (base.start, ex.end), lin[0] * k, lin[1] * k), *span)
            self.bad(ex, "exponent depends on t")
        p = ex.const
        if base.is_const:
            b = base.const
            if b < 0 and p != int(p):
                self.bad(ex, "fractional power of a negative number")
            if b == 0 and p < 0:
                self.bad(ex, "negative power of zero")
            return _Val(self.folded(lambda: _const_terms(float(b ** p)), span), *span)
        if p != int(p) or p < 0:
            self.bad(ex, "powers of functions of t must be nonnegative integers")
        if p > MAX_POWER:
            self.bad(ex, f"power above {MAX_POWER}")
        terms = power_terms(base.terms, int(p)) if p else _const_terms(1.0)
        return _Val(terms, *span)

    def atom(self) -> _Val:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return _Val(_const_terms(float(t.text)), t.pos, t.pos + len(t.text))
        if t.kind == "name":
            name = t.text
            if name == "t":
                self.advance()
                return _Val((term(1.0, 1),), t.pos, t.pos + 1)
            if name == "pi":
                self.advance()
                return _Val(_const_terms(math.pi), t.pos, t.pos + 2)
            if name == "e":
                self.advance()
                return _Val(_const_terms(math.e), t.pos, t.pos + 1)
            if name in ("exp", "sin", "cos", "ln", "sqrt"):
                self.advance()
                self.expect("(")
                arg = self.expr()
                close = self.expect(")")
                return self.call(name, arg, t.pos, close.pos + 1)
            self.fail(SYNTAX, f"unknown name {name!r}")
        if self.at("("):
            self.advance()
            v = self.expr()
            close = self.expect(")")
            return _Val(v.terms, t.pos, close.pos + 1)
        self.fail(SYNTAX, f"expected a number, t, a constant, a function or '(', found {self._desc(t)}")

    def call(self, name: str, arg: _Val, start: int, end: int) -> _Val:
        if name in ("ln", "sqrt"):
            if not arg.is_const:
                self.bad(arg, f"{name} of a non-constant")
            c = arg.const
            if name == "ln" and c <= 0:
                self.bad(arg, "ln of a nonpositive number")
            if name == "sqrt" and c < 0:
                self.bad(arg, "sqrt of a negative number")
            return _Val(_const_terms(math.log(c) if name == "ln" else math.sqrt(c)), start, end)
        lin = arg.linear()
        if lin is None:
            self.bad(arg, f"{name} needs an argument affine in t")
        alpha, beta = lin
        if name == "exp":
            return _Val(self.folded(_exp_terms, (start, end), alpha, beta), start, end)
        if name == "sin":
            # sin(a + b t) = sin a cos(b t) + cos a sin(b t)
            terms = [term(math.sin(alpha), 0, 0.0, beta, COS), term(math.cos(alpha), 0, 0.0, beta, SIN)]
        else:
            terms = [term(math.cos(alpha), 0, 0.0, beta, COS), term(-math.sin(alpha), 0, 0.0, beta, SIN)]
        return _Val(normalize_terms(terms), start, end)


def _exp_terms(alpha: float, beta: float) -> tuple:
    c = math.exp(alpha)
    if not math.isfinite(c) or not math.isfinite(beta):
        raise ValueError("exponential overflows")
    return (term(c, 0, beta),) if c else ()


def parse(text: str) -> PiecewiseExpPoly:
    """Parse the text format; every failure is a ``ParseError``."""
    parser = _Parser(text)
    try:
        return parser.function()
    except ParseError:
        raise
    except (ValueError, ArithmeticError) as exc:
        # term validation and float overflow surface here
        parser.fail(NOT_REPRESENTABLE, str(exc) or type(exc).__name__)
    except RecursionError:
        parser.fail(SYNTAX, "expression nested too deeply")


def parse_file(path) -> PiecewiseExpPoly:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# -- formatting ----------------------------------------------------------------

def _num(x: float) -> str:
    return "%.17g" % x


def _scaled_t(k: float) -> str:
    if k == 1.0:
        return "t"
    if k == -1.0:
        return "-t"
    return f"{_num(k)}*t"


def _format_term(t) -> str:
    factors = []
    if t.tpow == 1:
        factors.append("t")
    elif t.tpow > 1:
        factors.append(f"t^{t.tpow}")
    if t.rate:
        factors.append(f"exp({_scaled_t(t.rate)})")
    if t.trig != NONE:
        factors.append(f"{t.trig}({_scaled_t(t.freq)})")
    if not factors:
        return _num(t.coeff)
    body = "*".join(factors)
    if t.coeff == 1.0:
        return body
    if t.coeff == -1.0:
        return "-" + body
    return f"{_num(t.coeff)}*{body}"


def format_terms(terms) -> str:
    if not terms:
        return "0"
    out = ""
    for i, t in enumerate(terms):
        s = _format_term(t)
        if i == 0:
            out = s
        elif s.startswith("-"):
            out += " - " + s[1:]
        else:
            out += " + " + s
    return out


def format_function(f: PiecewiseExpPoly) -> str:
    """Canonical text; ``parse(format_function(f))`` rebuilds ``f``."""
    if len(f.pieces) == 1:
        return format_terms(f.pieces[0].terms)
    lines = ["piecewise {"]
    for a, b, terms in f.bounds():
        hi = "inf" if math.isinf(b) else _num(b)
        lines.append(f"  [{_num(a)}, {hi}): {format_terms(terms)};")
    lines.append("}")
    return "\n".join(lines)


format = format_function  # noqa: A001 - the public name of the operation
