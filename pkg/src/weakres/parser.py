"""Text grammar for formulas and the comparison sugar.

Concrete syntax (EBNF, also documented in docs/grammar.md):

    formula    = implies ;
    implies    = or_expr , [ "->" , implies ] ;            (* A -> B  ==  !A | B *)
    or_expr    = and_expr , { "|" , and_expr } ;
    and_expr   = until_exp , { "&" , until_exp } ;
    until_exp  = unary , [ "U" , interval , until_exp ] ;
    unary      = "!" , unary
               | ( "G" | "F" ) , interval , [ annotation ] , unary
               | atom ;
    atom       = "true"
               | "(" , formula , ")" , [ annotation ]      (* annotation only if the
                                                              group is a comparison *)
               | comparison ;
    comparison = affine , ( ">" | ">=" | "<" | "<=" ) , affine ;
    affine     = [ "-" ] , term , { ( "+" | "-" ) , term } ;
    term       = primary , { "*" , primary | "/" , primary } ;
    primary    = number | identifier | "$" , identifier ;
    interval   = "[" , integer , "," , integer , "]" ;
    annotation = "{" , integer , [ "," , integer ] , "}" ;

Comparisons normalize to ``f(s) > 0`` predicates: ``L > R`` and ``L >= R``
become ``L - R > 0``; ``L < R`` and ``L <= R`` become ``R - L > 0`` (the
nonstrict forms coincide with the strict ones because satisfaction is
``rho >= 0``).  ``A -> B`` is rewritten to ``!A | B`` at parse time.  Products
must involve at most one variable and divisors must be constant, so every
predicate stays affine.  ``$name`` references a runtime parameter supplied by
the caller; ``#`` starts a comment that runs to end of line.  ``true``, ``G``,
``F``, and ``U`` are reserved words, not variable names.

A one-parameter annotation ``{p}`` is legal only on a parenthesized
comparison and declares predicate slack; a two-parameter annotation ``{p,q}``
is legal only after a ``G``/``F`` interval and declares window adjustment
bounds.  ``parse_stl`` rejects all annotations; ``parse_weakstl`` accepts
them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import ParseError
from .stl import (AffineExpr, Always, And, Eventually, Formula, Interval, Not,
                  Or, Pred, TrueF, Until)

_RESERVED = {"true", "G", "F", "U"}

_TWO_CHAR = ("->", ">=", "<=")
_ONE_CHAR = set("()[]{},&|!><+-*/$")


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident" | "number" | "punct" | "end"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        two = text[i:i + 2]
        if two in _TWO_CHAR:
            tokens.append(_Token("punct", two, line, start_col))
            i += 2
            col += 2
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            tokens.append(_Token("number", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch in _ONE_CHAR:
            tokens.append(_Token("punct", ch, line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, start_col)
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Affine:
    """Mutable affine accumulator used only during parsing."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs=None, const=0.0):
        self.coeffs = dict(coeffs or {})
        self.const = const

    @staticmethod
    def number(v: float) -> "_Affine":
        return _Affine(const=v)

    @staticmethod
    def var(name: str) -> "_Affine":
        return _Affine(coeffs={name: 1.0})

    def is_const(self) -> bool:
        return not self.coeffs

    def add(self, other: "_Affine", sign: float) -> "_Affine":
        out = _Affine(self.coeffs, self.const + sign * other.const)
        for k, v in other.coeffs.items():
            out.coeffs[k] = out.coeffs.get(k, 0.0) + sign * v
        return out

    def scale(self, factor: float) -> "_Affine":
        return _Affine({k: v * factor for k, v in self.coeffs.items()}, self.const * factor)

    def freeze(self) -> AffineExpr:
        return AffineExpr.build(self.coeffs, self.const)


class _Parser:
    def __init__(self, tokens: list[_Token], params: Mapping[str, float] | None,
                 allow_annotations: bool):
        self.tokens = tokens
        self.pos = 0
        self.params = params or {}
        self.allow_annotations = allow_annotations

    # -- token helpers -----------------------------------------------------
    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok.kind in ("punct", "ident") and tok.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text or tok.kind == "end":
            got = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"expected {text!r}, found {got}", tok.line, tok.col)
        return tok

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    # -- formula grammar ---------------------------------------------------
    def parse_formula(self) -> Formula:
        left = self.parse_or()
        if self.accept("->"):
            right = self.parse_formula()
            return Or(Not(left), right)
        return left

    def parse_or(self) -> Formula:
        node = self.parse_and()
        while self.accept("|"):
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> Formula:
        node = self.parse_until()
        while self.accept("&"):
            node = And(node, self.parse_until())
        return node

    def parse_until(self) -> Formula:
        node = self.parse_unary()
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "U":
            self.next()
            interval = self.parse_interval()
            right = self.parse_until()
            return Until(interval, node, right)
        return node

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if self.accept("!"):
            return Not(self.parse_unary())
        if tok.kind == "ident" and tok.text in ("G", "F"):
            self.next()
            interval = self.parse_interval()
            bounds = self.parse_annotation(arity=2) if self.peek().text == "{" else None
            child = self.parse_unary()
            cls = Always if tok.text == "G" else Eventually
            try:
                return cls(interval, child, window_bounds=bounds)
            except ValueError as exc:
                raise ParseError(str(exc), tok.line, tok.col) from None
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "true":
            self.next()
            return TrueF()
        if tok.text == "(":
            self.next()
            inner = self.parse_formula()
            self.expect(")")
            if self.peek().text == "{":
                if not isinstance(inner, Pred):
                    raise self.fail("slack annotation applies only to comparisons")
                if inner.slack_bound is not None:
                    raise self.fail("comparison already carries a slack annotation")
                (bound,) = self.parse_annotation(arity=1)
                return Pred(inner.expr, slack_bound=bound)
            return inner
        if tok.kind in ("ident", "number") or tok.text in ("-", "$"):
            return self.parse_comparison()
        got = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"expected a formula, found {got}", tok.line, tok.col)

    def parse_comparison(self) -> Formula:
        left = self.parse_affine()
        tok = self.next()
        if tok.text not in (">", ">=", "<", "<="):
            got = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"expected a comparison operator, found {got}", tok.line, tok.col)
        right = self.parse_affine()
        if tok.text in (">", ">="):
            expr = left.add(right, -1.0)
        else:
            expr = right.add(left, -1.0)
        return Pred(expr.freeze())

    # -- affine grammar ------------------------------------------------------
    def parse_affine(self) -> _Affine:
        negate = self.accept("-")
        node = self.parse_term()
        if negate:
            node = node.scale(-1.0)
        while True:
            if self.accept("+"):
                node = node.add(self.parse_term(), 1.0)
            elif self.accept("-"):
                node = node.add(self.parse_term(), -1.0)
            else:
                return node

    def parse_term(self) -> _Affine:
        node = self.parse_primary()
        while True:
            if self.accept("*"):
                rhs = self.parse_primary()
                if not node.is_const() and not rhs.is_const():
                    raise self.fail("product of two variables is not affine")
                node = rhs.scale(node.const) if node.is_const() else node.scale(rhs.const)
            elif self.accept("/"):
                tok = self.peek()
                rhs = self.parse_primary()
                if not rhs.is_const():
                    raise ParseError("division by a variable is not affine", tok.line, tok.col)
                if rhs.const == 0.0:
                    raise ParseError("division by zero", tok.line, tok.col)
                node = node.scale(1.0 / rhs.const)
            else:
                return node

    def parse_primary(self) -> _Affine:
        tok = self.next()
        if tok.text == "-":
            return self.parse_primary().scale(-1.0)
        if tok.kind == "number":
            return _Affine.number(float(tok.text))
        if tok.text == "$":
            name_tok = self.next()
            if name_tok.kind != "ident":
                raise ParseError("expected a parameter name after '$'",
                                 name_tok.line, name_tok.col)
            if name_tok.text not in self.params:
                raise ParseError(f"unbound runtime parameter ${name_tok.text}",
                                 tok.line, tok.col)
            return _Affine.number(float(self.params[name_tok.text]))
        if tok.kind == "ident":
            if tok.text in _RESERVED:
                raise ParseError(f"{tok.text!r} is a reserved word", tok.line, tok.col)
            return _Affine.var(tok.text)
        got = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"expected a number or variable, found {got}", tok.line, tok.col)

    # -- shared pieces -------------------------------------------------------
    def parse_interval(self) -> Interval:
        open_tok = self.expect("[")
        lo = self.parse_int()
        self.expect(",")
        hi = self.parse_int()
        self.expect("]")
        try:
            return Interval(lo, hi)
        except ValueError as exc:
            raise ParseError(str(exc), open_tok.line, open_tok.col) from None

    def parse_annotation(self, arity: int) -> tuple[int, ...]:
        open_tok = self.expect("{")
        if not self.allow_annotations:
            raise ParseError("weakening annotations are not allowed here",
                             open_tok.line, open_tok.col)
        values = [self.parse_int()]
        while self.accept(","):
            values.append(self.parse_int())
        self.expect("}")
        if len(values) != arity:
            kind = "comparison slack" if arity == 1 else "window adjustment"
            raise ParseError(
                f"{kind} annotation takes {arity} integer(s), got {len(values)}",
                open_tok.line, open_tok.col)
        for v in values:
            if v < 0:
                raise ParseError("annotation bounds must be nonnegative",
                                 open_tok.line, open_tok.col)
        return tuple(values)

    def parse_int(self) -> int:
        tok = self.next()
        if tok.kind != "number":
            got = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"expected an integer, found {got}", tok.line, tok.col)
        value = float(tok.text)
        if value != int(value):
            raise ParseError(f"expected an integer, found {tok.text}", tok.line, tok.col)
        return int(value)


def _parse(text: str, params: Mapping[str, float] | None, allow_annotations: bool) -> Formula:
    parser = _Parser(_tokenize(text), params, allow_annotations)
    node = parser.parse_formula()
    tail = parser.peek()
    if tail.kind != "end":
        raise ParseError(f"unexpected trailing input {tail.text!r}", tail.line, tail.col)
    return node


def parse_stl(text: str, params: Mapping[str, float] | None = None) -> Formula:
    """Parse a plain formula; any weakening annotation is a syntax error."""
    return _parse(text, params, allow_annotations=False)


def parse_weakstl(text: str, params: Mapping[str, float] | None = None) -> Formula:
    """Parse a formula that may carry weakening annotations."""
    return _parse(text, params, allow_annotations=True)


def parse_affine(text: str, params: Mapping[str, float] | None = None) -> AffineExpr:
    """Parse a bare affine expression (used by model and feature files)."""
    parser = _Parser(_tokenize(text), params, allow_annotations=False)
    node = parser.parse_affine()
    tail = parser.peek()
    if tail.kind != "end":
        raise ParseError(f"unexpected trailing input {tail.text!r}", tail.line, tail.col)
    return node.freeze()


def parse_comparison(text: str, params: Mapping[str, float] | None = None) -> Pred:
    """Parse a single comparison into its normalized predicate."""
    parser = _Parser(_tokenize(text), params, allow_annotations=False)
    node = parser.parse_comparison()
    tail = parser.peek()
    if tail.kind != "end":
        raise ParseError(f"unexpected trailing input {tail.text!r}", tail.line, tail.col)
    assert isinstance(node, Pred)
    return node
