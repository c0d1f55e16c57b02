"""Concrete syntax for formulas: tokenizer, recursive-descent parser, printer.

Grammar (EBNF, whitespace insensitive):

    formula    = implies ;
    implies    = or_expr , [ "->" , implies ] ;
    or_expr    = and_expr , { "|" , and_expr } ;
    and_expr   = until_expr , { "&" , until_expr } ;
    until_expr = unary , [ "U" , interval , until_expr ] ;
    unary      = "!" , unary
               | "F" , interval , unary
               | "G" , interval , unary
               | atom ;
    atom       = "true" | "false" | ALIAS
               | "(" , predicate , ")"
               | "(" , formula , ")" ;
    predicate  = arith , ( "<" | ">" | "<=" | ">=" ) , arith ;
    arith      = term , { ( "+" | "-" ) , term } ;
    term       = factor , { "*" , factor } ;
    factor     = [ "-" ] , power ;
    power      = primary , { "^" , INT } ;
    primary    = NUMBER | VARIABLE | "(" , arith , ")" ;
    interval   = ( "[" | "(" ) , NUMBER , "," , ( NUMBER | "inf" ) , ( "]" | ")" ) ;

Interval bounds are seconds and are converted to integer ticks.  `F`, `G`
and `->` are syntactic sugar and are desugared at parse time; comparisons
are normalized to the canonical `f(state) > 0` form (`a < b` becomes
`b - a > 0`, and `<=`/`>=` normalize identically to `<`/`>`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .formula import (
    And,
    BinOp,
    Bottom,
    Const,
    Expr,
    Formula,
    Interval,
    Neg,
    Not,
    Or,
    Pow,
    Pred,
    TOP,
    BOTTOM,
    Top,
    Until,
    Var,
    eventually,
    always,
    implies,
)

#: State components a predicate may reference.
ALLOWED_VARIABLES = frozenset({"x", "y", "vx", "vy", "xe", "ye"})

_RESERVED = frozenset({"U", "F", "G", "true", "false", "inf"})


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class _UnknownVariableError(ParseError):
    """Unknown variable names are reported as such, never backtracked over."""


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident", "number", "op", "end"
    text: str
    line: int
    column: int


_OPERATORS = ("->", "<=", ">=", "!", "&", "|", "(", ")", "[", "]", ",", "<", ">", "+", "-", "*", "^")


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tokens.append(_Token("number", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                tokens.append(_Token("op", op, line, col))
                col += len(op)
                i += len(op)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], tick_unit: float, aliases: Mapping[str, Formula]):
        self.tokens = tokens
        self.pos = 0
        self.tick_unit = tick_unit
        self.aliases = aliases

    # -- token helpers ---------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.line, tok.column)
        return self.next()

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.column)

    # -- formula grammar -------------------------------------------------

    def parse_formula(self) -> Formula:
        left = self.parse_or()
        if self.peek().text == "->":
            self.next()
            right = self.parse_formula()
            return implies(left, right)
        return left

    def parse_or(self) -> Formula:
        node = self.parse_and()
        while self.peek().text == "|":
            self.next()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> Formula:
        node = self.parse_until()
        while self.peek().text == "&":
            self.next()
            node = And(node, self.parse_until())
        return node

    def parse_until(self) -> Formula:
        node = self.parse_unary()
        if self.peek().text == "U":
            self.next()
            interval = self.parse_interval()
            right = self.parse_until()
            return Until(node, interval, right)
        return node

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok.text == "!":
            self.next()
            return Not(self.parse_unary())
        if tok.text == "F":
            self.next()
            interval = self.parse_interval()
            return eventually(interval, self.parse_unary())
        if tok.text == "G":
            self.next()
            interval = self.parse_interval()
            return always(interval, self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident":
            if tok.text == "true":
                self.next()
                return TOP
            if tok.text == "false":
                self.next()
                return BOTTOM
            if tok.text in _RESERVED:
                raise self.error(f"misplaced keyword {tok.text!r}")
            if tok.text in self.aliases:
                self.next()
                return self.aliases[tok.text]
            raise self.error(f"unknown name {tok.text!r}")
        if tok.text == "(":
            start = self.pos
            try:
                return self.parse_predicate_atom()
            except _NotAPredicate:
                self.pos = start
            self.expect("(")
            inner = self.parse_formula()
            self.expect(")")
            return inner
        raise self.error(f"expected a formula, found {tok.text or 'end of input'!r}")

    def parse_predicate_atom(self) -> Formula:
        """Parse '( arith cmp arith )'.

        Raises _NotAPredicate when the parenthesized text is not a
        comparison, so the caller can fall back to a grouped formula.  Errors
        after the comparison operator was seen are genuine and propagate.
        """
        self.expect("(")
        try:
            lhs = self.parse_arith()
        except _UnknownVariableError:
            raise
        except ParseError as exc:
            raise _NotAPredicate from exc
        tok = self.peek()
        if tok.text not in ("<", ">", "<=", ">="):
            raise _NotAPredicate
        self.next()
        rhs = self.parse_arith()
        self.expect(")")
        if tok.text in (">", ">="):
            fn = _difference(lhs, rhs)
        else:
            fn = _difference(rhs, lhs)
        return Pred(fn)

    # -- predicate arithmetic ---------------------------------------------

    def parse_arith(self) -> Expr:
        node = self.parse_term()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.peek().text == "*":
            self.next()
            node = BinOp("*", node, self.parse_factor())
        return node

    def parse_factor(self) -> Expr:
        if self.peek().text == "-":
            self.next()
            child = self.parse_factor()
            if isinstance(child, Const):
                return Const(-child.value)
            return Neg(child)
        return self.parse_power()

    def parse_power(self) -> Expr:
        node = self.parse_primary()
        while self.peek().text == "^":
            self.next()
            tok = self.peek()
            if tok.kind != "number" or not tok.text.isdigit():
                raise self.error("exponent must be a nonnegative integer")
            self.next()
            node = Pow(node, int(tok.text))
        return node

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.next()
            return Const(float(tok.text))
        if tok.kind == "ident":
            if tok.text in _RESERVED or tok.text in self.aliases:
                raise self.error(f"{tok.text!r} cannot appear in a predicate")
            if tok.text not in ALLOWED_VARIABLES:
                raise _UnknownVariableError(f"unknown variable name {tok.text!r}", tok.line, tok.column)
            self.next()
            return Var(tok.text)
        if tok.text == "(":
            self.next()
            inner = self.parse_arith()
            self.expect(")")
            return inner
        raise self.error(f"expected a value, found {tok.text or 'end of input'!r}")

    # -- intervals ---------------------------------------------------------

    def parse_interval(self) -> Interval:
        open_tok = self.peek()
        if open_tok.text not in ("[", "("):
            raise self.error("expected an interval")
        self.next()
        lower_closed = open_tok.text == "["
        lo_tok = self.peek()
        lower = self.parse_time_bound(allow_inf=False)
        self.expect(",")
        hi_tok = self.peek()
        upper = self.parse_time_bound(allow_inf=True)
        close_tok = self.peek()
        if close_tok.text not in ("]", ")"):
            raise self.error("expected ']' or ')'")
        self.next()
        upper_closed = close_tok.text == "]"
        if lower < 0:
            raise ParseError("interval lower bound must be >= 0", lo_tok.line, lo_tok.column)
        if upper == math.inf:
            if upper_closed:
                raise ParseError("an infinite bound must be open", close_tok.line, close_tok.column)
        elif lower >= upper:
            raise ParseError("interval requires lower < upper", hi_tok.line, hi_tok.column)
        return Interval(lower, upper, lower_closed, upper_closed)

    def parse_time_bound(self, allow_inf: bool):
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "inf":
            if not allow_inf:
                raise self.error("lower bound cannot be infinite")
            self.next()
            return math.inf
        if tok.kind != "number":
            raise self.error(f"expected a time bound, found {tok.text or 'end of input'!r}")
        self.next()
        return round(float(tok.text) / self.tick_unit)


class _NotAPredicate(Exception):
    pass


def _difference(lhs: Expr, rhs: Expr) -> Expr:
    # Dropping the "- 0" keeps `(f > 0)` round-trips structurally stable.
    if isinstance(rhs, Const) and rhs.value == 0.0:
        return lhs
    if isinstance(lhs, Const) and lhs.value == 0.0:
        return Neg(rhs) if not isinstance(rhs, Const) else Const(-rhs.value)
    return BinOp("-", lhs, rhs)


def _resolve_aliases(
    raw: Optional[Mapping[str, Union[str, Formula]]], tick_unit: float
) -> dict[str, Formula]:
    if not raw:
        return {}
    resolved: dict[str, Formula] = {}
    resolving: set[str] = set()

    def resolve(name: str) -> Formula:
        if name in resolved:
            return resolved[name]
        if name in resolving:
            raise ValueError(f"alias cycle involving {name!r}")
        resolving.add(name)
        value = raw[name]
        if isinstance(value, Formula):
            out = value
        else:
            out = _parse(f"({value})", tick_unit, _LazyAliases(raw, resolve))
        resolving.discard(name)
        resolved[name] = out
        return out

    for key in raw:
        resolve(key)
    return resolved


class _LazyAliases(Mapping[str, Formula]):
    def __init__(self, raw, resolve):
        self._raw = raw
        self._resolve = resolve

    def __getitem__(self, key: str) -> Formula:
        return self._resolve(key)

    def __iter__(self):
        return iter(self._raw)

    def __len__(self) -> int:
        return len(self._raw)

    def __contains__(self, key) -> bool:
        return key in self._raw


def _parse(text: str, tick_unit: float, aliases: Mapping[str, Formula]) -> Formula:
    parser = _Parser(_tokenize(text), tick_unit, aliases)
    out = parser.parse_formula()
    tok = parser.peek()
    if tok.kind != "end":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.column)
    return out


def parse_formula(
    text: str,
    tick_unit: float = 1e-6,
    aliases: Optional[Mapping[str, Union[str, Formula]]] = None,
) -> Formula:
    """Parse concrete syntax into a desugared formula tree.

    ``tick_unit`` is the duration of one tick in seconds (1 microsecond by
    default); interval bounds are converted to ticks at parse time.
    ``aliases`` maps bare names to formula fragments (strings or already
    parsed formulas), as bound by a scenario configuration.
    """
    return _parse(text, tick_unit, _resolve_aliases(aliases, tick_unit))


# ---------------------------------------------------------------------------
# Printing.  format_formula(parse_formula(s)) reparses to a structurally
# identical tree; F/G sugar is re-emitted when the tree matches its exact
# desugaring, which reparses to the same tree.

_LVL_OR, _LVL_AND, _LVL_UNTIL, _LVL_UNARY, _LVL_ATOM = 1, 2, 3, 4, 5


def format_formula(f: Formula) -> str:
    return _fmt(f, 0)


def _fmt(f: Formula, min_level: int) -> str:
    text, level = _render(f)
    if level < min_level:
        return f"({text})"
    return text


def _render(f: Formula) -> tuple[str, int]:
    if isinstance(f, Top):
        return "true", _LVL_ATOM
    if isinstance(f, Bottom):
        return "false", _LVL_ATOM
    if isinstance(f, Pred):
        return f"({_fmt_expr(f.fn, 0)} > 0)", _LVL_ATOM
    if isinstance(f, Not):
        inner = f.child
        if (
            isinstance(inner, Until)
            and isinstance(inner.left, Top)
            and isinstance(inner.right, Not)
        ):
            body = _fmt(inner.right.child, _LVL_UNARY)
            return f"G{inner.interval} {body}", _LVL_UNARY
        return f"!{_fmt(f.child, _LVL_UNARY)}", _LVL_UNARY
    if isinstance(f, Until):
        if isinstance(f.left, Top):
            return f"F{f.interval} {_fmt(f.right, _LVL_UNARY)}", _LVL_UNARY
        lhs = _fmt(f.left, _LVL_UNARY)
        rhs = _fmt(f.right, _LVL_UNTIL)
        return f"{lhs} U{f.interval} {rhs}", _LVL_UNTIL
    if isinstance(f, And):
        return f"{_fmt(f.left, _LVL_AND)} & {_fmt(f.right, _LVL_UNTIL)}", _LVL_AND
    if isinstance(f, Or):
        return f"{_fmt(f.left, _LVL_OR)} | {_fmt(f.right, _LVL_AND)}", _LVL_OR
    raise TypeError(f"not a formula: {f!r}")


_EXPR_ADD, _EXPR_MUL, _EXPR_NEG, _EXPR_POW, _EXPR_ATOM = 1, 2, 3, 4, 5


def _fmt_expr(e: Expr, min_level: int) -> str:
    text, level = _render_expr(e)
    if level < min_level:
        return f"({text})"
    return text


def _render_expr(e: Expr) -> tuple[str, int]:
    if isinstance(e, Var):
        return e.name, _EXPR_ATOM
    if isinstance(e, Const):
        return repr(e.value), _EXPR_ATOM if e.value >= 0 else _EXPR_NEG
    if isinstance(e, Neg):
        return f"-{_fmt_expr(e.child, _EXPR_NEG)}", _EXPR_NEG
    if isinstance(e, Pow):
        return f"{_fmt_expr(e.base, _EXPR_ATOM)}^{e.exponent}", _EXPR_POW
    if isinstance(e, BinOp):
        if e.op == "*":
            return f"{_fmt_expr(e.left, _EXPR_MUL)} * {_fmt_expr(e.right, _EXPR_NEG)}", _EXPR_MUL
        return f"{_fmt_expr(e.left, _EXPR_ADD)} {e.op} {_fmt_expr(e.right, _EXPR_MUL)}", _EXPR_ADD
    raise TypeError(f"not an expression: {e!r}")
