"""Reader for the s-expression set language.

    (iv lo hi open|closed open|closed)   (union e ...)   (inter e ...)   (compl e)
    (q) (q2) (cantor) (cantor-pre 1/3) (fam34 {0,3}) (fam35 {1}+tail(4))
    (anticomplete {2}) (min-compact) (min-fsigma) (squash 2 e)

Errors carry 1-based line and column positions.
"""

from dataclasses import dataclass

from .errors import ArityError, DomainError, ParseError
from .exact import IntervalAtom, parse_rational, parse_scalar
from .orders import SubsetPattern
from . import pointset as ps


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


def tokenize(text):
    out = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k):
        nonlocal i, line, col
        for ch in text[i:i + k]:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        if ch.isspace():
            advance(1)
        elif ch == ";":
            while i < n and text[i] != "\n":
                advance(1)
        elif ch in "()":
            out.append(Token(ch, line, col))
            advance(1)
        elif ch == "{":
            start, sl, sc = i, line, col
            close = text.find("}", i)
            if close < 0:
                raise ParseError("unterminated pattern", sl, sc)
            end = close + 1
            if text.startswith("+tail(", end):
                rp = text.find(")", end)
                if rp < 0:
                    raise ParseError("unterminated tail(...)", sl, sc)
                end = rp + 1
            out.append(Token("".join(text[start:end].split()), sl, sc))
            advance(end - start)
        elif ch == "}":
            raise ParseError("unexpected '}'", line, col)
        else:
            start, sl, sc = i, line, col
            while i < n and not text[i].isspace() and text[i] not in "(){};":
                advance(1)
            out.append(Token(text[start:i], sl, sc))
    return out


class _Reader:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else Token("", 1, 1)
            raise ParseError("unexpected end of input", last.line, last.col + len(last.text))
        self.pos += 1
        return tok

    def expect(self, text):
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok


def _flag(tok):
    if tok.text not in ("open", "closed"):
        raise ParseError(f"expected open|closed, found {tok.text!r}", tok.line, tok.col)
    return tok.text == "closed"


def _scalar(tok):
    if tok.text in "()":
        raise ParseError(f"expected a scalar, found {tok.text!r}", tok.line, tok.col)
    try:
        return parse_scalar(tok.text)
    except DomainError:
        raise ParseError(f"not a scalar: {tok.text!r}", tok.line, tok.col) from None


def _pattern(tok):
    try:
        return SubsetPattern.parse(tok.text)
    except DomainError:
        raise ParseError(f"not a subset pattern: {tok.text!r}", tok.line, tok.col) from None


_ARITY = {"iv": 4, "compl": 1, "q": 0, "q2": 0, "cantor": 0, "cantor-pre": 1, "fam34": 1,
          "fam35": 1, "anticomplete": 1, "min-compact": 0, "min-fsigma": 0}


def _read(r):
    open_tok = r.expect("(")
    head = r.next()
    name = head.text
    args = []
    while r.peek() is not None and r.peek().text != ")":
        if r.peek().text == "(":
            args.append(_read(r))
        else:
            args.append(r.next())
    r.expect(")")
    if name in ("union", "inter"):
        if any(isinstance(a, Token) for a in args):
            bad = next(a for a in args if isinstance(a, Token))
            raise ParseError(f"expected an expression, found {bad.text!r}", bad.line, bad.col)
        return (ps.Union if name == "union" else ps.Inter)(tuple(args))
    if name == "squash":
        if len(args) != 2:
            raise ArityError(f"squash takes 2 argument(s), got {len(args)}", open_tok.line, open_tok.col)
        n, child = args
        if not isinstance(n, Token) or isinstance(child, Token):
            raise ParseError("squash expects an integer and an expression", open_tok.line, open_tok.col)
        try:
            return ps.Squash(int(n.text), child)
        except ValueError:
            raise ParseError(f"not an integer: {n.text!r}", n.line, n.col) from None
    if name not in _ARITY:
        raise ParseError(f"unknown form {name!r}", head.line, head.col)
    if len(args) != _ARITY[name]:
        raise ArityError(f"{name} takes {_ARITY[name]} argument(s), got {len(args)}", open_tok.line, open_tok.col)
    if name == "compl":
        if isinstance(args[0], Token):
            raise ParseError("compl expects an expression", args[0].line, args[0].col)
        return ps.Compl(args[0])
    for a in args:
        if not isinstance(a, Token):
            raise ParseError(f"{name} expects literal arguments", open_tok.line, open_tok.col)
    if name == "iv":
        lo, hi = _scalar(args[0]), _scalar(args[1])
        lc, hc = _flag(args[2]), _flag(args[3])
        try:
            return ps.Atom(IntervalAtom(lo, hi, lc, hc))
        except DomainError as exc:
            raise DomainError(f"{open_tok.line}:{open_tok.col}: {exc}") from None
    if name == "cantor-pre":
        try:
            return ps.CantorPre(parse_rational(args[0].text))
        except DomainError:
            raise ParseError(f"not a rational: {args[0].text!r}", args[0].line, args[0].col) from None
    if name in ("fam34", "fam35", "anticomplete"):
        return ps.GENERATORS[name](_pattern(args[0]))
    return ps.GENERATORS[name]()


def parse_expr(text):
    """Parse one set expression; trailing input is an error."""
    r = _Reader(text)
    expr = _read(r)
    extra = r.peek()
    if extra is not None:
        raise ParseError(f"trailing input {extra.text!r}", extra.line, extra.col)
    return expr


def parse_exprs(text):
    """Parse a sequence of expressions."""
    r = _Reader(text)
    out = []
    while r.peek() is not None:
        out.append(_read(r))
    return out
