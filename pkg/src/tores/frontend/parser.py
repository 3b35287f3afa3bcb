"""Lexer and recursive-descent parser for ``.tores`` source files.

Kinds, types and terms share one token stream. Binder forms (``fn``, ``Sig``,
``mu`` ...) extend as far right as possible; prefix keywords such as ``fold``
or ``inl`` take an application; applications take atoms as arguments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from tores.index import NAT, IVar, Suc, ZERO, numeral
from tores.syntax import (
    STAR,
    UNIT,
    Annot,
    App,
    Case,
    Corec,
    EqAbort,
    EqElim,
    Fold,
    Ind,
    Inj,
    InjS,
    InjZ,
    KPi,
    Lam,
    OutNu,
    OutS,
    OutZ,
    Pack,
    Pair,
    Rec,
    Refl,
    Span,
    Split,
    TApp,
    TArr,
    TEq,
    TLam,
    TMu,
    TNu,
    TProd,
    TRec,
    TSig,
    TSum,
    TVar,
    Unpack,
    UnitVal,
    Var,
)

KEYWORDS = frozenset("""
    type def unit Pi nat Sig Lam mu nu Rec suc fn split as in inl inr case of
    pack unpack refl eqelim with eqabort fold rec corec out_nu inj0 injs out0
    outs ind
""".split())

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|--[^\n]*)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>->|=>|==|<>|[<>()\[\],|:.*+/=])
""", re.VERBOSE)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "num", "ident", "kw", "sym" or "eof"
    text: str
    span: Span


@dataclass(frozen=True, slots=True)
class TypeDecl:
    name: str
    kind: object
    body: object
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class DefDecl:
    name: str
    type: object
    body: object
    span: Span | None = field(default=None, compare=False)


Decl = TypeDecl | DefDecl


@dataclass(frozen=True, slots=True)
class Program:
    decls: tuple[Decl, ...]


class ParseError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{span.line}:{span.col}: {message}")
        self.message = message
        self.span = span


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            span = Span(pos, pos + 1, line, pos - line_start + 1)
            raise ParseError(f"unexpected character {source[pos]!r}", span)
        kind, text = m.lastgroup, m.group()
        span = Span(pos, m.end(), line, pos - line_start + 1)
        if kind != "ws":
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, text, span))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", Span(pos, pos, line, pos - line_start + 1)))
    return tokens


class Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0

    # -- token plumbing --------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind != "ident" and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def fail(self, message: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{message}, found {found}", t.span)

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "ident":
            self.fail(f"expected {what}")
        t = self.tok
        self.i += 1
        return t.text

    def span_from(self, start: Token) -> Span:
        end = self.toks[self.i - 1].span if self.i > 0 else start.span
        return Span(start.span.start, max(end.end, start.span.start), start.span.line, start.span.col)

    def attempt(self, fn):
        """Run ``fn``; on a parse error rewind and return None."""
        saved = self.i
        try:
            return fn()
        except ParseError:
            self.i = saved
            return None

    # -- programs --------------------------------------------------------

    def program(self) -> Program:
        decls = []
        while self.tok.kind != "eof":
            decls.append(self.decl())
        return Program(tuple(decls))

    def decl(self) -> Decl:
        start = self.tok
        if self.accept("type"):
            name = self.ident("type name")
            self.expect(":")
            k = self.kind()
            self.expect("=")
            body = self.type_()
            return TypeDecl(name, k, body, self.span_from(start))
        if self.accept("def"):
            name = self.ident("definition name")
            self.expect(":")
            ty = self.type_()
            self.expect("=")
            body = self.term()
            return DefDecl(name, ty, body, self.span_from(start))
        self.fail("expected 'type' or 'def'")

    # -- index terms -----------------------------------------------------

    def index(self):
        if self.accept("suc"):
            return Suc(self.index())
        return self.index_atom()

    def index_atom(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return numeral(int(t.text))
        if t.kind == "ident":
            self.i += 1
            return IVar(t.text)
        if self.accept("("):
            m = self.index()
            self.expect(")")
            return m
        self.fail("expected an index term")

    def starts_index_atom(self) -> bool:
        return self.tok.kind in ("num", "ident") or self.at("(")

    # -- kinds -----------------------------------------------------------

    def kind(self):
        if self.accept("*"):
            return STAR
        if self.accept("Pi"):
            u = self.ident("index variable")
            self.expect(":")
            self.expect("nat")
            self.expect(".")
            return KPi(u, NAT, self.kind())
        if self.accept("("):
            k = self.kind()
            self.expect(")")
            return k
        self.fail("expected a kind")

    # -- types -----------------------------------------------------------

    def type_(self):
        left = self.sum_type()
        if self.accept("->"):
            return TArr((), left, self.type_())
        return left

    def sum_type(self):
        left = self.prod_type()
        if self.accept("+"):
            return TSum(left, self.sum_type())
        return left

    def prod_type(self):
        left = self.app_type()
        if self.accept("*"):
            return TProd(left, self.prod_type())
        return left

    def app_type(self):
        head = self.atom_type()
        while self.starts_index_atom():
            arg = self.attempt(self.index_atom)
            if arg is None:
                break
            head = TApp(head, arg)
        return head

    def _equation(self):
        m = self.index()
        self.expect("==")
        return TEq(m, self.index())

    def _binders(self):
        """``u:nat, v:nat`` up to (not including) ``|``."""
        out = []
        if not self.at("|"):
            while True:
                u = self.ident("index variable")
                self.expect(":")
                self.expect("nat")
                out.append((u, NAT))
                if not self.accept(","):
                    break
        return tuple(out)

    def atom_type(self):
        if self.accept("unit"):
            return UNIT
        if self.accept("Sig"):
            u = self.ident("index variable")
            self.expect(":")
            self.expect("nat")
            self.expect(".")
            return TSig(u, NAT, self.type_())
        if self.accept("Lam"):
            u = self.ident("index variable")
            self.expect(".")
            return TLam(u, self.type_())
        if self.at("mu") or self.at("nu"):
            ctor = TMu if self.tok.text == "mu" else TNu
            self.i += 1
            x = self.ident("type variable")
            self.expect(":")
            k = self.kind()
            self.expect(".")
            return ctor(x, k, self.type_())
        if self.accept("Rec"):
            k = self.kind()
            self.expect("(")
            self.expect("0")
            self.expect("=>")
            zero = self.type_()
            self.expect("|")
            self.expect("suc")
            u = self.ident("index variable")
            self.expect(",")
            x = self.ident("type variable")
            self.expect("=>")
            suc = self.type_()
            self.expect(")")
            return TRec(k, zero, u, x, suc)
        eq = self.attempt(self._equation)
        if eq is not None:
            return eq
        if self.at("(") and (self.peek().text == "|" or
                             (self.peek().kind == "ident" and self.peek(2).text == ":")):
            self.expect("(")
            binders = self._binders()
            self.expect("|")
            dom = self.type_()
            self.expect(")")
            self.expect("->")
            return TArr(binders, dom, self.type_())
        if self.accept("("):
            t = self.type_()
            self.expect(")")
            return t
        if self.tok.kind == "ident":
            return TVar(self.ident())
        self.fail("expected a type")

    # -- terms -----------------------------------------------------------

    def term(self):
        start = self.tok
        if self.accept("fn"):
            if self.accept("("):
                us = []
                if not self.at("|"):
                    us.append(self.ident("index variable"))
                    while self.accept(","):
                        us.append(self.ident("index variable"))
                self.expect("|")
                x = self.ident("variable")
                self.expect(")")
            else:
                us, x = [], self.ident("variable")
            self.expect("=>")
            body = self.term()
            return Lam(tuple(us), x, body, span=self.span_from(start))
        if self.at("rec") or self.at("corec"):
            ctor = Rec if self.tok.text == "rec" else Corec
            self.i += 1
            f = self.ident("function name")
            self.expect("=>")
            return ctor(f, self.term(), span=self.span_from(start))
        if self.accept("split"):
            scrut = self.term()
            self.expect("as")
            self.expect("(")
            x = self.ident("variable")
            self.expect(",")
            y = self.ident("variable")
            self.expect(")")
            self.expect("in")
            return Split(scrut, x, y, self.term(), span=self.span_from(start))
        if self.accept("case"):
            scrut = self.term()
            self.expect("of")
            self.expect("inl")
            x = self.ident("variable")
            self.expect("=>")
            left = self.term()
            self.expect("|")
            self.expect("inr")
            y = self.ident("variable")
            self.expect("=>")
            right = self.term()
            return Case(scrut, x, left, y, right, span=self.span_from(start))
        if self.accept("unpack"):
            scrut = self.term()
            self.expect("as")
            self.expect("(")
            u = self.ident("index variable")
            self.expect(",")
            x = self.ident("variable")
            self.expect(")")
            self.expect("in")
            return Unpack(scrut, u, x, self.term(), span=self.span_from(start))
        if self.accept("eqelim"):
            scrut = self.term()
            subst = ctx = None
            if self.accept("with"):
                self.expect("(")
                ctx = self._binders()
                self.expect("|")
                subst = self._subst()
                self.expect(")")
            self.expect("in")
            return EqElim(scrut, subst, ctx, self.term(), span=self.span_from(start))
        return self.app_term()

    def _subst(self):
        self.expect("[")
        entries = []
        if not self.at("]"):
            while True:
                m = self.index()
                self.expect("/")
                entries.append((self.ident("index variable"), m))
                if not self.accept(","):
                    break
        self.expect("]")
        return tuple(entries)

    _PREFIX = {
        "inl": lambda b, s: Inj(1, b, span=s),
        "inr": lambda b, s: Inj(2, b, span=s),
        "fold": lambda b, s: Fold(b, span=s),
        "eqabort": lambda b, s: EqAbort(b, span=s),
        "out_nu": lambda b, s: OutNu(b, span=s),
        "inj0": lambda b, s: InjZ(b, span=s),
        "injs": lambda b, s: InjS(b, span=s),
        "out0": lambda b, s: OutZ(b, span=s),
        "outs": lambda b, s: OutS(b, span=s),
    }

    def app_term(self):
        start = self.tok
        if start.kind == "kw" and start.text in self._PREFIX:
            self.i += 1
            body = self.app_term()
            return self._PREFIX[start.text](body, self.span_from(start))
        if self.accept("pack"):
            self.expect("[")
            m = self.index()
            self.expect("]")
            return Pack(m, self.app_term(), span=self.span_from(start))
        fn = self.atom_term()
        while True:
            if self.accept("["):
                spine = []
                if not self.at("]"):
                    spine.append(self.index())
                    while self.accept(","):
                        spine.append(self.index())
                self.expect("]")
                arg = self.atom_term()
                fn = App(fn, tuple(spine), arg, span=self.span_from(start))
            elif self.starts_atom_term():
                fn = App(fn, (), self.atom_term(), span=self.span_from(start))
            else:
                return fn

    def starts_atom_term(self) -> bool:
        t = self.tok
        return t.kind == "ident" or (t.kind == "sym" and t.text in ("<>", "<", "(")) \
            or (t.kind == "kw" and t.text in ("refl", "ind"))

    def atom_term(self):
        start = self.tok
        if start.kind == "ident":
            self.i += 1
            return Var(start.text, span=start.span)
        if self.accept("<>"):
            return UnitVal(span=start.span)
        if self.accept("refl"):
            return Refl(span=start.span)
        if self.accept("<"):
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(">")
            return Pair(a, b, span=self.span_from(start))
        if self.accept("ind"):
            self.expect("(")
            self.expect("0")
            self.expect("=>")
            zero = self.term()
            self.expect("|")
            self.expect("suc")
            u = self.ident("index variable")
            self.expect(",")
            f = self.ident("function name")
            self.expect("=>")
            suc = self.term()
            self.expect(")")
            return Ind(zero, u, f, suc, span=self.span_from(start))
        if self.accept("("):
            t = self.term()
            if self.accept(":"):
                ty = self.type_()
                self.expect(")")
                return Annot(t, ty, span=self.span_from(start))
            self.expect(")")
            return t
        self.fail("expected a term")


def _finish(p: Parser, value):
    if p.tok.kind != "eof":
        p.fail("unexpected trailing input")
    return value


def parse_program(source: str) -> Program:
    """Parse a whole file; raises ParseError."""
    p = Parser(source)
    return _finish(p, p.program())


def parse_type(source: str):
    p = Parser(source)
    return _finish(p, p.type_())


def parse_term(source: str):
    p = Parser(source)
    return _finish(p, p.term())


def parse_kind(source: str):
    p = Parser(source)
    return _finish(p, p.kind())


def parse_index(source: str):
    p = Parser(source)
    return _finish(p, p.index())
