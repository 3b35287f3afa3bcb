"""Declaration-level driver: resolve names, kind/type check, run.

The core calculus has no constants, so a reference to an earlier declaration
is replaced by its body. Inlined definition bodies get their index binders
renamed apart, since the checker refuses to rebind an index variable that is
already in scope.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from tores.errors import CheckError
from tores.frontend.parser import DefDecl, ParseError, Program, TypeDecl, parse_program
from tores.frontend.printer import print_type
from tores.index import IVar, subst_apply
from tores.kinding import kind_check, kind_wf
from tores.syntax import (
    STAR,
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
    Unpack,
    UnitVal,
    Var,
    term_size,
    type_apply_isubst,
    type_subst_tvars,
)
from tores.typecheck import check

DEFAULT_SIZE_LIMIT = 10**6

# Diagnostic codes beyond the kinding and typing reasons.
DRIVER_CODES = {
    "syntax_error": "the file does not parse",
    "duplicate_decl": "a name is declared twice",
    "size_limit": "inlining earlier declarations made the term too large",
    "bad_kind": "a declared kind is ill-formed",
}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: Span | None = None
    file: str = "<input>"
    severity: str = "error"
    expected: str | None = None
    found: str | None = None

    def render(self) -> str:
        where = f"{self.file}:{self.span.line}:{self.span.col}" if self.span else self.file
        out = f"{where}: {self.severity}[{self.code}]: {self.message}"
        if self.expected is not None:
            out += f"\n  expected: {self.expected}"
        if self.found is not None:
            out += f"\n     found: {self.found}"
        return out

    def to_json(self) -> dict:
        span = None
        if self.span is not None:
            s = self.span
            span = {"start": s.start, "end": s.end, "line": s.line, "col": s.col}
        return {"file": self.file, "span": span, "code": self.code, "message": self.message,
                "severity": self.severity, "expected": self.expected, "found": self.found}


@dataclass
class Checked:
    """One successfully elaborated declaration."""

    decl: TypeDecl | DefDecl
    resolved: object  # type body, or the resolved and elaborated term
    type: object = None  # resolved type annotation of a def


@dataclass
class Module:
    file: str
    source: str
    program: Program | None = None
    types: dict[str, Checked] = field(default_factory=dict)
    defs: dict[str, Checked] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics


# -- name resolution --------------------------------------------------------

def resolve_type(t, types: dict[str, object]):
    """Replace free references to declared types by their (closed) bodies."""
    return type_subst_tvars(t, tuple(types.items())) if types else t


class _Inliner:
    def __init__(self, types: dict, defs: dict, avoid: set[str]):
        self.types = types
        self.defs = defs
        self.avoid = avoid
        self.counter = itertools.count(1)

    def fresh(self, u: str) -> str:
        base = u.split("'")[0]
        while True:
            name = f"{base}'{next(self.counter)}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name

    def term(self, t, bound: frozenset[str]):
        """Resolve names in ``t``; ``bound`` holds local term variables."""
        go = self.term
        match t:
            case Var(x):
                if x not in bound and x in self.defs:
                    return rename_ivars(self.defs[x], {}, self.fresh)
                return t
            case UnitVal() | Refl():
                return t
            case Lam(_, x, body):
                return replace(t, body=go(body, bound | {x}))
            case App(fn, _, arg):
                return replace(t, fn=go(fn, bound), arg=go(arg, bound))
            case Pair(a, b):
                return replace(t, fst=go(a, bound), snd=go(b, bound))
            case Split(p, x, y, body):
                return replace(t, scrut=go(p, bound), body=go(body, bound | {x, y}))
            case Case(s, x, left, y, right):
                return replace(t, scrut=go(s, bound), left_body=go(left, bound | {x}),
                               right_body=go(right, bound | {y}))
            case Unpack(s, _, x, body):
                return replace(t, scrut=go(s, bound), body=go(body, bound | {x}))
            case EqElim(s, _, _, body):
                return replace(t, scrut=go(s, bound), body=go(body, bound))
            case Rec(f, body) | Corec(f, body):
                return replace(t, body=go(body, bound | {f}))
            case Ind(zero, _, f, suc):
                return replace(t, zero=go(zero, bound), suc=go(suc, bound | {f}))
            case Annot(body, ty):
                return replace(t, body=go(body, bound), type=resolve_type(ty, self.types))
            case EqAbort(s):
                return replace(t, scrut=go(s, bound))
            case Inj() | Pack() | Fold() | OutNu() | InjZ() | InjS() | OutZ() | OutS():
                return replace(t, body=go(t.body, bound))
        return t


def rename_ivars(t, ren: dict[str, str], fresh):
    """Rename every index binder in ``t`` with ``fresh``; ``ren`` maps free ones."""
    def idx(m):
        return subst_apply(m, tuple((u, IVar(v)) for u, v in ren.items()))

    def ty(s):
        return type_apply_isubst(s, tuple((u, IVar(v)) for u, v in ren.items()))

    def bind(us):
        inner = dict(ren)
        names = []
        for u in us:
            inner[u] = fresh(u)
            names.append(inner[u])
        return inner, tuple(names)

    match t:
        case Var() | UnitVal() | Refl():
            return t
        case Lam(us, _, body):
            inner, names = bind(us)
            return replace(t, ivars=names, body=rename_ivars(body, inner, fresh), ann=None)
        case App(fn, spine, arg):
            return replace(t, fn=rename_ivars(fn, ren, fresh), spine=tuple(idx(m) for m in spine),
                           arg=rename_ivars(arg, ren, fresh))
        case Pair(a, b):
            return replace(t, fst=rename_ivars(a, ren, fresh), snd=rename_ivars(b, ren, fresh))
        case Split(p, _, _, body):
            return replace(t, scrut=rename_ivars(p, ren, fresh), body=rename_ivars(body, ren, fresh))
        case Case(s, _, left, _, right):
            return replace(t, scrut=rename_ivars(s, ren, fresh), left_body=rename_ivars(left, ren, fresh),
                           right_body=rename_ivars(right, ren, fresh))
        case Pack(m, body):
            return replace(t, witness=idx(m), body=rename_ivars(body, ren, fresh))
        case Unpack(s, u, _, body):
            inner, (name,) = bind((u,))
            return replace(t, scrut=rename_ivars(s, ren, fresh), ivar=name,
                           body=rename_ivars(body, inner, fresh))
        case EqElim(s, subst, ctx, body):
            s2 = rename_ivars(s, ren, fresh)
            if subst is None:
                # The unifier is recomputed; the body sees the surviving names.
                return replace(t, scrut=s2, body=rename_ivars(body, ren, fresh))
            inner, names = bind(u for u, _ in ctx)
            ctx2 = tuple((n, sort) for n, (_, sort) in zip(names, ctx))
            in_ren = {u: v for u, v in inner.items() if u in {c for c, _ in ctx}}
            subst2 = tuple((ren.get(u, u), subst_apply(m, tuple((a, IVar(b)) for a, b in in_ren.items())))
                           for u, m in subst)
            return replace(t, scrut=s2, subst=subst2, ctx=ctx2, body=rename_ivars(body, in_ren, fresh))
        case Rec(_, body) | Corec(_, body):
            return replace(t, body=rename_ivars(body, ren, fresh), ann=None)
        case Ind(zero, u, _, suc):
            inner, (name,) = bind((u,))
            return replace(t, zero=rename_ivars(zero, ren, fresh), ivar=name,
                           suc=rename_ivars(suc, inner, fresh), ann=None)
        case Annot(body, s):
            return replace(t, body=rename_ivars(body, ren, fresh), type=ty(s))
        case EqAbort(s):
            return replace(t, scrut=rename_ivars(s, ren, fresh))
        case Fold() | OutNu() | InjZ() | InjS() | OutZ() | OutS() | Inj():
            return replace(t, body=rename_ivars(t.body, ren, fresh))
    return t


# -- elaboration --------------------------------------------------------------

def _diag_from_error(err: CheckError, file: str, fallback: Span | None) -> Diagnostic:
    def show(x):
        return None if x is None else print_type(x)

    return Diagnostic(err.reason, err.detail, err.span or fallback, file,
                      expected=show(err.expected), found=show(err.found))


def elaborate(program: Program, file: str = "<input>", source: str = "",
              size_limit: int = DEFAULT_SIZE_LIMIT) -> Module:
    """Check every declaration in order, reporting the first error of each."""
    mod = Module(file, source, program)
    avoid = _identifiers(source)
    type_bodies: dict[str, object] = {}
    def_bodies: dict[str, object] = {}
    inliner = _Inliner(type_bodies, def_bodies, avoid)
    seen: set[str] = set()
    for d in program.decls:
        if d.name in seen:
            mod.diagnostics.append(Diagnostic("duplicate_decl", f"{d.name} is already declared", d.span, file))
            continue
        seen.add(d.name)
        try:
            if isinstance(d, TypeDecl):
                if not kind_wf((), d.kind):
                    mod.diagnostics.append(Diagnostic("bad_kind", f"ill-formed kind for {d.name}", d.span, file))
                    continue
                body = resolve_type(d.body, type_bodies)
                kind_check((), (), body, d.kind)
                type_bodies[d.name] = body
                mod.types[d.name] = Checked(d, body)
            else:
                ty = resolve_type(d.type, type_bodies)
                kind_check((), (), ty, STAR)
                term = inliner.term(d.body, frozenset())
                size = term_size(term)
                if size > size_limit:
                    mod.diagnostics.append(Diagnostic(
                        "size_limit", f"{d.name} has {size} nodes after inlining (limit {size_limit})", d.span, file))
                    continue
                elab = check((), (), (), term, ty)
                # Later references inline the annotated body, which keeps it checkable.
                def_bodies[d.name] = Annot(elab, ty)
                mod.defs[d.name] = Checked(d, elab, ty)
        except CheckError as err:
            mod.diagnostics.append(_diag_from_error(err, file, d.span))
        except RecursionError:
            mod.diagnostics.append(Diagnostic("size_limit", f"{d.name} is nested too deeply", d.span, file))
    return mod


def _identifiers(source: str) -> set[str]:
    return set(re.findall(r"[A-Za-z_][A-Za-z0-9_']*", source))


def load_source(source: str, file: str = "<input>", size_limit: int = DEFAULT_SIZE_LIMIT) -> Module:
    try:
        program = parse_program(source)
    except ParseError as err:
        mod = Module(file, source)
        mod.diagnostics.append(Diagnostic("syntax_error", err.message, err.span, file))
        return mod
    return elaborate(program, file, source, size_limit)


def load_file(path: str | Path, size_limit: int = DEFAULT_SIZE_LIMIT) -> Module:
    path = Path(path)
    return load_source(path.read_text(encoding="utf-8"), str(path), size_limit)


def corpus_dir() -> Path:
    return Path(__file__).resolve().parent.parent / "corpus"


def corpus_files() -> list[Path]:
    return sorted(corpus_dir().glob("*.tores"))


# -- running ------------------------------------------------------------------

def run_definition(mod: Module, name: str, fuel: int | None = None, trace=None):
    """Evaluate a checked definition under empty environments."""
    from tores.machine import Machine

    if name not in mod.defs:
        raise KeyError(name)
    machine = Machine(fuel, trace)
    value = machine.eval(mod.defs[name].resolved, (), ())
    return value, machine


def observe(value, k: int, machine) -> list:
    """Force ``k`` observations of a stream-like value.

    Each observation is expected to yield a pair ``<head, rest>``; the heads are
    collected and observation continues on ``rest``.
    """
    from tores.errors import EvalError
    from tores.machine import VPair

    heads = []
    for _ in range(k):
        step = machine.force_out(value)
        if not isinstance(step, VPair):
            raise EvalError("observation did not produce a pair")
        heads.append(step.fst)
        value = step.snd
    return heads
