"""Pretty-printing of kinds, types, terms, values and declarations.

Output parses back to an alpha-equal AST. Parentheses are inserted by
precedence level; binder forms are wrapped whenever something follows them.
"""

from __future__ import annotations

from tores.index import Suc, to_int
from tores.syntax import (
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
    TUnit,
    TVar,
    Unpack,
    UnitVal,
    Var,
)


def print_index(m) -> str:
    k = to_int(m)
    if k is not None:
        return str(k)
    if isinstance(m, Suc):
        return f"suc {print_index(m.arg)}"
    return m.name


def _index_atom(m) -> str:
    s = print_index(m)
    return f"({s})" if isinstance(m, Suc) and to_int(m) is None else s


def print_kind(k) -> str:
    if isinstance(k, KPi):
        return f"Pi {k.name}:{k.sort}. {print_kind(k.body)}"
    return "*"


def _binders(binders) -> str:
    return ", ".join(f"{u}:{s}" for u, s in binders)


# Type precedence: 0 arrow/binder, 1 sum, 2 product, 3 application, 4 atom.

def print_type(t) -> str:
    return _ty(t, 0)


def _wrap(s: str, inner: int, outer: int) -> str:
    return f"({s})" if inner < outer else s


def _ty(t, prec: int) -> str:
    match t:
        case TUnit():
            return "unit"
        case TVar(x):
            return x
        case TEq(m, n):
            return _wrap(f"{print_index(m)} == {print_index(n)}", 3, prec)
        case TApp(h, m):
            return _wrap(f"{_ty(h, 3)} {_index_atom(m)}", 3, prec)
        case TProd(a, b):
            return _wrap(f"{_ty(a, 3)} * {_ty(b, 2)}", 2, prec)
        case TSum(a, b):
            return _wrap(f"{_ty(a, 2)} + {_ty(b, 1)}", 1, prec)
        case TArr((), dom, cod):
            return _wrap(f"{_ty(dom, 1)} -> {_ty(cod, 0)}", 0, prec)
        case TArr(binders, dom, cod):
            return _wrap(f"({_binders(binders)} | {_ty(dom, 0)}) -> {_ty(cod, 0)}", 0, prec)
        case TSig(u, s, body):
            return _wrap(f"Sig {u}:{s}. {_ty(body, 0)}", 0, prec)
        case TLam(u, body):
            return _wrap(f"Lam {u}. {_ty(body, 0)}", 0, prec)
        case TMu(x, k, body) | TNu(x, k, body):
            tag = "mu" if isinstance(t, TMu) else "nu"
            return _wrap(f"{tag} {x} : {print_kind(k)}. {_ty(body, 0)}", 0, prec)
        case TRec(k, zero, u, x, suc):
            return _wrap(f"Rec {_kind_atom(k)} (0 => {_ty(zero, 0)} | suc {u}, {x} => {_ty(suc, 0)})", 3, prec)
    return f"<?{type(t).__name__}>"


def _kind_atom(k) -> str:
    return "*" if not isinstance(k, KPi) else f"({print_kind(k)})"


# Term precedence: 0 binder forms, 1 prefix/application, 2 atom.

def print_term(t) -> str:
    return _tm(t, 0)


def _spine(spine) -> str:
    return "[" + ", ".join(print_index(m) for m in spine) + "]"


def _tm(t, prec: int) -> str:
    match t:
        case Var(x):
            return x
        case UnitVal():
            return "<>"
        case Refl():
            return "refl"
        case Pair(a, b):
            return f"<{_tm(a, 0)}, {_tm(b, 0)}>"
        case Annot(body, ty):
            return f"({_tm(body, 0)} : {print_type(ty)})"
        case Ind(zero, u, f, suc):
            return f"ind (0 => {_tm(zero, 0)} | suc {u}, {f} => {_tm(suc, 0)})"
        case App(fn, spine, arg):
            # Applications nest to the left; any other non-atom head needs parens.
            head = _tm(fn, 1 if isinstance(fn, App) else 2)
            sp = f" {_spine(spine)}" if spine else ""
            return _wrap(f"{head}{sp} {_tm(arg, 2)}", 1, prec)
        case Inj(side, body):
            return _wrap(f"{'inl' if side == 1 else 'inr'} {_tm(body, 1)}", 1, prec)
        case Pack(m, body):
            return _wrap(f"pack [{print_index(m)}] {_tm(body, 1)}", 1, prec)
        case Fold(body) | EqAbort(body) | OutNu(body) | InjZ(body) | InjS(body) | OutZ(body) | OutS(body):
            kw = _PREFIX_NAMES[type(t)]
            return _wrap(f"{kw} {_tm(body, 1)}", 1, prec)
        case Lam(us, x, body):
            head = f"fn ({', '.join(us)} | {x})" if us else f"fn {x}"
            return _wrap(f"{head} => {_tm(body, 0)}", 0, prec)
        case Rec(f, body):
            return _wrap(f"rec {f} => {_tm(body, 0)}", 0, prec)
        case Corec(f, body):
            return _wrap(f"corec {f} => {_tm(body, 0)}", 0, prec)
        case Split(p, x, y, body):
            return _wrap(f"split {_tm(p, 0)} as ({x}, {y}) in {_tm(body, 0)}", 0, prec)
        case Case(s, x, left, y, right):
            # The left branch is followed by ``|`` so a binder form there needs parens.
            return _wrap(f"case {_tm(s, 0)} of inl {x} => {_tm(left, 1)} | inr {y} => {_tm(right, 0)}", 0, prec)
        case Unpack(s, u, x, body):
            return _wrap(f"unpack {_tm(s, 0)} as ({u}, {x}) in {_tm(body, 0)}", 0, prec)
        case EqElim(s, subst, ctx, body):
            with_ = ""
            if subst is not None:
                entries = ", ".join(f"{print_index(m)}/{u}" for u, m in subst)
                with_ = f" with ({_binders(ctx or ())} | [{entries}])"
            return _wrap(f"eqelim {_tm(s, 0)}{with_} in {_tm(body, 0)}", 0, prec)
    return f"<?{type(t).__name__}>"


_PREFIX_NAMES = {
    Fold: "fold", EqAbort: "eqabort", OutNu: "out_nu", InjZ: "inj0",
    InjS: "injs", OutZ: "out0", OutS: "outs",
}


def print_value(v) -> str:
    # Imported lazily so the printer does not pull in the machine for types.
    from tores.machine import (
        CorecThunk, FnClosure, VFold, VInj, VInjS, VInjZ, VPack, VPair, VRefl, VUnit,
    )

    def go(v, prec):
        match v:
            case VUnit():
                return "<>"
            case VRefl():
                return "refl"
            case VPair(a, b):
                return f"<{go(a, 0)}, {go(b, 0)}>"
            case VInj(side, body):
                return _wrap(f"{'inl' if side == 1 else 'inr'} {go(body, 1)}", 1, prec)
            case VPack(m, body):
                return _wrap(f"pack [{print_index(m)}] {go(body, 1)}", 1, prec)
            case VFold(body):
                return _wrap(f"fold {go(body, 1)}", 1, prec)
            case VInjZ(body):
                return _wrap(f"inj0 {go(body, 1)}", 1, prec)
            case VInjS(body):
                return _wrap(f"injs {go(body, 1)}", 1, prec)
            case FnClosure(code):
                return f"<closure {_code_head(code)}>"
            case CorecThunk(c, spine, _):
                sp = f" {_spine(spine)}" if spine else ""
                return f"<thunk {_code_head(c.code)}{sp}>"
        return f"<?{type(v).__name__}>"

    return go(v, 0)


def _code_head(code) -> str:
    match code:
        case Lam(us, x, _):
            return f"fn ({', '.join(us)} | {x})" if us else f"fn {x}"
        case Rec(f, _):
            return f"rec {f}"
        case Corec(f, _):
            return f"corec {f}"
        case Ind(_, u, f, _):
            return f"ind (suc {u}, {f})"
    return type(code).__name__


def print_decl(d) -> str:
    from tores.frontend.parser import TypeDecl

    if isinstance(d, TypeDecl):
        return f"type {d.name} : {print_kind(d.kind)} =\n  {print_type(d.body)}"
    return f"def {d.name} : {print_type(d.type)} =\n  {print_term(d.body)}"


def print_program(p) -> str:
    return "\n\n".join(print_decl(d) for d in p.decls) + "\n"


__all__ = [
    "print_decl", "print_index", "print_kind", "print_program", "print_term",
    "print_type", "print_value",
]
