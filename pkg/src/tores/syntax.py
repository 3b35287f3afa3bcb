"""Abstract syntax for kinds, types and terms, plus type-level substitution.

Binders keep their source names. Equality that matters for typing is
``type_alpha_eq``, which compares canonical de Bruijn forms; substitution is
capture-avoiding and renames a binder only when it would capture.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

from tores.index import (
    NAT,
    IndexCtx,
    IndexSubst,
    IndexTerm,
    IVar,
    Sort,
    Suc,
    free_vars,
    sort_apply,
)


@dataclass(frozen=True, slots=True)
class Span:
    start: int
    end: int
    line: int
    col: int


# -- kinds -------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Star:
    pass


@dataclass(frozen=True, slots=True)
class KPi:
    name: str
    sort: Sort
    body: "Kind"


Kind = Star | KPi
STAR = Star()


def kind_spine(k: Kind) -> tuple[IndexCtx, Kind]:
    binders = []
    while isinstance(k, KPi):
        binders.append((k.name, k.sort))
        k = k.body
    return tuple(binders), k


def kind_eq(a: Kind, b: Kind) -> bool:
    # Kinds mention only sorts, so binder names never matter.
    while isinstance(a, KPi) and isinstance(b, KPi):
        if a.sort is not b.sort:
            return False
        a, b = a.body, b.body
    return isinstance(a, Star) and isinstance(b, Star)


def kind_apply_isubst(k: Kind, theta: IndexSubst) -> Kind:
    if isinstance(k, KPi):
        return KPi(k.name, sort_apply(k.sort, theta), kind_apply_isubst(k.body, theta))
    return k


# -- types -------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class TUnit:
    pass


@dataclass(frozen=True, slots=True)
class TProd:
    left: "Type"
    right: "Type"


@dataclass(frozen=True, slots=True)
class TSum:
    left: "Type"
    right: "Type"


@dataclass(frozen=True, slots=True)
class TArr:
    """Indexed function type ``(u1:nat, ... | dom) -> cod``."""

    binders: IndexCtx
    dom: "Type"
    cod: "Type"


@dataclass(frozen=True, slots=True)
class TSig:
    name: str
    sort: Sort
    body: "Type"


@dataclass(frozen=True, slots=True)
class TEq:
    lhs: IndexTerm
    rhs: IndexTerm


@dataclass(frozen=True, slots=True)
class TApp:
    head: "Type"
    arg: IndexTerm


@dataclass(frozen=True, slots=True)
class TLam:
    name: str
    body: "Type"


@dataclass(frozen=True, slots=True)
class TVar:
    name: str


@dataclass(frozen=True, slots=True)
class TMu:
    name: str
    kind: Kind
    body: "Type"


@dataclass(frozen=True, slots=True)
class TNu:
    name: str
    kind: Kind
    body: "Type"


@dataclass(frozen=True, slots=True)
class TRec:
    """Stratified type ``Rec K (0 => zero | suc ivar, tvar => suc)``."""

    kind: Kind
    zero: "Type"
    ivar: str
    tvar: str
    suc: "Type"


Type = TUnit | TProd | TSum | TArr | TSig | TEq | TApp | TLam | TVar | TMu | TNu | TRec
UNIT = TUnit()

TypeVarCtx = tuple[tuple[str, Kind], ...]
TypingCtx = tuple[tuple[str, Type], ...]


def arrow(dom: Type, cod: Type) -> TArr:
    return TArr((), dom, cod)


# -- terms -------------------------------------------------------------------

def _meta():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class FnAnn:
    """Static typing recorded on a function value by the checker.

    ``gamma`` gives the types of the function's free term variables and ``ty``
    the type it was checked against; ``tvar`` is the type variable standing
    for the (co)recursive type inside a rec/corec body.
    """

    gamma: TypingCtx
    ty: Type
    tvar: str | None = None


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class UnitVal:
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Lam:
    ivars: tuple[str, ...]
    var: str
    body: "Term"
    ann: FnAnn | None = _meta()
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class App:
    fn: "Term"
    spine: tuple[IndexTerm, ...]
    arg: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Pair:
    fst: "Term"
    snd: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Split:
    scrut: "Term"
    left: str
    right: str
    body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Inj:
    side: int
    body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Case:
    scrut: "Term"
    left: str
    left_body: "Term"
    right: str
    right_body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Pack:
    witness: IndexTerm
    body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Unpack:
    scrut: "Term"
    ivar: str
    var: str
    body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Refl:
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class EqElim:
    """``eqelim scrut with (ctx | subst) in body``; the unifier may be omitted
    in source and is then filled in by the checker."""

    scrut: "Term"
    subst: IndexSubst | None
    ctx: IndexCtx | None
    body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class EqAbort:
    scrut: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Fold:
    body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Rec:
    fname: str
    body: "Term"
    ann: FnAnn | None = _meta()
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Corec:
    fname: str
    body: "Term"
    ann: FnAnn | None = _meta()
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class OutNu:
    body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class InjZ:
    body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class InjS:
    body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class OutZ:
    body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class OutS:
    body: "Term"
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Ind:
    zero: "Term"
    ivar: str
    fname: str
    suc: "Term"
    ann: FnAnn | None = _meta()
    span: Span | None = _meta()


@dataclass(frozen=True, slots=True)
class Annot:
    body: "Term"
    type: Type
    span: Span | None = _meta()


Term = (
    Var | UnitVal | Lam | App | Pair | Split | Inj | Case | Pack | Unpack | Refl
    | EqElim | EqAbort | Fold | Rec | Corec | OutNu | InjZ | InjS | OutZ | OutS
    | Ind | Annot
)
FUNCTION_VALUES = (Lam, Rec, Corec, Ind)
TERM_CLASSES = (
    Var, UnitVal, Lam, App, Pair, Split, Inj, Case, Pack, Unpack, Refl, EqElim, EqAbort,
    Fold, Rec, Corec, OutNu, InjZ, InjS, OutZ, OutS, Ind, Annot,
)


def term_free_vars(t: Term) -> frozenset[str]:
    """Free term variables."""
    match t:
        case Var(name):
            return frozenset((name,))
        case UnitVal() | Refl():
            return frozenset()
        case Lam(_, x, body):
            return term_free_vars(body) - {x}
        case App(f, _, s):
            return term_free_vars(f) | term_free_vars(s)
        case Pair(a, b):
            return term_free_vars(a) | term_free_vars(b)
        case Split(p, x, y, body):
            return term_free_vars(p) | (term_free_vars(body) - {x, y})
        case Case(s, x, l, y, r):
            return term_free_vars(s) | (term_free_vars(l) - {x}) | (term_free_vars(r) - {y})
        case Unpack(s, _, x, body):
            return term_free_vars(s) | (term_free_vars(body) - {x})
        case EqElim(s, _, _, body):
            return term_free_vars(s) | term_free_vars(body)
        case Rec(f, body) | Corec(f, body):
            return term_free_vars(body) - {f}
        case Ind(z, _, f, s):
            return term_free_vars(z) | (term_free_vars(s) - {f})
        case Inj(_, body) | Pack(_, body) | Annot(body, _):
            return term_free_vars(body)
        case EqAbort(body) | Fold(body) | OutNu(body) | InjZ(body) | InjS(body) | OutZ(body) | OutS(body):
            return term_free_vars(body)
    raise TypeError(f"not a term: {t!r}")


def term_size(t: Any) -> int:
    """Number of AST nodes in a term or type (index terms count as one)."""
    if isinstance(t, tuple):
        return sum(term_size(x) for x in t)
    if not hasattr(t, "__dataclass_fields__") or isinstance(t, (IVar, Suc)):
        return 0
    total = 1
    for name in t.__dataclass_fields__:
        if name in ("span", "ann"):
            continue
        total += term_size(getattr(t, name))
    return total


# -- free variables of types ------------------------------------------------

def type_free_ivars(t: Type) -> frozenset[str]:
    match t:
        case TUnit() | TVar():
            return frozenset()
        case TProd(a, b) | TSum(a, b):
            return type_free_ivars(a) | type_free_ivars(b)
        case TArr(binders, dom, cod):
            names = {u for u, _ in binders}
            return (type_free_ivars(dom) | type_free_ivars(cod)) - names
        case TSig(u, _, body) | TLam(u, body):
            return type_free_ivars(body) - {u}
        case TEq(m, n):
            return free_vars(m) | free_vars(n)
        case TApp(h, m):
            return type_free_ivars(h) | free_vars(m)
        case TMu(_, _, body) | TNu(_, _, body):
            return type_free_ivars(body)
        case TRec(_, z, u, _, s):
            return type_free_ivars(z) | (type_free_ivars(s) - {u})
    raise TypeError(f"not a type: {t!r}")


def type_free_tvars(t: Type) -> frozenset[str]:
    match t:
        case TUnit() | TEq():
            return frozenset()
        case TVar(x):
            return frozenset((x,))
        case TProd(a, b) | TSum(a, b) | TArr(_, a, b):
            return type_free_tvars(a) | type_free_tvars(b)
        case TSig(_, _, body) | TLam(_, body) | TApp(body, _):
            return type_free_tvars(body)
        case TMu(x, _, body) | TNu(x, _, body):
            return type_free_tvars(body) - {x}
        case TRec(_, z, _, x, s):
            return type_free_tvars(z) | (type_free_tvars(s) - {x})
    raise TypeError(f"not a type: {t!r}")


def fresh_name(base: str, avoid) -> str:
    stem = base.rstrip("0123456789") or base
    k = 1
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


# -- substitution ------------------------------------------------------------

class _Subst:
    """Simultaneous index/type-variable substitution with capture avoidance."""

    __slots__ = ("imap", "tmap", "irange", "trange")

    def __init__(self, imap, tmap, irange, trange):
        self.imap = imap
        self.tmap = tmap
        self.irange = irange
        self.trange = trange

    def index(self, m: IndexTerm) -> IndexTerm:
        if not self.imap:
            return m
        depth = 0
        while isinstance(m, Suc):
            m, depth = m.arg, depth + 1
        if isinstance(m, IVar):
            m = self.imap.get(m.name, m)
        for _ in range(depth):
            m = Suc(m)
        return m

    def bind_index(self, u: str, body_fvs) -> tuple[str, "_Subst"]:
        imap = self.imap
        if u in imap:
            imap = {k: v for k, v in imap.items() if k != u}
        if u in self.irange:
            new = fresh_name(u, self.irange | body_fvs() | imap.keys())
            imap = dict(imap)
            imap[u] = IVar(new)
            return new, _Subst(imap, self.tmap, self.irange | {new}, self.trange)
        if imap is self.imap:
            return u, self
        return u, _Subst(imap, self.tmap, self.irange, self.trange)

    def bind_type(self, x: str, body_fvs) -> tuple[str, "_Subst"]:
        tmap = self.tmap
        if x in tmap:
            tmap = {k: v for k, v in tmap.items() if k != x}
        if x in self.trange:
            new = fresh_name(x, self.trange | body_fvs() | tmap.keys())
            tmap = dict(tmap)
            tmap[x] = TVar(new)
            return new, _Subst(self.imap, tmap, self.irange, self.trange | {new})
        if tmap is self.tmap:
            return x, self
        return x, _Subst(self.imap, tmap, self.irange, self.trange)

    def empty(self) -> bool:
        return not self.imap and not self.tmap

    def apply(self, t: Type) -> Type:
        if self.empty():
            return t
        match t:
            case TUnit():
                return t
            case TVar(x):
                return self.tmap.get(x, t)
            case TProd(a, b):
                return TProd(self.apply(a), self.apply(b))
            case TSum(a, b):
                return TSum(self.apply(a), self.apply(b))
            case TEq(m, n):
                return TEq(self.index(m), self.index(n))
            case TApp(h, m):
                return TApp(self.apply(h), self.index(m))
            case TArr(binders, dom, cod):
                s = self
                new_binders = []
                for u, sort in binders:
                    u2, s = s.bind_index(u, lambda: _arr_ivars(binders, dom, cod))
                    new_binders.append((u2, sort))
                return TArr(tuple(new_binders), s.apply(dom), s.apply(cod))
            case TSig(u, sort, body):
                u2, s = self.bind_index(u, lambda: type_free_ivars(body))
                return TSig(u2, sort, s.apply(body))
            case TLam(u, body):
                u2, s = self.bind_index(u, lambda: type_free_ivars(body))
                return TLam(u2, s.apply(body))
            case TMu(x, k, body) | TNu(x, k, body):
                x2, s = self.bind_type(x, lambda: type_free_tvars(body))
                return type(t)(x2, k, s.apply(body))
            case TRec(k, z, u, x, body):
                u2, s = self.bind_index(u, lambda: type_free_ivars(body))
                x2, s = s.bind_type(x, lambda: type_free_tvars(body))
                return TRec(k, self.apply(z), u2, x2, s.apply(body))
        raise TypeError(f"not a type: {t!r}")


def _arr_ivars(binders, dom, cod):
    # Binder names are included so a renamed binder cannot be captured by a later one.
    return type_free_ivars(dom) | type_free_ivars(cod) | {u for u, _ in binders}


def _index_range(theta) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for _, m in theta:
        out |= free_vars(m)
    return out


def type_apply_isubst(t: Type, theta: IndexSubst) -> Type:
    """Apply an index substitution to a type, avoiding capture."""
    if not theta:
        return t
    imap = dict(theta)
    return _Subst(imap, {}, _index_range(imap.items()), frozenset()).apply(t)


def type_subst_tvar(t: Type, s: Type, x: str) -> Type:
    """Replace free occurrences of type variable ``x`` in ``t`` by ``s``."""
    return _Subst({}, {x: s}, type_free_ivars(s), type_free_tvars(s)).apply(t)


def type_subst_tvars(t: Type, eta: tuple[tuple[str, Type], ...]) -> Type:
    """Simultaneous type-variable substitution."""
    if not eta:
        return t
    tmap = dict(eta)
    irange: frozenset[str] = frozenset()
    trange: frozenset[str] = frozenset()
    for s in tmap.values():
        irange |= type_free_ivars(s)
        trange |= type_free_tvars(s)
    return _Subst({}, tmap, irange, trange).apply(t)


def term_map_types(t: Term, f) -> Term:
    """Rebuild ``t`` with ``f`` applied to every type annotation."""
    if isinstance(t, Annot):
        return replace(t, body=term_map_types(t.body, f), type=f(t.type))
    changes = {}
    for name in t.__dataclass_fields__:
        if name in ("span", "ann"):
            continue
        value = getattr(t, name)
        if isinstance(value, TERM_CLASSES):
            changes[name] = term_map_types(value, f)
    return replace(t, **changes) if changes else t


def ctx_apply_isubst(gamma: TypingCtx, theta: IndexSubst) -> TypingCtx:
    return tuple((x, type_apply_isubst(t, theta)) for x, t in gamma)


def tvarctx_apply_isubst(xi: TypeVarCtx, theta: IndexSubst) -> TypeVarCtx:
    # Kinds carry only sorts, so this is the identity for nat.
    return tuple((x, kind_apply_isubst(k, theta)) for x, k in xi)


# -- spines ------------------------------------------------------------------

def spine_head_form(t: Type) -> tuple[Type, tuple[IndexTerm, ...]]:
    args = []
    while isinstance(t, TApp):
        args.append(t.arg)
        t = t.head
    return t, tuple(reversed(args))


def apply_spine(head: Type, args) -> Type:
    for m in args:
        head = TApp(head, m)
    return head


def instantiate(t: Type, args) -> Type:
    """Feed index arguments to a type, substituting through leading ``Lam``s.

    Arguments left over once the lambdas run out stay as applications.
    """
    args = tuple(args)
    i = 0
    while i < len(args) and isinstance(t, TLam):
        t = type_apply_isubst(t.body, ((t.name, args[i]),))
        i += 1
    return apply_spine(t, args[i:])


# -- alpha-equivalence -------------------------------------------------------

def _canon_index(m: IndexTerm, ienv: dict[str, int], depth: int):
    k = 0
    while isinstance(m, Suc):
        m, k = m.arg, k + 1
    if isinstance(m, IVar):
        level = ienv.get(m.name)
        leaf = ("f", m.name) if level is None else ("b", depth - level)
    else:
        leaf = ("z",)
    return (k, leaf)


def _canon_kind(k: Kind):
    binders, _ = kind_spine(k)
    return tuple(sort.value for _, sort in binders)


def _canon(t: Type, ienv: dict[str, int], idepth: int, tenv: dict[str, int], tdepth: int):
    match t:
        case TUnit():
            return ("1",)
        case TProd(a, b):
            return ("*", _canon(a, ienv, idepth, tenv, tdepth), _canon(b, ienv, idepth, tenv, tdepth))
        case TSum(a, b):
            return ("+", _canon(a, ienv, idepth, tenv, tdepth), _canon(b, ienv, idepth, tenv, tdepth))
        case TEq(m, n):
            return ("=", _canon_index(m, ienv, idepth), _canon_index(n, ienv, idepth))
        case TApp(h, m):
            return ("@", _canon(h, ienv, idepth, tenv, tdepth), _canon_index(m, ienv, idepth))
        case TVar(x):
            level = tenv.get(x)
            return ("X", x) if level is None else ("x", tdepth - level)
        case TArr(binders, dom, cod):
            inner = dict(ienv)
            d = idepth
            for u, _ in binders:
                d += 1
                inner[u] = d
            sorts = tuple(sort.value for _, sort in binders)
            return ("->", sorts, _canon(dom, inner, d, tenv, tdepth), _canon(cod, inner, d, tenv, tdepth))
        case TSig(u, sort, body):
            inner = dict(ienv)
            inner[u] = idepth + 1
            return ("S", sort.value, _canon(body, inner, idepth + 1, tenv, tdepth))
        case TLam(u, body):
            inner = dict(ienv)
            inner[u] = idepth + 1
            return ("L", _canon(body, inner, idepth + 1, tenv, tdepth))
        case TMu(x, k, body) | TNu(x, k, body):
            inner = dict(tenv)
            inner[x] = tdepth + 1
            tag = "mu" if isinstance(t, TMu) else "nu"
            return (tag, _canon_kind(k), _canon(body, ienv, idepth, inner, tdepth + 1))
        case TRec(k, z, u, x, s):
            iin = dict(ienv)
            iin[u] = idepth + 1
            tin = dict(tenv)
            tin[x] = tdepth + 1
            return ("R", _canon_kind(k), _canon(z, ienv, idepth, tenv, tdepth),
                    _canon(s, iin, idepth + 1, tin, tdepth + 1))
    raise TypeError(f"not a type: {t!r}")


def canonical(t: Type):
    """Name-free canonical form; equal iff the types are alpha-equivalent."""
    return _canon(t, {}, 0, {}, 0)


def type_alpha_eq(a: Type, b: Type) -> bool:
    if a is b:
        return True
    return canonical(a) == canonical(b)
