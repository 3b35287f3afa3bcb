"""Bidirectional type checking of terms.

The checker elaborates as it goes: ``check`` returns the term with omitted
``eqelim`` unifiers filled in from the computed MGU and with an ``FnAnn``
attached to every function value, which the machine needs to type closures.

Index variables may not be rebound while in scope (``scope_error``); term
variables may, with the newer binding hiding the older one.
"""

from __future__ import annotations

from dataclasses import replace
from typing import NamedTuple

from tores.errors import CheckError, TypingError
from tores.index import (
    NAT,
    ZERO,
    IndexCtx,
    IVar,
    Suc,
    Unifier,
    Zero,
    ictx_wf,
    idx_check,
    idx_eq,
    show_subst,
    spine_check,
    subst_check,
    unifier_alpha_eq,
    unify,
)
from tores.kinding import kind_check
from tores.syntax import (
    STAR,
    Annot,
    App,
    Case,
    Corec,
    EqAbort,
    EqElim,
    FnAnn,
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
    Split,
    TApp,
    TArr,
    TEq,
    Term,
    TMu,
    TNu,
    TProd,
    TRec,
    TSig,
    TSum,
    TUnit,
    TVar,
    Type,
    TypeVarCtx,
    TypingCtx,
    Unpack,
    UnitVal,
    Var,
    apply_spine,
    ctx_apply_isubst,
    fresh_name,
    instantiate,
    spine_head_form,
    term_free_vars,
    tvarctx_apply_isubst,
    type_alpha_eq,
    type_apply_isubst,
    type_free_ivars,
    type_subst_tvar,
)


class Ctx(NamedTuple):
    delta: IndexCtx
    xi: TypeVarCtx
    gamma: TypingCtx

    def bind_index(self, u: str) -> "Ctx":
        if any(name == u for name, _ in self.delta):
            raise TypingError("scope_error", f"index variable {u} is already in scope")
        return self._replace(delta=self.delta + ((u, NAT),))

    def bind(self, x: str, ty: Type) -> "Ctx":
        return self._replace(gamma=_extend(self.gamma, x, ty))


def _extend(gamma: TypingCtx, x: str, ty: Type) -> TypingCtx:
    return tuple(e for e in gamma if e[0] != x) + ((x, ty),)


def _lookup(gamma: TypingCtx, x: str) -> Type | None:
    for name, ty in reversed(gamma):
        if name == x:
            return ty
    return None


# -- unfoldings shared with the machine --------------------------------------

def unfold_mu(head: TMu | TNu, args) -> Type:
    """One unfolding of ``(mu X:K. T) args``: ``T[mu.../X]`` fed ``args``."""
    return instantiate(type_subst_tvar(head.body, head, head.name), args)


def unfold_rec_zero(head: TRec, rest) -> Type:
    return instantiate(head.zero, rest)


def unfold_rec_suc(head: TRec, n, rest) -> Type:
    # Index first: the inserted ``head n`` may itself mention a variable named ivar.
    body = type_apply_isubst(head.suc, ((head.ivar, n),))
    return instantiate(type_subst_tvar(body, TApp(head, n), head.tvar), rest)


def _strat_view(ty: Type):
    """Split ``(Rec ...) M rest`` into ``(head, M, rest)``, or None."""
    head, args = spine_head_form(ty)
    if isinstance(head, TRec) and args:
        return head, args[0], args[1:]
    return None


# -- the checker ----------------------------------------------------------------

def check(delta: IndexCtx, xi: TypeVarCtx, gamma: TypingCtx, t: Term, ty: Type) -> Term:
    """Check ``t`` against ``ty``; return the elaborated term or raise TypingError."""
    return _check(Ctx(delta, xi, gamma), t, ty)


def infer(delta: IndexCtx, xi: TypeVarCtx, gamma: TypingCtx, t: Term) -> Type:
    return _infer(Ctx(delta, xi, gamma), t)[1]


def infer_elab(delta: IndexCtx, xi: TypeVarCtx, gamma: TypingCtx, t: Term) -> tuple[Term, Type]:
    return _infer(Ctx(delta, xi, gamma), t)


def _locate(err: CheckError, t) -> None:
    if err.span is None:
        err.span = getattr(t, "span", None)


def _mismatch(what: str, ty: Type, found: Type | None = None) -> TypingError:
    return TypingError("mismatch", what, expected=ty, found=found)


def _ann(cx: Ctx, t: Term, ty: Type, tvar: str | None = None) -> FnAnn:
    fvs = term_free_vars(t)
    # Keep only the visible binding of each free variable, in context order.
    seen: set[str] = set()
    kept = []
    for x, s in reversed(cx.gamma):
        if x in fvs and x not in seen:
            seen.add(x)
            kept.append((x, s))
    return FnAnn(tuple(reversed(kept)), ty, tvar)


def _check(cx: Ctx, t: Term, ty: Type) -> Term:
    try:
        return _check_inner(cx, t, ty)
    except CheckError as err:
        _locate(err, t)
        raise


def _check_inner(cx: Ctx, t: Term, ty: Type) -> Term:
    match t:
        case UnitVal():
            if not isinstance(ty, TUnit):
                raise _mismatch("<> has type unit", ty, TUnit())
            return t
        case Pair(a, b):
            if not isinstance(ty, TProd):
                raise _mismatch("a pair needs a product type", ty)
            return replace(t, fst=_check(cx, a, ty.left), snd=_check(cx, b, ty.right))
        case Inj(side, body):
            if not isinstance(ty, TSum):
                raise _mismatch("an injection needs a sum type", ty)
            return replace(t, body=_check(cx, body, ty.left if side == 1 else ty.right))
        case Lam(us, x, body):
            return _check_lam(cx, t, us, x, body, ty)
        case Rec(f, body):
            return _check_rec(cx, t, f, body, ty)
        case Corec(f, body):
            return _check_corec(cx, t, f, body, ty)
        case Ind(zero, u, f, suc):
            return _check_ind(cx, t, zero, u, f, suc, ty)
        case Pack(m, body):
            if not isinstance(ty, TSig):
                raise _mismatch("pack needs a Sig type", ty)
            if not idx_check(cx.delta, m, ty.sort):
                raise TypingError("index_error", f"witness {m} is not a well-scoped nat")
            return replace(t, body=_check(cx, body, type_apply_isubst(ty.body, ((ty.name, m),))))
        case Split(p, x, y, body):
            p2, pt = _infer(cx, p)
            if not isinstance(pt, TProd):
                raise TypingError("not_product", "split scrutinee is not a pair", found=pt)
            body2 = _check(cx.bind(x, pt.left).bind(y, pt.right), body, ty)
            return replace(t, scrut=p2, body=body2)
        case Case(s, x, left, y, right):
            s2, st = _infer(cx, s)
            if not isinstance(st, TSum):
                raise TypingError("not_sum", "case scrutinee is not a sum", found=st)
            return replace(t, scrut=s2,
                           left_body=_check(cx.bind(x, st.left), left, ty),
                           right_body=_check(cx.bind(y, st.right), right, ty))
        case Unpack(s, u, x, body):
            s2, st = _infer(cx, s)
            if not isinstance(st, TSig):
                raise TypingError("not_sigma", "unpack scrutinee is not a Sig", found=st)
            inner = cx.bind_index(u)
            xt = type_apply_isubst(st.body, ((st.name, IVar(u)),))
            return replace(t, scrut=s2, body=_check(inner.bind(x, xt), body, ty))
        case Refl():
            if not isinstance(ty, TEq):
                raise _mismatch("refl needs an equation type", ty)
            if not idx_eq(cx.delta, ty.lhs, ty.rhs):
                raise _mismatch(f"refl cannot prove {ty.lhs} == {ty.rhs}", ty)
            return t
        case EqElim(s, subst, ctx, body):
            return _check_eqelim(cx, t, s, subst, ctx, body, ty)
        case EqAbort(s):
            s2, st = _infer(cx, s)
            if not isinstance(st, TEq):
                raise TypingError("not_equality", "eqabort scrutinee is not an equation", found=st)
            mgu = unify(cx.delta, st.lhs, st.rhs)
            if mgu is not None:
                raise TypingError("expected_clash_but_unifiable",
                                  f"{st.lhs} == {st.rhs} has the unifier {mgu}", found=st)
            return replace(t, scrut=s2)
        case Fold(body):
            head, args = spine_head_form(ty)
            if not isinstance(head, TMu):
                raise TypingError("not_mu", "fold needs a mu type", expected=ty)
            return replace(t, body=_check(cx, body, unfold_mu(head, args)))
        case InjZ(body):
            view = _strat_view(ty)
            if view is None:
                raise TypingError("not_strat", "inj0 needs a Rec type", expected=ty)
            head, m, rest = view
            if not isinstance(m, Zero):
                raise _mismatch(f"inj0 needs index 0, not {m}", ty)
            return replace(t, body=_check(cx, body, unfold_rec_zero(head, rest)))
        case InjS(body):
            view = _strat_view(ty)
            if view is None:
                raise TypingError("not_strat", "injs needs a Rec type", expected=ty)
            head, m, rest = view
            if not isinstance(m, Suc):
                raise _mismatch(f"injs needs an index of the form suc N, not {m}", ty)
            return replace(t, body=_check(cx, body, unfold_rec_suc(head, m.arg, rest)))
    t2, found = _infer(cx, t)
    if not type_alpha_eq(found, ty):
        raise _mismatch("type mismatch", ty, found)
    return t2


def _check_lam(cx: Ctx, t: Lam, us, x, body, ty: Type) -> Term:
    if not isinstance(ty, TArr):
        raise _mismatch("a function needs an arrow type", ty)
    if len(us) != len(ty.binders):
        raise TypingError("spine_shape",
                          f"function binds {len(us)} index variables, type expects {len(ty.binders)}",
                          expected=ty)
    inner = cx
    for u in us:
        inner = inner.bind_index(u)
    ren = tuple((w, IVar(u)) for (w, _), u in zip(ty.binders, us))
    dom = type_apply_isubst(ty.dom, ren)
    cod = type_apply_isubst(ty.cod, ren)
    body2 = _check(inner.bind(x, dom), body, cod)
    return replace(t, body=body2, ann=_ann(cx, t, ty))


def _recursive_shape(ty: TArr, side: Type, want, what: str):
    """Validate ``(u... | ...) -> ...`` with ``side`` equal to ``want`` applied to u..."""
    head, args = spine_head_form(side)
    if not isinstance(head, want):
        reason = "not_mu" if want is TMu else "not_nu"
        raise TypingError(reason, f"{what} needs a {'mu' if want is TMu else 'nu'} type here", expected=ty)
    names = [u for u, _ in ty.binders]
    if list(args) != [IVar(u) for u in names]:
        raise TypingError("rec_shape",
                          f"{what}: the recursive type must be applied to exactly ({', '.join(names)})",
                          expected=ty)
    clash = type_free_ivars(head) & set(names)
    if clash:
        raise TypingError("rec_shape",
                          f"{what}: bound index {sorted(clash)[0]} occurs free in the recursive type",
                          expected=ty)
    return head, args


def _fresh_tvar(cx: Ctx, x: str) -> str:
    taken = {name for name, _ in cx.xi}
    return fresh_name(x, taken) if x in taken else x


def _check_rec(cx: Ctx, t: Rec, f: str, body, ty: Type) -> Term:
    if not isinstance(ty, TArr):
        raise TypingError("rec_shape", "rec needs an arrow type", expected=ty)
    head, args = _recursive_shape(ty, ty.dom, TMu, "rec")
    x = _fresh_tvar(cx, head.name)
    inner_body = type_subst_tvar(head.body, TVar(x), head.name) if x != head.name else head.body
    f_ty = TArr(ty.binders, apply_spine(TVar(x), args), ty.cod)
    goal = TArr(ty.binders, instantiate(inner_body, args), ty.cod)
    inner = cx._replace(xi=cx.xi + ((x, head.kind),)).bind(f, f_ty)
    return replace(t, body=_check(inner, body, goal), ann=_ann(cx, t, ty, x))


def _check_corec(cx: Ctx, t: Corec, f: str, body, ty: Type) -> Term:
    if not isinstance(ty, TArr):
        raise TypingError("rec_shape", "corec needs an arrow type", expected=ty)
    head, args = _recursive_shape(ty, ty.cod, TNu, "corec")
    x = _fresh_tvar(cx, head.name)
    inner_body = type_subst_tvar(head.body, TVar(x), head.name) if x != head.name else head.body
    f_ty = TArr(ty.binders, ty.dom, apply_spine(TVar(x), args))
    goal = TArr(ty.binders, ty.dom, instantiate(inner_body, args))
    inner = cx._replace(xi=cx.xi + ((x, head.kind),)).bind(f, f_ty)
    return replace(t, body=_check(inner, body, goal), ann=_ann(cx, t, ty, x))


def _check_ind(cx: Ctx, t: Ind, zero, u, f, suc, ty: Type) -> Term:
    if not (isinstance(ty, TArr) and len(ty.binders) == 1 and isinstance(ty.dom, TUnit)):
        raise _mismatch("ind needs a type of the form (w:nat | unit) -> T", ty)
    (w, _), = ty.binders
    zero2 = _check(cx, zero, type_apply_isubst(ty.cod, ((w, ZERO),)))
    inner = cx.bind_index(u)
    hyp = type_apply_isubst(ty.cod, ((w, IVar(u)),))
    goal = type_apply_isubst(ty.cod, ((w, Suc(IVar(u))),))
    suc2 = _check(inner.bind(f, hyp), suc, goal)
    return replace(t, zero=zero2, suc=suc2, ann=_ann(cx, t, ty))


def _check_eqelim(cx: Ctx, t: EqElim, s, subst, ctx, body, ty: Type) -> Term:
    s2, st = _infer(cx, s)
    if not isinstance(st, TEq):
        raise TypingError("not_equality", "eqelim scrutinee is not an equation", found=st)
    mgu = unify(cx.delta, st.lhs, st.rhs)
    if mgu is None:
        raise TypingError("unifier_mismatch",
                          f"{st.lhs} == {st.rhs} has no unifier; use eqabort", found=st)
    if subst is None:
        given = mgu
    else:
        given = Unifier(tuple(ctx or ()), tuple(subst))
        if not ictx_wf(given.ctx) or not subst_check(given.ctx, given.subst, cx.delta) \
                or not unifier_alpha_eq(mgu, given):
            raise TypingError("unifier_mismatch",
                              f"supplied unifier {given} differs from the computed {mgu}", found=st)
    theta = given.subst
    inner = Ctx(given.ctx, tvarctx_apply_isubst(cx.xi, theta), ctx_apply_isubst(cx.gamma, theta))
    body2 = _check(inner, body, type_apply_isubst(ty, theta))
    return replace(t, scrut=s2, subst=given.subst, ctx=given.ctx, body=body2)


def _infer(cx: Ctx, t: Term) -> tuple[Term, Type]:
    try:
        return _infer_inner(cx, t)
    except CheckError as err:
        _locate(err, t)
        raise


def _infer_inner(cx: Ctx, t: Term) -> tuple[Term, Type]:
    match t:
        case Var(x):
            ty = _lookup(cx.gamma, x)
            if ty is None:
                raise TypingError("scope_error", f"unbound variable {x}")
            return t, ty
        case App(fn, spine, arg):
            fn2, ft = _infer(cx, fn)
            if not isinstance(ft, TArr):
                raise TypingError("not_function", "applied term is not a function", found=ft)
            if len(spine) != len(ft.binders):
                raise TypingError("spine_shape",
                                  f"{len(spine)} index arguments given, {len(ft.binders)} expected", found=ft)
            if not spine_check(cx.delta, tuple(spine), ft.binders):
                raise TypingError("index_error", f"index arguments {show_subst(tuple(zip([u for u, _ in ft.binders], spine)))} are ill-scoped")
            inst = tuple((u, m) for (u, _), m in zip(ft.binders, spine))
            arg2 = _check(cx, arg, type_apply_isubst(ft.dom, inst))
            return replace(t, fn=fn2, arg=arg2), type_apply_isubst(ft.cod, inst)
        case OutZ(body):
            body2, bt = _infer(cx, body)
            view = _strat_view(bt)
            if view is None:
                raise TypingError("not_strat", "out0 of a non-Rec type", found=bt)
            head, m, rest = view
            if not isinstance(m, Zero):
                raise _mismatch(f"out0 needs index 0, not {m}", bt)
            return replace(t, body=body2), unfold_rec_zero(head, rest)
        case OutS(body):
            body2, bt = _infer(cx, body)
            view = _strat_view(bt)
            if view is None:
                raise TypingError("not_strat", "outs of a non-Rec type", found=bt)
            head, m, rest = view
            if not isinstance(m, Suc):
                raise _mismatch(f"outs needs an index of the form suc N, not {m}", bt)
            return replace(t, body=body2), unfold_rec_suc(head, m.arg, rest)
        case OutNu(body):
            body2, bt = _infer(cx, body)
            head, args = spine_head_form(bt)
            if not isinstance(head, TNu):
                raise TypingError("not_nu", "out_nu of a non-nu type", found=bt)
            return replace(t, body=body2), unfold_mu(head, args)
        case Annot(body, ty):
            kind_check(cx.delta, cx.xi, ty, STAR)
            return replace(t, body=_check(cx, body, ty)), ty
    if not hasattr(t, "__dataclass_fields__") or not hasattr(t, "span"):
        raise TypingError("cannot_infer", f"not a term: {t!r}")
    raise TypingError("cannot_infer", f"{type(t).__name__.lower()} needs a type annotation")
