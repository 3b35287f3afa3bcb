"""Bidirectional kind checking.

Unit, products, sums, arrows, sigmas and equalities check at ``*``; type-level
lambdas check against a Pi kind; variables, applications, mu/nu and Rec types
synthesize. Synthesis also accepts the ``*`` formers so an application headed
by one reports ``head_not_pi`` rather than a mode error.
"""

from __future__ import annotations

from tores.errors import KindError
from tores.index import NAT, IndexCtx, idx_check, show_ctx, sort_wf, spine_wf
from tores.syntax import (
    STAR,
    KPi,
    Kind,
    Star,
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
    Type,
    TypeVarCtx,
    kind_eq,
)

_STAR_FORMERS = (TUnit, TProd, TSum, TArr, TSig, TEq)


def _bind(delta: IndexCtx, u: str, sort) -> IndexCtx:
    # Type-level binders may shadow; only membership is ever consulted here.
    return tuple(e for e in delta if e[0] != u) + ((u, sort),)


def _lookup(xi: TypeVarCtx, x: str) -> Kind | None:
    for name, k in reversed(xi):
        if name == x:
            return k
    return None


def kind_wf(delta: IndexCtx, k: Kind) -> bool:
    while isinstance(k, KPi):
        if not sort_wf(delta, k.sort):
            return False
        delta = _bind(delta, k.name, k.sort)
        k = k.body
    return True


def show_kind(k: Kind) -> str:
    if isinstance(k, KPi):
        return f"Pi {k.name}:{k.sort}. {show_kind(k.body)}"
    return "*"


def kind_check(delta: IndexCtx, xi: TypeVarCtx, t: Type, k: Kind) -> None:
    """Raise KindError unless ``delta; xi |- t <= k``."""
    match t:
        case TLam(u, body):
            if not isinstance(k, KPi):
                raise KindError("lambda_needs_pi", f"type-level lambda over {u} checked against {show_kind(k)}", found=t)
            kind_check(_bind(delta, u, k.sort), xi, body, k.body)
        case _ if isinstance(t, _STAR_FORMERS):
            if not isinstance(k, Star):
                raise KindError("not_star", f"this type has kind * but {show_kind(k)} was expected", found=t)
            _check_star(delta, xi, t)
        case _:
            found = kind_infer(delta, xi, t)
            if not kind_eq(found, k):
                reason = "not_star" if isinstance(k, Star) else "kind_mismatch"
                raise KindError(reason, f"expected kind {show_kind(k)}, found {show_kind(found)}", found=t)


def _check_star(delta: IndexCtx, xi: TypeVarCtx, t: Type) -> None:
    match t:
        case TUnit():
            pass
        case TProd(a, b) | TSum(a, b):
            kind_check(delta, xi, a, STAR)
            kind_check(delta, xi, b, STAR)
        case TArr(binders, dom, cod):
            if not spine_wf(delta, binders):
                raise KindError("duplicate_binder", f"ill-formed binder list ({show_ctx(binders)})", found=t)
            inner = delta
            for u, sort in binders:
                inner = _bind(inner, u, sort)
            kind_check(inner, xi, dom, STAR)
            kind_check(inner, xi, cod, STAR)
        case TSig(u, sort, body):
            if not sort_wf(delta, sort):
                raise KindError("sort_mismatch", f"bad sort {sort}", found=t)
            kind_check(_bind(delta, u, sort), xi, body, STAR)
        case TEq(m, n):
            for side in (m, n):
                if not idx_check(delta, side, NAT):
                    raise KindError("sort_mismatch", f"index term {side} is not a nat in ({show_ctx(delta)})", found=t)


def kind_infer(delta: IndexCtx, xi: TypeVarCtx, t: Type) -> Kind:
    """Synthesize the kind of ``t`` or raise KindError."""
    match t:
        case TVar(x):
            k = _lookup(xi, x)
            if k is None:
                raise KindError("unbound_tvar", f"type variable {x} is not in scope", found=t)
            return k
        case TApp(head, m):
            hk = kind_infer(delta, xi, head)
            if not isinstance(hk, KPi):
                raise KindError("head_not_pi", f"type of kind {show_kind(hk)} applied to index {m}", found=t)
            if not idx_check(delta, m, hk.sort):
                raise KindError("sort_mismatch", f"index argument {m} is not a {hk.sort} in ({show_ctx(delta)})", found=t)
            # Kinds mention no index terms, so K[m/u] is K.
            return hk.body
        case TMu(x, k, body) | TNu(x, k, body):
            if not kind_wf(delta, k):
                raise KindError("sort_mismatch", f"ill-formed kind annotation {show_kind(k)}", found=t)
            kind_check(delta, xi + ((x, k),), body, k)
            return k
        case TRec(k, zero, u, x, suc):
            if not isinstance(k, KPi) or k.sort is not NAT:
                raise KindError("strat_kind_shape", f"Rec annotation must be Pi u:nat. K, got {show_kind(k)}", found=t)
            inner = k.body
            kind_check(delta, xi, zero, inner)
            kind_check(_bind(delta, u, NAT), xi + ((x, inner),), suc, inner)
            return k
        case TLam(u, _):
            raise KindError("lambda_needs_pi", f"type-level lambda over {u} cannot synthesize a kind", found=t)
        case _ if isinstance(t, _STAR_FORMERS):
            _check_star(delta, xi, t)
            return STAR
    raise KindError("sort_mismatch", f"not a type: {t!r}")
