"""Natural-number index language.

Index terms are ``0``, ``suc M`` and variables. Contexts and substitutions are
plain tuples so they can be shared freely; a substitution lists its entries in
the order of the context it covers, each entry being ``(name, term)``.
Unification and matching return ``None`` on failure (a clash, or no match).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Sort(Enum):
    NAT = "nat"

    def __str__(self):
        return self.value


NAT = Sort.NAT


@dataclass(frozen=True, slots=True)
class Zero:
    def __str__(self):
        return "0"


@dataclass(frozen=True, slots=True)
class Suc:
    arg: "IndexTerm"

    def __str__(self):
        inner = str(self.arg)
        if isinstance(self.arg, Suc):
            inner = f"({inner})"
        return f"suc {inner}"


@dataclass(frozen=True, slots=True)
class IVar:
    name: str

    def __str__(self):
        return self.name


IndexTerm = Zero | Suc | IVar
IndexCtx = tuple[tuple[str, Sort], ...]
IndexSubst = tuple[tuple[str, IndexTerm], ...]

ZERO = Zero()


@dataclass(frozen=True, slots=True)
class Unifier:
    """A pair ``(ctx | subst)``: ``subst`` maps the input context into ``ctx``."""

    ctx: IndexCtx
    subst: IndexSubst

    def __str__(self):
        return f"({show_ctx(self.ctx)} | {show_subst(self.subst)})"


def numeral(k: int) -> IndexTerm:
    t: IndexTerm = ZERO
    for _ in range(k):
        t = Suc(t)
    return t


def to_int(m: IndexTerm) -> int | None:
    """The number a ground index term denotes, or None if it has a variable."""
    k = 0
    while isinstance(m, Suc):
        m, k = m.arg, k + 1
    return k if isinstance(m, Zero) else None


def free_vars(m: IndexTerm) -> frozenset[str]:
    while isinstance(m, Suc):
        m = m.arg
    return frozenset((m.name,)) if isinstance(m, IVar) else frozenset()


def is_ground(m: IndexTerm) -> bool:
    return to_int(m) is not None


def ctx_names(delta: IndexCtx) -> tuple[str, ...]:
    return tuple(name for name, _ in delta)


def show_ctx(delta: IndexCtx) -> str:
    return ", ".join(f"{name}:{sort}" for name, sort in delta)


def show_subst(theta: IndexSubst) -> str:
    return "[" + ", ".join(f"{m}/{u}" for u, m in theta) + "]"


# Sorts mention no index terms for nat, so these are trivially closed under
# substitution. They exist so callers follow the general discipline.

def sort_wf(delta: IndexCtx, sort: Sort) -> bool:
    return sort is NAT


def sort_apply(sort: Sort, theta: IndexSubst) -> Sort:
    return sort


def ictx_wf(delta: IndexCtx) -> bool:
    seen: set[str] = set()
    for i, (name, sort) in enumerate(delta):
        if name in seen or not sort_wf(delta[:i], sort):
            return False
        seen.add(name)
    return True


def idx_check(delta: IndexCtx, m: IndexTerm, sort: Sort = NAT) -> bool:
    if sort is not NAT:
        return False
    while isinstance(m, Suc):
        m = m.arg
    if isinstance(m, Zero):
        return True
    return any(name == m.name and s is NAT for name, s in delta)


def idx_eq(delta: IndexCtx, m: IndexTerm, n: IndexTerm) -> bool:
    # Equality on nat is reflexivity only.
    return m == n


def subst_apply(m: IndexTerm, theta: IndexSubst) -> IndexTerm:
    """Simultaneous substitution; variables outside the domain are kept."""
    if not theta:
        return m
    depth = 0
    while isinstance(m, Suc):
        m, depth = m.arg, depth + 1
    if isinstance(m, IVar):
        # Later entries shadow earlier ones.
        for name, term in reversed(theta):
            if name == m.name:
                m = term
                break
    for _ in range(depth):
        m = Suc(m)
    return m


def single(m: IndexTerm, u: str) -> IndexSubst:
    return ((u, m),)


def subst_compose(theta1: IndexSubst, theta2: IndexSubst) -> IndexSubst:
    """``theta1[theta2]``: apply ``theta1`` first, then ``theta2``.

    Entries of ``theta2`` for names outside ``theta1``'s domain are kept in
    front, so that variables ``theta1`` leaves alone still receive ``theta2``.
    """
    dom1 = {u for u, _ in theta1}
    head = tuple((u, m) for u, m in theta2 if u not in dom1)
    return head + tuple((u, subst_apply(m, theta2)) for u, m in theta1)


def id_subst(delta: IndexCtx) -> IndexSubst:
    return tuple((name, IVar(name)) for name, _ in delta)


def subst_check(delta2: IndexCtx, theta: IndexSubst, delta: IndexCtx) -> bool:
    if len(theta) != len(delta):
        return False
    for i in range(len(delta) - 1, -1, -1):
        (u, m), (name, sort) = theta[i], delta[i]
        if u != name:
            return False
        if not idx_check(delta2, m, sort_apply(sort, theta[:i])):
            return False
    return True


def spine_wf(delta: IndexCtx, binders: IndexCtx) -> bool:
    names = [name for name, _ in binders]
    if len(set(names)) != len(names):
        return False
    for i, (_, sort) in enumerate(binders):
        if not sort_wf(delta + binders[:i], sort):
            return False
    return True


def spine_check(delta: IndexCtx, spine: tuple[IndexTerm, ...], binders: IndexCtx) -> bool:
    if len(spine) != len(binders):
        return False
    done: IndexSubst = ()
    for m, (u, sort) in zip(spine, binders):
        if not idx_check(delta, m, sort_apply(sort, done)):
            return False
        done = done + ((u, m),)
    return True


def _split_at(delta: IndexCtx, u: str) -> tuple[IndexCtx, Sort, IndexCtx]:
    for i, (name, sort) in enumerate(delta):
        if name == u:
            return delta[:i], sort, delta[i + 1:]
    raise ValueError(f"index variable {u} is not in context ({show_ctx(delta)})")


def _eliminate(delta: IndexCtx, u: str, m: IndexTerm) -> Unifier:
    before, _, after = _split_at(delta, u)
    instance = single(m, u)
    after = tuple((name, sort_apply(sort, instance)) for name, sort in after)
    theta = id_subst(before) + ((u, m),) + id_subst(after)
    return Unifier(before + after, theta)


def unify(delta: IndexCtx, m: IndexTerm, n: IndexTerm) -> Unifier | None:
    """Most general unifier of ``m`` and ``n`` in ``delta``; None on clash."""
    while isinstance(m, Suc) and isinstance(n, Suc):
        m, n = m.arg, n.arg
    match m, n:
        case Zero(), Zero():
            return Unifier(delta, id_subst(delta))
        case IVar(a), IVar(b) if a == b:
            return Unifier(delta, id_subst(delta))
        case IVar(a), _:
            return None if a in free_vars(n) else _eliminate(delta, a, n)
        case _, IVar(b):
            return None if b in free_vars(m) else _eliminate(delta, b, m)
        case _:
            return None


def match_term(delta: IndexCtx, m: IndexTerm, n: IndexTerm) -> Unifier | None:
    """Find ``(delta2 | theta)`` with ``m[theta] == n``; ``m`` lives in ``delta``."""
    while isinstance(m, Suc) and isinstance(n, Suc):
        m, n = m.arg, n.arg
    match m, n:
        case Zero(), Zero():
            return Unifier(delta, id_subst(delta))
        case IVar(a), _ if a in ctx_names(delta):
            before, _, after = _split_at(delta, a)
            return Unifier(before + after, id_subst(before) + ((a, n),) + id_subst(after))
        case IVar(a), IVar(b) if a == b:
            return Unifier(delta, id_subst(delta))
        case _:
            return None


def match_subst(delta: IndexCtx, theta1: IndexSubst, theta2: IndexSubst) -> Unifier | None:
    """Find ``(delta2 | rho)`` with ``theta1[rho] == theta2``.

    Both substitutions must cover the same domain in the same order.
    """
    if [u for u, _ in theta1] != [u for u, _ in theta2]:
        raise ValueError(f"domains differ: {show_subst(theta1)} vs {show_subst(theta2)}")
    ctx, rho = delta, id_subst(delta)
    for (_, m), (_, n) in zip(theta1, theta2):
        step = match_term(ctx, subst_apply(m, rho), n)
        if step is None:
            return None
        ctx, rho = step.ctx, subst_compose(rho, step.subst)
    return Unifier(ctx, rho)


def unifier_alpha_eq(a: Unifier, b: Unifier) -> bool:
    """Equal up to an order-preserving renaming of the result contexts."""
    if len(a.ctx) != len(b.ctx) or len(a.subst) != len(b.subst):
        return False
    if any(sa is not sb for (_, sa), (_, sb) in zip(a.ctx, b.ctx)):
        return False
    renaming = tuple((x, IVar(y)) for (x, _), (y, _) in zip(a.ctx, b.ctx))
    for (u, m), (w, n) in zip(a.subst, b.subst):
        if u != w or subst_apply(m, renaming) != n:
            return False
    return True
