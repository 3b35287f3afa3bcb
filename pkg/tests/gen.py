"""Random program generation for the property and acceptance suites.

``Gen`` builds well-typed terms by working backwards from a target type. It
mixes introduction forms, eliminations of variables already in scope and a
few rule-specific templates (Mendler rec/corec, index induction, equality
elimination). A dead end raises ``NoGen`` and the caller backtracks; a spent
node budget raises ``GiveUp`` and the whole attempt is dropped.

``Fuzz`` builds arbitrary, mostly ill-formed, ASTs.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from tores.frontend.parser import parse_type
from tores.index import NAT, IVar, Suc, ZERO, Zero, free_vars, idx_eq, numeral, unify
from tores.syntax import (
    Annot, App, Case, Corec, EqAbort, EqElim, Fold, Ind, Inj, InjS, InjZ, KPi, Lam,
    OutNu, OutS, OutZ, Pack, Pair, Rec, Refl, Split, STAR, TApp, TArr, TEq, TLam, TMu,
    TNu, TProd, TRec, TSig, TSum, TUnit, TVar, Unpack, UnitVal, Var,
    apply_spine, canonical, ctx_apply_isubst, instantiate, spine_head_form, tvarctx_apply_isubst,
    type_apply_isubst, type_free_ivars, type_subst_tvar,
)


class NoGen(Exception):
    """No term found for this goal; try something else."""


class GiveUp(Exception):
    """Node budget exhausted for the whole attempt."""


PALETTE_SRC = {
    "NatMu": "mu N : *. unit + N",
    "Nat": "Sig n:nat. unit",
    "Vec": "mu V : Pi n:nat. *. Lam n. n == 0 + Sig m:nat. n == suc m * (unit * V m)",
    "VecS": "Rec (Pi n:nat. *) (0 => unit | suc m, X => unit * X)",
    "Stream": "nu S : *. (Sig n:nat. unit) * S",
    "IStream": "nu S : Pi n:nat. *. Lam n. unit * S (suc n)",
    "Guarded": "nu G : Pi n:nat. *. Lam n. ((k:nat | n == suc k) -> G k) * unit",
}
PALETTE = {name: parse_type(src) for name, src in PALETTE_SRC.items()}
INDEXED = ("Vec", "VecS", "IStream", "Guarded")


def index_terms(t, acc: set):
    """Collect the index terms occurring in a type (for spine candidates)."""
    match t:
        case TEq(m, n):
            acc.update((m, n))
        case TApp(h, m):
            acc.add(m)
            index_terms(h, acc)
        case TProd(a, b) | TSum(a, b):
            index_terms(a, acc)
            index_terms(b, acc)
        case TArr(_, a, b):
            index_terms(a, acc)
            index_terms(b, acc)
        case TSig(_, _, b) | TLam(_, b) | TMu(_, _, b) | TNu(_, _, b):
            index_terms(b, acc)
    return acc


def _equations(t):
    """Equations reachable through products and sums, outermost first."""
    match t:
        case TEq(m, n):
            return [(m, n)]
        case TProd(a, b) | TSum(a, b):
            return _equations(a) + _equations(b)
    return []


def _could_match(a, b) -> bool:
    """Cheap necessary condition for ``a`` (after index substitution) to equal ``b``."""
    if type(a) is not type(b):
        return False
    if isinstance(a, TApp):
        ha, hb = spine_head_form(a)[0], spine_head_form(b)[0]
        return type(ha) is type(hb) and (not isinstance(ha, TVar) or ha == hb)
    return True


@dataclass(frozen=True)
class Env:
    delta: tuple = ()
    xi: tuple = ()
    gamma: tuple = ()
    spent: frozenset = field(default_factory=frozenset)

    def bind(self, x, ty):
        return Env(self.delta, self.xi, tuple(e for e in self.gamma if e[0] != x) + ((x, ty),), self.spent)

    def bind_index(self, u):
        return Env(self.delta + ((u, NAT),), self.xi, self.gamma, self.spent)

    def spend(self, x):
        return Env(self.delta, self.xi, self.gamma, self.spent | {x})


class Gen:
    def __init__(self, rng: random.Random, depth: int = 6, budget: int = 100, tries: int = 1):
        self.rng = rng
        self.depth = depth
        self.budget = budget
        self.tries = tries
        self.counter = 0
        self._canon = {}
        self._isub = {}

    def same(self, a, b) -> bool:
        """Alpha-equality with canonical forms memoised per object."""
        if a is b or a == b:
            return True
        if type(a) is not type(b):
            return False
        return self.canon(a) == self.canon(b)

    def canon(self, t):
        hit = self._canon.get(id(t))
        if hit is None:
            hit = self._canon[id(t)] = (t, canonical(t))
        return hit[1]

    def isub(self, t, inst):
        """``type_apply_isubst`` memoised per (object, substitution)."""
        key = (id(t), inst)
        hit = self._isub.get(key)
        if hit is None:
            hit = self._isub[key] = (t, type_apply_isubst(t, inst))
        return hit[1]

    # -- names, indices, types ------------------------------------------------------

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def index(self, delta) -> object:
        names = [u for u, _ in delta]
        r = self.rng.random()
        if names and r < 0.45:
            m = IVar(self.rng.choice(names))
            return Suc(m) if self.rng.random() < 0.3 else m
        return numeral(self.rng.randint(0, 3))

    def small_type(self, delta):
        r = self.rng.random()
        if r < 0.2:
            return TUnit()
        name = self.rng.choice(list(PALETTE))
        head = PALETTE[name]
        if name in INDEXED:
            return TApp(head, self.index(delta))
        if r < 0.3:
            m = self.index(delta)
            return TEq(m, m)
        return head

    def type_(self, delta, depth: int = 2):
        if depth <= 0 or self.rng.random() < 0.35:
            return self.small_type(delta)
        match self.rng.randrange(6):
            case 0:
                return TProd(self.type_(delta, depth - 1), self.type_(delta, depth - 1))
            case 1:
                return TSum(self.type_(delta, depth - 1), self.type_(delta, depth - 1))
            case 2:
                return TArr((), self.type_(delta, depth - 1), self.type_(delta, depth - 1))
            case 3:
                b = self.fresh("b")
                inner = delta + ((b, NAT),)
                return TArr(((b, NAT),), self.type_(inner, depth - 1), self.type_(inner, depth - 1))
            case 4:
                b = self.fresh("s")
                inner = delta + ((b, NAT),)
                return TSig(b, NAT, self.type_(inner, depth - 1))
            case _:
                return self.recursive_arrow(delta)

    def recursive_arrow(self, delta):
        """A function type that invites rec, corec or ind."""
        b = self.fresh("b")
        bs = ((b, NAT),)
        inner = delta + bs
        v = IVar(b)
        match self.rng.randrange(7):
            case 0 | 6:
                return TArr((), PALETTE["NatMu"], self.rng.choice([PALETTE["NatMu"], self.small_type(delta)]))
            case 1:
                return TArr(bs, TApp(PALETTE["Vec"], v), self.rng.choice([TApp(PALETTE["Vec"], v), self.small_type(inner)]))
            case 2:
                return TArr(bs, TUnit(), self.rng.choice([TApp(PALETTE["VecS"], v), TArr((), TApp(PALETTE["VecS"], v), TApp(PALETTE["VecS"], v)), self.small_type(inner)]))
            case 3:
                return TArr((), self.small_type(delta), PALETTE["Stream"])
            case 4:
                return TArr(bs, self.small_type(inner), TApp(PALETTE["IStream"], v))
            case _:
                return TArr(bs, TUnit(), TApp(PALETTE["Guarded"], v))

    # -- terms --------------------------------------------------------------------

    def term(self, env: Env, ty, depth: int):
        self.budget -= 1
        if self.budget < 0:
            raise GiveUp()
        direct, other = self.options(env, ty, depth)
        options = direct + other
        weights = [w for w, _ in options]
        thunks = [f for _, f in options]
        is_direct = [True] * len(direct) + [False] * len(other)
        misses = 0
        # Failed introductions are retried freely; other detours only ``tries`` times.
        while thunks and misses < self.tries:
            i = self.rng.choices(range(len(thunks)), weights=weights)[0]
            f = thunks.pop(i)
            weights.pop(i)
            if not is_direct.pop(i):
                misses += 1
            try:
                return f()
            except NoGen:
                continue
        raise NoGen()

    def options(self, env: Env, ty, depth: int):
        direct = [(4.0, lambda x=x: Var(x)) for x, s in env.gamma if self.same(s, ty)]
        direct.extend(self.intros(env, ty, depth))
        other = []
        if depth > 0:
            other.extend(self.eliminations(env, ty, depth))
        # Detours cannot prove a false equation, so skip them there.
        if depth > 2 and not isinstance(ty, TEq) and self.rng.random() < 0.5:
            other.append((0.2, lambda: self.beta(env, ty, depth)))
            other.append((0.1, lambda: self.split_fresh(env, ty, depth)))
            other.append((0.2, lambda: self.unpack_eq(env, ty, depth)))
        return direct, other

    def intros(self, env: Env, ty, depth: int):
        d = depth - 1
        match ty:
            case TUnit():
                return [(2.0, lambda: UnitVal())]
            case TEq(m, n):
                return [(2.0, lambda: Refl())] if idx_eq(env.delta, m, n) else []
            # Pairs, injections and packs are bounded by the target type, so
            # they keep the depth; binders, unfoldings and detours consume it.
            case TProd(a, b):
                return [(2.0, lambda: Pair(self.term(env, a, depth), self.term(env, b, depth)))]
            case TSum(a, b):
                side = self.rng.choice([1, 2])
                return [(1.0, lambda: Inj(side, self.term(env, a if side == 1 else b, depth))),
                        (1.0, lambda: Inj(3 - side, self.term(env, b if side == 1 else a, depth)))]
            case TSig(u, _, body):
                return [(2.0, lambda: self.pack(env, u, body, depth))]
            case _ if depth <= 0:
                return []
            case TArr():
                return self.functions(env, ty, d)
        head, args = spine_head_form(ty)
        match head:
            case TMu():
                from tores.typecheck import unfold_mu
                return [(2.0, lambda: Fold(self.term(env, unfold_mu(head, args), d)))]
            case TRec():
                from tores.typecheck import unfold_rec_suc, unfold_rec_zero
                if not args:
                    return []
                m, rest = args[0], args[1:]
                if isinstance(m, Zero):
                    return [(2.0, lambda: InjZ(self.term(env, unfold_rec_zero(head, rest), d)))]
                if isinstance(m, Suc):
                    return [(2.0, lambda: InjS(self.term(env, unfold_rec_suc(head, m.arg, rest), d)))]
            case TNu():
                return [(1.0, lambda: self.corec_app(env, ty, head, args, d))]
        return []

    def pack(self, env, u, body, d):
        m = self.index(env.delta)
        if self.rng.random() < 0.8:
            # Solve an equation of the body for the witness when one determines it.
            names = {w for w, _ in env.delta}
            for lhs, rhs in _equations(body):
                mgu = unify(env.delta + ((u, NAT),), lhs, rhs)
                if mgu is None:
                    continue
                image = dict(mgu.subst)[u]
                if image != IVar(u) and free_vars(image) <= names:
                    m = image
                    break
        return Pack(m, self.term(env, type_apply_isubst(body, ((u, m),)), d))

    def functions(self, env: Env, ty: TArr, d: int):
        opts = [(2.0, lambda: self.lam(env, ty, d))]
        xis = {x for x, _ in env.xi}
        dh, dargs = spine_head_form(ty.dom)
        names = [IVar(u) for u, _ in ty.binders]
        if isinstance(dh, TMu) and list(dargs) == names and dh.name not in xis \
                and not (type_free_ivars(dh) & {u for u, _ in ty.binders}):
            opts.append((8.0, lambda: self.rec(env, ty, dh, dargs, d)))
        ch, cargs = spine_head_form(ty.cod)
        if isinstance(ch, TNu) and list(cargs) == names and ch.name not in xis \
                and not (type_free_ivars(ch) & {u for u, _ in ty.binders}):
            opts.append((3.0, lambda: self.corec(env, ty, ch, cargs, d)))
        if len(ty.binders) == 1 and isinstance(ty.dom, TUnit):
            opts.append((3.0, lambda: self.ind(env, ty, d)))
        return opts

    def lam(self, env: Env, ty: TArr, d: int):
        us = tuple(self.fresh("u") for _ in ty.binders)
        inner = env
        for u in us:
            inner = inner.bind_index(u)
        ren = tuple((w, IVar(u)) for (w, _), u in zip(ty.binders, us))
        x = self.fresh("x")
        inner = inner.bind(x, type_apply_isubst(ty.dom, ren))
        return Lam(us, x, self.term(inner, type_apply_isubst(ty.cod, ren), d))

    def rec(self, env: Env, ty: TArr, head: TMu, args, d: int):
        f = self.fresh("f")
        f_ty = TArr(ty.binders, apply_spine(TVar(head.name), args), ty.cod)
        goal = TArr(ty.binders, instantiate(head.body, args), ty.cod)
        inner = Env(env.delta, env.xi + ((head.name, head.kind),), env.gamma, env.spent).bind(f, f_ty)
        return Rec(f, self.term(inner, goal, d))

    def corec(self, env: Env, ty: TArr, head: TNu, args, d: int):
        f = self.fresh("f")
        f_ty = TArr(ty.binders, ty.dom, apply_spine(TVar(head.name), args))
        goal = TArr(ty.binders, ty.dom, instantiate(head.body, args))
        inner = Env(env.delta, env.xi + ((head.name, head.kind),), env.gamma, env.spent).bind(f, f_ty)
        return Corec(f, self.term(inner, goal, d))

    def ind(self, env: Env, ty: TArr, d: int):
        (w, _), = ty.binders
        zero = self.term(env, type_apply_isubst(ty.cod, ((w, ZERO),)), d)
        u, f = self.fresh("u"), self.fresh("g")
        inner = env.bind_index(u).bind(f, type_apply_isubst(ty.cod, ((w, IVar(u)),)))
        suc = self.term(inner, type_apply_isubst(ty.cod, ((w, Suc(IVar(u))),)), d)
        return Ind(zero, u, f, suc)

    def corec_app(self, env: Env, ty, head: TNu, args, d: int):
        """Build a nu value as ``(corec ... : (bs | S) -> nu.. bs) [args] seed``."""
        if any(x == head.name for x, _ in env.xi):
            raise NoGen()
        bs = tuple((self.fresh("b"), NAT) for _ in args)
        seed_ty = self.small_type(env.delta)
        fn_ty = TArr(bs, seed_ty, apply_spine(head, tuple(IVar(u) for u, _ in bs)))
        fn = self.corec(env, fn_ty, head, tuple(IVar(u) for u, _ in bs), d)
        return App(Annot(fn, fn_ty), tuple(args), self.term(env, seed_ty, d))

    # -- eliminations ---------------------------------------------------------------

    def spines(self, env: Env, binders, extra=(), limit: int = 40):
        pool = {ZERO, Suc(ZERO)} | set(extra)
        for u, _ in env.delta:
            pool |= {IVar(u), Suc(IVar(u))}
        names = {u for u, _ in env.delta}
        pool = sorted((m for m in pool if free_vars(m) <= names), key=str)
        combos = list(itertools.product(pool, repeat=len(binders)))
        self.rng.shuffle(combos)
        return combos[:limit]

    def eliminations(self, env: Env, ty, depth: int):
        d = depth - 1
        opts = []
        wanted = None
        for x, s in env.gamma:
            if isinstance(s, TArr):
                hits = []
                if not s.binders:
                    if self.same(s.cod, ty):
                        hits.append(((), ()))
                elif _could_match(s.cod, ty):
                    if wanted is None:
                        wanted = index_terms(ty, set())
                    for sp in self.spines(env, s.binders, wanted):
                        inst = tuple((u, m) for (u, _), m in zip(s.binders, sp))
                        if self.same(self.isub(s.cod, inst), ty):
                            hits.append((sp, inst))
                for sp, inst in hits[:2]:
                    dom = self.isub(s.dom, inst)
                    if isinstance(spine_head_form(dom)[0], TVar) \
                            and not any(self.same(g, dom) for _, g in env.gamma):
                        continue  # an abstract argument can only come from a variable
                    opts.append((3.0, lambda x=x, dom=dom, sp=sp:
                                 App(Var(x), sp, self.term(env, dom, d))))
                opts.append((0.5, lambda x=x, s=s: self.let_apply(env, x, s, ty, d)))
            if x in env.spent:
                continue
            match s:
                case TProd(a, b):
                    opts.append((1.5, lambda x=x, a=a, b=b: self.split(env, Var(x), a, b, ty, d, x)))
                case TSum(a, b):
                    opts.append((3.0, lambda x=x, a=a, b=b: self.case(env, Var(x), a, b, ty, d, x)))
                case TSig(u, _, body):
                    opts.append((1.5, lambda x=x, u=u, body=body: self.unpack(env, Var(x), u, body, ty, d, x)))
                case TEq(m, n) if m != n:
                    opts.append((4.0, lambda x=x, m=m, n=n: self.eqelim(env, x, m, n, ty, d)))
                case _:
                    head, args = spine_head_form(s)
                    if isinstance(head, TNu):
                        from tores.typecheck import unfold_mu
                        opts.append((1.5, lambda x=x, head=head, args=args:
                                     self.let(env, OutNu(Var(x)), unfold_mu(head, args), ty, d, x)))
                    elif isinstance(head, TRec) and args and not isinstance(args[0], IVar):
                        from tores.typecheck import unfold_rec_suc, unfold_rec_zero
                        m, rest = args[0], args[1:]
                        if isinstance(m, Zero):
                            u = unfold_rec_zero(head, rest)
                            opts.append((1.0, lambda x=x, u=u: self.let(env, OutZ(Var(x)), u, ty, d, x)))
                        else:
                            u = unfold_rec_suc(head, m.arg, rest)
                            opts.append((1.5, lambda x=x, u=u: self.let(env, OutS(Var(x)), u, ty, d, x)))
        return opts

    def let(self, env: Env, scrut, sty, ty, d: int, spent=None):
        """``(fn y => body : sty -> ty) scrut``, or a split when ``sty`` is a product."""
        if isinstance(sty, TProd) and self.rng.random() < 0.7:
            return self.split(env, scrut, sty.left, sty.right, ty, d, spent)
        y = self.fresh("y")
        inner = env.bind(y, sty)
        if spent is not None:
            inner = inner.spend(spent)
        body = self.term(inner, ty, d)
        return App(Annot(Lam((), y, body), TArr((), sty, ty)), (), scrut)

    def let_apply(self, env: Env, f, fty: TArr, ty, d: int):
        best = None
        for sp in self.spines(env, fty.binders, limit=6):
            inst = tuple((u, m) for (u, _), m in zip(fty.binders, sp))
            dom = self.isub(fty.dom, inst)
            if best is None:
                best = (sp, inst, dom)
            if any(self.same(s, dom) for _, s in env.gamma):
                best = (sp, inst, dom)
                break
        if best is None:
            raise NoGen()
        sp, inst, dom = best
        arg = self.term(env, dom, d)
        return self.let(env, App(Var(f), sp, arg), type_apply_isubst(fty.cod, inst), ty, d)

    def split(self, env: Env, scrut, a, b, ty, d, spent=None):
        x, y = self.fresh("p"), self.fresh("q")
        inner = env.bind(x, a).bind(y, b)
        if spent is not None:
            inner = inner.spend(spent)
        return Split(scrut, x, y, self.term(inner, ty, d))

    def case(self, env: Env, scrut, a, b, ty, d, spent=None):
        x, y = self.fresh("l"), self.fresh("r")
        e = env.spend(spent) if spent is not None else env
        return Case(scrut, x, self.term(e.bind(x, a), ty, d), y, self.term(e.bind(y, b), ty, d))

    def unpack(self, env: Env, scrut, u, body, ty, d, spent=None):
        w, x = self.fresh("w"), self.fresh("z")
        inner = env.bind_index(w)
        if spent is not None:
            inner = inner.spend(spent)
        inner = inner.bind(x, type_apply_isubst(body, ((u, IVar(w)),)))
        return Unpack(scrut, w, x, self.term(inner, ty, d))

    def eqelim(self, env: Env, e, m, n, ty, d):
        mgu = unify(env.delta, m, n)
        if mgu is None:
            return EqAbort(Var(e))
        theta = mgu.subst
        inner = Env(mgu.ctx, tvarctx_apply_isubst(env.xi, theta),
                    ctx_apply_isubst(env.gamma, theta), env.spent | {e})
        body = self.term(inner, type_apply_isubst(ty, theta), d)
        if self.rng.random() < 0.5:
            return EqElim(Var(e), theta, mgu.ctx, body)
        return EqElim(Var(e), None, None, body)

    def beta(self, env: Env, ty, depth: int):
        """``(fn (b | x) => body : (b | S) -> ty) [M] arg``."""
        d = depth - 1
        if self.rng.random() < 0.5:
            s = self.type_(env.delta, 1)
            x = self.fresh("x")
            body = self.term(env.bind(x, s), ty, d)
            return App(Annot(Lam((), x, body), TArr((), s, ty)), (), self.term(env, s, d))
        b = self.fresh("b")
        inner = env.bind_index(b)
        s = self.small_type(inner.delta)
        x, u = self.fresh("x"), self.fresh("u")
        fn_ty = TArr(((b, NAT),), s, ty)
        body = self.term(env.bind_index(u).bind(x, type_apply_isubst(s, ((b, IVar(u)),))), ty, d)
        m = self.index(env.delta)
        arg = self.term(env, type_apply_isubst(s, ((b, m),)), d)
        return App(Annot(Lam((u,), x, body), fn_ty), (m,), arg)

    def split_fresh(self, env: Env, ty, depth: int):
        d = depth - 1
        a, b = self.small_type(env.delta), self.small_type(env.delta)
        scrut = Annot(self.term(env, TProd(a, b), d), TProd(a, b))
        return self.split(env, scrut, a, b, ty, d)

    def unpack_eq(self, env: Env, ty, depth: int):
        """Unpack ``Sig s. (s == M) * S``: the body may eliminate the equation."""
        d = depth - 1
        s = self.fresh("s")
        m = self.index(env.delta)
        rest = self.small_type(env.delta + ((s, NAT),))
        sig = TSig(s, NAT, TProd(TEq(IVar(s), m), rest))
        scrut = Annot(self.term(env, sig, d), sig)
        return self.unpack(env, scrut, s, sig.body, ty, d)

    # -- whole programs ---------------------------------------------------------------

    def program(self, delta=()):
        """A term and its type under ``delta``. Raises NoGen or GiveUp."""
        env = Env(delta)
        if self.rng.random() < 0.5:
            fty = self.rng.choice([self.recursive_arrow(delta), self.type_(delta, 2)])
            if isinstance(fty, TArr):
                fn = self.term(env, fty, self.depth - 1)
                sp = tuple(self.index(delta) for _ in fty.binders)
                inst = tuple((u, m) for (u, _), m in zip(fty.binders, sp))
                arg = self.term(env, type_apply_isubst(fty.dom, inst), self.depth - 1)
                return App(Annot(fn, fty), sp, arg), type_apply_isubst(fty.cod, inst)
        ty = self.type_(delta, 2)
        return self.term(env, ty, self.depth), ty


def generate(rng: random.Random, delta=(), depth: int = 6, attempts: int = 200):
    for _ in range(attempts):
        g = Gen(rng, depth)
        try:
            return g.program(delta)
        except (NoGen, GiveUp):
            continue
    raise RuntimeError("generator failed repeatedly")


# -- fuzzing -------------------------------------------------------------------------

NAMES = ["x", "y", "f", "u", "v", "n", "m"]
TNAMES = ["X", "Y", "N"]


class Fuzz:
    """Arbitrary ASTs: node shapes are random, names come from a tiny pool."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def index(self, depth=2):
        r = self.rng.random()
        if r < 0.3 or depth <= 0:
            return Zero() if r < 0.15 else IVar(self.rng.choice(NAMES))
        return Suc(self.index(depth - 1))

    def kind(self, depth=2):
        if depth <= 0 or self.rng.random() < 0.5:
            return STAR
        return KPi(self.rng.choice(NAMES), NAT, self.kind(depth - 1))

    def binders(self):
        return tuple((self.rng.choice(NAMES), NAT) for _ in range(self.rng.randint(0, 2)))

    def type_(self, depth=3):
        r = self.rng
        if depth <= 0:
            return r.choice([TUnit(), TVar(r.choice(TNAMES)), TEq(self.index(), self.index())])
        d = depth - 1
        match r.randrange(13):
            case 0:
                return TUnit()
            case 1:
                return TProd(self.type_(d), self.type_(d))
            case 2:
                return TSum(self.type_(d), self.type_(d))
            case 3:
                return TArr(self.binders(), self.type_(d), self.type_(d))
            case 4:
                return TSig(r.choice(NAMES), NAT, self.type_(d))
            case 5:
                return TEq(self.index(), self.index())
            case 6:
                return TApp(self.type_(d), self.index())
            case 7:
                return TLam(r.choice(NAMES), self.type_(d))
            case 8:
                return TVar(r.choice(TNAMES))
            case 9:
                return TMu(r.choice(TNAMES), self.kind(), self.type_(d))
            case 10:
                return TNu(r.choice(TNAMES), self.kind(), self.type_(d))
            case 11:
                return TRec(self.kind(), self.type_(d), r.choice(NAMES), r.choice(TNAMES), self.type_(d))
            case _:
                return r.choice(list(PALETTE.values()))

    def term(self, depth=4):
        r = self.rng
        if depth <= 0:
            return r.choice([UnitVal(), Refl(), Var(r.choice(NAMES))])
        d = depth - 1
        nm = lambda: r.choice(NAMES)  # noqa: E731
        sp = lambda: tuple(self.index() for _ in range(r.randint(0, 2)))  # noqa: E731
        match r.randrange(24):
            case 0:
                return Var(nm())
            case 1:
                return UnitVal()
            case 2:
                return Lam(tuple(nm() for _ in range(r.randint(0, 2))), nm(), self.term(d))
            case 3:
                return App(self.term(d), sp(), self.term(d))
            case 4:
                return Pair(self.term(d), self.term(d))
            case 5:
                return Split(self.term(d), nm(), nm(), self.term(d))
            case 6:
                return Inj(r.choice([1, 2]), self.term(d))
            case 7:
                return Case(self.term(d), nm(), self.term(d), nm(), self.term(d))
            case 8:
                return Pack(self.index(), self.term(d))
            case 9:
                return Unpack(self.term(d), nm(), nm(), self.term(d))
            case 10:
                return Refl()
            case 11:
                subst = None if r.random() < 0.5 else tuple((nm(), self.index()) for _ in range(r.randint(0, 2)))
                ctx = None if subst is None else self.binders()
                return EqElim(self.term(d), subst, ctx, self.term(d))
            case 12:
                return EqAbort(self.term(d))
            case 13:
                return Fold(self.term(d))
            case 14:
                return Rec(nm(), self.term(d))
            case 15:
                return Corec(nm(), self.term(d))
            case 16:
                return OutNu(self.term(d))
            case 17:
                return InjZ(self.term(d))
            case 18:
                return InjS(self.term(d))
            case 19:
                return OutZ(self.term(d))
            case 20:
                return OutS(self.term(d))
            case 21:
                return Ind(self.term(d), nm(), nm(), self.term(d))
            case _:
                return Annot(self.term(d), self.type_(2))

    def context(self):
        delta = tuple(dict.fromkeys(self.rng.sample(NAMES, self.rng.randint(0, 2))))
        delta = tuple((u, NAT) for u in delta)
        xi = tuple((x, self.kind(1)) for x in self.rng.sample(TNAMES, self.rng.randint(0, 1)))
        gamma = tuple((x, self.type_(1)) for x in self.rng.sample(NAMES, self.rng.randint(0, 2)))
        return delta, xi, gamma
