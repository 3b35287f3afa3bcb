"""Big-step environment machine and value typing.

Three judgments: evaluating a term under ``theta`` (ground index environment)
and ``sigma`` (value environment), applying a closure to a ground spine and a
value, and observing a corecursive thunk. Every rule costs one unit of fuel.

Closures also carry ``eta``, a map from the type variables of enclosing rec and
corec bodies to the (co)recursive types they stand for. Evaluation never looks
at it; ``value_check`` uses it to rebuild the static context of a closure.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Union

from tores.errors import CheckError, EvalError, FuelExhausted
from tores.index import (
    NAT,
    IndexSubst,
    IndexTerm,
    Suc,
    Zero,
    idx_check,
    is_ground,
    match_subst,
    spine_check,
    subst_apply,
    subst_check,
)
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
    Lam,
    OutNu,
    OutS,
    OutZ,
    Pack,
    Pair,
    Rec,
    Refl,
    Split,
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
    Type,
    TypingCtx,
    Unpack,
    UnitVal,
    Var,
    spine_head_form,
    type_alpha_eq,
    type_apply_isubst,
    term_map_types,
    type_subst_tvars,
)
from tores.typecheck import check, unfold_mu, unfold_rec_suc, unfold_rec_zero

DEFAULT_FUEL = 10**6

TypeEnv = tuple[tuple[str, Type], ...]


@dataclass(frozen=True, slots=True)
class VUnit:
    pass


@dataclass(frozen=True, slots=True)
class VPair:
    fst: "Value"
    snd: "Value"


@dataclass(frozen=True, slots=True)
class VInj:
    side: int
    body: "Value"


@dataclass(frozen=True, slots=True)
class VPack:
    witness: IndexTerm
    body: "Value"


@dataclass(frozen=True, slots=True)
class VRefl:
    pass


@dataclass(frozen=True, slots=True)
class VFold:
    body: "Value"


@dataclass(frozen=True, slots=True)
class VInjZ:
    body: "Value"


@dataclass(frozen=True, slots=True)
class VInjS:
    body: "Value"


@dataclass(frozen=True, slots=True)
class FnClosure:
    code: Lam | Rec | Corec | Ind
    ienv: IndexSubst
    venv: "ValueEnv"
    tenv: TypeEnv = field(default=(), compare=False)


@dataclass(frozen=True, slots=True)
class CorecThunk:
    closure: FnClosure
    spine: tuple[IndexTerm, ...]
    arg: "Value"


Value = Union[VUnit, VPair, VInj, VPack, VRefl, VFold, VInjZ, VInjS, FnClosure, CorecThunk]
ValueEnv = tuple[tuple[str, "Value"], ...]
V_UNIT = VUnit()
V_REFL = VRefl()


def default_fuel() -> int:
    raw = os.environ.get("TORES_FUEL")
    return int(raw) if raw else DEFAULT_FUEL


def _lookup(sigma: ValueEnv, x: str):
    for name, v in reversed(sigma):
        if name == x:
            return v
    raise EvalError(f"unbound variable {x} at run time")


def _rec_type(code, tenv: TypeEnv) -> tuple[str, Type] | None:
    """The binding ``X := mu/nu`` a rec or corec body runs under, if annotated."""
    ann = code.ann
    if ann is None or ann.tvar is None or not isinstance(ann.ty, TArr):
        return None
    side = ann.ty.dom if isinstance(code, Rec) else ann.ty.cod
    head, _ = spine_head_form(side)
    return ann.tvar, type_subst_tvars(head, tenv)


class Machine:
    """One evaluation run with a shared fuel budget."""

    def __init__(self, fuel: int | None = None, trace: Callable[[str], None] | None = None):
        self.fuel = default_fuel() if fuel is None else fuel
        self.steps = 0
        self.trace = trace

    def _tick(self, rule: str, head: object, theta, sigma) -> None:
        if self.fuel <= 0:
            raise FuelExhausted(f"step budget exhausted after {self.steps} steps")
        self.fuel -= 1
        self.steps += 1
        if self.trace is not None:
            self.trace(f"{rule} {type(head).__name__} theta={len(theta)} sigma={len(sigma)}")

    def eval(self, t: Term, theta: IndexSubst, sigma: ValueEnv, eta: TypeEnv = ()) -> Value:
        self._tick("eval", t, theta, sigma)
        match t:
            case Var(x):
                return _lookup(sigma, x)
            case UnitVal():
                return V_UNIT
            case Pair(a, b):
                return VPair(self.eval(a, theta, sigma, eta), self.eval(b, theta, sigma, eta))
            case Split(p, x, y, body):
                v = self.eval(p, theta, sigma, eta)
                if not isinstance(v, VPair):
                    raise EvalError("split of a non-pair")
                return self.eval(body, theta, sigma + ((x, v.fst), (y, v.snd)), eta)
            case Inj(side, body):
                return VInj(side, self.eval(body, theta, sigma, eta))
            case Case(s, x, left, y, right):
                v = self.eval(s, theta, sigma, eta)
                if not isinstance(v, VInj):
                    raise EvalError("case of a non-injection")
                if v.side == 1:
                    return self.eval(left, theta, sigma + ((x, v.body),), eta)
                return self.eval(right, theta, sigma + ((y, v.body),), eta)
            case Pack(m, body):
                w = subst_apply(m, theta)
                if not is_ground(w):
                    raise EvalError(f"witness {w} is not ground")
                return VPack(w, self.eval(body, theta, sigma, eta))
            case Unpack(s, u, x, body):
                v = self.eval(s, theta, sigma, eta)
                if not isinstance(v, VPack):
                    raise EvalError("unpack of a non-package")
                return self.eval(body, theta + ((u, v.witness),), sigma + ((x, v.body),), eta)
            case Refl():
                return V_REFL
            case EqElim(s, subst, ctx, body):
                if not isinstance(self.eval(s, theta, sigma, eta), VRefl):
                    raise EvalError("eqelim of a non-refl value")
                if subst is None:
                    raise EvalError("eqelim without a unifier; elaborate the term first")
                try:
                    found = match_subst(tuple(ctx), tuple(subst), theta)
                except ValueError as err:
                    raise EvalError(f"eqelim: {err}") from None
                if found is None or found.ctx:
                    raise EvalError("eqelim: run-time match failure")
                eta2 = tuple((x, type_apply_isubst(ty, subst)) for x, ty in eta)
                return self.eval(body, found.subst, sigma, eta2)
            case EqAbort():
                raise EvalError("eqabort reached at run time")
            case Fold(body):
                return VFold(self.eval(body, theta, sigma, eta))
            case InjZ(body):
                return VInjZ(self.eval(body, theta, sigma, eta))
            case InjS(body):
                return VInjS(self.eval(body, theta, sigma, eta))
            case OutZ(body):
                v = self.eval(body, theta, sigma, eta)
                if not isinstance(v, VInjZ):
                    raise EvalError("out0 of a value not built by inj0")
                return v.body
            case OutS(body):
                v = self.eval(body, theta, sigma, eta)
                if not isinstance(v, VInjS):
                    raise EvalError("outs of a value not built by injs")
                return v.body
            case Lam() | Rec() | Corec() | Ind():
                return FnClosure(t, theta, sigma, eta)
            case OutNu(body):
                return self.force_out(self.eval(body, theta, sigma, eta))
            case App(fn, spine, arg):
                c = self.eval(fn, theta, sigma, eta)
                v = self.eval(arg, theta, sigma, eta)
                ground = tuple(subst_apply(m, theta) for m in spine)
                if not all(is_ground(m) for m in ground):
                    raise EvalError("index arguments are not ground")
                return self.apply(c, ground, v)
            case Annot(body, _):
                return self.eval(body, theta, sigma, eta)
        raise EvalError(f"not a term: {t!r}")

    def apply(self, c: Value, spine: tuple[IndexTerm, ...], v: Value) -> Value:
        if not isinstance(c, FnClosure):
            raise EvalError("application of a non-function")
        code, theta, sigma, eta = c.code, c.ienv, c.venv, c.tenv
        self._tick("apply", code, theta, sigma)
        match code:
            case Lam(us, x, body):
                if len(us) != len(spine):
                    raise EvalError("index spine length mismatch")
                return self.eval(body, theta + tuple(zip(us, spine)), sigma + ((x, v),), eta)
            case Rec(f, body):
                if not isinstance(v, VFold):
                    raise EvalError("rec closure applied to a non-fold value")
                bound = _rec_type(code, eta)
                eta2 = eta + (bound,) if bound else eta
                inner = self.eval(body, theta, sigma + ((f, c),), eta2)
                return self.apply(inner, spine, v.body)
            case Corec():
                return CorecThunk(c, spine, v)
            case Ind(zero, u, f, suc):
                if len(spine) != 1 or not isinstance(v, VUnit):
                    raise EvalError("ind closure needs one index and <>")
                n = spine[0]
                if isinstance(n, Zero):
                    return self.eval(zero, theta, sigma, eta)
                if isinstance(n, Suc):
                    w = self.apply(c, (n.arg,), V_UNIT)
                    return self.eval(suc, theta + ((u, n.arg),), sigma + ((f, w),), eta)
                raise EvalError(f"ind on a non-ground index {n}")
        raise EvalError(f"closure with non-function code {type(code).__name__}")

    def force_out(self, c: Value) -> Value:
        if not isinstance(c, CorecThunk):
            raise EvalError("out_nu of a value that is not a corecursive thunk")
        inner = c.closure
        code = inner.code
        self._tick("out", code, inner.ienv, inner.venv)
        if not isinstance(code, Corec):
            raise EvalError("corecursive thunk without corec code")
        bound = _rec_type(code, inner.tenv)
        eta = inner.tenv + (bound,) if bound else inner.tenv
        step = self.eval(code.body, inner.ienv, inner.venv + ((code.fname, inner),), eta)
        return self.apply(step, c.spine, c.arg)


def _guard(run):
    try:
        return run()
    except RecursionError:
        raise EvalError("evaluation exceeded the interpreter stack depth") from None


def evaluate(t: Term, theta: IndexSubst = (), sigma: ValueEnv = (), fuel: int | None = None,
             trace=None) -> Value:
    """Evaluate; raises FuelExhausted or EvalError."""
    m = Machine(fuel, trace)
    return _guard(lambda: m.eval(t, theta, sigma))


def apply_closure(c: Value, spine, v: Value, fuel: int | None = None, trace=None) -> Value:
    m = Machine(fuel, trace)
    return _guard(lambda: m.apply(c, tuple(spine), v))


def force_out(c: Value, fuel: int | None = None, trace=None) -> Value:
    m = Machine(fuel, trace)
    return _guard(lambda: m.force_out(c))


# -- value typing -------------------------------------------------------------

def value_check(v: Value, ty: Type) -> bool:
    """Whether the closed value ``v`` has the closed type ``ty``."""
    try:
        return _value_check(v, ty)
    except RecursionError:
        return False


def _value_check(v: Value, ty: Type) -> bool:
    match v:
        case VUnit():
            return isinstance(ty, TUnit)
        case VPair(a, b):
            return isinstance(ty, TProd) and _value_check(a, ty.left) and _value_check(b, ty.right)
        case VInj(side, body):
            return isinstance(ty, TSum) and _value_check(body, ty.left if side == 1 else ty.right)
        case VPack(w, body):
            return (isinstance(ty, TSig) and idx_check((), w, ty.sort)
                    and _value_check(body, type_apply_isubst(ty.body, ((ty.name, w),))))
        case VRefl():
            return isinstance(ty, TEq) and is_ground(ty.lhs) and ty.lhs == ty.rhs
        case VFold(body):
            head, args = spine_head_form(ty)
            return isinstance(head, TMu) and _value_check(body, unfold_mu(head, args))
        case VInjZ(body):
            head, args = spine_head_form(ty)
            return (isinstance(head, TRec) and len(args) >= 1 and isinstance(args[0], Zero)
                    and _value_check(body, unfold_rec_zero(head, args[1:])))
        case VInjS(body):
            head, args = spine_head_form(ty)
            return (isinstance(head, TRec) and len(args) >= 1 and isinstance(args[0], Suc)
                    and _value_check(body, unfold_rec_suc(head, args[0].arg, args[1:])))
        case FnClosure():
            static = _closure_type(v)
            return static is not None and type_alpha_eq(static, ty)
        case CorecThunk(c, spine, arg):
            return _thunk_check(c, spine, arg, ty)
    return False


def _closure_type(c: FnClosure) -> Type | None:
    """The grounded type of a well-typed closure, or None if it has none."""
    ann = c.code.ann
    if ann is None:
        return None
    theta = c.ienv
    delta = tuple((u, NAT) for u, _ in theta)
    if not subst_check((), theta, delta):
        return None
    gamma = tuple((x, type_subst_tvars(s, c.tenv)) for x, s in ann.gamma)
    static = type_subst_tvars(ann.ty, c.tenv)
    # Annotations inside the code may name enclosing rec/corec type variables.
    code = term_map_types(c.code, lambda s: type_subst_tvars(s, c.tenv)) if c.tenv else c.code
    try:
        check(delta, (), gamma, code, static)
    except CheckError:
        return None
    if not _env_check_by_name(c.venv, gamma, theta):
        return None
    return type_apply_isubst(static, theta)


def _env_check_by_name(sigma: ValueEnv, gamma: TypingCtx, theta: IndexSubst) -> bool:
    for x, s in gamma:
        try:
            v = _lookup(sigma, x)
        except EvalError:
            return False
        if not _value_check(v, type_apply_isubst(s, theta)):
            return False
    return True


def _thunk_check(c: FnClosure, spine, arg: Value, ty: Type) -> bool:
    if not isinstance(c, FnClosure) or not isinstance(c.code, Corec):
        return False
    static = _closure_type(c)
    if not isinstance(static, TArr):
        return False
    head, _ = spine_head_form(static.cod)
    if not isinstance(head, TNu) or not spine_check((), tuple(spine), static.binders):
        return False
    inst = tuple((u, m) for (u, _), m in zip(static.binders, spine))
    target = type_apply_isubst(static.cod, inst)
    return type_alpha_eq(target, ty) and _value_check(arg, type_apply_isubst(static.dom, inst))


def env_check(sigma: ValueEnv, gamma: TypingCtx) -> bool:
    """Point-wise, in order: ``sigma`` binds exactly the names of ``gamma``."""
    if [x for x, _ in sigma] != [x for x, _ in gamma]:
        return False
    return all(value_check(v, s) for (_, v), (_, s) in zip(sigma, gamma))


def deep_call(fn, stack_mb: int = 512, recursion_limit: int = 400_000):
    """Run ``fn()`` on a thread with a large stack so deep evaluations fit."""
    import sys
    import threading

    box: dict[str, object] = {}

    def target():
        try:
            box["value"] = fn()
        except BaseException as err:  # re-raised in the caller's thread
            box["error"] = err

    old_limit = sys.getrecursionlimit()
    old_size = threading.stack_size()
    sys.setrecursionlimit(max(old_limit, recursion_limit))
    threading.stack_size(stack_mb * 1024 * 1024)
    try:
        worker = threading.Thread(target=target)
        worker.start()
        worker.join()
    finally:
        threading.stack_size(old_size)
        sys.setrecursionlimit(old_limit)
    if "error" in box:
        raise box["error"]
    return box["value"]
