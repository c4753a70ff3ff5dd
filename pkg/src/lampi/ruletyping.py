"""Rewrite-rule validation.

A rule ``[Δ] l --> r`` is accepted when

1. ``l`` is a Miller pattern headed by a definable symbol
   (:func:`check_pattern_shape`);
2. walking ``l`` against the head's type assigns each rule variable a type and
   collects typing constraints (:func:`infer_delta_types`);
3. the constraints have a most general unifier τ, found by first-order
   unification that only decomposes injective (static) heads (:func:`solve_mgts`);
4. under the context τ(Δ), ``τ(l)`` has some type ``T`` and ``τ(r)`` checks
   against ``T`` (:func:`check_rule`).

Guards ``{t}`` are typed as if the brackets were absent, then replaced by
fresh variables in the stored rule and checked by conversion at rewrite time.
A rule variable occurring twice is linearized the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from lampi.errors import LampiError, RuleError, SignatureError, SourceLocation
from lampi.reduction import (
    CheckedRule, PBound, PConst, PGuard, PLam, PPi, PSort, PVar, Pattern,
    PatternNode, convertible, whnf,
)
from lampi.printer import print_open
from lampi.signature import Signature
from lampi.term import (
    KIND, TYPE, App, Bound, Const, Guard, Kind, Lam, Local, Pi, Term, Type,
    TypingContext, abstract, app, base_name, compose, fresh_local, free_locals, instantiate,
    spine, strip_guards, substitute,
)
from lampi.typecheck import check, infer, show


# ---------------------------------------------------------------------------
# pattern shape

@dataclass
class LinearLhs:
    pattern: Pattern
    lhs: Term                                # guards replaced by their variables
    guards: list[tuple[Term, str]]           # (closed expected value, variable)
    guard_vars: list[str]


def _strip_annotations(t: Term) -> Term:
    match t:
        case App(f, a):
            return App(_strip_annotations(f), _strip_annotations(a))
        case Lam(n, _, body):
            return Lam(n, None, _strip_annotations(body))
        case Pi(n, d, c):
            return Pi(n, _strip_annotations(d), _strip_annotations(c))
        case Guard(inner):
            return Guard(_strip_annotations(inner))
    return t


def _wrap(t: Term, names: list[str]) -> Term:
    """λ-close ``t`` over the ``len(names)`` innermost binders it sits under."""
    for n in reversed(names):
        t = Lam(n, None, t)
    return t


def _all_bound(names: list[str]) -> list[Term]:
    k = len(names)
    return [Bound(k - 1 - i, names[i]) for i in range(k)]


def _not_pattern(msg: str, t: Term, loc, scope=()) -> RuleError:
    return RuleError(f"{msg}: {print_open(t, scope)}", loc, kind="NotAPattern")


class _Shape:
    def __init__(self, delta: set[str], avoid: set[str], loc):
        self.delta = delta
        self.avoid = set(avoid) | set(delta)
        self.loc = loc
        self.seen: set[str] = set()
        self.guards: list[tuple[Term, str]] = []
        self.guard_vars: list[str] = []

    def fresh_guard(self) -> str:
        i = len(self.guard_vars) + 1
        while f"_g{i}" in self.avoid:
            i += 1
        name = f"_g{i}"
        self.avoid.add(name)
        self.guard_vars.append(name)
        return name

    def guard(self, expected: Term, scope: list[str]) -> tuple[PatternNode, Term]:
        g = self.fresh_guard()
        k = len(scope)
        self.guards.append((_wrap(expected, scope), g))
        node = PGuard(g, tuple(range(k - 1, -1, -1)), _wrap(expected, scope))
        return node, app(Local(g), *_all_bound(scope))

    def node(self, t: Term, scope: list[str]) -> tuple[PatternNode, Term]:
        if isinstance(t, Guard):
            return self.guard(t.term, scope)
        head, args = spine(t)
        match head:
            case Local(name) if name in self.delta:
                idx = []
                for a in args:
                    if not isinstance(a, Bound):
                        raise _not_pattern(
                            f"rule variable {name} must be applied to bound variables only", t,
                            self.loc, scope)
                    idx.append(a.index)
                if len(set(idx)) != len(idx):
                    raise _not_pattern(
                        f"rule variable {name} is applied to a repeated bound variable", t,
                        self.loc, scope)
                if name in self.seen:
                    return self.guard(t, scope)
                self.seen.add(name)
                return PVar(name, tuple(idx)), t
            case Local():
                raise _not_pattern("unexpected free variable in left-hand side", t, self.loc, scope)
            case Const(name):
                return self.rigid(PConst, name, args, scope, head)
            case Bound(index):
                return self.rigid(PBound, index, args, scope, head)
            case Lam(name, _, body):
                if args:
                    raise _not_pattern("left-hand side is not β-normal", t, self.loc, scope)
                p, b = self.node(body, scope + [name])
                return PLam(name, p), Lam(name, None, b)
            case Pi(name, dom, cod) if not args:
                pd, d = self.node(dom, scope)
                pc, c = self.node(cod, scope + [name])
                return PPi(name, pd, pc), Pi(name, d, c)
            case Type() if not args:
                return PSort(TYPE), t
        raise _not_pattern("not a pattern", t, self.loc, scope)

    def rigid(self, ctor, key, args, scope, head) -> tuple[PatternNode, Term]:
        nodes, terms = [], []
        for a in args:
            p, lin = self.node(a, scope)
            nodes.append(p)
            terms.append(lin)
        return ctor(key, tuple(nodes)), app(head, *terms)


def check_pattern_shape(lhs: Term, delta, sig: Signature,
                        loc: Optional[SourceLocation] = None) -> LinearLhs:
    """Validate the Miller-pattern shape of ``lhs`` and linearize it."""
    delta = set(delta)
    lhs = _strip_annotations(lhs)
    head, args = spine(lhs)
    match head:
        case Local(name) if name in delta:
            raise _not_pattern("the head of a left-hand side cannot be a rule variable",
                               lhs, loc)
        case Lam():
            raise _not_pattern("left-hand side is not β-normal", lhs, loc)
        case Const(name):
            if name not in sig:
                raise SignatureError(f"unknown symbol {name!r}", loc)
            if not sig.is_definable(name):
                raise RuleError(f"{name!r} is static and cannot head a rewrite rule", loc,
                                kind="StaticHead")
        case _:
            raise _not_pattern("left-hand side must be headed by a symbol", lhs, loc)
    shape = _Shape(delta, set(sig.names()), loc)
    nodes, lin_args = [], []
    for a in args:
        p, lin = shape.node(a, [])
        nodes.append(p)
        lin_args.append(lin)
    missing = sorted(delta - shape.seen)
    if missing:
        raise RuleError(f"rule variable {missing[0]} occurs only inside guards or annotations",
                        loc, kind="NotAPattern")
    return LinearLhs(Pattern(head.name, tuple(nodes)), app(head, *lin_args),
                     shape.guards, shape.guard_vars)


# ---------------------------------------------------------------------------
# Δ type inference

@dataclass(frozen=True)
class Constraint:
    """``expected ≡ found`` must hold for the left side to be well typed."""

    expected: Term
    found: Term
    path: str = ""
    in_guard: bool = False

    def __str__(self) -> str:
        return f"{show(self.expected)} ≡ {show(self.found)}"


@dataclass
class DeltaTyping:
    types: dict[str, Term]                 # rule variable -> type, first-occurrence order
    constraints: list[Constraint]
    guard_types: list[Term] = field(default_factory=list)


class _Infer:
    def __init__(self, sig: Signature, delta: set[str], loc):
        self.sig = sig
        self.delta = delta
        self.loc = loc
        self.types: dict[str, Term] = {}
        self.constraints: list[Constraint] = []
        self.deferred: list[tuple[Term, Term, TypingContext, str]] = []
        self.guard_types: list[Term] = []

    def ctx(self, binders: TypingContext) -> TypingContext:
        return TypingContext(tuple(self.types.items()) + tuple(binders))

    @staticmethod
    def closed_type(ty: Term, binders: TypingContext) -> Term:
        for n, dom in reversed(tuple(binders)):
            ty = Pi(base_name(n), dom, abstract(ty, n))
        return ty

    def emit(self, expected: Term, found: Term, path: str, in_guard: bool) -> None:
        self.constraints.append(Constraint(expected, found, path, in_guard))

    def overflow(self, t: Term, ty: Term) -> RuleError:
        return RuleError(f"{show(t)} is applied to too many arguments (its type is {show(ty)})",
                         self.loc, kind="ArityOverflow")

    def spine_type(self, head: Term, head_ty: Term, args: list[Term], binders: TypingContext,
                   path: str, in_guard: bool) -> Term:
        ty = head_ty
        for i, a in enumerate(args):
            prod = whnf(self.sig, ty)
            if not isinstance(prod, Pi):
                raise self.overflow(app(head, *args[: i + 1]), head_ty)
            self.visit(a, prod.dom, binders, f"{path}.{i}", in_guard)
            ty = instantiate(prod.cod, strip_guards(a))
        return ty

    def visit(self, t: Term, expected: Term, binders: TypingContext, path: str,
              in_guard: bool) -> None:
        if isinstance(t, Guard):
            if in_guard:
                self.visit(t.term, expected, binders, path, True)
            else:
                self.deferred.append((t.term, expected, binders, path))
                self.guard_types.append(self.closed_type(expected, binders))
            return
        head, args = spine(t)
        match head:
            case Local(name) if name in self.delta and name not in self.types and not in_guard:
                ty = expected
                for a in reversed(args):
                    ty = Pi(base_name(a.name), binders.lookup(a.name), abstract(ty, a.name))
                bad = free_locals(ty) & set(binders.names())
                if bad:
                    raise RuleError(
                        f"the type of rule variable {name} depends on a bound variable it is "
                        f"not applied to", self.loc, kind="UnsolvableWithoutGuard")
                self.types[name] = ty
            case Local(name) if name in self.delta:
                if name not in self.types:
                    # first seen inside a guard; its binding occurrence comes later
                    self.deferred.append((t, expected, binders, path))
                    return
                if not in_guard:
                    # a repeated variable becomes an implicit guard
                    self.guard_types.append(self.closed_type(expected, binders))
                found = self.spine_type(head, self.types[name], args, binders, path, in_guard)
                self.emit(expected, found, path, in_guard)
            case Local(name):
                found = self.spine_type(head, binders.lookup(name), args, binders, path,
                                        in_guard)
                self.emit(expected, found, path, in_guard)
            case Const(name):
                found = self.spine_type(head, self.sig.type_of(name), args, binders, path,
                                        in_guard)
                self.emit(expected, found, path, in_guard)
            case Lam(name, _, body):
                prod = whnf(self.sig, expected)
                if not isinstance(prod, Pi):
                    raise RuleError(f"abstraction {show(t)} where {show(prod)} is expected",
                                    self.loc, kind="UnificationClash")
                x = fresh_local(name)
                self.visit(instantiate(body, x), instantiate(prod.cod, x),
                           binders.extend(x.name, prod.dom), path + ".λ", in_guard)
            case Pi(name, dom, cod):
                self.visit(dom, TYPE, binders, path + ".dom", in_guard)
                x = fresh_local(name)
                self.visit(instantiate(cod, x), expected,
                           binders.extend(x.name, strip_guards(dom)), path + ".cod", in_guard)
            case Type():
                self.emit(expected, KIND, path, in_guard)
            case _:
                raise _not_pattern("not a pattern", t, self.loc)


def infer_delta_types(sig: Signature, lhs: Term, delta,
                      loc: Optional[SourceLocation] = None) -> DeltaTyping:
    """Assign each rule variable the type expected at its first occurrence and
    collect the constraints making the rest of ``lhs`` well typed."""
    lhs = _strip_annotations(lhs)
    walker = _Infer(sig, set(delta), loc)
    head, args = spine(lhs)
    walker.spine_type(head, sig.type_of(head.name), args, TypingContext(), "", False)
    while walker.deferred:
        todo, walker.deferred = walker.deferred, []
        for t, expected, binders, path in todo:
            walker.visit(t, expected, binders, path, True)
    return DeltaTyping(walker.types, walker.constraints, walker.guard_types)


# ---------------------------------------------------------------------------
# most general typing substitution

@dataclass
class MGTSResult:
    tau: dict[str, Term]
    residual: list[Constraint]


def _clash(c: Constraint, a: Term, b: Term, loc) -> RuleError:
    return RuleError(f"cannot unify {show(a)} with {show(b)} (from {c})", loc,
                     kind="UnificationClash")


def solve_mgts(sig: Signature, constraints, delta,
               loc: Optional[SourceLocation] = None) -> MGTSResult:
    """First-order unification modulo whnf, decomposing only injective heads."""
    delta = set(delta)
    tau: dict[str, Term] = {}
    residual: list[Constraint] = []
    queue = [(c, c.expected, c.found) for c in constraints]

    def rigid_head(h: Term) -> bool:
        match h:
            case Const(n):
                return sig.is_injective(n)
            case Local(n):
                return n not in delta
        return False

    def bind(c: Constraint, v: str, t: Term) -> None:
        if v in free_locals(t):
            raise RuleError(f"occurs check: {v} := {show(t)} (from {c})", loc,
                            kind="OccursCheck")
        escaping = {n for n in free_locals(t) if n not in delta}
        if escaping:
            unsolved(c, Local(v), t)
            return
        nonlocal tau
        tau = compose({v: t}, tau)

    def unsolved(c: Constraint, a: Term, b: Term) -> None:
        if c.in_guard:
            residual.append(c)
            return
        raise RuleError(f"typing constraint {show(a)} ≡ {show(b)} cannot be solved; "
                        f"a guard is needed (from {c})", loc, kind="UnsolvableWithoutGuard")

    while queue:
        c, a, b = queue.pop(0)
        a = substitute(a, tau)
        b = substitute(b, tau)
        if convertible(sig, a, b):
            continue
        a = whnf(sig, a)
        b = whnf(sig, b)
        if isinstance(a, Local) and a.name in delta:
            bind(c, a.name, b)
            continue
        if isinstance(b, Local) and b.name in delta:
            bind(c, b.name, a)
            continue
        ha, aa = spine(a)
        hb, ab = spine(b)
        match a, b:
            case (Type() | Kind()), (Type() | Kind()):
                raise _clash(c, a, b, loc)
            case Pi(), Pi():
                x = fresh_local(a.name)
                queue[:0] = [(c, a.dom, b.dom),
                             (c, instantiate(a.cod, x), instantiate(b.cod, x))]
                continue
            case Lam(), Lam():
                x = fresh_local(a.name)
                queue.insert(0, (c, instantiate(a.body, x), instantiate(b.body, x)))
                continue
        rigid_a = rigid_head(ha) or isinstance(a, (Pi, Lam, Type, Kind))
        rigid_b = rigid_head(hb) or isinstance(b, (Pi, Lam, Type, Kind))
        if rigid_a and rigid_b:
            if isinstance(a, (Pi, Lam, Type, Kind)) or isinstance(b, (Pi, Lam, Type, Kind)):
                raise _clash(c, a, b, loc)
            if ha != hb or len(aa) != len(ab):
                raise _clash(c, a, b, loc)
            queue[:0] = [(c, x, y) for x, y in zip(aa, ab)]
            continue
        unsolved(c, a, b)
    return MGTSResult(tau, residual)


# ---------------------------------------------------------------------------
# whole-rule check

def check_rule(sig: Signature, delta, lhs: Term, rhs: Term,
               loc: Optional[SourceLocation] = None) -> CheckedRule:
    """Type-check ``[delta] lhs --> rhs`` against ``sig`` and build the stored rule."""
    delta = tuple(delta)
    shape = check_pattern_shape(lhs, delta, sig, loc)
    typing = infer_delta_types(sig, lhs, delta, loc)
    mgts = solve_mgts(sig, typing.constraints, delta, loc)
    tau = mgts.tau

    order = list(typing.types) + [v for v in delta if v not in typing.types]
    reduced = TypingContext(tuple((v, substitute(typing.types[v], tau))
                                  for v in order if v not in tau))
    typed_lhs = substitute(strip_guards(_strip_annotations(lhs)), tau)
    try:
        lhs_type = infer(sig, reduced, typed_lhs)
        check(sig, reduced, substitute(rhs, tau), lhs_type)
    except LampiError as e:
        if e.location is None:
            e.location = loc
        raise

    full = tuple((v, typing.types[v]) for v in order)
    full += tuple(zip(shape.guard_vars, typing.guard_types))
    return CheckedRule(
        head=shape.pattern.head,
        delta=TypingContext(full),
        pattern=shape.pattern,
        lhs=shape.lhs,
        rhs=rhs,
        guards=tuple(shape.guards),
        mgts={v: tau.get(v, Local(v)) for v in delta},
        source_lhs=lhs,
        loc=loc,
    )
