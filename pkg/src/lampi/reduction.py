"""Rewriting modulo β: Miller-pattern matching, head steps, whnf/snf and the
conversion test.

Every entry point takes an optional :class:`Budget`; when omitted a fresh one
is created from ``sig.step_budget``, so the budget applies per top-level query.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence, Union

from lampi.errors import GuardViolation, SourceLocation, StepBudgetExceeded
from lampi.signature import Signature
from lampi.term import (
    App, Const, Lam, Local, Pi, Term, TypingContext, abstract,
    app, fresh_local, free_locals, instantiate, rename_consts, spine, substitute,
)


# Process-wide call counts, read by tests to confirm that typing defers every
# equality question to this module.
counters: Counter = Counter()


class Budget:
    __slots__ = ("limit", "used")

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def tick(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise StepBudgetExceeded(f"more than {self.limit} reduction steps")


def _budget(sig: Signature, budget: Optional[Budget]) -> Budget:
    return budget if budget is not None else Budget(sig.step_budget)


# ---------------------------------------------------------------------------
# patterns

@dataclass(frozen=True)
class PVar:
    """Rule variable applied to distinct pattern-bound variables.

    ``args`` are de Bruijn indices into the binders crossed so far."""

    name: str
    args: tuple[int, ...] = ()


@dataclass(frozen=True)
class PGuard:
    """Linearized position checked by conversion after matching.

    Binds ``name`` like a :class:`PVar` over every enclosing binder; ``term`` is
    the expected value, closed by λs over the same binders."""

    name: str
    args: tuple[int, ...]
    term: Term


@dataclass(frozen=True)
class PConst:
    name: str
    args: tuple["PatternNode", ...] = ()


@dataclass(frozen=True)
class PBound:
    index: int
    args: tuple["PatternNode", ...] = ()


@dataclass(frozen=True)
class PLam:
    name: str
    body: "PatternNode"


@dataclass(frozen=True)
class PPi:
    name: str
    dom: "PatternNode"
    cod: "PatternNode"


@dataclass(frozen=True)
class PSort:
    sort: Term


PatternNode = Union[PVar, PGuard, PConst, PBound, PLam, PPi, PSort]


@dataclass(frozen=True)
class Pattern:
    head: str
    args: tuple[PatternNode, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> list[str]:
        out: list[str] = []

        def walk(p):
            match p:
                case PVar(n, _) | PGuard(n, _, _):
                    out.append(n)
                case PConst(_, args) | PBound(_, args):
                    for a in args:
                        walk(a)
                case PLam(_, body):
                    walk(body)
                case PPi(_, d, c):
                    walk(d)
                    walk(c)

        for a in self.args:
            walk(a)
        return out


def _rename_pattern(p: PatternNode, q: Callable[[str], str]) -> PatternNode:
    match p:
        case PGuard(n, a, t):
            return PGuard(n, a, rename_consts(t, q))
        case PConst(n, args):
            return PConst(q(n), tuple(_rename_pattern(x, q) for x in args))
        case PBound(i, args):
            return PBound(i, tuple(_rename_pattern(x, q) for x in args))
        case PLam(n, body):
            return PLam(n, _rename_pattern(body, q))
        case PPi(n, d, c):
            return PPi(n, _rename_pattern(d, q), _rename_pattern(c, q))
    return p


@dataclass(frozen=True)
class CheckedRule:
    """A rule accepted by rule typing.

    ``lhs`` is the linearized left side as a term (guard positions replaced by
    their fresh variables), ``guards`` pairs each guard variable with the term
    it must be convertible to, ``mgts`` is the most general typing substitution
    found while checking the rule."""

    head: str
    delta: TypingContext
    pattern: Pattern
    lhs: Term
    rhs: Term
    guards: tuple[tuple[Term, str], ...] = ()
    mgts: dict = field(default_factory=dict, compare=False)
    source_lhs: Optional[Term] = field(default=None, compare=False)
    loc: Optional[SourceLocation] = field(default=None, compare=False)

    @property
    def arity(self) -> int:
        return self.pattern.arity

    def renamed(self, q: Callable[[str], str]) -> "CheckedRule":
        return CheckedRule(
            head=q(self.head),
            delta=TypingContext(tuple((n, rename_consts(t, q)) for n, t in self.delta)),
            pattern=Pattern(q(self.pattern.head),
                            tuple(_rename_pattern(a, q) for a in self.pattern.args)),
            lhs=rename_consts(self.lhs, q),
            rhs=rename_consts(self.rhs, q),
            guards=tuple((rename_consts(t, q), n) for t, n in self.guards),
            mgts={k: rename_consts(v, q) for k, v in self.mgts.items()},
            source_lhs=None if self.source_lhs is None else rename_consts(self.source_lhs, q),
            loc=self.loc,
        )

    def __str__(self) -> str:
        from lampi.printer import print_term

        names = ", ".join(self.delta.names())
        return f"[{names}] {print_term(self.lhs)} --> {print_term(self.rhs)}"


# ---------------------------------------------------------------------------
# matching

MatchResult = tuple[dict[str, Term], list[tuple[Term, str]]]


class _Matcher:
    def __init__(self, sig: Signature, budget: Budget):
        self.sig = sig
        self.budget = budget
        self.memo: dict[int, tuple[Term, Term]] = {}

    def whnf(self, t: Term) -> Term:
        hit = self.memo.get(id(t))
        if hit is not None and hit[0] is t:
            return hit[1]
        r = whnf(self.sig, t, self.budget)
        self.memo[id(t)] = (t, r)
        return r

    def bind(self, name: str, args: tuple[int, ...], t: Term, stack: list[Local],
             sigma: dict[str, Term]) -> bool:
        allowed = [stack[-1 - i] for i in args]
        crossed = {x.name for x in stack}
        escaping = (free_locals(t) & crossed) - {x.name for x in allowed}
        if escaping:
            # an escaping bound variable may disappear under reduction
            t = snf(self.sig, t, self.budget)
            if (free_locals(t) & crossed) - {x.name for x in allowed}:
                return False
        for x in reversed(allowed):
            t = Lam(x.name.split("#")[0], None, abstract(t, x.name))
        sigma[name] = t
        return True

    def go(self, p: PatternNode, t: Term, stack: list[Local], sigma: dict[str, Term],
           pending: list[tuple[Term, str]]) -> bool:
        match p:
            case PVar(name, args):
                return self.bind(name, args, t, stack, sigma)
            case PGuard(name, args, term):
                if not self.bind(name, args, t, stack, sigma):
                    return False
                pending.append((term, name))
                return True
            case PConst(name, pargs):
                head, targs = spine(self.whnf(t))
                if not (isinstance(head, Const) and head.name == name and len(targs) == len(pargs)):
                    return False
                return all(self.go(pa, ta, stack, sigma, pending) for pa, ta in zip(pargs, targs))
            case PBound(index, pargs):
                head, targs = spine(self.whnf(t))
                if head != stack[-1 - index] or len(targs) != len(pargs):
                    return False
                return all(self.go(pa, ta, stack, sigma, pending) for pa, ta in zip(pargs, targs))
            case PLam(_, body):
                w = self.whnf(t)
                if not isinstance(w, Lam):
                    return False
                x = fresh_local(w.name)
                return self.go(body, instantiate(w.body, x), stack + [x], sigma, pending)
            case PPi(_, dom, cod):
                w = self.whnf(t)
                if not isinstance(w, Pi):
                    return False
                if not self.go(dom, w.dom, stack, sigma, pending):
                    return False
                x = fresh_local(w.name)
                return self.go(cod, instantiate(w.cod, x), stack + [x], sigma, pending)
            case PSort(sort):
                return self.whnf(t) == sort
        raise TypeError(f"not a pattern node: {p!r}")

    def match_args(self, pattern: Pattern, args: Sequence[Term]) -> Optional[MatchResult]:
        sigma: dict[str, Term] = {}
        pending: list[tuple[Term, str]] = []
        for pa, ta in zip(pattern.args, args):
            if not self.go(pa, ta, [], sigma, pending):
                return None
        return sigma, pending


def match(pattern: Pattern, term: Term, sig: Signature,
          budget: Optional[Budget] = None) -> Optional[MatchResult]:
    """Match a full application ``f u1 .. un`` against ``pattern``.

    Returns the substitution and the guard checks still to perform, as
    ``(guard term, guard variable)`` pairs, or ``None``.
    """
    head, args = spine(term)
    if not (isinstance(head, Const) and head.name == pattern.head and len(args) == pattern.arity):
        return None
    return _Matcher(sig, _budget(sig, budget)).match_args(pattern, args)


def check_guards(sig: Signature, rule: CheckedRule, sigma: dict[str, Term],
                 pending: Sequence[tuple[Term, str]], budget: Budget) -> None:
    for term, name in pending:
        expected = substitute(term, sigma)
        found = sigma[name]
        if not convertible(sig, expected, found, budget):
            from lampi.printer import print_term

            where = f" (rule at {rule.loc})" if rule.loc else ""
            raise GuardViolation(
                f"guard of rule on {rule.head!r}{where} does not hold: expected "
                f"{print_term(expected)}, matched {print_term(found)}")


# ---------------------------------------------------------------------------
# reduction

def _try_rules(sig: Signature, head: Const, args: list[Term], budget: Budget,
               exact: bool = False) -> Optional[Term]:
    if head.name not in sig:
        return None
    rules = sig.entry(head.name).rules
    if not rules:
        return None
    matcher = _Matcher(sig, budget)
    for rule in rules:
        n = rule.arity
        if len(args) < n or (exact and len(args) != n):
            continue
        found = matcher.match_args(rule.pattern, args[:n])
        if found is None:
            continue
        sigma, pending = found
        check_guards(sig, rule, sigma, pending, budget)
        budget.tick()
        return app(substitute(rule.rhs, sigma), *args[n:])
    return None


def head_step(sig: Signature, term: Term, budget: Optional[Budget] = None) -> Optional[Term]:
    """One β- or rule-step at the head of ``term``, or ``None`` if it is stable."""
    budget = _budget(sig, budget)
    head, args = spine(term)
    if isinstance(head, Lam) and args:
        budget.tick()
        return app(instantiate(head.body, args[0]), *args[1:])
    if isinstance(head, Const):
        return _try_rules(sig, head, args, budget)
    return None


def whnf(sig: Signature, term: Term, budget: Optional[Budget] = None) -> Term:
    counters["whnf"] += 1
    budget = _budget(sig, budget)
    while True:
        nxt = head_step(sig, term, budget)
        if nxt is None:
            return term
        term = nxt


def snf(sig: Signature, term: Term, budget: Optional[Budget] = None) -> Term:
    budget = _budget(sig, budget)
    t = whnf(sig, term, budget)
    match t:
        case Lam(name, ann, body):
            x = fresh_local(name)
            ann2 = None if ann is None else snf(sig, ann, budget)
            return Lam(name, ann2, abstract(snf(sig, instantiate(body, x), budget), x.name))
        case Pi(name, dom, cod):
            x = fresh_local(name)
            return Pi(name, snf(sig, dom, budget),
                      abstract(snf(sig, instantiate(cod, x), budget), x.name))
        case App():
            head, args = spine(t)
            return app(head, *(snf(sig, a, budget) for a in args))
    return t


def convertible(sig: Signature, t: Term, u: Term, budget: Optional[Budget] = None) -> bool:
    """Decide ``t ≡βΓ u`` by comparing weak head normal forms.

    Complete whenever the rules together with β are confluent and terminating
    on the terms compared. λ annotations are ignored; there is no η.
    """
    counters["convertible"] += 1
    budget = _budget(sig, budget)
    return _conv(sig, t, u, budget)


def _conv(sig: Signature, t: Term, u: Term, budget: Budget) -> bool:
    if t == u:
        return True
    t = whnf(sig, t, budget)
    u = whnf(sig, u, budget)
    if t == u:
        return True
    match t, u:
        case Lam(), Lam():
            x = fresh_local(t.name)
            return _conv(sig, instantiate(t.body, x), instantiate(u.body, x), budget)
        case Pi(), Pi():
            if not _conv(sig, t.dom, u.dom, budget):
                return False
            x = fresh_local(t.name)
            return _conv(sig, instantiate(t.cod, x), instantiate(u.cod, x), budget)
        case (App() | Const() | Local()), (App() | Const() | Local()):
            th, targs = spine(t)
            uh, uargs = spine(u)
            if th != uh or len(targs) != len(uargs):
                return False
            if not isinstance(th, (Const, Local)):
                return False
            return all(_conv(sig, a, b, budget) for a, b in zip(targs, uargs))
    return False


# ---------------------------------------------------------------------------
# one-step reducts (for property tests and diagnostics)

def one_step_reducts(sig: Signature, term: Term,
                     budget: Optional[Budget] = None) -> Iterator[Term]:
    """Every term obtained by contracting one redex (β or rule) anywhere in
    ``term``. Rule redexes are found with the same matching-modulo-β as
    :func:`head_step`, so a "step" may include the reductions matching needed.
    """
    budget = _budget(sig, budget)
    head, args = spine(term)
    if isinstance(head, Lam) and args:
        budget.tick()
        yield app(instantiate(head.body, args[0]), *args[1:])
    if isinstance(head, Const) and head.name in sig:
        matcher = _Matcher(sig, budget)
        for rule in sig.entry(head.name).rules:
            if len(args) != rule.arity:
                continue
            found = matcher.match_args(rule.pattern, args)
            if found is None:
                continue
            sigma, pending = found
            check_guards(sig, rule, sigma, pending, budget)
            yield substitute(rule.rhs, sigma)
    match term:
        case App(f, a):
            for f2 in one_step_reducts(sig, f, budget):
                yield App(f2, a)
            for a2 in one_step_reducts(sig, a, budget):
                yield App(f, a2)
        case Lam(name, ann, body):
            if ann is not None:
                for ann2 in one_step_reducts(sig, ann, budget):
                    yield Lam(name, ann2, body)
            x = fresh_local(name)
            for b2 in one_step_reducts(sig, instantiate(body, x), budget):
                yield Lam(name, ann, abstract(b2, x.name))
        case Pi(name, dom, cod):
            for d2 in one_step_reducts(sig, dom, budget):
                yield Pi(name, d2, cod)
            x = fresh_local(name)
            for c2 in one_step_reducts(sig, instantiate(cod, x), budget):
                yield Pi(name, dom, abstract(c2, x.name))
