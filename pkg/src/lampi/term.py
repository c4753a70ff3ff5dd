"""Core term syntax of the λΠ-calculus.

Terms are locally nameless: variables bound by a λ or Π inside the term are
de Bruijn indices (:class:`Bound`), everything else is a named :class:`Local`
(typing-context entries, rule variables, freshly opened binders) or a
signature :class:`Const`. Display names on binders are ignored by ``==``, so
structural equality is α-equivalence.

All operations assume the terms they receive are locally closed (no loose
de Bruijn index), which is what lets substitution skip index shifting.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Optional


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        from lampi.printer import print_term

        return print_term(self)


@dataclass(frozen=True)
class Kind(Term):
    pass


@dataclass(frozen=True)
class Type(Term):
    pass


KIND = Kind()
TYPE = Type()


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class Bound(Term):
    index: int
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Local(Term):
    name: str


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Lam(Term):
    name: str = field(compare=False)
    ann: Optional[Term]
    body: Term


@dataclass(frozen=True)
class Pi(Term):
    name: str = field(compare=False)
    dom: Term
    cod: Term


@dataclass(frozen=True)
class Guard(Term):
    """Bracketed subterm ``{t}``; only ever produced inside rule left sides."""

    term: Term


Substitution = Mapping[str, Term]


# ---------------------------------------------------------------------------
# construction helpers

def app(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split ``f a1 ... an`` into ``(f, [a1, ..., an])``."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def arrow(dom: Term, cod: Term) -> Pi:
    """Non-dependent product; ``cod`` must be locally closed."""
    return Pi("_", dom, cod)


_fresh = itertools.count(1)


def base_name(name: str) -> str:
    return name.split("#", 1)[0]


def fresh_local(name: str) -> Local:
    return Local(f"{base_name(name)}#{next(_fresh)}")


def fresh_name(name: str) -> str:
    return fresh_local(name).name


# ---------------------------------------------------------------------------
# binders

def _map_bound(t: Term, on_bound: Callable[[Bound, int], Term],
               on_local: Callable[[Local, int], Term], depth: int = 0) -> Term:
    match t:
        case Bound():
            return on_bound(t, depth)
        case Local():
            return on_local(t, depth)
        case App(f, a):
            f2 = _map_bound(f, on_bound, on_local, depth)
            a2 = _map_bound(a, on_bound, on_local, depth)
            return t if f2 is f and a2 is a else App(f2, a2)
        case Lam(n, ann, body):
            ann2 = None if ann is None else _map_bound(ann, on_bound, on_local, depth)
            body2 = _map_bound(body, on_bound, on_local, depth + 1)
            return t if ann2 is ann and body2 is body else Lam(n, ann2, body2)
        case Pi(n, dom, cod):
            dom2 = _map_bound(dom, on_bound, on_local, depth)
            cod2 = _map_bound(cod, on_bound, on_local, depth + 1)
            return t if dom2 is dom and cod2 is cod else Pi(n, dom2, cod2)
        case Guard(inner):
            inner2 = _map_bound(inner, on_bound, on_local, depth)
            return t if inner2 is inner else Guard(inner2)
        case _:
            return t


def _keep_local(v: Local, depth: int) -> Term:
    return v


def instantiate(body: Term, arg: Term) -> Term:
    """Replace the outermost bound variable of ``body`` by ``arg``."""

    def on_bound(b: Bound, depth: int) -> Term:
        if b.index == depth:
            return arg
        if b.index > depth:
            return Bound(b.index - 1, b.name)
        return b

    return _map_bound(body, on_bound, _keep_local)


def abstract(t: Term, name: str) -> Term:
    """Turn free occurrences of ``Local(name)`` into the outermost bound variable.

    Inverse of :func:`instantiate` with a local; the result is a binder body.
    """

    def on_bound(b: Bound, depth: int) -> Term:
        return Bound(b.index + 1, b.name) if b.index >= depth else b

    def on_local(v: Local, depth: int) -> Term:
        return Bound(depth, base_name(name)) if v.name == name else v

    return _map_bound(t, on_bound, on_local)


def open_binder(body: Term, hint: str) -> tuple[Local, Term]:
    x = fresh_local(hint)
    return x, instantiate(body, x)


def lam(name: str, ann: Optional[Term], body: Term) -> Lam:
    """Build ``name:ann => body`` where ``body`` mentions ``Local(name)``."""
    return Lam(base_name(name), ann, abstract(body, name))


def pi(name: str, dom: Term, cod: Term) -> Pi:
    return Pi(base_name(name), dom, abstract(cod, name))


def has_loose(t: Term, index: int = 0) -> bool:
    """Does bound variable ``index`` (relative to ``t``) occur in ``t``?"""
    match t:
        case Bound(i):
            return i == index
        case App(f, a):
            return has_loose(f, index) or has_loose(a, index)
        case Lam(_, ann, body):
            return (ann is not None and has_loose(ann, index)) or has_loose(body, index + 1)
        case Pi(_, dom, cod):
            return has_loose(dom, index) or has_loose(cod, index + 1)
        case Guard(inner):
            return has_loose(inner, index)
        case _:
            return False


# ---------------------------------------------------------------------------
# substitution

def substitute(t: Term, s: Substitution) -> Term:
    """Simultaneous replacement of locals by the (locally closed) terms in ``s``.

    Capture cannot happen: binders are indices and the inserted terms carry no
    loose index.
    """
    if not s:
        return t

    def on_local(v: Local, depth: int) -> Term:
        return s.get(v.name, v)

    return _map_bound(t, lambda b, d: b, on_local)


def compose(outer: Substitution, inner: Substitution) -> dict[str, Term]:
    """``compose(s1, s2)`` behaves like applying ``s2`` then ``s1``."""
    out = {k: substitute(v, outer) for k, v in inner.items()}
    for k, v in outer.items():
        out.setdefault(k, v)
    return out


def alpha_equal(t: Term, u: Term) -> bool:
    return t == u


# ---------------------------------------------------------------------------
# traversals

def subterms(t: Term) -> Iterator[Term]:
    yield t
    match t:
        case App(f, a):
            yield from subterms(f)
            yield from subterms(a)
        case Lam(_, ann, body):
            if ann is not None:
                yield from subterms(ann)
            yield from subterms(body)
        case Pi(_, dom, cod):
            yield from subterms(dom)
            yield from subterms(cod)
        case Guard(inner):
            yield from subterms(inner)


def free_locals(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Local)}


def constants(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Const)}


def count_kind(t: Term) -> int:
    return sum(1 for s in subterms(t) if isinstance(s, Kind))


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def strip_guards(t: Term) -> Term:
    match t:
        case Guard(inner):
            return strip_guards(inner)
        case App(f, a):
            return App(strip_guards(f), strip_guards(a))
        case Lam(n, ann, body):
            return Lam(n, None if ann is None else strip_guards(ann), strip_guards(body))
        case Pi(n, dom, cod):
            return Pi(n, strip_guards(dom), strip_guards(cod))
        case _:
            return t


def rename_consts(t: Term, rename: Callable[[str], str]) -> Term:
    match t:
        case Const(n):
            return Const(rename(n))
        case App(f, a):
            return App(rename_consts(f, rename), rename_consts(a, rename))
        case Lam(n, ann, body):
            return Lam(n, None if ann is None else rename_consts(ann, rename),
                       rename_consts(body, rename))
        case Pi(n, dom, cod):
            return Pi(n, rename_consts(dom, rename), rename_consts(cod, rename))
        case Guard(inner):
            return Guard(rename_consts(inner, rename))
        case _:
            return t


# ---------------------------------------------------------------------------
# typing contexts

class TypingContext:
    """Ordered, persistent list of ``(local name, type)`` pairs."""

    __slots__ = ("_entries", "_index")

    def __init__(self, entries: tuple[tuple[str, Term], ...] = ()):
        self._entries = entries
        self._index = {n: ty for n, ty in entries}
        if len(self._index) != len(entries):
            raise ValueError("duplicate names in typing context")

    def extend(self, name: str, ty: Term) -> "TypingContext":
        if name in self._index:
            raise ValueError(f"duplicate name {name!r} in typing context")
        return TypingContext(self._entries + ((name, ty),))

    def lookup(self, name: str) -> Optional[Term]:
        return self._index.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def names(self) -> list[str]:
        return [n for n, _ in self._entries]

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}: {ty}" for n, ty in self._entries)
        return f"TypingContext[{inner}]"


EMPTY_CONTEXT = TypingContext()
