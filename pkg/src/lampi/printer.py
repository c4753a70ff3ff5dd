"""Concrete-syntax printer; output re-parses to an α-equivalent term."""

from __future__ import annotations

from lampi.term import (
    App, Bound, Const, Guard, Kind, Lam, Local, Pi, Term, Type, base_name,
    has_loose, spine, subterms,
)

_RESERVED = {"Type", "def", "_", ""}


def _free_names(t: Term) -> set[str]:
    out = set()
    for s in subterms(t):
        if isinstance(s, Const):
            out.add(s.name)
        elif isinstance(s, Local):
            out.add(base_name(s.name))
    return out


def _pick(name: str, env: list[str], body: Term) -> str:
    name = base_name(name)
    if name in _RESERVED:
        name = "x"
    avoid = set(env) | _free_names(body)
    while name in avoid:
        name += "'"
    return name


def _atom(t: Term, env: list[str]) -> str:
    if isinstance(t, (App, Lam, Pi)):
        return f"({_term(t, env)})"
    return _term(t, env)


def _app(t: Term, env: list[str]) -> str:
    head, args = spine(t)
    if not args:
        return _atom(t, env)
    return " ".join([_atom(head, env)] + [_atom(a, env) for a in args])


def _term(t: Term, env: list[str]) -> str:
    match t:
        case Kind():
            return "Kind"
        case Type():
            return "Type"
        case Const(n):
            return n
        case Local(n):
            return base_name(n)
        case Bound(i):
            if i < len(env):
                return env[len(env) - 1 - i]
            return f"<loose {i}>"
        case Guard(inner):
            return "{" + _term(inner, env) + "}"
        case App():
            return _app(t, env)
        case Lam(n, ann, body):
            x = _pick(n, env, body)
            binder = x if ann is None else f"{x}:{_app(ann, env)}"
            return f"{binder} => {_term(body, env + [x])}"
        case Pi(n, dom, cod):
            if not has_loose(cod):
                return f"{_app(dom, env)} -> {_term(cod, env + ['<unused>'])}"
            x = _pick(n, env, cod)
            return f"{x}:{_app(dom, env)} -> {_term(cod, env + [x])}"
    raise TypeError(f"not a term: {t!r}")


def print_term(t: Term) -> str:
    return _term(t, [])


def print_open(t: Term, names: list[str]) -> str:
    """Print a term with loose bound variables named by ``names`` (outermost first)."""
    return _term(t, list(names))
