"""Bidirectional type checking for λΠ modulo rewriting.

All equality questions go through :func:`lampi.reduction.convertible` and
:func:`lampi.reduction.whnf`; nothing here compares types syntactically.
"""

from __future__ import annotations

from typing import Optional

from lampi.errors import TypingError
from lampi.printer import print_term
from lampi.reduction import convertible, whnf
from lampi.signature import Signature
from lampi.term import (
    KIND, App, Bound, Const, Guard, Kind, Lam, Local, Pi, Term, Type,
    TypingContext, EMPTY_CONTEXT, abstract, app, fresh_local, has_loose, instantiate, spine,
)

_SHOW_LIMIT = 240


def show(t: Term) -> str:
    s = print_term(t)
    return s if len(s) <= _SHOW_LIMIT else s[: _SHOW_LIMIT - 3] + "..."


def _is_sort(t: Term) -> bool:
    return isinstance(t, (Type, Kind))


def _sort_of(sig: Signature, ctx: TypingContext, t: Term, what: str) -> Term:
    s = whnf(sig, infer(sig, ctx, t))
    if not _is_sort(s):
        raise TypingError("SortError", f"{what} {show(t)} has type {show(s)}, not a sort",
                          term=t, found=s)
    return s


def _require_type(sig: Signature, ctx: TypingContext, t: Term, what: str) -> None:
    s = _sort_of(sig, ctx, t, what)
    if not isinstance(s, Type):
        raise TypingError("SortError", f"{what} {show(t)} must have sort Type, found {show(s)}",
                          term=t, found=s)


def _as_product(sig: Signature, ty: Term, subject: Term) -> Pi:
    w = whnf(sig, ty)
    if not isinstance(w, Pi):
        raise TypingError("NotAProduct",
                          f"{show(subject)} has type {show(w)}, which is not a product",
                          term=subject, found=w)
    return w


def infer(sig: Signature, ctx: TypingContext, t: Term) -> Term:
    match t:
        case Kind():
            raise TypingError("KindMisuse", "Kind cannot be used as a term", term=t)
        case Type():
            return KIND
        case Const(name):
            if name not in sig:
                raise TypingError("UnboundVariable", f"unknown symbol {name}", term=t)
            return sig.type_of(name)
        case Local(name):
            ty = ctx.lookup(name)
            if ty is None:
                raise TypingError("UnboundVariable", f"variable {show(t)} is not in context",
                                  term=t)
            return ty
        case Bound():
            raise TypingError("UnboundVariable", "loose bound variable", term=t)
        case Guard(inner):
            return infer(sig, ctx, inner)
        case App(fn, arg):
            head, args = spine(t)
            if isinstance(head, Lam) and head.ann is None:
                return _infer_redex(sig, ctx, head, args)
            prod = _as_product(sig, infer(sig, ctx, fn), fn)
            check(sig, ctx, arg, prod.dom)
            return instantiate(prod.cod, arg)
        case Lam(name, ann, body):
            if ann is None:
                raise TypingError("UnannotatedLambdaInInferMode",
                                  f"cannot infer the type of {show(t)}; annotate the binder",
                                  term=t)
            _require_type(sig, ctx, ann, "binder type")
            x = fresh_local(name)
            inner = ctx.extend(x.name, ann)
            body_ty = infer(sig, inner, instantiate(body, x))
            s = whnf(sig, infer(sig, inner, body_ty))
            if not _is_sort(s):
                raise TypingError("SortError", f"type {show(body_ty)} of a λ body is not a type",
                                  term=body_ty, found=s)
            return Pi(name, ann, abstract(body_ty, x.name))
        case Pi(name, dom, cod):
            _require_type(sig, ctx, dom, "domain")
            x = fresh_local(name)
            return _sort_of(sig, ctx.extend(x.name, dom), instantiate(cod, x), "codomain")
    raise TypeError(f"not a term: {t!r}")


def _infer_redex(sig: Signature, ctx: TypingContext, head: Lam, args: list[Term]) -> Term:
    """Type ``(x => b) a1 .. an`` with an unannotated binder as its contractum.

    The argument must itself be typable unless the body uses it, in which case
    typing the contractum already types every copy of it.
    """
    return infer(sig, ctx, _contract(sig, ctx, head, args))


def _contract(sig: Signature, ctx: TypingContext, head: Lam, args: list[Term]) -> Term:
    arg = args[0]
    try:
        infer(sig, ctx, arg)
    except TypingError as e:
        if e.kind != "UnannotatedLambdaInInferMode" or not has_loose(head.body):
            raise
    return app(instantiate(head.body, arg), *args[1:])


def check(sig: Signature, ctx: TypingContext, t: Term, expected: Term) -> None:
    if isinstance(t, Guard):
        t = t.term
    if isinstance(t, Lam):
        prod = _as_product(sig, expected, t)
        if t.ann is not None:
            _require_type(sig, ctx, t.ann, "binder type")
            if not convertible(sig, t.ann, prod.dom):
                raise TypingError(
                    "Mismatch",
                    f"binder of {show(t)} is annotated {show(whnf(sig, t.ann))} "
                    f"but {show(whnf(sig, prod.dom))} is expected",
                    term=t, expected=prod.dom, found=t.ann)
        x = fresh_local(t.name)
        check(sig, ctx.extend(x.name, prod.dom), instantiate(t.body, x),
              instantiate(prod.cod, x))
        return
    head, args = spine(t)
    if isinstance(head, Lam) and head.ann is None and args:
        check(sig, ctx, _contract(sig, ctx, head, args), expected)
        return
    found = infer(sig, ctx, t)
    if not convertible(sig, found, expected):
        we, wf = whnf(sig, expected), whnf(sig, found)
        raise TypingError("Mismatch",
                          f"{show(t)} has type {show(wf)} but {show(we)} is expected",
                          term=t, expected=we, found=wf)


def check_declaration_type(sig: Signature, ty: Term,
                           ctx: TypingContext = EMPTY_CONTEXT) -> Term:
    """Return the sort (Type or Kind) of a declared type."""
    s = whnf(sig, infer(sig, ctx, ty))
    if not _is_sort(s):
        raise TypingError("SortError", f"{show(ty)} is not a type: it has type {show(s)}",
                          term=ty, found=s)
    return s


def type_of_closed(sig: Signature, t: Term, expected: Optional[Term] = None) -> Term:
    """Infer (or check against ``expected``) a closed term; return its type."""
    if expected is None:
        return infer(sig, EMPTY_CONTEXT, t)
    check(sig, EMPTY_CONTEXT, t, expected)
    return expected
