"""Export the rewrite rules of a signature in the old TPDB text format.

The encoding is applicative and first order: a symbol applied to at least as
many arguments as it ever takes in the exported rules becomes ``f(a1,...,an)``
with the surplus wrapped in a binary ``app``; λ becomes ``lam(x,body)`` with
``x`` declared as a variable; products become ``arr(A,B)`` or
``pi(A,lam(x,B))``. β-reduction itself is not expressible in this format and
is left out, as stated in the header comment.
"""

from __future__ import annotations

from lampi.reduction import CheckedRule
from lampi.signature import Signature
from lampi.term import (
    Bound, Const, Guard, Kind, Lam, Local, Pi, Term, Type, has_loose, spine, subterms,
)

HEADER = ("exported by lampi; higher-order terms are encoded applicatively with "
          "app/lam/arr/pi, bound variables become rule variables, beta-reduction "
          "is omitted and guards are replaced by fresh variables")


def _symbol_arities(rules: list[CheckedRule]) -> dict[str, int]:
    seen: dict[str, int] = {}

    def visit(t: Term) -> None:
        head, args = spine(t)
        if isinstance(head, Const):
            n = len(args)
            seen[head.name] = min(seen.get(head.name, n), n)
        else:
            visit_children(head)
        for a in args:
            visit(a)

    def visit_children(t: Term) -> None:
        match t:
            case Lam(_, _, body):
                visit(body)
            case Pi(_, d, c):
                visit(d)
                visit(c)
            case Guard(inner):
                visit(inner)

    for r in rules:
        visit(r.lhs)
        visit(r.rhs)
    return seen


class _Encoder:
    def __init__(self, symbols: set[str], arities: dict[str, int]):
        self.symbols = symbols
        self.arities = arities
        taken = set(symbols)
        self.ops = {}
        for op in ("app", "lam", "arr", "pi", "Type"):
            name = op
            while name in taken:
                name += "_"
            taken.add(name)
            self.ops[op] = name
        self.variables: set[str] = set()

    def var_name(self, base: str, used: set[str]) -> str:
        name = base.split("#")[0] or "x"
        if name == "_":
            name = "x"
        while name in self.symbols or name in self.ops.values() or name in used:
            name += "'"
        return name

    def rule(self, r: CheckedRule) -> str:
        used: set[str] = set()
        rename: dict[str, str] = {}
        for s in subterms(r.lhs):
            if isinstance(s, Local) and s.name not in rename:
                rename[s.name] = self.var_name(s.name, used)
                used.add(rename[s.name])
        self.variables.update(rename.values())
        lhs = self.term(r.lhs, [], rename, used)
        rhs = self.term(r.rhs, [], rename, used)
        return f"{lhs} -> {rhs}"

    def term(self, t: Term, env: list[str], rename: dict[str, str], used: set[str]) -> str:
        head, args = spine(t)
        enc = [self.term(a, env, rename, used) for a in args]
        if isinstance(head, Const):
            n = min(self.arities.get(head.name, 0), len(enc))
            out = head.name if n == 0 else f"{head.name}({','.join(enc[:n])})"
            rest = enc[n:]
        else:
            out = self.atom(head, env, rename, used)
            rest = enc
        for a in rest:
            out = f"{self.ops['app']}({out},{a})"
        return out

    def atom(self, t: Term, env, rename, used) -> str:
        match t:
            case Local(n):
                if n not in rename:
                    rename[n] = self.var_name(n, used)
                    used.add(rename[n])
                    self.variables.add(rename[n])
                return rename[n]
            case Bound(i):
                return env[len(env) - 1 - i]
            case Lam(n, _, body):
                x = self.binder(n, used)
                return f"{self.ops['lam']}({x},{self.term(body, env + [x], rename, used)})"
            case Pi(n, dom, cod):
                d = self.term(dom, env, rename, used)
                if not has_loose(cod):
                    c = self.term(cod, env + ["_"], rename, used)
                    return f"{self.ops['arr']}({d},{c})"
                x = self.binder(n, used)
                c = self.term(cod, env + [x], rename, used)
                return f"{self.ops['pi']}({d},{self.ops['lam']}({x},{c}))"
            case Guard(inner):
                return self.term(inner, env, rename, used)
            case Type():
                return self.ops["Type"]
            case Kind():
                return "Kind"
        raise TypeError(f"cannot export {t!r}")

    def binder(self, name: str, used: set[str]) -> str:
        x = self.var_name(name, used)
        used.add(x)
        self.variables.add(x)
        return x


def export_rules(rules: list[CheckedRule], symbols: set[str]) -> str:
    enc = _Encoder(symbols, _symbol_arities(rules))
    lines = [enc.rule(r) for r in rules]
    out = [f"(COMMENT {HEADER})"]
    out.append("(VAR " + " ".join(sorted(enc.variables)) + ")")
    if lines:
        out.append("(RULES")
        out.extend("  " + line for line in lines)
        out.append(")")
    else:
        out.append("(RULES )")
    return "\n".join(out) + "\n"


def export_tpdb(sig: Signature) -> str:
    """Rules in declaration order, definitions included as constant rules."""
    rules = [r for event in sig.history if event[0] == "rules" for r in event[1]]
    return export_rules(rules, set(sig.names()))
