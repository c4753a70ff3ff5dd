"""The global context: an ordered table of static and definable symbols."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterator, Optional

from lampi.errors import RuleError, SignatureError, SourceLocation
from lampi.term import Term, rename_consts

if TYPE_CHECKING:
    from lampi.reduction import CheckedRule

DEFAULT_BUDGET = 10**7


class SymbolKind(enum.Enum):
    STATIC = "static"
    DEFINABLE = "definable"


STATIC = SymbolKind.STATIC
DEFINABLE = SymbolKind.DEFINABLE


@dataclass
class Entry:
    name: str
    type: Term
    kind: SymbolKind
    rules: list["CheckedRule"] = field(default_factory=list)
    is_definition: bool = False
    loc: Optional[SourceLocation] = None


class Signature:
    """Symbols in declaration order, each with its rewrite rules.

    Construction is sequential (``declare`` and ``add_rule_block`` mutate in
    place and return ``self``); once a file has been checked the signature is
    only read, so it can be shared between threads.
    """

    def __init__(self, step_budget: int = DEFAULT_BUDGET):
        self.step_budget = step_budget
        self._entries: dict[str, Entry] = {}
        # ("decl", name) | ("rules", tuple of rules), in order; used for prefixes
        self._log: list[tuple] = []
        self.modules: set[str] = set()

    # queries -----------------------------------------------------------
    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Entry]:
        return iter(self._entries.values())

    def names(self) -> list[str]:
        return list(self._entries)

    def entry(self, name: str) -> Entry:
        try:
            return self._entries[name]
        except KeyError:
            raise SignatureError(f"unknown symbol {name!r}") from None

    def type_of(self, name: str) -> Term:
        return self.entry(name).type

    def is_injective(self, name: str) -> bool:
        """Static symbols never head a rule, so ``f a ≡ f b`` implies ``a ≡ b``."""
        return self.entry(name).kind is STATIC

    def is_definable(self, name: str) -> bool:
        return self.entry(name).kind is DEFINABLE

    def rules_for(self, name: str) -> tuple["CheckedRule", ...]:
        return tuple(self.entry(name).rules)

    def all_rules(self) -> list["CheckedRule"]:
        return [r for e in self._entries.values() for r in e.rules]

    @property
    def history(self) -> list[tuple]:
        return list(self._log)

    # updates -----------------------------------------------------------
    def declare(self, name: str, type: Term, kind: SymbolKind = STATIC, *,
                check: bool = True, loc: Optional[SourceLocation] = None,
                is_definition: bool = False) -> "Signature":
        if name in self._entries:
            raise SignatureError(f"symbol {name!r} is already declared", loc)
        if check:
            from lampi.typecheck import check_declaration_type

            check_declaration_type(self, type)
        self._entries[name] = Entry(name, type, kind, is_definition=is_definition, loc=loc)
        self._log.append(("decl", name))
        return self

    def add_rule_block(self, rules) -> "Signature":
        """Append already-checked rules atomically."""
        rules = tuple(rules)
        for r in rules:
            e = self.entry(r.head)
            if e.kind is STATIC:
                raise RuleError(f"{r.head!r} is static and cannot head a rewrite rule",
                                r.loc, kind="StaticHead")
        for r in rules:
            self._entries[r.head].rules.append(r)
        self._log.append(("rules", rules))
        return self

    # derived signatures -------------------------------------------------
    def prefix(self, steps: int) -> "Signature":
        """The signature made of the first ``steps`` declarations/rule blocks."""
        out = Signature(self.step_budget)
        for event in self._log[:steps]:
            if event[0] == "decl":
                e = self._entries[event[1]]
                out.declare(e.name, e.type, e.kind, check=False, loc=e.loc,
                            is_definition=e.is_definition)
            else:
                out.add_rule_block(event[1])
        return out

    def import_module(self, other: "Signature", prefix: str) -> "Signature":
        """Copy ``other`` in, qualifying each of its names with ``prefix.``."""
        if prefix in self.modules:
            return self
        self.modules.add(prefix)
        local = set(other.names())

        def q(n: str) -> str:
            return f"{prefix}.{n}" if n in local else n

        for event in other._log:
            if event[0] == "decl":
                e = other._entries[event[1]]
                self.declare(q(e.name), rename_consts(e.type, q), e.kind, check=False,
                             loc=e.loc, is_definition=e.is_definition)
            else:
                self.add_rule_block(r.renamed(q) for r in event[1])
        return self
