"""File driver: check declarations in order, run directives, collect a report."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from lampi.errors import DirectiveFailure, LampiError, RequireError, SourceLocation
from lampi.parser import (
    DefinableDecl, Definition, Directive, RuleBlock, StaticDecl, parse_file, resolve,
)
from lampi.printer import print_term
from lampi.reduction import CheckedRule, Pattern, convertible, snf, whnf
from lampi.ruletyping import check_rule
from lampi.signature import DEFAULT_BUDGET, DEFINABLE, STATIC, Signature
from lampi.term import EMPTY_CONTEXT, Const, TypingContext
from lampi.typecheck import check, check_declaration_type, infer, show


@dataclass(frozen=True)
class RunConfig:
    files: tuple[str, ...]
    budget: int = DEFAULT_BUDGET
    quiet: bool = False
    keep_going: bool = False
    include: tuple[str, ...] = ()
    tpdb_out: Optional[str] = None


@dataclass(frozen=True)
class Outcome:
    """One processed declaration or directive."""

    location: SourceLocation
    what: str
    ok: bool
    detail: str = ""
    error_kind: Optional[str] = None

    def line(self) -> str:
        if self.ok:
            text = f"{self.location}: {self.what}"
            return f"{text} {self.detail}" if self.detail else text
        return f"{self.location}: {self.error_kind}: {self.detail}"


@dataclass
class FileReport:
    path: str
    outcomes: list[Outcome] = field(default_factory=list)
    signature: Optional[Signature] = None
    io_error: Optional[str] = None

    @property
    def errors(self) -> list[Outcome]:
        return [o for o in self.outcomes if not o.ok]

    @property
    def error_kinds(self) -> list[str]:
        return [o.error_kind for o in self.errors]

    @property
    def conv_results(self) -> list[bool]:
        return [o.ok for o in self.outcomes if o.what == "#CONV"]


@dataclass
class Report:
    files: list[FileReport] = field(default_factory=list)

    @property
    def error_count(self) -> int:
        return sum(len(f.errors) for f in self.files) + sum(1 for f in self.files if f.io_error)

    @property
    def exit_code(self) -> int:
        if any(f.io_error for f in self.files):
            return 2
        return 0 if self.error_count == 0 else 1

    def lines(self, quiet: bool = False) -> list[str]:
        out = []
        for f in self.files:
            if f.io_error:
                out.append(f"{f.path}: IOError: {f.io_error}")
                continue
            for o in f.outcomes:
                if o.ok and quiet and not o.what.startswith("#"):
                    continue
                out.append(o.line())
            n_ok = sum(1 for o in f.outcomes if o.ok)
            out.append(f"{f.path}: {n_ok} ok, {len(f.errors)} error(s)")
        status = "OK" if self.exit_code == 0 else "FAILED"
        out.append(f"{status}: {len(self.files)} file(s), {self.error_count} error(s)")
        return out

    def text(self, quiet: bool = False) -> str:
        return "\n".join(self.lines(quiet)) + "\n"


def definition_rule(name: str, body, loc=None) -> CheckedRule:
    """The unfolding rule ``name --> body`` of a definition."""
    return CheckedRule(head=name, delta=TypingContext(), pattern=Pattern(name, ()),
                       lhs=Const(name), rhs=body, mgts={}, source_lhs=Const(name), loc=loc)


class Checker:
    """Checks files into signatures; each required module is checked once."""

    def __init__(self, budget: int = DEFAULT_BUDGET, include: Sequence[str] = (),
                 keep_going: bool = False):
        self.budget = budget
        self.include = tuple(include)
        self.keep_going = keep_going
        self.modules: dict[str, FileReport] = {}
        self._loading: set[str] = set()

    # entry points -------------------------------------------------------
    def check_file(self, path: str) -> FileReport:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            return FileReport(path, io_error=e.strerror or str(e))
        return self.check_text(text, path, base_dir=str(Path(path).parent))

    def check_text(self, text: str, filename: str = "<string>",
                   sig: Optional[Signature] = None, base_dir: Optional[str] = None) -> FileReport:
        sig = sig if sig is not None else Signature(self.budget)
        report = FileReport(filename, signature=sig)
        try:
            decls = parse_file(text, filename)
        except LampiError as e:
            report.outcomes.append(self._failure(e, SourceLocation(filename, 1, 1), "parse"))
            return report
        for decl in decls:
            try:
                report.outcomes.extend(self.process(sig, decl, base_dir))
            except LampiError as e:
                report.outcomes.append(self._failure(e, decl.loc, _label(decl)))
                if not self.keep_going:
                    break
            except RecursionError:
                e = LampiError("term too deep; reduction may not terminate "
                               "(a smaller --budget or #WHNF may help)", decl.loc,
                               kind="RecursionLimit")
                report.outcomes.append(self._failure(e, decl.loc, _label(decl)))
                if not self.keep_going:
                    break
        return report

    @staticmethod
    def _failure(e: LampiError, loc: SourceLocation, what: str) -> Outcome:
        return Outcome(e.location or loc, what, False, e.message, e.kind)

    # declarations -------------------------------------------------------
    def process(self, sig: Signature, decl, base_dir: Optional[str]) -> list[Outcome]:
        if isinstance(decl, Directive) and decl.kind == "REQUIRE":
            return [self.require(sig, decl, base_dir)]
        decl = resolve(decl, sig.__contains__)
        match decl:
            case StaticDecl(name, ty, loc):
                sig.declare(name, ty, STATIC, loc=loc)
                return [Outcome(loc, f"{name} : {show(ty)}", True)]
            case DefinableDecl(name, ty, loc):
                sig.declare(name, ty, DEFINABLE, loc=loc)
                return [Outcome(loc, f"def {name} : {show(ty)}", True)]
            case Definition(name, ty, body, loc, opaque):
                if ty is None:
                    ty = infer(sig, EMPTY_CONTEXT, body)
                    check_declaration_type(sig, ty)
                else:
                    check_declaration_type(sig, ty)
                    check(sig, EMPTY_CONTEXT, body, ty)
                if opaque:
                    sig.declare(name, ty, STATIC, check=False, loc=loc, is_definition=True)
                    return [Outcome(loc, f"{name} : {show(ty)}", True, "(opaque)")]
                sig.declare(name, ty, DEFINABLE, check=False, loc=loc, is_definition=True)
                sig.add_rule_block([definition_rule(name, body, loc)])
                return [Outcome(loc, f"def {name} : {show(ty)}", True)]
            case RuleBlock(rules, loc):
                checked = [check_rule(sig, r.context, r.lhs, r.rhs, r.loc) for r in rules]
                sig.add_rule_block(checked)
                return [Outcome(r.loc, f"rule {r}", True) for r in checked]
            case Directive("CONV", (a, b), loc):
                infer(sig, EMPTY_CONTEXT, a)
                infer(sig, EMPTY_CONTEXT, b)
                if not convertible(sig, a, b):
                    raise DirectiveFailure(f"{show(a)} and {show(b)} are not convertible", loc)
                return [Outcome(loc, "#CONV", True, f"{show(a)} == {show(b)}")]
            case Directive("WHNF", (a,), loc):
                infer(sig, EMPTY_CONTEXT, a)
                return [Outcome(loc, "#WHNF", True, print_term(whnf(sig, a)))]
            case Directive("SNF", (a,), loc):
                infer(sig, EMPTY_CONTEXT, a)
                return [Outcome(loc, "#SNF", True, print_term(snf(sig, a)))]
        raise TypeError(f"unexpected declaration {decl!r}")

    def require(self, sig: Signature, decl: Directive, base_dir: Optional[str]) -> Outcome:
        name = decl.module
        if name not in self.modules:
            path = self.find_module(name, base_dir)
            if path is None:
                raise RequireError(f"module {name!r} not found on the include path", decl.loc)
            if name in self._loading:
                raise RequireError(f"circular #REQUIRE of {name!r}", decl.loc)
            self._loading.add(name)
            try:
                self.modules[name] = self.check_file(path)
            finally:
                self._loading.discard(name)
        mod = self.modules[name]
        if mod.io_error or mod.errors:
            raise RequireError(f"module {name!r} does not check", decl.loc)
        sig.import_module(mod.signature, name)
        return Outcome(decl.loc, f"#REQUIRE {name}", True)

    def find_module(self, name: str, base_dir: Optional[str]) -> Optional[str]:
        dirs = ([base_dir] if base_dir else []) + list(self.include)
        for d in dirs:
            candidate = os.path.join(d, f"{name}.dk")
            if os.path.isfile(candidate):
                return candidate
        return None


def _label(decl) -> str:
    match decl:
        case Directive(kind=k):
            return f"#{k}"
        case RuleBlock():
            return "rules"
    return getattr(decl, "name", "declaration")


def run_check(config: RunConfig) -> Report:
    checker = Checker(config.budget, config.include, config.keep_going)
    report = Report()
    for path in config.files:
        fr = checker.check_file(path)
        report.files.append(fr)
        if (fr.errors or fr.io_error) and not config.keep_going:
            break
    return report


def check_string(text: str, filename: str = "<string>", budget: int = DEFAULT_BUDGET,
                 keep_going: bool = False, include: Sequence[str] = ()) -> FileReport:
    """Check source text directly; handy for tests and demos."""
    return Checker(budget, include, keep_going).check_text(text, filename)
