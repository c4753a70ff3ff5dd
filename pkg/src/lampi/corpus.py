"""The bundled example theories and their expected checking outcomes."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from lampi.checker import Checker, FileReport


@dataclass(frozen=True)
class CorpusCase:
    path: str                           # relative to the corpus root
    note: str
    error_kind: Optional[str] = None    # None: the file must check
    conv: tuple[bool, ...] = ()         # expected #CONV outcomes, in order

    @property
    def positive(self) -> bool:
        return self.error_kind is None

    @property
    def file(self) -> Path:
        return corpus_root() / self.path


CASES: tuple[CorpusCase, ...] = (
    CorpusCase("basics/naturals.dk", "naturals, addition as one rule block, two, K2",
               conv=(True, True)),
    CorpusCase("basics/sequential_plus.dk", "addition as two successive rule blocks",
               conv=(True,)),
    CorpusCase("vectors/tail_linear.dk", "tail with an ill-typed linear left side"),
    CorpusCase("vectors/tail_wildcard.dk", "tail with one wildcard", conv=(True,)),
    CorpusCase("vectors/tail_anonymous.dk", "tail with anonymous arguments", conv=(True,)),
    CorpusCase("vectors/tail_guard.dk", "tail with a guarded argument"),
    CorpusCase("derivative/derivative.dk", "higher-order pattern for the chain rule"),
    CorpusCase("minimal_logic/thm.dk", "minimal predicate logic, Thm"),
    CorpusCase("constructive/connectives.dk", "constructive connectives and quantifiers",
               conv=(True,)),
    CorpusCase("arithmetic/heyting.dk", "arithmetic as rewriting, z_r_neutral",
               conv=(True,)),
    CorpusCase("resolution/iprover.dk", "resolution refutation c1..c5"),
    CorpusCase("classical/excluded_middle.dk", "double-negation connectives, lem"),
    CorpusCase("zenon/ror.dk", "tableau lemma Ror"),
    CorpusCase("set_theory/union.dk", "membership in a union as a rule on atoms",
               conv=(True,)),
    CorpusCase("simple_types/stt.dk", "simple type theory"),
    CorpusCase("programs/lambda.dk", "untyped λ-calculus", conv=(True,)),
    CorpusCase("programs/mod2.dk", "fixpoint operator and mod2", conv=(True,)),
    CorpusCase("programs/ml.dk", "ML destructors and the freezing operator",
               conv=(True, True)),
    CorpusCase("objects/sigma.dk", "object calculus with method selection and update",
               conv=(True,)),
    CorpusCase("pts/coc.dk", "Calculus of Constructions as a pure type system"),
    CorpusCase("inductive/lists.dk", "polymorphic lists, elim_list, append", conv=(True,)),
    CorpusCase("universes/lift.dk", "cumulative universes with a guarded lift rule",
               conv=(True, True)),
    CorpusCase("negative/non_pattern.dk", "rule variable applied to a non-variable",
               error_kind="NotAPattern"),
    CorpusCase("negative/static_head.dk", "rule headed by a static symbol",
               error_kind="StaticHead"),
    CorpusCase("negative/ill_typed_rhs.dk", "right-hand side of the wrong type",
               error_kind="Mismatch"),
    CorpusCase("negative/guard_violation.dk", "well-typed term violating a guard",
               error_kind="GuardViolation"),
    CorpusCase("negative/unbound_variable.dk", "variable missing from the rule context",
               error_kind="ScopeError"),
)


def corpus_root() -> Path:
    return Path(str(resources.files("lampi") / "corpus"))


def load_corpus() -> list[CorpusCase]:
    missing = [c.path for c in CASES if not c.file.is_file()]
    if missing:
        raise FileNotFoundError(f"corpus files missing: {', '.join(missing)}")
    return list(CASES)


@dataclass(frozen=True)
class CaseResult:
    case: CorpusCase
    report: FileReport
    passed: bool
    detail: str


def evaluate(case: CorpusCase, report: FileReport) -> CaseResult:
    kinds = report.error_kinds
    if case.positive:
        if report.io_error or kinds:
            errs = "; ".join(o.line() for o in report.errors) or report.io_error
            return CaseResult(case, report, False, f"unexpected errors: {errs}")
        if case.conv and tuple(report.conv_results) != case.conv:
            return CaseResult(case, report, False,
                              f"#CONV results {report.conv_results}, expected {list(case.conv)}")
        return CaseResult(case, report, True, "ok")
    if kinds == [case.error_kind]:
        return CaseResult(case, report, True, f"failed with {case.error_kind} as expected")
    return CaseResult(case, report, False, f"expected one {case.error_kind}, got {kinds}")


def check_corpus(runner: Optional[Callable[[str], FileReport]] = None) -> list[CaseResult]:
    """Check every case (each with a fresh checker unless ``runner`` is given)."""
    run = runner or (lambda path: Checker().check_file(path))
    return [evaluate(c, run(str(c.file))) for c in load_corpus()]
