"""A type checker for the λΠ-calculus modulo rewriting."""

from lampi.checker import Checker, Report, RunConfig, check_string, run_check
from lampi.errors import GuardViolation, LampiError, RuleError, StepBudgetExceeded, TypingError
from lampi.parser import parse_closed_term, parse_file
from lampi.printer import print_term
from lampi.reduction import convertible, head_step, match, snf, whnf
from lampi.ruletyping import check_rule
from lampi.signature import Signature
from lampi.typecheck import check, infer

__all__ = [
    "Checker", "GuardViolation", "LampiError", "Report", "RuleError", "RunConfig",
    "Signature", "StepBudgetExceeded", "TypingError", "check", "check_rule", "check_string",
    "convertible", "head_step", "infer", "match", "parse_closed_term", "parse_file",
    "print_term", "run_check", "snf", "whnf",
]

__version__ = "0.1.0"
