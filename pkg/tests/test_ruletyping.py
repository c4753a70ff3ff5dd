from functools import lru_cache

import pytest

from instances import Pool, instances

from lampi.checker import Checker, check_string
from lampi.corpus import load_corpus
from lampi.errors import LampiError
from lampi.reduction import Budget, convertible
from lampi.ruletyping import check_pattern_shape
from lampi.parser import parse_file, resolve
from lampi.term import EMPTY_CONTEXT, Local, TypingContext, strip_guards, substitute
from lampi.typecheck import check, infer

POSITIVE = [c.path for c in load_corpus() if c.positive]

PRELUDE = """nat : Type. 0 : nat. S : nat -> nat.
vec : nat -> Type.
"""


@lru_cache(maxsize=None)
def _sig(path):
    case = next(c for c in load_corpus() if c.path == path)
    return Checker().check_file(str(case.file)).signature


def _kinds(text):
    return check_string(PRELUDE + text).error_kinds


# --- examples ------------------------------------------------------------------

def test_linear_tail_gets_a_non_identity_typing_substitution():
    (rule,) = _sig("vectors/tail_linear.dk").rules_for("tail")
    assert rule.mgts["n"] == rule.mgts["m"]
    assert rule.mgts["a"] == Local("a") and rule.mgts["l"] == Local("l")


@pytest.mark.parametrize("path", ["vectors/tail_wildcard.dk", "vectors/tail_anonymous.dk",
                                  "vectors/tail_guard.dk"])
def test_other_tail_formulations_are_accepted(path):
    assert _sig(path).rules_for("tail")


def test_well_typed_plus_rules_get_identity():
    for rule in _sig("basics/naturals.dk").rules_for("plus"):
        assert all(rule.mgts[v] == Local(v) for v in rule.mgts)


@pytest.mark.parametrize("text, kind", [
    ("C : vec 0.\ndef f : vec (S 0) -> nat.\n[ ] f C --> 0.", "UnificationClash"),
    ("C : n:nat -> vec (S n).\ndef f : n:nat -> vec n -> nat.\n[n] f n (C n) --> 0.",
     "OccursCheck"),
    ("def g : nat -> nat.\nC : n:nat -> vec (g n).\ndef f : n:nat -> vec (S n) -> nat.\n"
     "[n, m] f n (C m) --> 0.", "UnsolvableWithoutGuard"),
    ("def f : nat -> nat.\n[x, y] f x y --> x.", "ArityOverflow"),
    ("def f : nat -> nat.\n[x] f x --> vec x.", "Mismatch"),
    ("def f : (nat -> nat) -> nat.\n[g] f (x => g (S x)) --> 0.", "NotAPattern"),
    ("[x] S x --> x.", "StaticHead"),
])
def test_rule_errors(text, kind):
    assert _kinds(text) == [kind]


def test_guard_makes_an_unsolvable_constraint_acceptable():
    text = ("def g : nat -> nat.\nC : n:nat -> vec (g n).\n"
            "def f : n:nat -> vec (g n) -> nat.\n[n] f n (C {n}) --> n.")
    assert _kinds(text) == []


def test_rules_in_one_block_do_not_see_each_other():
    # the second rule would need the first to type its right-hand side
    text = ("def two : nat.\ndef k : vec two -> nat.\nv : vec (S (S 0)).\n"
            "[ ] two --> S (S 0)\n[ ] k v --> 0.")
    assert _kinds(text) == ["UnsolvableWithoutGuard"]
    split = text.replace("S (S 0)\n[", "S (S 0).\n[")
    assert _kinds(split) == []


def test_non_linear_variables_become_guards():
    report = check_string(PRELUDE + "def eq : nat -> nat -> nat.\n[x] eq x x --> 0.")
    (rule,) = report.signature.rules_for("eq")
    assert len(rule.guards) == 1 and len(rule.pattern.variables()) == 2


def test_pattern_shape_rejects_applied_non_variables():
    sig = check_string(PRELUDE + "def f : (nat -> nat) -> nat.").signature
    (block,) = parse_file("[g] f (x => g (S x)) --> 0.")
    (rule,) = resolve(block, sig.__contains__).rules
    with pytest.raises(LampiError) as e:
        check_pattern_shape(rule.lhs, rule.context, sig, rule.loc)
    assert e.value.kind == "NotAPattern" and "g (S x)" in e.value.message


# --- properties -----------------------------------------------------------------

def _source_delta(rule):
    return [(v, ty) for v, ty in rule.delta if v in rule.mgts]


def _rules_with(path, identity):
    sig = _sig(path)
    for e in sig:
        if e.is_definition:
            continue
        for r in e.rules:
            is_identity = all(r.mgts[v] == Local(v) for v in r.mgts)
            if is_identity == identity:
                yield sig, r


def test_generality_of_the_typing_substitution():
    """Every well-typed instance σ of a left side factors through τ: σ(v) ≡ σ(τ(v))."""
    checked = 0
    for path in POSITIVE:
        rules = list(_rules_with(path, identity=False))
        if not rules:
            continue
        pool = Pool(rules[0][0])
        for sig, rule in rules:
            for sigma in instances(pool, _source_delta(rule)):
                lhs = substitute(strip_guards(rule.source_lhs), sigma)
                try:
                    infer(sig, EMPTY_CONTEXT, lhs)
                except LampiError:
                    continue
                for v, tv in rule.mgts.items():
                    assert convertible(sig, sigma[v], substitute(tv, sigma), Budget(20_000)), \
                        (path, v)
                checked += 1
    assert checked > 0


@pytest.mark.parametrize("path", POSITIVE)
def test_acceptance_monotonicity(path):
    """Rules accepted with identity τ also pass the plain check: the left side is
    well-typed in Δ and the right side has its type."""
    for sig, rule in _rules_with(path, identity=True):
        ctx = TypingContext(tuple(_source_delta(rule)))
        lhs = strip_guards(rule.source_lhs)
        ty = infer(_without_own_rules(sig, rule), ctx, lhs)
        check(_without_own_rules(sig, rule), ctx, rule.rhs, ty)


def _without_own_rules(sig, rule):
    """The signature as it was when the rule's block was checked."""
    for k, event in enumerate(sig.history):
        if event[0] == "rules" and rule in event[1]:
            return sig.prefix(k)
    raise AssertionError("rule not found in history")
