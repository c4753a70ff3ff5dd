import itertools
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from instances import Pool, closed_terms

from lampi.checker import Checker, check_string
from lampi.corpus import load_corpus
from lampi.errors import StepBudgetExceeded
from lampi.parser import parse_closed_term
from lampi.reduction import (
    Budget, convertible, head_step, match, one_step_reducts, snf, whnf,
)
from lampi.term import Local, alpha_equal, spine, subterms, substitute

# untyped λ-calculus and the fixpoint operator do not terminate in general, and
# eps (N n) unfolds forever under strong normalization (whnf still terminates)
NON_TERMINATING = {"programs/lambda.dk", "programs/mod2.dk", "arithmetic/heyting.dk"}
BUDGET = 20_000


@lru_cache(maxsize=None)
def _loaded(path):
    case = next(c for c in load_corpus() if c.path == path)
    sig = Checker().check_file(str(case.file)).signature
    return sig, tuple(closed_terms(sig, str(case.file), Pool(sig)))


TERMINATING = [c.path for c in load_corpus() if c.positive and c.path not in NON_TERMINATING]
WHNF_TERMINATING = TERMINATING + ["arithmetic/heyting.dk"]
POSITIVE = [c.path for c in load_corpus() if c.positive]


def _t(sig, text):
    return parse_closed_term(text, sig.__contains__)


# --- examples ----------------------------------------------------------------

def test_beta_step():
    sig, _ = _loaded("basics/naturals.dk")
    assert head_step(sig, _t(sig, "(x => S x) 0")) == _t(sig, "S 0")


def test_rule_step_and_stable_head():
    sig, _ = _loaded("basics/naturals.dk")
    assert head_step(sig, _t(sig, "plus 0 (S 0)")) == _t(sig, "S 0")
    assert head_step(sig, _t(sig, "S (plus 0 0)")) is None


def test_whnf_stops_at_the_head():
    sig, _ = _loaded("basics/naturals.dk")
    assert whnf(sig, _t(sig, "plus (S 0) 0")) == _t(sig, "S (plus 0 0)")
    assert snf(sig, _t(sig, "plus (S 0) 0")) == _t(sig, "S 0")


def test_matching_forces_arguments_to_whnf():
    sig, _ = _loaded("basics/naturals.dk")
    # the second rule only applies once plus 0 (S 0) has reduced to S 0
    assert whnf(sig, _t(sig, "plus (plus 0 (S 0)) 0")) == _t(sig, "S (plus 0 0)")


def test_first_matching_rule_wins():
    report = check_string("""
        A : Type. a : A. b : A.
        def f : A -> A.
        [x] f x --> a
        [x] f x --> b.
        #WHNF f b.
    """)
    assert report.outcomes[-1].detail == "a"


def test_budget_exhaustion_is_reported():
    sig, _ = _loaded("programs/lambda.dk")
    omega = _t(sig, "app (lam (x => app x x)) (lam (x => app x x))")
    with pytest.raises(StepBudgetExceeded):
        snf(sig, omega, Budget(500))


def test_conversion_ignores_binder_names_and_annotations():
    sig, _ = _loaded("basics/naturals.dk")
    assert convertible(sig, _t(sig, "x : nat => S x"), _t(sig, "y => S y"))
    assert not convertible(sig, _t(sig, "S 0"), _t(sig, "0"))


def test_conversion_is_not_eta():
    sig, _ = _loaded("basics/naturals.dk")
    assert not convertible(sig, _t(sig, "x => S x"), _t(sig, "S"))


def test_non_linear_rule_checks_its_implicit_guard():
    report = check_string("""
        A : Type. a : A. b : A.
        def eq : A -> A -> A.
        [x] eq x x --> a.
        #WHNF eq b b.
        #WHNF eq a b.
    """, keep_going=True)
    # a repeated variable is an implicit guard: a mismatch is reported, not skipped
    assert [o.detail for o in report.outcomes if o.what == "#WHNF" and o.ok] == ["a"]
    assert report.error_kinds == ["GuardViolation"]


def test_higher_order_match_binds_a_function():
    sig, _ = _loaded("derivative/derivative.dk")
    (rule,) = sig.rules_for("D")
    sigma, pending = match(rule.pattern, _t(sig, "D (x => sin (cos x))"), sig)
    assert alpha_equal(sigma["f"], _t(sig, "x => cos x"))
    assert not pending


def test_derivative_critical_peak_rejoins():
    sig, _ = _loaded("derivative/derivative.dk")
    peak = _t(sig, "D (x => sin ((y => y) x))")
    reducts = list(one_step_reducts(sig, peak))
    assert len(reducts) >= 2
    assert len({snf(sig, r) for r in reducts}) == 1


# --- properties over corpus terms ---------------------------------------------

@pytest.mark.parametrize("path", WHNF_TERMINATING)
def test_whnf_is_idempotent(path):
    sig, terms = _loaded(path)
    for t in terms:
        w = whnf(sig, t.term, Budget(BUDGET))
        assert whnf(sig, w, Budget(BUDGET)) == w


@pytest.mark.parametrize("path", POSITIVE)
def test_convertibility_is_reflexive_and_symmetric(path):
    sig, terms = _loaded(path)
    pool = [t.term for t in terms][:60]
    for a in pool:
        assert convertible(sig, a, a, Budget(BUDGET))
    for a, b in itertools.combinations(pool[:25], 2):
        assert convertible(sig, a, b, Budget(BUDGET)) == convertible(sig, b, a, Budget(BUDGET))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(TERMINATING), st.data())
def test_convertibility_is_transitive(path, data):
    sig, terms = _loaded(path)
    # reducts of one term are all convertible, which makes triples interesting
    base = data.draw(st.sampled_from(terms)).term
    family = [base, *itertools.islice(one_step_reducts(sig, base, Budget(BUDGET)), 4),
              snf(sig, base, Budget(BUDGET))]
    other = data.draw(st.sampled_from(terms)).term
    a, b, c = data.draw(st.permutations(family + [other]))[:3]
    if convertible(sig, a, b) and convertible(sig, b, c):
        assert convertible(sig, a, c)


@pytest.mark.parametrize("path", TERMINATING)
def test_local_confluence(path):
    sig, terms = _loaded(path)
    for t in terms:
        reducts = list(one_step_reducts(sig, t.term, Budget(BUDGET)))
        forms = {snf(sig, r, Budget(BUDGET)) for r in reducts}
        assert len(forms) <= 1, (t.term, forms)


@pytest.mark.parametrize("path", POSITIVE)
def test_match_soundness(path):
    sig, terms = _loaded(path)
    matched = 0
    for t in terms:
        for s in subterms(t.term):
            if s is not t.term and any(isinstance(x, Local) for x in subterms(s)):
                continue
            head, args = spine(s)
            name = getattr(head, "name", None)
            if name is None or name not in sig:
                continue
            for rule in sig.rules_for(name):
                if len(args) != rule.arity:
                    continue
                found = match(rule.pattern, s, sig, Budget(BUDGET))
                if found is None:
                    continue
                matched += 1
                sigma, _ = found
                assert convertible(sig, substitute(rule.lhs, sigma), s, Budget(BUDGET))
    if sig.all_rules() and path not in {"minimal_logic/thm.dk"}:
        assert matched > 0
