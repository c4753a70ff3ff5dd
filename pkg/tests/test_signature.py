import pytest

from lampi.checker import Checker
from lampi.corpus import load_corpus
from lampi.errors import RuleError, SignatureError, TypingError
from lampi.ruletyping import check_rule
from lampi.signature import DEFINABLE, STATIC, Signature
from lampi.term import EMPTY_CONTEXT, KIND, TYPE, Const, Local, arrow
from lampi.typecheck import check, check_declaration_type

NAT = Const("nat")


def _nat_sig():
    sig = Signature()
    sig.declare("nat", TYPE)
    sig.declare("0", NAT)
    sig.declare("S", arrow(NAT, NAT))
    return sig


def test_declared_symbols_are_looked_up_in_order():
    sig = _nat_sig()
    assert sig.names() == ["nat", "0", "S"]
    assert sig.type_of("S") == arrow(NAT, NAT)
    assert "plus" not in sig


def test_duplicate_declaration_is_rejected():
    sig = _nat_sig()
    with pytest.raises(SignatureError):
        sig.declare("nat", TYPE)


def test_declared_type_must_be_a_type_or_kind():
    sig = _nat_sig()
    with pytest.raises(TypingError):
        sig.declare("bad", Const("0"))


def test_kind_is_not_a_declarable_type():
    with pytest.raises(TypingError):
        Signature().declare("k", KIND)


def test_injectivity_is_staticity():
    sig = _nat_sig()
    sig.declare("pred", arrow(NAT, NAT), DEFINABLE)
    assert sig.is_injective("S") and not sig.is_injective("pred")


def test_static_symbol_cannot_head_a_rule():
    sig = _nat_sig()
    # typed against a copy where S is definable, then offered to the real one
    rule = check_rule(_definable_copy(sig), ["n"], _app("S", Local("n")), Local("n"))
    with pytest.raises(RuleError) as e:
        sig.add_rule_block([rule])
    assert e.value.kind == "StaticHead"


def _definable_copy(sig):
    out = Signature()
    for e in sig:
        out.declare(e.name, e.type, DEFINABLE if e.name == "S" else e.kind, check=False)
    return out


def _app(head, *args):
    from lampi.term import app

    return app(Const(head), *args)


def test_prefix_drops_later_entries_and_rules():
    sig = Checker().check_file(str(_case("basics/naturals.dk").file)).signature
    steps = len(sig.history)
    assert sig.prefix(steps).names() == sig.names()
    assert sig.prefix(0).names() == []
    first_rules = next(i for i, ev in enumerate(sig.history) if ev[0] == "rules")
    assert not sig.prefix(first_rules).all_rules()


def _case(path):
    return next(c for c in load_corpus() if c.path == path)


@pytest.mark.parametrize("case", [c for c in load_corpus() if c.positive], ids=lambda c: c.path)
def test_prefix_monotonicity(case):
    """Each truncation of a checked signature still accepts what it retains."""
    full = Checker().check_file(str(case.file)).signature
    history = full.history
    for k in range(len(history) + 1):
        pre = full.prefix(k)
        for e in pre:
            check_declaration_type(pre, e.type)
        if k < len(history):
            event = history[k]
            if event[0] == "decl":
                check_declaration_type(pre, full.type_of(event[1]))
            else:
                for r in event[1]:
                    if r.source_lhs == Const(r.head):   # a definition's unfolding
                        check(pre, EMPTY_CONTEXT, r.rhs, full.type_of(r.head))
                    else:
                        check_rule(pre, list(r.mgts), r.source_lhs, r.rhs, r.loc)


@pytest.mark.parametrize("case", load_corpus(), ids=lambda c: c.path)
def test_no_static_entry_has_rules(case):
    report = Checker(keep_going=True).check_file(str(case.file))
    for e in report.signature:
        if e.kind is STATIC:
            assert not e.rules, e.name
        for r in e.rules:
            assert r.head == e.name


def test_import_module_qualifies_names():
    base = Checker().check_file(str(_case("basics/naturals.dk").file)).signature
    sig = Signature()
    sig.import_module(base, "nat")
    assert "nat.plus" in sig and "plus" not in sig
    assert all(r.head == "nat.plus" for r in sig.rules_for("nat.plus"))
    # importing twice is a no-op
    assert len(sig.import_module(base, "nat")) == len(sig)
