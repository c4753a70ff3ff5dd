import pytest

from lampi.corpus import load_corpus
from lampi.errors import LexError, ParseError, ScopeError
from lampi.parser import (
    Definition, DefinableDecl, Directive, RuleBlock, StaticDecl, parse_closed_term,
    parse_file, parse_term, resolve, resolve_rule, tokenize,
)
from lampi.printer import print_term
from lampi.term import App, Bound, Const, Guard, Lam, Local, Pi, alpha_equal

KNOWN = {"nat", "0", "S", "plus", "vec", "A"}.__contains__


def test_tokenize_skips_comments():
    toks = tokenize("(; comment ;) nat : Type.")
    assert [t.text for t in toks if t.text] == ["nat", ":", "Type", "."]


def test_tokenize_reports_positions():
    toks = tokenize("a :\n  Type.", "f.dk")
    ty = [t for t in toks if t.text == "Type"][0]
    assert (ty.loc.file, ty.loc.line, ty.loc.column) == ("f.dk", 2, 3)


def test_unterminated_comment_is_a_lex_error():
    with pytest.raises(LexError):
        tokenize("a (; never closed")


def test_declaration_forms():
    decls = parse_file("""
        nat : Type.
        def plus : nat -> nat -> nat.
        def two : nat := S (S 0).
        half : nat := 0.
        [n] plus 0 n --> n
        [n, m] plus (S n) m --> S (plus n m).
        #CONV two, S (S 0).
        #WHNF two.
        #SNF two.
        #REQUIRE other.
    """)
    kinds = [type(d) for d in decls]
    assert kinds == [StaticDecl, DefinableDecl, Definition, Definition, RuleBlock,
                     Directive, Directive, Directive, Directive]
    assert not decls[2].opaque and decls[3].opaque
    assert len(decls[4].rules) == 2
    assert [d.kind for d in decls[5:]] == ["CONV", "WHNF", "SNF", "REQUIRE"]
    assert decls[8].module == "other"


def test_arrow_and_dependent_product():
    t = parse_closed_term("n : nat -> vec n", KNOWN)
    assert t == Pi("n", Const("nat"), App(Const("vec"), Bound(0, "n")))
    assert parse_closed_term("nat -> nat", KNOWN) == Pi("_", Const("nat"), Const("nat"))


def test_lambda_with_and_without_annotation():
    assert parse_closed_term("x => x", KNOWN) == Lam("x", None, Bound(0, "x"))
    assert parse_closed_term("x : nat => S x", KNOWN) == \
        Lam("x", Const("nat"), App(Const("S"), Bound(0, "x")))


def test_application_associates_left():
    assert parse_closed_term("plus 0 0", KNOWN) == App(App(Const("plus"), Const("0")), Const("0"))


def test_unknown_identifier_is_a_scope_error():
    with pytest.raises(ScopeError):
        parse_closed_term("plus y 0", KNOWN)


def test_missing_dot_is_a_syntax_error():
    with pytest.raises(ParseError):
        parse_file("nat : Type")


def test_rule_resolution_scopes_variables_wildcards_and_guards():
    (block,) = parse_file("[n] plus {n} (S _) --> n.")
    (rule,) = resolve(block, KNOWN).rules
    head_args = rule.lhs
    assert rule.context[0] == "n" and len(rule.context) == 2   # n plus one wildcard
    assert isinstance(head_args.fn.arg, Guard)
    assert rule.rhs == Local("n")


def test_rule_variable_absent_from_lhs_is_rejected():
    (block,) = parse_file("[n, m] plus n 0 --> m.")
    with pytest.raises(ScopeError):
        resolve(block, KNOWN)


def test_guard_outside_lhs_is_rejected():
    with pytest.raises(ScopeError):
        parse_closed_term("S {0}", KNOWN)


# --- round trip on the corpus -------------------------------------------------

def _corpus_terms():
    for case in load_corpus():
        if not case.positive:
            continue
        text = case.file.read_text()
        names: set[str] = set()
        for decl in parse_file(text, str(case.file)):
            if isinstance(decl, Directive) and decl.kind == "REQUIRE":
                continue
            decl = resolve(decl, names.__contains__)
            match decl:
                case StaticDecl(name, ty) | DefinableDecl(name, ty):
                    names.add(name)
                    yield case.path, ty, None
                case Definition(name, ty, body):
                    names.add(name)
                    if ty is not None:
                        yield case.path, ty, None
                    yield case.path, body, None
                case Directive(terms=ts):
                    for t in ts:
                        yield case.path, t, None
                case RuleBlock(rules=rules):
                    for r in rules:
                        yield case.path, r, set(names)


def _reparse_rule(rule, known):
    text = f"[{', '.join(rule.context)}] {print_term(rule.lhs)} --> {print_term(rule.rhs)}."
    (block,) = parse_file(text)
    return text, resolve_rule(block.rules[0], known.__contains__)


def test_print_parse_round_trip_on_corpus():
    count = 0
    for path, item, known in _corpus_terms():
        count += 1
        if known is None:
            once = print_term(item)
            back = resolve_term_like(item, once)
            assert alpha_equal(back, item), (path, once)
            assert print_term(back) == once, path
        else:
            text, back = _reparse_rule(item, known)
            assert alpha_equal(back.lhs, item.lhs) and alpha_equal(back.rhs, item.rhs), \
                (path, text)
            assert _reparse_rule(back, known)[0] == text
    assert count > 200


def resolve_term_like(original, text):
    from lampi.parser import resolve_term
    from lampi.term import constants

    return resolve_term(parse_term(text), constants(original).__contains__)


def test_every_corpus_file_parses():
    for case in load_corpus():
        assert parse_file(case.file.read_text(), str(case.file))
