"""Hypothesis strategies for raw terms over a few locals and constants."""

from hypothesis import strategies as st

from lampi.term import KIND, TYPE, App, Const, Guard, Local, lam, pi

LOCALS = ("x", "y", "z")
CONSTS = ("a", "b", "f")

leaves = st.one_of(
    st.sampled_from([Local(n) for n in LOCALS]),
    st.sampled_from([Const(n) for n in CONSTS]),
    st.just(TYPE),
)


def _extend(children):
    names = st.sampled_from(LOCALS)
    return st.one_of(
        st.builds(App, children, children),
        st.builds(lam, names, st.none() | children, children),
        st.builds(pi, names, children, children),
        st.builds(Guard, children),
    )


terms = st.recursive(leaves, _extend, max_leaves=12)
# Kind only ever shows up as a sort, so it is sprinkled in separately
terms_with_kind = st.recursive(leaves | st.just(KIND), _extend, max_leaves=12)

substitutions = st.dictionaries(st.sampled_from(LOCALS), terms, max_size=3)
