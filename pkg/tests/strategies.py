"""Hypothesis strategies for random clauses over a small signature."""
from hypothesis import strategies as st

from locred.core import App, Arith, Clause, Const, Eq, Ineq, Num, Signature, SymbolDecl, Var

SIG = Signature((
    SymbolDecl("f", "ext", 1, 1), SymbolDecl("g", "ext", 2, 1), SymbolDecl("h", "ext", 1, 2),
))
VARS = ("x", "y", "z")

leaves = st.one_of(
    st.sampled_from([Var(v) for v in VARS]),
    st.sampled_from([Const("c"), Const("d")]),
    st.integers(0, 3).map(Num),
)


def _extend(children):
    return st.one_of(
        st.builds(lambda a: App("f", (a,)), children),
        st.builds(lambda a, b: App("g", (a, b)), children, children),
        st.builds(lambda a: App("h", (a,)), children),
        st.builds(lambda a, b: Arith("+", a, b), children, children),
    )


terms = st.recursive(leaves, _extend, max_leaves=6)
atoms = st.one_of(
    st.builds(Eq, terms, terms),
    st.builds(lambda l, r: Ineq("<=", l, r), terms, terms),
)


@st.composite
def clauses(draw):
    ant = tuple(draw(st.lists(atoms, max_size=2)))
    con = tuple(draw(st.lists(atoms, min_size=1, max_size=2)))
    c = Clause((), ant, con)
    vs = tuple(sorted(c.free_vars()))
    from locred.core import with_level
    return with_level(Clause(vs, ant, con), SIG)
