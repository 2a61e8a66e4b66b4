import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lamcost.terms import App, Lam, Term, Var, VarId, free_vars

sys.setrecursionlimit(10_000)

settings.register_profile("default", deadline=None, max_examples=150,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

NAMES = ["x", "y", "z", "w"]


def _extend(children):
    return st.one_of(
        st.builds(lambda n, b: Lam(VarId(n), b), st.sampled_from(NAMES), children),
        st.builds(App, children, children),
    )


# Open terms over a tiny name pool, so shadowing and capture situations are
# common.  Independent of the package's own corpus generator.
terms = st.recursive(st.builds(lambda n: Var(VarId(n)), st.sampled_from(NAMES)), _extend, max_leaves=12)


def naive_subst(t: Term, x: VarId, s: Term, counter=[0]) -> Term:
    """Textbook recursive capture-avoiding substitution (test oracle)."""
    if type(t) is Var:
        return s if t.name == x else t
    if type(t) is App:
        return App(naive_subst(t.fun, x, s), naive_subst(t.arg, x, s))
    if t.binder == x:
        return t
    if t.binder in free_vars(s) and x in free_vars(t.body):
        counter[0] += 1
        fresh = VarId(t.binder.display_name + "'", 10_000 + counter[0])
        body = naive_subst(t.body, t.binder, Var(fresh))
        return Lam(fresh, naive_subst(body, x, s))
    return Lam(t.binder, naive_subst(t.body, x, s))


def subtrees(t: Term) -> list[Term]:
    out, stack = [], [t]
    while stack:
        n = stack.pop()
        out.append(n)
        if type(n) is Lam:
            stack.append(n.body)
        elif type(n) is App:
            stack += [n.fun, n.arg]
    return out
