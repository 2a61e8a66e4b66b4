import pytest

from lamcost.env import GlobalEnv
from lamcost.families import FamilyKind, corpus, gen_expected, gen_family
from lamcost.machine import Kind, Status, audit_invariants, run
from lamcost.micro import MicroAM, MicroState, spine
from lamcost.terms import App, Var, VarId, alpha_eq, lam, parse, var

DUP_I = parse(r"(\x. x x) (\z. z)")


def test_hand_trace() -> None:
    r = run(MicroAM(), DUP_I, 100, snapshot_stride=1)
    # delayed beta: 1 + spine of 1; variable: |I| + spine of 1; and so on
    assert [(lab.kind, lab.cost_units, lab.search_units) for lab in r.trace.labels] == [
        (Kind.DELAYED_BETA, 2, 1), (Kind.VAR_SUB, 3, 1), (Kind.DELAYED_BETA, 2, 1),
        (Kind.VAR_SUB, 1, 0), (Kind.VAR_SUB, 2, 0)]
    assert r.cost_units == 10 and r.search_units == 3
    assert alpha_eq(r.decoded, parse(r"\z. z"))


def test_only_the_head_occurrence_is_substituted() -> None:
    r = run(MicroAM(), DUP_I, 100, snapshot_stride=1)
    after_var = r.trace.snapshots[2][1]
    head, args = spine(after_var.code)
    assert alpha_eq(head, parse(r"\z. z"))
    # the argument occurrence of x is still the variable
    assert len(args) == 1 and type(args[0]) is Var and args[0].name.display_name == "x"


def test_spine() -> None:
    head, args = spine(parse("h a b"))
    assert head.name == VarId("h") and [a.name.display_name for a in args] == ["a", "b"]


def test_decode_uses_environment() -> None:
    x = VarId("x", 1)
    env = GlobalEnv().push(x, lam("z", var("z")))
    s = MicroState(App(Var(x), Var(x)), env, 2, 5)
    assert alpha_eq(MicroAM().decode(s), parse(r"(\z. z) (\z. z)"))


@pytest.mark.parametrize("n", range(1, 8))
def test_ui_results(n) -> None:
    r = run(MicroAM(), gen_family(FamilyKind.UI, n), 1000)
    assert r.count(Kind.DELAYED_BETA) == n
    assert alpha_eq(r.decoded, gen_expected(FamilyKind.UI, n))


def test_environment_grows_by_delayed_betas_only() -> None:
    m = MicroAM()
    for t in corpus(4, 60):
        r = run(m, t, 500)
        lengths = r.trace.env_lengths
        for i, lab in enumerate(r.trace.labels):
            assert lengths[i + 1] - lengths[i] == (lab.kind is Kind.DELAYED_BETA)


def test_audits_pass_on_corpus() -> None:
    m = MicroAM()
    for t in corpus(4, 60):
        r = run(m, t, 500, snapshot_stride=1)
        assert audit_invariants(m, r) == []


def test_diverging_term() -> None:
    r = run(MicroAM(), parse(r"(\x. x x) (\x. x x)"), 40)
    assert r.status is Status.FUEL_EXHAUSTED
