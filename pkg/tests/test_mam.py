import pytest

from lamcost.env import GlobalEnv, env_name_violations
from lamcost.families import FamilyKind, corpus, gen_chain, gen_expected, gen_family, identity
from lamcost.machine import Kind, Status, audit_invariants, run
from lamcost.mam import MAM, EfficientMAM, MamState
from lamcost.terms import App, Var, VarId, alpha_eq, lam, parse, var

DUP_I = parse(r"(\x. x x) (\z. z)")


def kinds_costs(r):
    return [(lab.kind, lab.cost_units) for lab in r.trace.labels]


def test_mam_hand_trace() -> None:
    r = run(MAM(), DUP_I, 100)
    assert kinds_costs(r) == [(Kind.SEARCH, 1), (Kind.BETA, 1), (Kind.SEARCH, 1), (Kind.VAR_SUB, 2),
                              (Kind.BETA, 1), (Kind.VAR_SUB, 1), (Kind.VAR_SUB, 2)]
    assert r.cost_units == 9
    assert r.count(Kind.SEARCH) == 2 and r.beta_count == 2 and r.count(Kind.VAR_SUB) == 3
    assert alpha_eq(r.decoded, identity())


def test_efficient_mam_hand_trace() -> None:
    r = run(EfficientMAM(), DUP_I, 100)
    # the second beta receives the variable x, so it is substituted on the spot
    assert kinds_costs(r) == [(Kind.SEARCH, 1), (Kind.BETA_V2, 1), (Kind.SEARCH, 1), (Kind.VAR_SUB, 2),
                              (Kind.BETA_V1, 1), (Kind.VAR_SUB, 2)]
    assert r.cost_units == 8
    assert alpha_eq(r.decoded, identity())


def test_efficient_variable_argument() -> None:
    r = run(EfficientMAM(), parse(r"(\x. x x) y"), 10)
    assert kinds_costs(r) == [(Kind.SEARCH, 1), (Kind.BETA_V1, 3), (Kind.SEARCH, 1)]
    assert alpha_eq(r.decoded, parse("y y"))
    assert r.final_state.env.length == 0


def test_decode_stack_and_environment() -> None:
    x = VarId("x", 1)
    env = GlobalEnv().push(x, lam("z", var("z")))
    s = MamState(Var(x), (Var(x), None), env, 2, 4)
    assert alpha_eq(MAM().decode(s), parse(r"(\z. z) (\z. z)"))


def test_decode_chained_entries() -> None:
    x, y = VarId("x", 1), VarId("y", 2)
    env = GlobalEnv().push(x, lam("z", var("z"))).push(y, App(Var(x), Var(x)))
    s = MamState(Var(y), None, env, 3, 6)
    assert alpha_eq(MAM().decode(s), parse(r"(\z. z) (\z. z)"))


@pytest.mark.parametrize("machine", [MAM, EfficientMAM])
@pytest.mark.parametrize("n", range(1, 9))
def test_ui_linear_cost_and_result(machine, n) -> None:
    r = run(machine(), gen_family(FamilyKind.UI, n), 1000)
    assert r.count(Kind.SEARCH) == n and r.beta_count == n and r.count(Kind.VAR_SUB) == 0
    assert r.cost_units == 2 * n
    assert r.peak_state_size == 8 * n + 2
    assert alpha_eq(r.decoded, gen_expected(FamilyKind.UI, n))


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
def test_chain_varsub_counts(n) -> None:
    plain = run(MAM(), gen_chain(n), 100_000)
    eff = run(EfficientMAM(), gen_chain(n), 100_000)
    assert plain.count(Kind.VAR_SUB) == n * (n + 2)
    assert eff.count(Kind.VAR_SUB) == n + 1
    assert alpha_eq(plain.decoded, identity()) and alpha_eq(eff.decoded, identity())


def test_efficient_never_binds_variables() -> None:
    m = EfficientMAM()
    for t in [gen_chain(10), *corpus(8, 80)]:
        r = run(m, t, 2000, snapshot_stride=1)
        assert audit_invariants(m, r) == []
        assert all(type(e.code) is not Var for e in r.final_state.env.entries())


def test_plain_mam_does_bind_variables_on_chains() -> None:
    r = run(MAM(), gen_chain(4), 1000)
    assert any(type(e.code) is Var for e in r.final_state.env.entries())


def test_environment_is_well_named_on_corpus() -> None:
    m = MAM()
    for t in corpus(8, 80):
        r = run(m, t, 2000, snapshot_stride=1)
        assert audit_invariants(m, r) == []
        assert env_name_violations(r.final_state.env) == []


def test_env_restepping_reuses_log() -> None:
    m = MAM()
    r = run(m, DUP_I, 100, snapshot_stride=1)
    before = r.trace.snapshots[1][1]
    _, again = m.step(before)
    assert again.env.same_as(r.trace.snapshots[2][1].env)


def test_diverging_env_grows() -> None:
    r = run(MAM(), parse(r"(\x. x x) (\x. x x)"), 300)
    assert r.status is Status.FUEL_EXHAUSTED
    assert r.final_state.env.length == r.beta_count
