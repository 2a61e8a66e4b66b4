import pytest
from conftest import terms
from hypothesis import given

from lamcost.families import FamilyKind, gen_expected, gen_family
from lamcost.strategies import (find_redexes, is_beta_normal, is_whnf, plug, ri_normalize, ri_step,
                                wh_normalize, wh_split, wh_step, wh_step_rules)
from lamcost.terms import alpha_eq, exact_eq, parse

OMEGA = parse(r"(\x. x x) (\x. x x)")


# ------------------------------------------------------------- weak head steps

def test_wh_split_and_plug() -> None:
    t = parse("h a b c")
    head, ctx = wh_split(t)
    assert exact_eq(head, parse("h"))
    assert [a.name.display_name for a in ctx] == ["a", "b", "c"]
    assert exact_eq(plug(ctx, head), t)


@given(terms)
def test_plug_inverts_split(t) -> None:
    head, ctx = wh_split(t)
    assert plug(ctx, head) is t or exact_eq(plug(ctx, head), t)


def test_wh_step_examples() -> None:
    assert alpha_eq(wh_step(parse(r"(\x. x x) (\z. z)")), parse(r"(\z. z) (\z. z)"))
    # no reduction under abstraction or in argument position
    assert wh_step(parse(r"\x. (\y. y) z")) is None
    assert wh_step(parse(r"a ((\y. y) z)")) is None
    # the head redex sits under arguments
    assert alpha_eq(wh_step(parse(r"(\x. x) f a b")), parse("f a b"))


@given(terms)
def test_context_and_rule_presentations_agree(t) -> None:
    a, b = wh_step(t), wh_step_rules(t)
    assert (a is None) == (b is None)
    if a is not None:
        assert alpha_eq(a, b)


@given(terms)
def test_whnf_iff_no_step(t) -> None:
    assert is_whnf(t) == (wh_step(t) is None)


def test_wh_normalize_identity_is_already_final() -> None:
    d = wh_normalize(parse(r"\z. z"), 10)
    assert d.length == 0 and not d.exhausted


def test_wh_normalize_omega_exhausts_fuel() -> None:
    d = wh_normalize(OMEGA, 100)
    assert d.exhausted and d.length == 100
    assert alpha_eq(d.final, OMEGA)


@pytest.mark.parametrize("n", range(1, 9))
def test_ui_reaches_r_in_n_steps(n) -> None:
    d = wh_normalize(gen_family(FamilyKind.UI, n), 1000)
    assert d.length == n and not d.exhausted
    assert alpha_eq(d.final, gen_expected(FamilyKind.UI, n))
    assert all(s.position == "" for s in d.steps)


def test_wh_normalize_keeps_terms_only_under_cap() -> None:
    d = wh_normalize(gen_family(FamilyKind.UI, 6), 100, cap=100)
    kept = [s.term is not None for s in d.steps]
    assert kept[0] and not kept[-1]
    assert all((s.term is not None) == (s.size <= 100) for s in d.steps)


@given(terms)
def test_wh_normalize_ends_in_whnf(t) -> None:
    d = wh_normalize(t, 50)
    if not d.exhausted:
        assert is_whnf(d.final)


def test_fuel_must_be_positive() -> None:
    with pytest.raises(ValueError):
        wh_normalize(OMEGA, 0)
    with pytest.raises(ValueError):
        ri_normalize(OMEGA, 0)


# ------------------------------------------------------------- rightmost-innermost

def test_ri_contracts_inner_argument_first() -> None:
    t = parse(r"(\x. x) ((\y. y) z)")
    path, t1 = ri_step(t)
    assert path == "a"
    assert alpha_eq(t1, parse(r"(\x. x) z"))
    path, t2 = ri_step(t1)
    assert path == ""
    assert alpha_eq(t2, parse("z"))
    assert ri_step(t2) is None


def test_ri_reduces_under_abstraction() -> None:
    d = ri_normalize(parse(r"\a. (\x. x) a"), 10)
    assert d.length == 1 and d.steps[0].position == "b"
    assert alpha_eq(d.final, parse(r"\a. a"))


def test_ri_textual_rightmost_among_innermost() -> None:
    # two independent innermost redexes; the right one goes first
    t = parse(r"f ((\x. x) a) ((\y. y) b)")
    path, _ = ri_step(t)
    assert path == "a"


@pytest.mark.parametrize("n", range(0, 8))
def test_ri_normalizes_t_to_s(n) -> None:
    d = ri_normalize(gen_family(FamilyKind.T, n), 100)
    assert d.length == n
    assert alpha_eq(d.final, gen_expected(FamilyKind.T, n))
    assert is_beta_normal(d.final)


def test_s_is_normal() -> None:
    d = ri_normalize(gen_family(FamilyKind.S, 5), 10)
    assert d.length == 0


def test_find_redexes() -> None:
    assert find_redexes(parse(r"(\x. x) ((\y. y) z)")) == 2
    assert find_redexes(parse(r"\x. x x")) == 0


@given(terms)
def test_ri_normal_forms_are_beta_normal(t) -> None:
    d = ri_normalize(t, 40)
    if not d.exhausted:
        assert is_beta_normal(d.final)
