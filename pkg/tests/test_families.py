import random

import pytest

from lamcost.config import SizeCapExceeded
from lamcost.families import (FamilyKind, check_index, corpus, family_size, gen_chain, gen_expected,
                              gen_family, identity, random_term)
from lamcost.strategies import wh_normalize
from lamcost.terms import alpha_eq, count_nodes, free_vars, is_closed, parse

SMALL = {FamilyKind.T: range(0, 10), FamilyKind.S: range(0, 12), FamilyKind.U: range(1, 10),
         FamilyKind.UI: range(1, 10), FamilyKind.R: range(0, 10), FamilyKind.CHAIN: range(1, 30)}


@pytest.mark.parametrize("kind", list(FamilyKind))
def test_closed_form_sizes_match_generated_terms(kind) -> None:
    for n in SMALL[kind]:
        assert count_nodes(gen_family(kind, n)) == family_size(kind, n)


def test_small_members() -> None:
    assert alpha_eq(gen_family(FamilyKind.T, 1), parse(r"(\x. x x) y"))
    assert alpha_eq(gen_family(FamilyKind.S, 1), parse("y y"))
    assert alpha_eq(gen_family(FamilyKind.U, 1), parse(r"\x. \y. y x x"))
    assert alpha_eq(gen_family(FamilyKind.U, 2), parse(r"\x. (\x. \y. y x x) (\y. y x x)"))
    assert alpha_eq(gen_family(FamilyKind.R, 1), parse(r"\y. y (\z. z) (\z. z)"))
    assert alpha_eq(gen_family(FamilyKind.UI, 1), parse(r"(\x. \y. y x x) (\z. z)"))


def test_chain_shapes() -> None:
    assert alpha_eq(gen_chain(1), parse(r"(\a. a a) (\z. z)"))
    assert alpha_eq(gen_chain(2), parse(r"(\a. (\b. b b b) a) (\z. z)"))
    with pytest.raises(ValueError):
        gen_chain(0)


def test_s_is_shared_dag() -> None:
    s = gen_family(FamilyKind.S, 40, cap=2**50)
    assert s.size == 2**41 - 1
    assert s.fun is s.arg


def test_closedness_of_families() -> None:
    for kind in (FamilyKind.U, FamilyKind.UI, FamilyKind.R, FamilyKind.CHAIN):
        assert is_closed(gen_family(kind, 3))
    assert free_vars(gen_family(FamilyKind.T, 3)) == free_vars(parse("y"))


def test_size_cap_guards_exploding_families() -> None:
    with pytest.raises(SizeCapExceeded):
        gen_family(FamilyKind.S, 30, cap=1000)
    with pytest.raises(SizeCapExceeded):
        gen_expected(FamilyKind.UI, 20, cap=1000)
    # the analytic size never needs the term
    assert family_size(FamilyKind.R, 200) == 6 * 2**200 - 4


def test_size_cap_from_environment(monkeypatch) -> None:
    monkeypatch.setenv("LAM_SIZE_CAP", "100")
    with pytest.raises(SizeCapExceeded):
        gen_family(FamilyKind.S, 7)
    gen_family(FamilyKind.S, 5)


def test_invalid_indices() -> None:
    with pytest.raises(ValueError):
        check_index(FamilyKind.T, -1)
    with pytest.raises(ValueError):
        gen_family(FamilyKind.UI, 0)
    with pytest.raises(ValueError):
        gen_expected(FamilyKind.U, 3)


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_chain_normalizes_to_identity(n) -> None:
    d = wh_normalize(gen_chain(n), 10 * n)
    assert not d.exhausted
    assert alpha_eq(d.final, identity())
    assert alpha_eq(gen_expected(FamilyKind.CHAIN, n), identity())


# ------------------------------------------------------------- corpus

def test_corpus_is_deterministic() -> None:
    a, b = corpus(42, 50), corpus(42, 50)
    assert all(alpha_eq(x, y) for x, y in zip(a, b))
    c = corpus(43, 50)
    assert not all(alpha_eq(x, y) for x, y in zip(a, c))


def test_corpus_alternates_closed_and_open() -> None:
    ts = corpus(7, 200)
    assert all(is_closed(t) for t in ts[0::2])
    assert any(not is_closed(t) for t in ts[1::2])


def test_random_terms_respect_budget() -> None:
    # each budget unit adds at most 3 symbols and one open position, and
    # every open position is closed by a leaf of at most 2 symbols
    rng = random.Random(3)
    for b in (1, 5, 20):
        for _ in range(200):
            t = random_term(rng, budget=b)
            assert t.size <= 3 * b + 2 * (b + 1)


def test_random_terms_shape() -> None:
    rng = random.Random(11)
    for i in range(200):
        t = random_term(rng, closed=i % 2 == 0)
        assert type(t).__name__ == "App"
        if i % 2 == 0:
            assert is_closed(t)
