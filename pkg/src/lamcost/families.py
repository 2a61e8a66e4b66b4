"""Term families: the two size-exploding families, a renaming-chain stress
family, and a seeded random corpus."""

from __future__ import annotations

import enum
import random

from .config import SizeCapExceeded, size_cap
from .terms import App, Lam, Term, Var, VarId, apps


class FamilyKind(enum.Enum):
    T = "t"
    S = "s"
    U = "u"
    R = "r"
    UI = "ui"
    CHAIN = "chain"


_X, _Y, _Z = VarId("x"), VarId("y"), VarId("z")


def identity() -> Term:
    return Lam(_Z, Var(_Z))


def _t(n: int) -> Term:
    t: Term = Var(_Y)
    for _ in range(n):
        t = App(Lam(_X, App(Var(_X), Var(_X))), t)
    return t


def _s(n: int) -> Term:
    s: Term = Var(_Y)
    for _ in range(n):
        s = App(s, s)
    return s


def _dup(x: VarId) -> Term:
    # \y. y x x
    return Lam(_Y, apps(Var(_Y), Var(x), Var(x)))


def _u(n: int) -> Term:
    u = Lam(_X, _dup(_X))
    for _ in range(n - 1):
        u = Lam(_X, App(u, _dup(_X)))
    return u


def _r(n: int) -> Term:
    r = identity()
    for _ in range(n):
        r = Lam(_Y, apps(Var(_Y), r, r))
    return r


def gen_chain(n: int) -> Term:
    """``(\\x1. (\\x2. ... (\\xn. xn xn ... xn) xn-1 ...) x1) I`` where the
    innermost head ``xn`` is applied to ``n`` more copies of itself."""
    if n < 1:
        raise ValueError("chain length must be at least 1")
    xs = [VarId(f"x{i}") for i in range(1, n + 1)]
    body = Var(xs[-1])
    for _ in range(n):
        body = App(body, Var(xs[-1]))
    term: Term = Lam(xs[-1], body)
    for k in range(n - 2, -1, -1):
        term = Lam(xs[k], App(term, Var(xs[k])))
    return App(term, identity())


def family_size(kind: FamilyKind, n: int) -> int:
    """Size of the n-th member by the closed forms of the recurrences."""
    if kind is FamilyKind.T:
        return 5 * n + 1
    if kind is FamilyKind.S:
        return 2 ** (n + 1) - 1
    if kind is FamilyKind.U:
        return 8 * n - 1
    if kind is FamilyKind.UI:
        return 8 * n + 2
    if kind is FamilyKind.R:
        return 6 * 2**n - 4
    # innermost body 2n+1, its binder 1, n-1 wrappers of 3, final application 3
    return 2 * n + 1 + 1 + 3 * (n - 1) + 3


def check_index(kind: FamilyKind, n: int) -> None:
    """Raise ValueError unless n is a valid index for the family."""
    if n < 0:
        raise ValueError("family index must be non-negative")
    if kind in (FamilyKind.U, FamilyKind.UI, FamilyKind.CHAIN) and n < 1:
        raise ValueError(f"family {kind.value} starts at n = 1")


def gen_family(kind: FamilyKind, n: int, cap: int | None = None) -> Term:
    check_index(kind, n)
    if kind in (FamilyKind.S, FamilyKind.R):
        limit = size_cap() if cap is None else cap
        if family_size(kind, n) > limit:
            raise SizeCapExceeded(f"{kind.value}_{n} (size explosion)", family_size(kind, n), limit)
    if kind is FamilyKind.T:
        return _t(n)
    if kind is FamilyKind.S:
        return _s(n)
    if kind is FamilyKind.U:
        return _u(n)
    if kind is FamilyKind.R:
        return _r(n)
    if kind is FamilyKind.UI:
        return App(_u(n), identity())
    return gen_chain(n)


def gen_expected(kind: FamilyKind, n: int, cap: int | None = None) -> Term:
    """The normal form each family member is known to reach: s_n for t_n,
    r_n for u_n I, the identity for the chain, and the member itself for
    the already-normal families."""
    check_index(kind, n)
    if kind in (FamilyKind.T, FamilyKind.S):
        return gen_family(FamilyKind.S, n, cap)
    if kind in (FamilyKind.UI, FamilyKind.R):
        return gen_family(FamilyKind.R, n, cap)
    if kind is FamilyKind.CHAIN:
        return identity()
    raise ValueError("u_n is not applied; use ui for its normal form")


# -------------------------------------------------------------- random corpus

_FREE_NAMES = ("a", "b", "c")


def random_term(rng: random.Random, *, max_depth: int = 12, budget: int = 24,
                closed: bool = True) -> Term:
    """A well-scoped random term of bounded depth.

    ``budget`` caps the number of internal nodes.  Closed terms only use
    bound variables; open ones also draw from a small pool of free names.
    The root is always an application, so most terms have work to do.
    """
    counter = 0
    remaining = budget

    def fresh_binder() -> VarId:
        nonlocal counter
        counter += 1
        return VarId(f"v{counter}")

    def leaf(scope: list[VarId]) -> Term:
        if scope and (closed or rng.random() < 0.75):
            return Var(rng.choice(scope))
        if closed:
            b = fresh_binder()
            return Lam(b, Var(b))
        return Var(VarId(rng.choice(_FREE_NAMES)))

    def build(depth: int, scope: list[VarId]) -> Term:
        nonlocal remaining
        if depth >= max_depth or remaining <= 0:
            return leaf(scope)
        roll = rng.random() if depth else 0.55 + 0.45 * rng.random()
        if roll < 0.3:
            return leaf(scope)
        remaining -= 1
        if roll < 0.36:
            # self-application, the seed of looping terms
            b = fresh_binder()
            return Lam(b, App(Var(b), Var(b)))
        if roll < 0.55:
            b = fresh_binder()
            return Lam(b, build(depth + 1, scope + [b]))
        if roll < 0.75:
            # a redex, so that evaluation has work to do
            b = fresh_binder()
            fun = Lam(b, build(depth + 2, scope + [b]))
            return App(fun, build(depth + 1, scope))
        return App(build(depth + 1, scope), build(depth + 1, scope))

    return build(0, [])


def corpus(seed: int, count: int = 500, *, max_depth: int = 12,
           budget: int = 32) -> list[Term]:
    """Seeded corpus alternating closed and open terms, with node budgets
    drawn uniformly up to ``budget``."""
    rng = random.Random(seed)
    return [random_term(rng, max_depth=max_depth, budget=rng.randint(2, budget),
                        closed=(i % 2 == 0))
            for i in range(count)]
