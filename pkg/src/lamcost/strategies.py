"""Machine-free reference reducers.

The weak head strategy is available in three presentations (evaluation
contexts, the inductive rules, and a batch normalizer that keeps the context
as an argument list), plus a rightmost-innermost normalizer that also
reduces under abstractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import size_cap as default_size_cap
from .terms import App, Fresh, Lam, Term, Var, _max_uid, meta_subst

EvalContext = list  # arguments, innermost first: [u1, ..., uk] is <.> u1 ... uk


def wh_split(t: Term) -> tuple[Term, EvalContext]:
    """Decompose ``t`` along its left spine into a head and its arguments."""
    args = []
    while type(t) is App:
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def plug(ctx: EvalContext, t: Term) -> Term:
    for a in ctx:
        t = App(t, a)
    return t


def wh_step(t: Term, fresh: Fresh | None = None) -> Term | None:
    """One weak head step, or ``None`` when ``t`` is weak head normal."""
    head, ctx = wh_split(t)
    if type(head) is not Lam or not ctx:
        return None
    body, _ = meta_subst(head.body, head.binder, ctx[0], fresh)
    return plug(ctx[1:], body)


def wh_step_rules(t: Term) -> Term | None:
    """The same step computed by the two inductive rules (root beta, @l)."""
    if type(t) is not App:
        return None
    if type(t.fun) is Lam:
        return meta_subst(t.fun.body, t.fun.binder, t.arg)[0]
    reduct = wh_step_rules(t.fun)
    return None if reduct is None else App(reduct, t.arg)


def is_whnf(t: Term) -> bool:
    head, ctx = wh_split(t)
    return type(head) is Var or not ctx


def find_redexes(t: Term) -> int:
    n = 0
    stack = [t]
    while stack:
        node = stack.pop()
        if type(node) is App:
            if type(node.fun) is Lam:
                n += 1
            stack.append(node.fun)
            stack.append(node.arg)
        elif type(node) is Lam:
            stack.append(node.body)
    return n


def is_beta_normal(t: Term) -> bool:
    return find_redexes(t) == 0


@dataclass
class DerivationStep:
    position: str  # path from the root: f = function, a = argument, b = body
    term: Term | None  # None when the term exceeded the storage cap
    size: int


@dataclass
class Derivation:
    initial: Term
    steps: list[DerivationStep] = field(default_factory=list)
    final: Term | None = None
    exhausted: bool = False

    @property
    def length(self) -> int:
        return len(self.steps)


def wh_normalize(t: Term, fuel: int, *, keep_terms: bool = True,
                 cap: int | None = None) -> Derivation:
    """Iterate weak head steps at most ``fuel`` times.

    The context is kept as an argument stack so that each step costs the
    substitution plus the new spine, not a re-plug of the whole term.  Full
    intermediate terms are stored only when ``keep_terms`` is set and their
    size is within ``cap``.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")
    if cap is None:
        cap = default_size_cap()
    fresh = Fresh(_max_uid(t) + 1)
    d = Derivation(initial=t)
    head, ctx = wh_split(t)
    pending = ctx[::-1]  # innermost argument last
    while True:
        if type(head) is not Lam or not pending:
            break
        if d.length == fuel:
            d.exhausted = True
            break
        arg = pending.pop()
        depth = len(pending)
        head, _ = meta_subst(head.body, head.binder, arg, fresh)
        spine = []
        while type(head) is App:
            spine.append(head.arg)
            head = head.fun
        pending.extend(spine)
        if keep_terms:
            current = plug(pending[::-1], head)
            keep = current if current.size <= cap else None
            d.steps.append(DerivationStep("f" * depth, keep, current.size))
        else:
            d.steps.append(DerivationStep("f" * depth, None, 0))
    d.final = plug(pending[::-1], head)
    return d


def _rightmost_innermost(t: Term) -> str | None:
    """Path of the rightmost-innermost redex: the first redex met in a
    post-order walk that visits arguments before functions."""
    stack: list = [(t, "", False)]
    while stack:
        node, path, done = stack.pop()
        if done:
            return path
        if type(node) is App:
            if type(node.fun) is Lam:
                stack.append((node, path, True))
            stack.append((node.fun, path + "f", False))
            stack.append((node.arg, path + "a", False))
        elif type(node) is Lam:
            stack.append((node.body, path + "b", False))
    return None


def _contract_at(t: Term, path: str, fresh: Fresh) -> Term:
    spine = []
    node = t
    for step in path:
        spine.append(node)
        node = node.fun if step == "f" else node.arg if step == "a" else node.body
    new, _ = meta_subst(node.fun.body, node.fun.binder, node.arg, fresh)
    for parent, step in zip(reversed(spine), reversed(path)):
        if step == "f":
            new = App(new, parent.arg)
        elif step == "a":
            new = App(parent.fun, new)
        else:
            new = Lam(parent.binder, new)
    return new


def ri_step(t: Term, fresh: Fresh | None = None) -> tuple[str, Term] | None:
    path = _rightmost_innermost(t)
    if path is None:
        return None
    return path, _contract_at(t, path, fresh or Fresh(_max_uid(t) + 1))


def ri_normalize(t: Term, fuel: int, *, keep_terms: bool = True,
                 cap: int | None = None) -> Derivation:
    """Contract the rightmost-innermost redex (anywhere, including under
    abstractions) until the term is beta-normal or fuel runs out.

    "Rightmost" is textual: among innermost redexes the one whose
    application node starts furthest to the right in the printed term.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")
    if cap is None:
        cap = default_size_cap()
    fresh = Fresh(_max_uid(t) + 1)
    d = Derivation(initial=t)
    current = t
    while True:
        path = _rightmost_innermost(current)
        if path is None:
            break
        if d.length == fuel:
            d.exhausted = True
            break
        current = _contract_at(current, path, fresh)
        keep = current if keep_terms and current.size <= cap else None
        d.steps.append(DerivationStep(path, keep, current.size))
    d.final = current
    return d
