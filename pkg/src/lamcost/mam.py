"""The MAM (argument stack plus global environment) and the Efficient MAM,
which splits beta transitions on whether the argument is a variable."""

from __future__ import annotations

from typing import NamedTuple

from .env import GlobalEnv, View, env_name_violations
from .machine import AuditContext, Kind, Machine, TransitionLabel, overhead_segment_check
from .searching import stack_items
from .terms import App, Fresh, Lam, Term, Var, _max_uid, exact_key, meta_subst, name_violations, rename_copy

SEARCH = TransitionLabel(Kind.SEARCH)
BETA = TransitionLabel(Kind.BETA)
BETA_V2 = TransitionLabel(Kind.BETA_V2)


class MamState(NamedTuple):
    code: Term
    stack: tuple | None
    env: GlobalEnv
    fresh: int
    size: int  # |code| + stacked codes + environment codes


class MAM(Machine):
    name = "mam"

    def compile(self, code: Term) -> MamState:
        return MamState(code, None, GlobalEnv(), _max_uid(code) + 1, code.size)

    def _beta(self, s: MamState, code: Lam, arg: Term, rest):
        env = s.env.push(code.binder, arg)
        return BETA, MamState(code.body, rest, env, s.fresh, s.size - 1)

    def step(self, s: MamState):
        code = s.code
        cls = type(code)
        if cls is App:
            return SEARCH, MamState(code.fun, (code.arg, s.stack), s.env, s.fresh, s.size - 1)
        if cls is Lam:
            if s.stack is None:
                return None
            return self._beta(s, code, *s.stack)
        target = s.env.lookup(code.name)
        if target is None:
            return None
        fresh = Fresh(s.fresh)
        copy = rename_copy(target, fresh)
        label = TransitionLabel(Kind.VAR_SUB, target.size)
        return label, MamState(copy, s.stack, s.env, fresh.next, s.size - 1 + copy.size)

    def decode_parts(self, s: MamState):
        n = s.env.length
        return [View(c, n) for c in [s.code, *stack_items(s.stack)]], s.env.resolve

    def state_size(self, s: MamState) -> int:
        return s.size

    def code_size(self, s: MamState) -> int:
        return s.code.size

    def env_length(self, s: MamState) -> int:
        return s.env.length

    def fingerprint(self, s: MamState) -> tuple:
        return (exact_key(s.code), tuple(exact_key(c) for c in stack_items(s.stack)),
                tuple((e.var, exact_key(e.code)) for e in s.env.entries()), s.fresh)

    def state_checks(self):
        return [("name", _names), ("subterm", _subterms)]

    def trace_checks(self):
        return [("search-segment", overhead_segment_check(Kind.SEARCH, "code_sizes", "search-segment")),
                ("varsub-segment", overhead_segment_check(Kind.VAR_SUB, "env_lengths", "varsub-segment"))]


def _names(s: MamState, ctx: AuditContext) -> list[str]:
    codes = [s.code, *stack_items(s.stack), *(e.code for e in s.env.entries())]
    return name_violations(codes, ctx.binders) + env_name_violations(s.env)


def _subterms(s: MamState, ctx: AuditContext) -> list[str]:
    problems = []
    for where, c in [("code", s.code), *(("stack", c) for c in stack_items(s.stack)),
                     *((f"env[{e.var}]", e.code) for e in s.env.entries())]:
        if not ctx.is_subterm(c):
            problems.append(f"{where} is not a subterm of the initial code")
    return problems


class EfficientMAM(MAM):
    """Variable arguments are substituted on the spot (BetaV1, charged one
    unit per symbol of the traversed body), so the environment never records
    a renaming; other arguments are delayed as in the MAM (BetaV2)."""

    name = "mam-eff"

    def _beta(self, s: MamState, code: Lam, arg: Term, rest):
        if type(arg) is Var:
            fresh = Fresh(s.fresh)
            body, _ = meta_subst(code.body, code.binder, arg, fresh)
            label = TransitionLabel(Kind.BETA_V1, code.body.size)
            size = s.size - code.size - 1 + body.size
            return label, MamState(body, rest, s.env, fresh.next, size)
        env = s.env.push(code.binder, arg)
        return BETA_V2, MamState(code.body, rest, env, s.fresh, s.size - 1)

    def state_checks(self):
        return super().state_checks() + [("no-renaming-entries", _no_renamings)]


def _no_renamings(s: MamState, ctx: AuditContext) -> list[str]:
    return [f"[{e.var} <- {e.code.name}] binds a variable to a variable"
            for e in s.env.entries() if type(e.code) is Var]
