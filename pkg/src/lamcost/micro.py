"""The micro-substituting machine: a global environment and no search
structure.  Each step walks the left spine of the whole code again to find
the head, and substitutes only the head occurrence of a variable."""

from __future__ import annotations

from typing import NamedTuple

from .env import GlobalEnv, View, env_name_violations
from .machine import AuditContext, Kind, Machine, TransitionLabel, Trace, Violation, segments
from .terms import App, Fresh, Lam, Term, _max_uid, exact_key, name_violations, rename_copy


class MicroState(NamedTuple):
    code: Term
    env: GlobalEnv
    fresh: int
    size: int  # |code| + environment codes


def spine(code: Term) -> tuple[Term, list[Term]]:
    """Head and arguments (leftmost first) of the code's left spine."""
    args = []
    while type(code) is App:
        args.append(code.arg)
        code = code.fun
    args.reverse()
    return code, args


def _rebuild(head: Term, args: list[Term]) -> Term:
    for a in args:
        head = App(head, a)
    return head


class MicroAM(Machine):
    """Costs: a delayed beta is 1 and a variable substitution is the size of
    the copied code, each plus the length of the spine walked to find the
    head (reported separately as ``search_units``)."""

    name = "micro"

    def compile(self, code: Term) -> MicroState:
        return MicroState(code, GlobalEnv(), _max_uid(code) + 1, code.size)

    def step(self, s: MicroState):
        head, args = spine(s.code)
        walked = len(args)
        if type(head) is Lam:
            if not args:
                return None
            env = s.env.push(head.binder, args[0])
            code = _rebuild(head.body, args[1:])
            label = TransitionLabel(Kind.DELAYED_BETA, 1 + walked, walked)
            return label, MicroState(code, env, s.fresh, s.size - 2)
        target = s.env.lookup(head.name)
        if target is None:
            return None
        fresh = Fresh(s.fresh)
        copy = rename_copy(target, fresh)
        label = TransitionLabel(Kind.VAR_SUB, target.size + walked, walked)
        return label, MicroState(_rebuild(copy, args), s.env, fresh.next, s.size - 1 + copy.size)

    def decode_parts(self, s: MicroState):
        return [View(s.code, s.env.length)], s.env.resolve

    def state_size(self, s: MicroState) -> int:
        return s.size

    def code_size(self, s: MicroState) -> int:
        return s.code.size

    def env_length(self, s: MicroState) -> int:
        return s.env.length

    def fingerprint(self, s: MicroState) -> tuple:
        return (exact_key(s.code), tuple((e.var, exact_key(e.code)) for e in s.env.entries()), s.fresh)

    def state_checks(self):
        return [("name", _names), ("subterm", _subterms)]

    def trace_checks(self):
        return [("varsub-segment", _varsub_segments), ("env-length", _env_growth)]


def _names(s: MicroState, ctx: AuditContext) -> list[str]:
    return name_violations([s.code, *(e.code for e in s.env.entries())], ctx.binders) + env_name_violations(s.env)


def _subterms(s: MicroState, ctx: AuditContext) -> list[str]:
    # The code as a whole is an applied body, not a subterm; its head and
    # arguments are.
    head, args = spine(s.code)
    problems = []
    for where, c in [("head", head), *(("argument", a) for a in args),
                     *((f"env[{e.var}]", e.code) for e in s.env.entries())]:
        if not ctx.is_subterm(c):
            problems.append(f"{where} is not a subterm of the initial code")
    return problems


def _varsub_segments(trace: Trace, ctx: AuditContext) -> list[Violation]:
    return [Violation("varsub-segment", start, f"{end - start} > env length {trace.env_lengths[start]}")
            for start, end in segments(trace.labels, lambda lab: lab.kind is Kind.VAR_SUB)
            if end - start > trace.env_lengths[start]]


def _env_growth(trace: Trace, ctx: AuditContext) -> list[Violation]:
    found = []
    betas = 0
    for i, length in enumerate(trace.env_lengths):
        if length != betas:
            found.append(Violation("env-length", i, f"env length {length} != delayed betas {betas}"))
        if i < len(trace.labels) and trace.labels[i].kind is Kind.DELAYED_BETA:
            betas += 1
    return found
