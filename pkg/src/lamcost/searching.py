"""The searching machine: an argument stack plus meta-level substitution.

Beta transitions substitute immediately, copying the argument once per
occurrence with fresh binders, and are charged for every symbol written.
Nothing bounds the size of what gets copied, which is what makes this
machine an unreasonable implementation.
"""

from __future__ import annotations

from typing import NamedTuple

from .machine import Kind, Machine, TransitionLabel, _Plain, overhead_segment_check
from .terms import App, Fresh, Lam, Term, _max_uid, exact_key, meta_subst

SEARCH = TransitionLabel(Kind.SEARCH)


class SearchState(NamedTuple):
    code: Term
    stack: tuple | None  # cons cells (code, rest); top first
    fresh: int  # next unused binder id
    size: int  # |code| + sizes of stacked codes


def stack_items(stack: tuple | None) -> list:
    items = []
    while stack is not None:
        items.append(stack[0])
        stack = stack[1]
    return items


class SearchingAM(Machine):
    name = "search"

    def compile(self, code: Term) -> SearchState:
        return SearchState(code, None, _max_uid(code) + 1, code.size)

    def step(self, s: SearchState):
        code = s.code
        if type(code) is App:
            return SEARCH, SearchState(code.fun, (code.arg, s.stack), s.fresh, s.size - 1)
        if type(code) is Lam and s.stack is not None:
            arg, rest = s.stack
            fresh = Fresh(s.fresh)
            body, written = meta_subst(code.body, code.binder, arg, fresh, copy=True)
            size = s.size - code.size - arg.size + body.size
            return TransitionLabel(Kind.BETA, 1 + written), SearchState(body, rest, fresh.next, size)
        return None

    def decode_parts(self, s: SearchState):
        return [_Plain(c) for c in [s.code, *stack_items(s.stack)]], lambda item, v: None

    def state_size(self, s: SearchState) -> int:
        return s.size

    def code_size(self, s: SearchState) -> int:
        return s.code.size

    def fingerprint(self, s: SearchState) -> tuple:
        return (exact_key(s.code), tuple(exact_key(c) for c in stack_items(s.stack)), s.fresh)

    def trace_checks(self):
        name = "search-segment"
        return [(name, overhead_segment_check(Kind.SEARCH, "code_sizes", name))]
