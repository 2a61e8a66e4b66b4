"""The KAM: closures with local environments, in two backends.

``SharedList`` environments are cons lists whose tails are shared; looking a
variable up costs the number of entries traversed, and pushing a closure on
the stack costs one pointer copy.  ``CopiedArray`` environments are tuples
with one slot per binder of the initial code; lookup costs 1 but pushing a
closure copies the environment, charged one unit per bound slot.
"""

from __future__ import annotations

from typing import NamedTuple

from .machine import AuditContext, Kind, Machine, TransitionLabel, overhead_segment_check
from .searching import stack_items
from .terms import App, Lam, Term, VarId, binders, exact_key

BETA = TransitionLabel(Kind.BETA)


class Closure(NamedTuple):
    code: Term
    env: object  # a backend environment


class ListEnv(NamedTuple):
    var: VarId
    closure: Closure
    rest: ListEnv | None
    length: int


class ArrayEnv(NamedTuple):
    slots: tuple  # Closure or None, indexed by binder number
    length: int  # number of bound slots
    numbering: dict  # binder -> slot, fixed at compile time


class SharedList:
    name = "list"

    def empty(self, code: Term) -> ListEnv | None:
        return None

    def length(self, env: ListEnv | None) -> int:
        return 0 if env is None else env.length

    def extend(self, env, x: VarId, c: Closure):
        return ListEnv(x, c, env, self.length(env) + 1)

    def lookup(self, env, x: VarId) -> tuple[Closure | None, int]:
        """Binding of ``x`` and the number of entries traversed."""
        steps = 0
        while env is not None:
            steps += 1
            if env.var == x:
                return env.closure, steps
            env = env.rest
        return None, max(steps, 1)

    def push_cost(self, env) -> int:
        return 1

    def bindings(self, env) -> list[tuple[VarId, Closure]]:
        out = []
        while env is not None:
            out.append((env.var, env.closure))
            env = env.rest
        return out


class CopiedArray:
    name = "array"

    def empty(self, code: Term) -> ArrayEnv:
        numbering = {b: i for i, b in enumerate(binders(code))}
        return ArrayEnv((None,) * len(numbering), 0, numbering)

    def length(self, env: ArrayEnv) -> int:
        return env.length

    def extend(self, env: ArrayEnv, x: VarId, c: Closure) -> ArrayEnv:
        i = env.numbering[x]
        # A real implementation writes the slot in place: the array was
        # copied when its closure was pushed.  Tuples force a rebuild here,
        # which is not charged.
        slots = env.slots[:i] + (c,) + env.slots[i + 1:]
        return ArrayEnv(slots, env.length + (env.slots[i] is None), env.numbering)

    def lookup(self, env: ArrayEnv, x: VarId) -> tuple[Closure | None, int]:
        i = env.numbering.get(x)
        return (None if i is None else env.slots[i]), 1

    def push_cost(self, env: ArrayEnv) -> int:
        return 1 + env.length

    def bindings(self, env: ArrayEnv) -> list[tuple[VarId, Closure]]:
        return [(b, env.slots[i]) for b, i in env.numbering.items() if env.slots[i] is not None]


BACKENDS = {"list": SharedList, "array": CopiedArray}


def env_lookup(backend, env, x: VarId) -> tuple[Closure | None, int]:
    """``e(x)`` together with the metered lookup cost; ``None`` means ``x``
    is free."""
    return backend.lookup(env, x)


class KamState(NamedTuple):
    code: Term
    env: object
    stack: tuple | None  # cons cells (Closure, rest)


class KAM(Machine):
    def __init__(self, backend: str = "list"):
        self.backend = BACKENDS[backend]()
        self.name = f"kam-{backend}"

    def compile(self, code: Term) -> KamState:
        return KamState(code, self.backend.empty(code), None)

    def step(self, s: KamState):
        code = s.code
        cls = type(code)
        if cls is App:
            label = TransitionLabel(Kind.SEARCH, self.backend.push_cost(s.env))
            return label, KamState(code.fun, s.env, (Closure(code.arg, s.env), s.stack))
        if cls is Lam:
            if s.stack is None:
                return None
            c, rest = s.stack
            return BETA, KamState(code.body, self.backend.extend(s.env, code.binder, c), rest)
        found, cost = self.backend.lookup(s.env, code.name)
        if found is None:
            return None
        return TransitionLabel(Kind.VAR_SUB, cost), KamState(found.code, found.env, s.stack)

    def decode_parts(self, s: KamState):
        backend = self.backend

        def resolve(item: Closure, x: VarId):
            return backend.lookup(item.env, x)[0]

        return [Closure(s.code, s.env), *stack_items(s.stack)], resolve

    def state_size(self, s: KamState) -> int:
        n = s.code.size + self.backend.length(s.env)
        for c in stack_items(s.stack):
            n += c.code.size + self.backend.length(c.env)
        return n

    def code_size(self, s: KamState) -> int:
        return s.code.size

    def env_length(self, s: KamState) -> int:
        return self.backend.length(s.env)

    def fingerprint(self, s: KamState) -> tuple:
        """Backend-independent: closures are listed in discovery order, each
        as its exact code plus its bindings sorted by variable."""
        backend = self.backend
        number: dict[int, int] = {}
        keys: dict[int, tuple] = {}
        records: list = []

        def visit(root: Closure) -> int:
            todo = [(root, False)]
            while todo:
                c, done = todo.pop()
                if id(c) in number:
                    continue
                bound = sorted(backend.bindings(c.env), key=lambda b: (b[0].unique_id, b[0].display_name))
                if not done:
                    todo.append((c, True))
                    todo.extend((child, False) for _, child in reversed(bound))
                    continue
                if id(c.code) not in keys:
                    keys[id(c.code)] = exact_key(c.code)
                number[id(c)] = len(records)
                records.append((keys[id(c.code)], tuple((v, number[id(child)]) for v, child in bound)))
            return number[id(root)]

        roots = [visit(Closure(s.code, s.env))] + [visit(c) for c in stack_items(s.stack)]
        # keep the closures alive so ids stay unique during the walk
        return tuple(records), tuple(roots)

    def state_checks(self):
        return [("env-length", _env_bound)]

    def trace_checks(self):
        return [("search-segment", overhead_segment_check(Kind.SEARCH, "code_sizes", "search-segment"))]


def _env_bound(s: KamState, ctx: AuditContext) -> list[str]:
    problems = []
    closures = [Closure(s.code, s.env), *stack_items(s.stack)]
    for i, c in enumerate(closures):
        n = 0 if c.env is None else c.env.length
        if n > ctx.initial_size:
            problems.append(f"closure {i}: env length {n} > |t0| = {ctx.initial_size}")
    return problems
