"""Machine abstraction shared by every abstract machine: labelled
transitions, fueled execution, decoding, and the conformance harness."""

from __future__ import annotations

import abc
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Iterator

from .config import SizeCapExceeded, size_cap
from .strategies import Derivation, is_whnf, wh_normalize, wh_step
from .terms import App, Lam, Term, Var, alpha_eq, binders, erase, exact_eq, fold, free_vars, well_name


class Kind(Enum):
    BETA = "beta"
    BETA_V1 = "beta_v1"
    BETA_V2 = "beta_v2"
    DELAYED_BETA = "delayed_beta"
    SEARCH = "search"
    VAR_SUB = "varsub"

    @property
    def is_beta(self) -> bool:
        return self in BETA_KINDS


BETA_KINDS = frozenset({Kind.BETA, Kind.BETA_V1, Kind.BETA_V2, Kind.DELAYED_BETA})


class TransitionClass(Enum):
    BETA = "beta"
    OVERHEAD = "overhead"


@dataclass(frozen=True, slots=True)
class TransitionLabel:
    kind: Kind
    cost_units: int = 1
    search_units: int = 0  # re-traversal work, already included in cost_units

    @property
    def cls(self) -> TransitionClass:
        return TransitionClass.BETA if self.kind in BETA_KINDS else TransitionClass.OVERHEAD


class Status(Enum):
    FINAL = "final"
    FUEL_EXHAUSTED = "fuel_exhausted"
    STATE_CAP = "state_cap"  # the state outgrew the size cap; run stopped


StateCheck = Callable[[Any, "AuditContext"], list[str]]


class Machine(abc.ABC):
    """A deterministic abstract machine over well-named codes.

    Decoding goes through ``decode_parts``: the state is described as a list
    of delayed codes whose decodings are applied to one another left to
    right, together with a ``resolve(item, var)`` function giving the delayed
    code a free variable of ``item`` stands for (or ``None``).
    """

    name: str = "machine"

    @abc.abstractmethod
    def compile(self, code: Term) -> Any: ...

    @abc.abstractmethod
    def step(self, state: Any) -> tuple[TransitionLabel, Any] | None: ...

    @abc.abstractmethod
    def decode_parts(self, state: Any) -> tuple[list, Callable[[Any, Any], Any]]: ...

    @abc.abstractmethod
    def state_size(self, state: Any) -> int: ...

    @abc.abstractmethod
    def fingerprint(self, state: Any) -> tuple: ...

    @abc.abstractmethod
    def code_size(self, state: Any) -> int: ...

    def env_length(self, state: Any) -> int:
        return 0

    def state_checks(self) -> list[tuple[str, StateCheck]]:
        return []

    def trace_checks(self) -> list[tuple[str, Callable[["Trace", "AuditContext"], list["Violation"]]]]:
        return []

    def decode(self, state: Any, cap: int | None = None) -> Term:
        parts, resolve = self.decode_parts(state)
        limit = size_cap() if cap is None else cap
        measured, _ = _Decoder(resolve).measure(parts)
        if measured > limit:
            raise SizeCapExceeded(f"decoded {self.name} state", measured, limit)
        return _Decoder(resolve).materialize(parts)

    def decoded_measure(self, state: Any) -> tuple[int, int]:
        """Size and skeleton hash of the decoding, without materializing it."""
        parts, resolve = self.decode_parts(state)
        return _Decoder(resolve).measure(parts)

    def is_final(self, state: Any) -> bool:
        return self.step(state) is None


# ------------------------------------------------------------------ decoding

_P = (1 << 61) - 1
_B = 1_000_003
_VAR, _LAM, _APP = (1, 1), (2, 1), (3, 1)


def _cat(x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
    return ((x[0] * pow(_B, y[1], _P) + y[0]) % _P, x[1] + y[1])


def skeleton_hash(t: Term) -> tuple[int, int]:
    """Size and polynomial hash of the erased preorder code (DAG-aware)."""
    return _Decoder(lambda item, v: None).measure([_Plain(t)])


def skeleton_hash_oracle(t: Term) -> tuple[int, int]:
    """Same hash computed from the materialized erasure string."""
    value = {"*": 1, "\\": 2, "@": 3}
    h = 0
    code = erase(t).code
    for ch in code:
        h = (h * _B + value[ch]) % _P
    return len(code), h


class _Plain:
    __slots__ = ("code",)

    def __init__(self, code: Term):
        self.code = code


class _Decoder:
    def __init__(self, resolve: Callable[[Any, Any], Any]):
        self.resolve = resolve
        self.keep: list = []

    def _order(self, roots: list, memo: dict) -> list:
        order = []
        visiting: set[int] = set()
        stack = [(r, False) for r in reversed(roots)]
        while stack:
            item, done = stack.pop()
            key = id(item)
            if done:
                order.append(item)
                continue
            if key in memo or key in visiting:
                continue
            visiting.add(key)
            self.keep.append(item)
            stack.append((item, True))
            for v in free_vars(item.code):
                dep = self.resolve(item, v)
                if dep is not None and id(dep) not in memo and id(dep) not in visiting:
                    stack.append((dep, False))
        return order

    def measure(self, parts: list) -> tuple[int, int]:
        memo: dict[int, tuple[int, int]] = {}
        for item in self._order(parts, memo):
            def on_var(node: Var, bound: bool, item=item) -> tuple[int, int]:
                if not bound:
                    dep = self.resolve(item, node.name)
                    if dep is not None:
                        return memo[id(dep)]
                return _VAR
            memo[id(item)] = fold(item.code, on_var,
                                  lambda n, b: _cat(_LAM, b),
                                  lambda n, f, a: _cat(_cat(_APP, f), a))
        # preorder of ((p0 p1) p2) is "@ @ p0 p1 p2"
        acc = (0, 0)
        for _ in range(len(parts) - 1):
            acc = _cat(acc, _APP)
        for p in parts:
            acc = _cat(acc, memo[id(p)])
        h, n = acc
        return n, h

    def materialize(self, parts: list) -> Term:
        memo: dict[int, Term] = {}
        for item in self._order(parts, memo):
            def on_var(node: Var, bound: bool, item=item) -> Term:
                if not bound:
                    dep = self.resolve(item, node.name)
                    if dep is not None:
                        return memo[id(dep)]
                return node

            def on_lam(node: Lam, body: Term) -> Term:
                return node if body is node.body else Lam(node.binder, body)

            def on_app(node, f: Term, a: Term) -> Term:
                return node if f is node.fun and a is node.arg else App(f, a)

            memo[id(item)] = fold(item.code, on_var, on_lam, on_app)
        result = memo[id(parts[0])]
        for p in parts[1:]:
            result = App(result, memo[id(p)])
        return result


# ----------------------------------------------------------------- execution


@dataclass
class Trace:
    """Per-transition record of one execution.

    ``code_sizes``, ``env_lengths`` and ``state_sizes`` are indexed by the
    number of transitions taken, so they have one more entry than ``labels``.
    """

    labels: list[TransitionLabel] = field(default_factory=list)
    state_sizes: list[int] = field(default_factory=list)
    code_sizes: list[int] = field(default_factory=list)
    env_lengths: list[int] = field(default_factory=list)
    snapshots: list[tuple[int, Any]] = field(default_factory=list)

    def dump(self) -> str:
        """One line per transition: ``step_index kind cost state_size``."""
        lines = [f"{i} {lab.kind.value} {lab.cost_units} {self.state_sizes[i + 1]}"
                 for i, lab in enumerate(self.labels)]
        return "".join(line + "\n" for line in lines)


@dataclass
class RunReport:
    machine: str
    term_size: int
    tallies: Counter
    cost_units: int
    search_units: int
    peak_state_size: int
    status: Status
    initial_code: Term
    final_state: Any
    trace: Trace
    decoded: Term | None = None
    decoded_size: int | None = None
    decode_notice: str | None = None

    @property
    def beta_count(self) -> int:
        return sum(n for k, n in self.tallies.items() if k in BETA_KINDS)

    @property
    def length(self) -> int:
        return sum(self.tallies.values())

    def count(self, kind: Kind) -> int:
        return self.tallies.get(kind, 0)

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "machine": self.machine,
            "term_size": self.term_size,
            "tallies": {k.value: self.count(k) for k in
                        (Kind.BETA, Kind.SEARCH, Kind.VAR_SUB,
                         Kind.BETA_V1, Kind.BETA_V2, Kind.DELAYED_BETA)},
            "cost_units": self.cost_units,
            "peak_state_size": self.peak_state_size,
            "status": self.status.value,
        }
        if self.decoded is not None:
            from .terms import show
            out["decoded"] = show(self.decoded)
        if self.decoded_size is not None:
            out["decoded_size"] = self.decoded_size
        return out


def run(m: Machine, t: Term, fuel: int, *, cap: int | None = None,
        state_cap: int | None = None, decode: bool = True,
        snapshot_stride: int | None = None, already_well_named: bool = False) -> RunReport:
    """Execute ``m`` from the compilation of ``t`` for at most ``fuel``
    transitions.  Snapshots of states are kept every ``snapshot_stride``
    transitions (plus the last state) when a stride is given.

    ``cap`` bounds the size of a materialized decoding and ``state_cap`` the
    size of machine states (both default to the configured size cap).  Only
    a machine that copies unboundedly, like the searching one on a diverging
    term, can hit ``state_cap``.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")
    state_limit = size_cap() if state_cap is None else state_cap
    code = t if already_well_named else well_name(t)
    state = m.compile(code)
    trace = Trace()
    tallies: Counter = Counter()
    cost = search = 0
    size = m.state_size(state)
    peak = size
    trace.state_sizes.append(size)
    trace.code_sizes.append(m.code_size(state))
    trace.env_lengths.append(m.env_length(state))
    if snapshot_stride:
        trace.snapshots.append((0, state))
    steps = 0
    while True:
        result = m.step(state)
        if result is None:
            status = Status.FINAL
            break
        if steps == fuel:
            status = Status.FUEL_EXHAUSTED
            break
        label, state = result
        steps += 1
        tallies[label.kind] += 1
        cost += label.cost_units
        search += label.search_units
        size = m.state_size(state)
        if size > peak:
            peak = size
        trace.labels.append(label)
        trace.state_sizes.append(size)
        trace.code_sizes.append(m.code_size(state))
        trace.env_lengths.append(m.env_length(state))
        if snapshot_stride and steps % snapshot_stride == 0:
            trace.snapshots.append((steps, state))
        if size > state_limit:
            status = Status.STATE_CAP
            break
    if snapshot_stride and trace.snapshots[-1][0] != steps:
        trace.snapshots.append((steps, state))
    report = RunReport(m.name, code.size, tallies, cost, search, peak, status,
                       code, state, trace)
    if status is Status.FINAL and decode:
        limit = size_cap() if cap is None else cap
        report.decoded_size, _ = m.decoded_measure(state)
        if report.decoded_size <= limit:
            report.decoded = m.decode(state, limit)
        else:
            report.decode_notice = (f"decoded size {report.decoded_size} exceeds the cap "
                                    f"of {limit} symbols; not materialized")
    return report


def segments(labels: list[TransitionLabel], member: Callable[[TransitionLabel], bool]
             ) -> Iterator[tuple[int, int]]:
    """Maximal runs of consecutive labels satisfying ``member``, as
    ``(start, end)`` index pairs (``end`` exclusive)."""
    start = None
    for i, lab in enumerate(labels):
        if member(lab):
            if start is None:
                start = i
        elif start is not None:
            yield start, i
            start = None
    if start is not None:
        yield start, len(labels)


# ------------------------------------------------------------------ auditing


@dataclass
class Violation:
    invariant: str
    step: int
    detail: str

    def __str__(self) -> str:
        return f"{self.invariant} at step {self.step}: {self.detail}"


class AuditContext:
    """Facts about the initial code, plus per-code caches for audits."""

    def __init__(self, initial: Term):
        self.initial = initial
        self.initial_size = initial.size
        self.skeleton = erase(initial).code
        self._subterm: dict[int, tuple[Term, bool]] = {}
        self._binders: dict[int, tuple[Term, list]] = {}

    def is_subterm(self, code: Term) -> bool:
        hit = self._subterm.get(id(code))
        if hit is None:
            hit = (code, code.size <= self.initial_size and erase(code).code in self.skeleton)
            self._subterm[id(code)] = hit
        return hit[1]

    def binders(self, code: Term) -> list:
        hit = self._binders.get(id(code))
        if hit is None:
            hit = (code, binders(code))
            self._binders[id(code)] = hit
        return hit[1]


def sampled(snapshots: list, every: int = 1) -> list:
    """Every ``every``-th snapshot, always keeping the last one."""
    if every <= 1 or not snapshots:
        return snapshots
    picked = snapshots[::every]
    if picked[-1] is not snapshots[-1]:
        picked.append(snapshots[-1])
    return picked


def audit_invariants(m: Machine, report: RunReport, every: int = 1) -> list[Violation]:
    """Apply every invariant registered by ``m`` to the snapshots (or every
    ``every``-th of them) and to the label sequence of a recorded run.  An
    empty list means no violation."""
    ctx = AuditContext(report.initial_code)
    found = []
    checks = m.state_checks()
    for step_index, state in sampled(report.trace.snapshots, every):
        for name, check in checks:
            found.extend(Violation(name, step_index, msg) for msg in check(state, ctx))
    for name, check in m.trace_checks():
        found.extend(check(report.trace, ctx))
    return found


def audit_state(m: Machine, state: Any, initial: Term) -> list[Violation]:
    ctx = AuditContext(initial)
    return [Violation(name, 0, msg) for name, check in m.state_checks()
            for msg in check(state, ctx)]


def same_value(a: Any, b: Any) -> bool:
    """Exact structural equality of machine states: terms up to variable
    identity (no alpha), tuples componentwise, other components through
    their ``same_as`` method or ``==``.  Shared parts are skipped by
    identity, so comparing two successors of one state is cheap."""
    stack = [(a, b)]
    seen: set[tuple[int, int]] = set()
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        key = (id(x), id(y))
        if key in seen:
            continue
        seen.add(key)
        if isinstance(x, Term):
            if not isinstance(y, Term) or not exact_eq(x, y):
                return False
        elif type(x) is not type(y):
            return False
        elif isinstance(x, tuple):
            if len(x) != len(y):
                return False
            stack.extend(zip(x, y))
        elif hasattr(x, "same_as"):
            if not x.same_as(y):
                return False
        elif x != y:
            return False
    return True


def check_determinism(m: Machine, states: Iterable[Any]) -> bool:
    """Stepping the same state twice gives the same label and successor."""
    for s in states:
        first, second = m.step(s), m.step(s)
        if first is None or second is None:
            if first is not second:
                return False
            continue
        if first[0] != second[0] or not same_value(first[1], second[1]):
            return False
    return True


def check_progress(m: Machine, states: Iterable[Any], cap: int | None = None) -> bool:
    """Every final state decodes to a weak head normal form."""
    for s in states:
        if m.step(s) is not None:
            raise ValueError("check_progress expects final states")
        if not is_whnf(m.decode(s, cap)):
            return False
    return True


def check_transitions_decoding(m: Machine, report: RunReport,
                               cap: int | None = None) -> list[Violation]:
    """Beta transitions decode to one weak head step, overhead transitions
    to equalities.  Needs snapshots at stride 1."""
    snaps = report.trace.snapshots
    found = []
    for (i, before), (j, after) in zip(snaps, snaps[1:]):
        if j != i + 1:
            raise ValueError("transition decoding needs a stride-1 trace")
        label = report.trace.labels[i]
        d0, d1 = m.decode(before, cap), m.decode(after, cap)
        expected = wh_step(d0) if label.kind in BETA_KINDS else d0
        if expected is None or not alpha_eq(expected, d1):
            found.append(Violation("transitions-decoding", j, label.kind.value))
    return found


def check_one_step_simulation(m: Machine, states: Iterable[Any], fuel: int = 10_000,
                              cap: int | None = None) -> list[str]:
    """From a state whose decoding makes a weak head step, overhead
    transitions followed by one beta transition reach that step's result."""
    failures = []
    for s in states:
        target = wh_step(m.decode(s, cap))
        if target is None:
            continue
        current = s
        for _ in range(fuel):
            res = m.step(current)
            if res is None:
                failures.append("machine stopped before simulating the step")
                break
            label, current = res
            if label.kind in BETA_KINDS:
                if not alpha_eq(m.decode(current, cap), target):
                    failures.append("one-step simulation reached a different term")
                break
        else:
            failures.append("overhead transitions did not terminate within fuel")
    return failures


# --------------------------------------------------------------- conformance


@dataclass
class ConformanceVerdict:
    ok: bool
    complete: bool  # both sides reached a final state / normal form
    machine_beta: int
    reference_length: int
    machine_status: Status
    reference_exhausted: bool
    compared_by: str | None = None  # "alpha", "fingerprint", or None
    first_divergence: int | None = None  # transition index of the first bad beta
    detail: str = ""


def check_implementation(m: Machine, t: Term, fuel: int, *, cap: int = 2**16,
                         report: RunReport | None = None,
                         reference: Derivation | None = None) -> ConformanceVerdict:
    """Compare ``m`` with the weak head strategy on ``t`` under the same fuel:
    decoded results must agree and the number of beta transitions must equal
    the derivation length.  Runs that exhaust fuel must not have fired more
    beta transitions than the reference performs."""
    if report is None:
        report = run(m, t, fuel, decode=False)
    ref = wh_normalize(t, fuel, keep_terms=False) if reference is None else reference
    beta = report.beta_count
    verdict = ConformanceVerdict(True, False, beta, ref.length, report.status, ref.exhausted)
    if report.status is Status.FINAL:
        if ref.exhausted:
            verdict.ok = False
            verdict.detail = "machine stopped but the strategy keeps reducing"
        else:
            verdict.complete = True
            if beta != ref.length:
                verdict.ok = False
                verdict.detail = f"beta transitions {beta} != derivation length {ref.length}"
            else:
                m_size, m_hash = m.decoded_measure(report.final_state)
                r_size, r_hash = skeleton_hash(ref.final)
                if m_size <= cap and r_size <= cap:
                    verdict.compared_by = "alpha"
                    same = alpha_eq(m.decode(report.final_state, cap), ref.final)
                else:
                    verdict.compared_by = "fingerprint"
                    same = (m_size, m_hash) == (r_size, r_hash)
                if not same:
                    verdict.ok = False
                    verdict.detail = "decoded final state differs from the normal form"
    elif not ref.exhausted and beta > ref.length:
        # an incomplete run (fuel or state cap) may only lag behind
        verdict.ok = False
        verdict.detail = "machine fired more beta transitions than the strategy has steps"
    if not verdict.ok:
        verdict.first_divergence = _first_divergence(m, t, fuel, cap)
    return verdict


def _first_divergence(m: Machine, t: Term, fuel: int, cap: int) -> int | None:
    report = run(m, t, fuel, decode=False, snapshot_stride=1)
    ref = wh_normalize(t, fuel, keep_terms=True, cap=cap)
    betas = 0
    for index, state in report.trace.snapshots[1:]:
        if report.trace.labels[index - 1].kind not in BETA_KINDS:
            continue
        betas += 1
        if betas > ref.length:
            return index
        expected = ref.steps[betas - 1].term
        if expected is None:
            return None
        try:
            decoded = m.decode(state, cap)
        except SizeCapExceeded:
            return None
        if not alpha_eq(decoded, expected):
            return index
    return None


# ----------------------------------------------------- overhead segment checks


def overhead_segment_check(kind: Kind, bound_series: str, name: str):
    """Trace check: every maximal run of ``kind`` transitions is no longer
    than ``trace.<bound_series>`` read at the start of the run."""

    def check(trace: Trace, ctx: AuditContext) -> list[Violation]:
        series = getattr(trace, bound_series)
        return [Violation(name, start, f"{end - start} {kind.value} transitions, bound {series[start]}")
                for start, end in segments(trace.labels, lambda lab: lab.kind is kind)
                if end - start > series[start]]

    return check
