"""Corpus-wide conformance, invariant and bound checking.

One call to ``evaluate`` runs every machine once per term and keeps what the
individual checks need, so that the conformance verdicts, the invariant
audits and the bound checks all look at the same executions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .families import FamilyKind, corpus, gen_family
from .machine import (ConformanceVerdict, RunReport, Status, Violation, audit_invariants,
                      check_determinism, check_implementation, check_transitions_decoding,
                      run)
from .metrics import BOUNDED, BoundCheck, calibrate, check_bounds, make_machine
from .strategies import Derivation, is_whnf, wh_normalize
from .terms import Term

CONFORMANCE_CAP = 2**16
# Snapshots of diverging runs are audited at this stride; terminating ones at 1.
DIVERGENT_AUDIT_STRIDE = 256
# Decoding every state of a run is quadratic; only short runs get it.
STEPWISE_DECODE_LIMIT = 500


def default_items(seed: int, count: int = 500, *, ui_max: int = 8,
                  chain_max: int = 16) -> list[tuple[str, Term]]:
    items = [(f"corpus[{i}]", t) for i, t in enumerate(corpus(seed, count))]
    items += [(f"ui_{n}", gen_family(FamilyKind.UI, n)) for n in range(1, ui_max + 1)]
    items += [(f"chain_{n}", gen_family(FamilyKind.CHAIN, n)) for n in range(1, chain_max + 1)]
    return items


@dataclass
class Record:
    machine: str
    label: str
    term: Term
    report: RunReport
    verdict: ConformanceVerdict
    violations: list[Violation] = field(default_factory=list)
    deterministic: bool = True
    progress: bool | None = None  # None when the run is not final or too big to decode
    stepwise: list[Violation] = field(default_factory=list)
    bounds: list[BoundCheck] = field(default_factory=list)
    calibration: bool = False  # used to fit the cost constant, not checked against it


@dataclass
class Evaluation:
    records: dict[str, list[Record]]
    references: list[Derivation]
    constants: dict[str, Fraction] = field(default_factory=dict)

    def __repr__(self) -> str:
        # the default repr would spell out every trace
        runs = sum(len(recs) for recs in self.records.values())
        return f"Evaluation({len(self.records)} machines, {runs} runs)"

    def failures(self) -> list[str]:
        out = []
        for machine, recs in self.records.items():
            for r in recs:
                where = f"{machine} on {r.label}"
                if not r.verdict.ok:
                    out.append(f"{where}: conformance: {r.verdict.detail}")
                out += [f"{where}: {v}" for v in r.violations + r.stepwise]
                if not r.deterministic:
                    out.append(f"{where}: non-deterministic step")
                if r.progress is False:
                    out.append(f"{where}: final state does not decode to a whnf")
                out += [f"{where}: bound {b}" for b in r.bounds if not b.passed]
        return out


def evaluate(machines: list[str], items: list[tuple[str, Term]], fuel: int = 10_000, *,
             audit: bool = True, bounds: bool = True,
             state_cap: int = CONFORMANCE_CAP) -> Evaluation:
    refs = [wh_normalize(t, fuel, keep_terms=False) for _, t in items]
    ev = Evaluation({}, refs)
    for name in machines:
        m = make_machine(name)
        recs = []
        for (label, t), ref in zip(items, refs):
            # A run the reference cannot finish is audited at a coarse stride,
            # chosen before running so that its states are never all kept.
            every = DIVERGENT_AUDIT_STRIDE if ref.exhausted else 1
            report = run(m, t, fuel, decode=False, state_cap=state_cap,
                         snapshot_stride=every if audit else None)
            verdict = check_implementation(m, t, fuel, cap=CONFORMANCE_CAP, report=report, reference=ref)
            rec = Record(name, label, t, report, verdict)
            if audit:
                final = report.status is Status.FINAL
                rec.violations = audit_invariants(m, report)
                rec.deterministic = check_determinism(m, [s for _, s in report.trace.snapshots])
                if final and m.decoded_measure(report.final_state)[0] <= CONFORMANCE_CAP:
                    rec.progress = is_whnf(m.decode(report.final_state, CONFORMANCE_CAP))
                    if every == 1 and report.length <= STEPWISE_DECODE_LIMIT:
                        rec.stepwise = check_transitions_decoding(m, report, CONFORMANCE_CAP)
                # the snapshots have served their purpose; keep memory bounded
                report.trace.snapshots = []
            recs.append(rec)
        ev.records[name] = recs
        if bounds:
            _check_bounds(ev, name)
    return ev


def _check_bounds(ev: Evaluation, name: str) -> None:
    recs = [r for r in ev.records[name] if r.report.status is Status.FINAL]
    if name in BOUNDED:
        # the constant is fitted on the random corpus only; family runs are
        # always held out
        c, small, _ = calibrate(r.report for r in recs if r.label.startswith("corpus"))
        ev.constants[name] = c
        in_small = {id(rep) for rep in small}
        for r in recs:
            r.calibration = id(r.report) in in_small
            r.bounds = check_bounds(r.report, c=c, reference_length=r.verdict.reference_length)
    else:
        for r in recs:
            r.bounds = check_bounds(r.report, reference_length=r.verdict.reference_length)


SUITES = ("conformance", "invariants", "bounds", "all")


def check_suite(suite: str, seed: int, count: int = 500, fuel: int = 10_000,
                machines: list[str] | None = None) -> list[str]:
    """Failures of the named suite over the seeded corpus plus the families
    (an empty list means the suite passed)."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    from .metrics import MACHINES
    names = list(MACHINES) if machines is None else machines
    audit = suite in ("invariants", "all")
    with_bounds = suite in ("bounds", "all")
    ev = evaluate(names, default_items(seed, count), fuel, audit=audit, bounds=with_bounds)
    failures = ev.failures()
    if suite == "conformance":
        failures = [f for f in failures if ": conformance:" in f]
    return failures
