"""Bound checks on recorded runs, constant calibration, the benchmark
driver, slope fitting and output formats."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .families import FamilyKind, gen_family
from .kam import KAM
from .machine import BETA_KINDS, Kind, Machine, RunReport, Status, run, segments
from .mam import MAM, EfficientMAM
from .micro import MicroAM
from .searching import SearchingAM

MACHINES: dict[str, Callable[[], Machine]] = {
    "search": SearchingAM,
    "micro": MicroAM,
    "mam": MAM,
    "mam-eff": EfficientMAM,
    "kam-list": lambda: KAM("list"),
    "kam-array": lambda: KAM("array"),
}

# Machines whose runs are held to the transition bounds of the MAM analysis.
BOUNDED = ("mam", "mam-eff", "kam-list", "kam-array")

# A fallback for the cost constant when nothing was calibrated: search and
# beta cost 1 each, a variable step at most |t0|, and the lemma bounds give
# about |t0|(b^2+1) of each.
DEFAULT_C = Fraction(3)


def make_machine(name: str) -> Machine:
    try:
        return MACHINES[name]()
    except KeyError:
        raise ValueError(f"unknown machine {name!r}; choose from {', '.join(MACHINES)}") from None


@dataclass
class BoundCheck:
    name: str
    lhs: int | Fraction
    rhs: int | Fraction

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs

    def __str__(self) -> str:
        verdict = "ok" if self.passed else "FAIL"
        return f"{self.name}: {self.lhs} <= {self.rhs} {verdict}"


def cost_budget_shape(machine: str, t0_size: int, beta: int) -> int:
    """``|t0| (b^2+1)``, or ``|t0|^2 (b^2+1)`` for array environments."""
    scale = t0_size * t0_size if machine == "kam-array" else t0_size
    return scale * (beta * beta + 1)


def cost_ratio(report: RunReport) -> Fraction:
    return Fraction(report.cost_units, cost_budget_shape(report.machine, report.term_size, report.beta_count))


def check_bounds(report: RunReport, t0_size: int | None = None, machine: str | None = None, *,
                 c: Fraction | None = None, reference_length: int | None = None) -> list[BoundCheck]:
    """Exact integer checks of the transition bounds on a final run.

    MAM-like machines get the four transition bounds plus the total cost
    bound with constant ``c``; the searching machine only gets beta matching
    (which needs ``reference_length``); the micro machine gets the bound on
    consecutive variable substitutions.
    """
    if report.status is not Status.FINAL:
        raise ValueError("bounds are only checked on final runs")
    t0 = report.term_size if t0_size is None else t0_size
    name = report.machine if machine is None else machine
    labels = report.trace.labels
    beta, var = report.beta_count, report.count(Kind.VAR_SUB)
    search = report.count(Kind.SEARCH)
    checks: list[BoundCheck] = []
    if name == "search":
        if reference_length is not None:
            checks.append(BoundCheck("beta_matching", abs(beta - reference_length), 0))
        return checks
    if name == "micro":
        worst = _worst_segment_excess(labels, lambda k: k is Kind.VAR_SUB, report.trace.env_lengths)
        checks.append(BoundCheck("var_segment", worst, 0))
        return checks
    # betas before each position, which is the environment length for the MAM
    betas_before = [0]
    for lab in labels:
        betas_before.append(betas_before[-1] + (lab.kind in BETA_KINDS))
    local_excess = 0
    for start, end in segments(labels, lambda lab: lab.kind not in BETA_KINDS):
        vs = sum(1 for lab in labels[start:end] if lab.kind is Kind.VAR_SUB)
        local_excess = max(local_excess, vs - betas_before[start])
    longest = max((end - start for start, end in
                   segments(labels, lambda lab: lab.kind is Kind.SEARCH or lab.kind in BETA_KINDS)),
                  default=0)
    checks.append(BoundCheck("var_local", local_excess, 0))
    checks.append(BoundCheck("var_global", var, beta * beta))
    checks.append(BoundCheck("search_local", longest, t0))
    checks.append(BoundCheck("search_global", search, t0 * (var + 1)))
    constant = DEFAULT_C if c is None else c
    checks.append(BoundCheck("total_cost", report.cost_units, constant * cost_budget_shape(name, t0, beta)))
    if reference_length is not None:
        checks.append(BoundCheck("beta_matching", abs(beta - reference_length), 0))
    return checks


def _worst_segment_excess(labels, member, series) -> int:
    worst = 0
    for start, end in segments(labels, lambda lab: member(lab.kind)):
        worst = max(worst, (end - start) - series[start])
    return worst


def calibrate(reports: Iterable[RunReport]) -> tuple[Fraction, list[RunReport], list[RunReport]]:
    """Split final runs into terciles by term size, and take the largest
    cost ratio on the smallest tercile as the constant.  Returns the
    constant, the calibration runs and the held-out runs."""
    finals = sorted((r for r in reports if r.status is Status.FINAL), key=lambda r: r.term_size)
    cut = max(1, len(finals) // 3)
    small, rest = finals[:cut], finals[cut:]
    c = max((cost_ratio(r) for r in small), default=DEFAULT_C)
    return c, small, rest


# -------------------------------------------------------------------- slopes


def fit_slope(xs: list[float], ys: list[float], *, log_x: bool = True) -> float:
    """Least-squares slope of log y against log x (or against x when
    ``log_x`` is false, i.e. the growth rate on a semilog plot)."""
    pts = [(x, y) for x, y in zip(xs, ys) if y > 0 and (x > 0 or not log_x)]
    if len(pts) < 2:
        raise ValueError("need at least two positive points to fit a slope")
    lx = [math.log(x) if log_x else float(x) for x, _ in pts]
    ly = [math.log(y) for _, y in pts]
    return statistics.linear_regression(lx, ly).slope


# --------------------------------------------------------------------- bench

CSV_HEADER = ["machine", "family", "n", "term_size", "beta", "search", "varsub",
              "cost_units", "peak_state", "wall_ns", "status"]


@dataclass
class BenchRow:
    machine: str
    family: str
    n: int
    term_size: int
    tallies: dict
    cost_units: int
    peak_state_size: int
    wall_time_ns: int
    status: str

    @property
    def beta(self) -> int:
        return sum(v for k, v in self.tallies.items() if Kind(k) in BETA_KINDS)

    def csv_fields(self) -> list:
        return [self.machine, self.family, self.n, self.term_size, self.beta,
                self.tallies[Kind.SEARCH.value], self.tallies[Kind.VAR_SUB.value],
                self.cost_units, self.peak_state_size, self.wall_time_ns, self.status]

    def to_json(self) -> dict:
        return {"machine": self.machine, "family": self.family, "n": self.n,
                "term_size": self.term_size, "tallies": self.tallies,
                "cost_units": self.cost_units, "peak_state_size": self.peak_state_size,
                "wall_ns": self.wall_time_ns, "status": self.status}


def bench_one(machine: str, family: FamilyKind, n: int, fuel: int) -> BenchRow:
    m = make_machine(machine)
    term = gen_family(family, n)
    start = time.perf_counter_ns()
    report = run(m, term, fuel, decode=False)
    wall = time.perf_counter_ns() - start
    tallies = report.to_json()["tallies"]
    return BenchRow(machine, family.value, n, report.term_size, tallies, report.cost_units,
                    report.peak_state_size, wall, report.status.value)


def bench(families: list[FamilyKind], machines: list[str], n_range: Iterable[int],
          fuel: int) -> tuple[list[BenchRow], dict[tuple[str, str], float]]:
    """Run every (machine, family, n) combination.  Rows come back sorted by
    machine, family and n; fuel-exhausted rows are kept and flagged by their
    status.  The second result maps (machine, family) to the log-log slope of
    cost against n over the final rows."""
    ns = list(n_range)
    rows = [bench_one(m, f, n, fuel) for m in machines for f in families for n in ns]
    rows.sort(key=lambda r: (r.machine, r.family, r.n))
    slopes = {}
    for m in machines:
        for f in families:
            pts = [(r.n, r.cost_units) for r in rows
                   if r.machine == m and r.family == f.value and r.status == Status.FINAL.value]
            try:
                slopes[(m, f.value)] = fit_slope([p[0] for p in pts], [p[1] for p in pts])
            except ValueError:
                pass
    return rows, slopes


def rows_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()


def to_json_text(items: list) -> str:
    return json.dumps([x.to_json() for x in items], indent=2, ensure_ascii=False) + "\n"


def emit(items: list, fmt: str, out: str | None = None) -> str:
    """Serialize bench rows (csv or json) or run reports (json) and write
    them to ``out`` when given.  Returns the text."""
    if fmt == "csv":
        if any(not isinstance(x, BenchRow) for x in items):
            raise ValueError("csv output is only defined for bench rows")
        text = rows_to_csv(items)
    elif fmt == "json":
        text = to_json_text(items)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out is not None:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as e:
            raise OSError(f"cannot write {out}: {e.strerror}") from e
    return text
