"""Instrumented abstract machines for the weak head strategy of the lambda
calculus, with reference reducers, size-exploding families, a conformance
harness and a benchmark driver."""

from .families import FamilyKind, corpus, family_size, gen_chain, gen_expected, gen_family
from .kam import KAM
from .machine import Kind, RunReport, Status, TransitionLabel, check_implementation, run
from .mam import MAM, EfficientMAM
from .metrics import MACHINES, bench, check_bounds, make_machine
from .micro import MicroAM
from .searching import SearchingAM
from .strategies import is_whnf, ri_normalize, wh_normalize, wh_step
from .terms import Term, VarId, alpha_eq, erase, parse, show, size, well_name

__all__ = [
    "FamilyKind", "corpus", "family_size", "gen_chain", "gen_expected", "gen_family",
    "KAM", "Kind", "RunReport", "Status", "TransitionLabel", "check_implementation", "run",
    "MAM", "EfficientMAM", "MACHINES", "bench", "check_bounds", "make_machine",
    "MicroAM", "SearchingAM", "is_whnf", "ri_normalize", "wh_normalize", "wh_step",
    "Term", "VarId", "alpha_eq", "erase", "parse", "show", "size", "well_name",
]
