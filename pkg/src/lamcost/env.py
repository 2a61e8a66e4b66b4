"""Global environments shared by the Micro AM and the MAM.

Machine states are immutable values, but copying a whole environment on
every beta transition would defeat the point of the machines.  All states of
one execution therefore share an append-only log of entries, and a state
only records how many entries it can see.  Lookup goes through an index from
variable to log position, so it is constant time.
"""

from __future__ import annotations

from typing import Iterator

from .terms import Term, VarId, exact_eq, free_vars


class EnvEntry:
    """``[var <- code]`` at a fixed log position.  Doubles as the delayed
    item handed to the decoder: its free variables resolve to entries at
    smaller positions only."""

    __slots__ = ("var", "code", "limit")

    def __init__(self, var: VarId, code: Term, limit: int):
        self.var = var
        self.code = code
        self.limit = limit

    def __repr__(self) -> str:
        return f"[{self.var} <- {self.code!r}]"


class View:
    """A code seen through the first ``limit`` entries of a log."""

    __slots__ = ("code", "limit")

    def __init__(self, code: Term, limit: int):
        self.code = code
        self.limit = limit


class _Log:
    __slots__ = ("entries", "index")

    def __init__(self) -> None:
        self.entries: list[EnvEntry] = []
        self.index: dict[VarId, int] = {}


class GlobalEnv:
    """The first ``length`` entries of a shared log, oldest first."""

    __slots__ = ("_log", "length", "size")

    def __init__(self, log: _Log | None = None, length: int = 0, size: int = 0):
        self._log = _Log() if log is None else log
        self.length = length
        self.size = size  # total size of the visible codes

    def lookup(self, x: VarId) -> Term | None:
        pos = self._log.index.get(x)
        if pos is None or pos >= self.length:
            return None
        return self._log.entries[pos].code

    def resolve(self, item, x: VarId) -> EnvEntry | None:
        """Decoder hook: the entry ``x`` refers to from ``item``."""
        pos = self._log.index.get(x)
        if pos is None or pos >= item.limit:
            return None
        return self._log.entries[pos]

    def push(self, x: VarId, code: Term) -> GlobalEnv:
        log, n = self._log, self.length
        if len(log.entries) > n:
            old = log.entries[n]
            if old.var == x and old.code is code:
                # re-stepping an older state: the entry is already there
                return GlobalEnv(log, n + 1, self.size + code.size)
            log = _Log()
            log.entries = self._log.entries[:n]
            log.index = {e.var: i for i, e in enumerate(log.entries)}
        log.entries.append(EnvEntry(x, code, n))
        log.index[x] = n
        return GlobalEnv(log, n + 1, self.size + code.size)

    def same_as(self, other: GlobalEnv) -> bool:
        if self.length != other.length:
            return False
        if self._log is other._log:
            return True
        return all(a.var == b.var and exact_eq(a.code, b.code)
                   for a, b in zip(self.entries(), other.entries()))

    def entries(self) -> Iterator[EnvEntry]:
        """Visible entries, oldest first."""
        return iter(self._log.entries[: self.length])

    def newest_first(self) -> list[tuple[VarId, Term]]:
        return [(e.var, e.code) for e in reversed(self._log.entries[: self.length])]

    def __len__(self) -> int:
        return self.length


def corrupt(env: GlobalEnv, position: int, code: Term) -> GlobalEnv:
    """A copy of ``env`` whose entry at ``position`` binds ``code`` instead.
    Only meant for fault-injection tests of the audits."""
    log = _Log()
    log.entries = [EnvEntry(e.var, code if i == position else e.code, i)
                   for i, e in enumerate(env._log.entries[: env.length])]
    log.index = {e.var: i for i, e in enumerate(log.entries)}
    return GlobalEnv(log, env.length, sum(e.code.size for e in log.entries))


def env_name_violations(env: GlobalEnv) -> list[str]:
    """``E = E' :: [x <- s] :: E''`` requires ``x`` fresh for ``s`` and for
    every code of ``E''`` (the older entries), and entry variables distinct."""
    problems = []
    seen_vars: set[VarId] = set()
    occurring: set[VarId] = set()
    for e in env.entries():
        fv = free_vars(e.code)
        if e.var in seen_vars:
            problems.append(f"entry variable {e.var} bound twice")
        if e.var in fv:
            problems.append(f"{e.var} occurs in its own entry")
        elif e.var in occurring:
            problems.append(f"{e.var} occurs in an older entry")
        seen_vars.add(e.var)
        occurring |= fv
    return problems
