"""Named lambda terms: construction, parsing, printing, alpha-equivalence,
erasure, well-naming and capture-avoiding substitution.

Terms are immutable trees (or DAGs, when a subterm is shared).  Every
traversal here is iterative so that deep left spines and long binder chains
do not hit the interpreter recursion limit.  Each node caches its tree size
at construction time, so ``size`` is O(1) even on shared DAGs whose tree
size is exponential.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import zip_longest
from typing import Callable, Iterator, NamedTuple


class VarId(NamedTuple):
    """A variable: display name plus a unique integer (0 = not uniquified).
    A named tuple rather than a dataclass: variables are hashed constantly
    and tuple hashing runs in C."""

    display_name: str
    unique_id: int = 0

    def __str__(self) -> str:
        if self.unique_id == 0:
            return self.display_name
        return f"{self.display_name}_{self.unique_id}"


class Term:
    # ``fv`` caches the free variables once computed (terms are immutable)
    __slots__ = ("size", "fv")

    def __repr__(self) -> str:
        if self.size > 200:
            return f"<{type(self).__name__} of size {self.size}>"
        return f"{type(self).__name__}<{show(self)}>"


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: VarId):
        self.name = name
        self.size = 1
        self.fv = None


class Lam(Term):
    __slots__ = ("binder", "body")

    def __init__(self, binder: VarId, body: Term):
        self.binder = binder
        self.body = body
        self.size = 1 + body.size
        self.fv = None


class App(Term):
    __slots__ = ("fun", "arg")

    def __init__(self, fun: Term, arg: Term):
        self.fun = fun
        self.arg = arg
        self.size = 1 + fun.size + arg.size
        self.fv = None


def var(name: str) -> Var:
    return Var(VarId(name))


def lam(name: str, body: Term) -> Lam:
    return Lam(VarId(name), body)


def apps(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def size(t: Term) -> int:
    """Number of symbols: 1 per variable, abstraction and application node."""
    return t.size


class Fresh:
    """Supply of fresh variable identities, counting up from ``start``."""

    __slots__ = ("next",)

    def __init__(self, start: int = 1):
        self.next = start

    def __call__(self, display_name: str) -> VarId:
        v = VarId(display_name, self.next)
        self.next += 1
        return v


# ---------------------------------------------------------------- traversal


def fold(
    t: Term,
    on_var: Callable[[Var, bool], object],
    on_lam: Callable[[Lam, object], object],
    on_app: Callable[[App, object, object], object],
) -> object:
    """Bottom-up fold; ``on_var`` also learns whether the occurrence is bound
    by an enclosing abstraction of ``t``."""
    out: list = []
    bound: dict[VarId, int] = {}
    stack: list = [(t, False)]
    while stack:
        node, done = stack.pop()
        cls = type(node)
        if cls is Var:
            out.append(on_var(node, bound.get(node.name, 0) > 0))
        elif cls is Lam:
            b = node.binder
            if done:
                bound[b] -= 1
                out.append(on_lam(node, out.pop()))
            else:
                bound[b] = bound.get(b, 0) + 1
                stack.append((node, True))
                stack.append((node.body, False))
        elif done:
            a = out.pop()
            out.append(on_app(node, out.pop(), a))
        else:
            stack.append((node, True))
            stack.append((node.arg, False))
            stack.append((node.fun, False))
    return out[0]


def count_nodes(t: Term) -> int:
    """Independent size oracle: walks the tree instead of reading the cache."""
    n = 0
    stack = [t]
    while stack:
        node = stack.pop()
        n += 1
        if type(node) is Lam:
            stack.append(node.body)
        elif type(node) is App:
            stack.append(node.arg)
            stack.append(node.fun)
    return n


def free_vars(t: Term) -> frozenset[VarId]:
    if t.fv is not None:
        return t.fv
    stack: list = [(t, False)]
    while stack:
        node, done = stack.pop()
        if node.fv is not None:
            continue
        cls = type(node)
        if cls is Var:
            node.fv = frozenset((node.name,))
        elif cls is Lam:
            if done:
                fv = node.body.fv
                node.fv = fv - {node.binder} if node.binder in fv else fv
            else:
                stack.append((node, True))
                stack.append((node.body, False))
        elif done:
            f, a = node.fun.fv, node.arg.fv
            node.fv = f if a <= f else a if f <= a else f | a
        else:
            stack.append((node, True))
            stack.append((node.arg, False))
            stack.append((node.fun, False))
    return t.fv


def is_closed(t: Term) -> bool:
    return not free_vars(t)


def occurs_free(t: Term, x: VarId) -> bool:
    return x in free_vars(t)


def binders(t: Term) -> list[VarId]:
    found = []
    stack = [t]
    while stack:
        node = stack.pop()
        if type(node) is Lam:
            found.append(node.binder)
            stack.append(node.body)
        elif type(node) is App:
            stack.append(node.arg)
            stack.append(node.fun)
    return found


def _canonical(t: Term) -> Iterator[object]:
    """Preorder token stream with bound variables as de Bruijn indices."""
    depth = 0
    levels: dict[VarId, list[int]] = {}
    stack: list = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, VarId):
            levels[node].pop()
            depth -= 1
            continue
        cls = type(node)
        if cls is Var:
            lv = levels.get(node.name)
            if lv:
                yield depth - lv[-1]
            else:
                yield node.name
        elif cls is Lam:
            yield "L"
            levels.setdefault(node.binder, []).append(depth)
            depth += 1
            stack.append(node.binder)
            stack.append(node.body)
        else:
            yield "A"
            stack.append(node.arg)
            stack.append(node.fun)


_END = object()


def alpha_eq(t: Term, s: Term) -> bool:
    """Equality up to consistent renaming of bound variables."""
    if t is s:
        return True
    if t.size != s.size:
        return False
    return all(a == b for a, b in zip_longest(_canonical(t), _canonical(s), fillvalue=_END))


def exact_eq(t: Term, s: Term) -> bool:
    """Structural equality including variable identities (no alpha)."""
    stack = [(t, s)]
    while stack:
        a, b = stack.pop()
        if a is b:
            continue
        if type(a) is not type(b) or a.size != b.size:
            return False
        if type(a) is Var:
            if a.name != b.name:
                return False
        elif type(a) is Lam:
            if a.binder != b.binder:
                return False
            stack.append((a.body, b.body))
        else:
            stack.append((a.arg, b.arg))
            stack.append((a.fun, b.fun))
    return True


def exact_key(t: Term) -> tuple:
    """Hashable exact serialization (used for replay and determinism checks)."""
    out = []
    stack = [t]
    while stack:
        node = stack.pop()
        if type(node) is Var:
            out.append(node.name)
        elif type(node) is Lam:
            out.append(("L", node.binder))
            stack.append(node.body)
        else:
            out.append("A")
            stack.append(node.arg)
            stack.append(node.fun)
    return tuple(out)


# ------------------------------------------------------------------ erasure


@dataclass(frozen=True, slots=True)
class Skeleton:
    """A term with all names replaced by ``*``, as a preorder string over
    ``\\`` (abstraction), ``@`` (application) and ``*`` (variable)."""

    code: str

    def __len__(self) -> int:
        return len(self.code)


def erase(t: Term) -> Skeleton:
    out = []
    stack = [t]
    while stack:
        node = stack.pop()
        if type(node) is Var:
            out.append("*")
        elif type(node) is Lam:
            out.append("\\")
            stack.append(node.body)
        else:
            out.append("@")
            stack.append(node.arg)
            stack.append(node.fun)
    return Skeleton("".join(out))


def is_subterm_mod_names(s: Term, t: Term) -> bool:
    # Preorder codes of complete trees are prefix-free, so a substring match
    # of a complete tree code always starts and ends on a subtree boundary.
    return erase(s).code in erase(t).code


# ---------------------------------------------------------------- renaming


def rename_copy(t: Term, fresh: Fresh) -> Term:
    """Copy of ``t`` whose binders all get fresh identities; free variables
    are untouched.  Linear in the tree size of ``t``."""
    out: list[Term] = []
    scope: dict[VarId, list[VarId]] = {}
    stack: list = [(t, None)]
    while stack:
        node, new_binder = stack.pop()
        cls = type(node)
        if cls is Var:
            renamed = scope.get(node.name)
            out.append(Var(renamed[-1]) if renamed else node)
        elif cls is Lam:
            if new_binder is None:
                nb = fresh(node.binder.display_name)
                scope.setdefault(node.binder, []).append(nb)
                stack.append((node, nb))
                stack.append((node.body, None))
            else:
                scope[node.binder].pop()
                out.append(Lam(new_binder, out.pop()))
        elif new_binder is None:
            stack.append((node, True))
            stack.append((node.arg, None))
            stack.append((node.fun, None))
        else:
            a = out.pop()
            out.append(App(out.pop(), a))
    return out[0]


def well_name(t: Term, fresh: Fresh | None = None) -> Term:
    """Alpha-equivalent code whose binders carry pairwise-distinct ids,
    numbered in preorder from the supply (default: starting at 1)."""
    return rename_copy(t, fresh if fresh is not None else Fresh(1))


def name_violations(codes: list[Term], binders_of: Callable[[Term], list] | None = None) -> list[str]:
    """Checks that, across all ``codes`` taken together, every binder is
    unique and each bound name occurs only inside its own abstraction
    (equivalently: no binder name occurs free in any of the codes).
    ``binders_of`` may supply cached binder lists."""
    get = binders if binders_of is None else binders_of
    problems = []
    seen: set[VarId] = set()
    for c in codes:
        for b in get(c):
            if b in seen:
                problems.append(f"binder {b} occurs more than once")
            seen.add(b)
    for i, c in enumerate(codes):
        for v in free_vars(c) & seen:
            problems.append(f"{v} occurs outside its abstraction (code {i})")
    return problems


def is_well_named(t: Term) -> bool:
    return not name_violations([t])


# ------------------------------------------------------------ substitution


def meta_subst(t: Term, x: VarId, s: Term, fresh: Fresh | None = None,
               copy: bool = False) -> tuple[Term, int]:
    """Capture-avoiding ``t{x <- s}``.

    Returns the result and the number of symbols written (nodes allocated).
    With ``copy=True`` each occurrence of ``x`` receives its own copy of ``s``
    with freshly renamed binders, which keeps well-named codes well-named;
    otherwise ``s`` is shared.  Binders of ``t`` that would capture a free
    variable of ``s`` are renamed using ``fresh``.
    """
    if fresh is None:
        fresh = Fresh(_max_uid(t, s) + 1)
    fv_s = free_vars(s)
    free_vars(t)
    s_size = s.size
    root_sigma: dict[VarId, Term] = {x: s}
    memo: dict[tuple[int, int], tuple[Term, int]] = {}
    sigmas = [root_sigma]
    out: list[tuple[Term, int]] = []
    stack: list = [(t, root_sigma, None)]
    while stack:
        node, sigma, post = stack.pop()
        if post is None:
            # nothing to substitute below this node
            fv = node.fv
            if all(k not in fv for k in sigma):
                out.append((node, 0))
                continue
        key = (id(node), id(sigma))
        if post is None and not copy and key in memo:
            out.append(memo[key])
            continue
        cls = type(node)
        if cls is Var:
            repl = sigma.get(node.name)
            if repl is None:
                res = (node, 0)
            elif repl is s:
                res = (rename_copy(s, fresh), s_size) if copy else (s, 0)
            else:
                res = (repl, 1)
        elif cls is Lam:
            if post is None:
                b = node.binder
                inner = sigma
                nb = b
                if b in sigma:
                    inner = {k: v for k, v in sigma.items() if k != b}
                if b in fv_s and x in inner:
                    nb = fresh(b.display_name)
                    inner = dict(inner)
                    inner[b] = Var(nb)
                if not inner:
                    out.append((node, 0))
                    continue
                if inner is not sigma:
                    sigmas.append(inner)
                stack.append((node, sigma, nb))
                stack.append((node.body, inner, None))
                continue
            body, w = out.pop()
            if body is node.body and post == node.binder:
                res = (node, w)
            else:
                res = (Lam(post, body), w + 1)
        else:
            if post is None:
                stack.append((node, sigma, True))
                stack.append((node.arg, sigma, None))
                stack.append((node.fun, sigma, None))
                continue
            a, wa = out.pop()
            f, wf = out.pop()
            if f is node.fun and a is node.arg:
                res = (node, wf + wa)
            else:
                res = (App(f, a), wf + wa + 1)
        if not copy:
            memo[key] = res
        out.append(res)
    return out[0]


def _max_uid(*terms: Term) -> int:
    best = 0
    for t in terms:
        seen = set()
        stack = [t]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            if type(node) is Var:
                best = max(best, node.name.unique_id)
            elif type(node) is Lam:
                best = max(best, node.binder.unique_id)
                stack.append(node.body)
            else:
                stack.append(node.fun)
                stack.append(node.arg)
    return best


# ------------------------------------------------------------------ parsing

GRAMMAR = r"""term grammar:
  ident = [A-Za-z_][A-Za-z0-9_']*
  term  = lam | app
  lam   = ("\" | "λ") ident "." term
  app   = atom+            (left-associative; a trailing lam is accepted)
  atom  = ident | "(" term ")"
  comments run from "--" to end of line"""


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|--[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<lam>\\|λ)
  | (?P<punct>[.()])
""", re.VERBOSE)


def _tokenize(src: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            tokens.append((kind if kind != "punct" else text, text, line, pos - line_start + 1))
        for i, ch in enumerate(text):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    tokens.append(("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self) -> tuple[str, str, int, int]:
        return self.tokens[self.i]

    def expect(self, kind: str) -> str:
        tok = self.peek()
        if tok[0] != kind:
            found = tok[1] or "end of input"
            raise ParseError(f"expected {kind!r}, found {found!r}", tok[2], tok[3])
        self.i += 1
        return tok[1]

    def term(self) -> Term:
        if self.peek()[0] == "lam":
            return self.abstraction()
        head = self.atom()
        while self.peek()[0] in ("ident", "(", "lam"):
            if self.peek()[0] == "lam":
                return App(head, self.abstraction())
            head = App(head, self.atom())
        return head

    def abstraction(self) -> Term:
        self.expect("lam")
        name = self.expect("ident")
        self.expect(".")
        return Lam(VarId(name), self.term())

    def atom(self) -> Term:
        kind, text, line, col = self.peek()
        if kind == "ident":
            self.i += 1
            return Var(VarId(text))
        if kind == "(":
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        raise ParseError(f"expected a variable or '(', found {text or 'end of input'!r}", line, col)


def parse(src: str) -> Term:
    """Parse a term; free names are allowed and get ``unique_id`` 0."""
    p = _Parser(src)
    t = p.term()
    p.expect("eof")
    return t


# ----------------------------------------------------------------- printing


def show(t: Term) -> str:
    """Render ``t`` so that ``parse(show(t))`` is alpha-equivalent to ``t``.

    Binder names are disambiguated against free names and enclosing binders,
    so the output never relies on shadowing.
    """
    taken = {str(v) for v in free_vars(t)}
    in_scope: dict[VarId, list[str]] = {}
    live: dict[str, int] = {}
    pieces: list[str] = []
    # items: ("t", term, position) | ("s", text) | ("x", binder)
    stack: list = [("t", t, "top")]
    while stack:
        item = stack.pop()
        tag = item[0]
        if tag == "s":
            pieces.append(item[1])
            continue
        if tag == "x":
            printed = in_scope[item[1]].pop()
            live[printed] -= 1
            continue
        _, node, pos = item
        cls = type(node)
        if cls is Var:
            names = in_scope.get(node.name)
            pieces.append(names[-1] if names else str(node.name))
        elif cls is Lam:
            base = node.binder.display_name
            printed = base
            k = 0
            while printed in taken or live.get(printed, 0) > 0:
                k += 1
                printed = f"{base}{k}"
            in_scope.setdefault(node.binder, []).append(printed)
            live[printed] = live.get(printed, 0) + 1
            wrap = pos != "top"
            if wrap:
                stack.append(("s", ")"))
            stack.append(("x", node.binder))
            stack.append(("t", node.body, "top"))
            pieces.append(("(\\" if wrap else "\\") + printed + ". ")
        else:
            wrap = pos == "arg"
            if wrap:
                pieces.append("(")
                stack.append(("s", ")"))
            stack.append(("t", node.arg, "arg"))
            stack.append(("s", " "))
            stack.append(("t", node.fun, "fun"))
    return "".join(pieces)
