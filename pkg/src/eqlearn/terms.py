"""First-order terms, substitutions, matching and unification.

Terms are immutable.  Variables carry a numeric id; surface names only exist
in the parsers and printers.  ``str(term)`` renders TPTP syntax with
variables printed as ``X<id>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union

Position = Tuple[int, ...]
Substitution = Dict[int, "Term"]


@dataclass(frozen=True, order=True)
class Symbol:
    name: str
    arity: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("symbol name must be non-empty")
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name}")

    def __str__(self):
        return f"{self.name}/{self.arity}"


class Term:
    __slots__ = ()

    weight: int
    ground: bool


class Var(Term):
    __slots__ = ("id",)

    weight = 1
    ground = False

    def __init__(self, id: int):
        self.id = id

    def __eq__(self, other):
        return isinstance(other, Var) and other.id == self.id

    def __hash__(self):
        return hash(("$var", self.id))

    def __repr__(self):
        return f"Var({self.id})"

    def __str__(self):
        return f"X{self.id}"


class App(Term):
    __slots__ = ("name", "args", "weight", "ground", "_hash")

    def __init__(self, name: str, args: Tuple[Term, ...] = ()):
        self.name = name
        self.args = tuple(args)
        w = 1
        ground = True
        for a in self.args:
            w += a.weight
            ground = ground and a.ground
        self.weight = w
        self.ground = ground
        self._hash = hash((name, self.args))

    @property
    def symbol(self) -> Symbol:
        return Symbol(self.name, len(self.args))

    @property
    def head(self) -> Tuple[str, int]:
        return (self.name, len(self.args))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.name == other.name
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.name!r}, {self.args!r})"

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


def const(name: str) -> App:
    return App(name, ())


class Equation:
    """An unordered equation ``lhs = rhs``.

    Two equations compare equal when they agree after alpha-normalization,
    in either orientation.  Use :meth:`as_pair` for the ordered view.
    """

    __slots__ = ("lhs", "rhs", "_key")

    def __init__(self, lhs: Term, rhs: Term):
        self.lhs = lhs
        self.rhs = rhs
        self._key = None

    def as_pair(self) -> Tuple[Term, Term]:
        return (self.lhs, self.rhs)

    def flipped(self) -> "Equation":
        return Equation(self.rhs, self.lhs)

    @property
    def weight(self) -> int:
        return self.lhs.weight + self.rhs.weight

    def key(self) -> Tuple[str, str]:
        if self._key is None:
            a = alpha_normalize_many([self.lhs, self.rhs])
            b = alpha_normalize_many([self.rhs, self.lhs])
            ka = (str(a[0]), str(a[1]))
            kb = (str(b[0]), str(b[1]))
            self._key = min(ka, kb)
        return self._key

    def __eq__(self, other):
        return isinstance(other, Equation) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Equation({self.lhs}, {self.rhs})"

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


# --------------------------------------------------------------------------
# traversal

def subterms(t: Term, pos: Position = ()) -> Iterator[Tuple[Position, Term]]:
    """Preorder walk yielding ``(position, subterm)``; positions are 0-based."""
    yield pos, t
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            yield from subterms(a, pos + (i,))


def subterm_at(t: Term, pos: Position) -> Term:
    for i in pos:
        t = t.args[i]
    return t


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    i = pos[0]
    args = list(t.args)
    args[i] = replace_at(args[i], pos[1:], new)
    return App(t.name, tuple(args))


def variables(t: Term) -> List[int]:
    """Variable ids in order of first occurrence (left-to-right preorder)."""
    seen: Dict[int, None] = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            seen.setdefault(u.id, None)
        elif not u.ground:
            stack.extend(reversed(u.args))
    return list(seen)


def var_occurrences(t: Term) -> Dict[int, int]:
    counts: Dict[int, int] = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            counts[u.id] = counts.get(u.id, 0) + 1
        elif not u.ground:
            stack.extend(u.args)
    return counts


def occurs(vid: int, t: Term) -> bool:
    if isinstance(t, Var):
        return t.id == vid
    if t.ground:
        return False
    return any(occurs(vid, a) for a in t.args)


def symbols(t: Term) -> set:
    out = set()
    for _, u in subterms(t):
        if isinstance(u, App):
            out.add(u.symbol)
    return out


def max_var(t: Term) -> int:
    """Largest variable id in ``t``, or -1 for ground terms."""
    vs = variables(t)
    return max(vs) if vs else -1


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + max(depth(a) for a in t.args)


def node_count(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(node_count(a) for a in t.args)


# --------------------------------------------------------------------------
# measures

def weight(t: Union[Term, Equation]) -> int:
    """Symbol-count weight: variables and symbols each count 1."""
    return t.weight


def _app_count(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    return 1 + sum(_app_count(a) for a in t.args)


def size(t) -> int:
    """Applications plus distinct variables.

    Accepts a term, an equation (sum of both sides) or an iterable of terms
    (sum over distinct members).
    """
    if isinstance(t, Term):
        return _app_count(t) + len(variables(t))
    if isinstance(t, Equation):
        return size(t.lhs) + size(t.rhs)
    return sum(size(u) for u in set(t))


# --------------------------------------------------------------------------
# substitutions

def substitute(t: Term, sigma: Mapping[int, Term]) -> Term:
    if not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t.id, t)
    if t.ground:
        return t
    return App(t.name, tuple(substitute(a, sigma) for a in t.args))


def rename(t: Term, mapping: Mapping[int, int]) -> Term:
    return substitute(t, {k: Var(v) for k, v in mapping.items()})


def shift_vars(t: Term, offset: int) -> Term:
    if offset == 0 or t.ground:
        return t
    if isinstance(t, Var):
        return Var(t.id + offset)
    return App(t.name, tuple(shift_vars(a, offset) for a in t.args))


def match_term(pattern: Term, target: Term, sigma: Optional[Substitution] = None
               ) -> Optional[Substitution]:
    """One-way matching: find ``s`` with ``pattern·s == target``.

    Variables of ``target`` are treated as rigid constants.
    """
    s = dict(sigma) if sigma else {}
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = s.get(p.id)
            if bound is None:
                s[p.id] = t
            elif bound != t:
                return None
        elif p.ground:
            if p != t:
                return None
        elif isinstance(t, App) and p.name == t.name and len(p.args) == len(t.args):
            stack.extend(zip(p.args, t.args))
        else:
            return None
    return s


def _walk(t: Term, s: Substitution) -> Term:
    while isinstance(t, Var) and t.id in s:
        t = s[t.id]
    return t


def _occurs_in(vid: int, t: Term, s: Substitution) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.id == vid
    return any(_occurs_in(vid, a, s) for a in t.args)


def unify(t: Term, u: Term) -> Optional[Substitution]:
    """Most general unifier with occurs check, fully resolved (idempotent)."""
    s: Substitution = {}
    stack = [(t, u)]
    while stack:
        a, b = stack.pop()
        a = _walk(a, s)
        b = _walk(b, s)
        if a == b:
            continue
        if isinstance(a, Var):
            if _occurs_in(a.id, b, s):
                return None
            s[a.id] = b
        elif isinstance(b, Var):
            if _occurs_in(b.id, a, s):
                return None
            s[b.id] = a
        elif a.name == b.name and len(a.args) == len(b.args):
            stack.extend(zip(a.args, b.args))
        else:
            return None
    return {k: _resolve(v, s) for k, v in s.items()}


def _resolve(t: Term, s: Substitution) -> Term:
    t = _walk(t, s)
    if isinstance(t, Var) or t.ground:
        return t
    return App(t.name, tuple(_resolve(a, s) for a in t.args))


def compose(first: Mapping[int, Term], second: Mapping[int, Term]) -> Substitution:
    """Substitution equivalent to applying ``first`` then ``second``."""
    out = {k: substitute(v, second) for k, v in first.items()}
    for k, v in second.items():
        out.setdefault(k, v)
    return out


# --------------------------------------------------------------------------
# alpha-normalization

def canonical_renaming(terms, start: int = 0) -> Dict[int, int]:
    mapping: Dict[int, int] = {}
    for t in terms:
        for v in variables(t):
            if v not in mapping:
                mapping[v] = start + len(mapping)
    return mapping


def alpha_normalize(t: Term) -> Term:
    """Renumber variables 0, 1, 2, ... in order of first occurrence."""
    return rename(t, canonical_renaming([t]))


def alpha_normalize_many(ts) -> List[Term]:
    """Jointly alpha-normalize a sequence of terms (shared variable numbering)."""
    ts = list(ts)
    m = canonical_renaming(ts)
    return [rename(t, m) for t in ts]


def is_renaming(sigma: Mapping[int, Term]) -> bool:
    images = list(sigma.values())
    return all(isinstance(v, Var) for v in images) and len(set(images)) == len(images)


def format_position(pos: Position) -> str:
    return ".".join(str(i + 1) for i in pos) if pos else "root"


def parse_position(text: str) -> Position:
    if text == "root":
        return ()
    return tuple(int(p) - 1 for p in text.split("."))
