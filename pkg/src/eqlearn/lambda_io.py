"""S-expression λ format used to exchange patterns with external compressors.

Grammar (whitespace separated, one term per line)::

    term := symbol | variable | (lam variable term) | (symbol term+) | (#k term*)

A first-order term with variables becomes a closed λ-term with one binder per
distinct variable, outermost binder first.
"""

from __future__ import annotations

import re
from typing import Dict, Iterable, List, Optional, Union

from .abstraction import Abstraction
from .terms import App, Symbol, Term, Var, alpha_normalize, symbols, variables

_BINDER_NAMES = ("x", "y", "z", "w", "u", "v")
_TOKEN = re.compile(r"\s*(?:(\()|(\))|(#\d+)|([^\s()#]+))")


class LambdaSyntaxError(ValueError):
    pass


def _binder_names(count: int, taken: set) -> List[str]:
    names = []
    candidates = iter(_BINDER_NAMES)
    i = len(_BINDER_NAMES)
    while len(names) < count:
        name = next(candidates, None)
        if name is None:
            name = f"x{i}"
            i += 1
        if name not in taken:
            names.append(name)
    return names


def to_lambda(t: Term) -> str:
    """Closed s-expression for ``t``; binders follow first-occurrence order."""
    vs = variables(t)
    taken = {s.name for s in symbols(t)} | {"lam"}
    names = dict(zip(vs, _binder_names(len(vs), taken)))

    def body(u: Term) -> str:
        if isinstance(u, Var):
            return names[u.id]
        if not u.args:
            return u.name
        return "(" + " ".join([u.name] + [body(a) for a in u.args]) + ")"

    out = body(t)
    for v in reversed(vs):
        out = f"(lam {names[v]} {out})"
    return out


# --------------------------------------------------------------------------
# parsing

def _tokenize(s: str) -> List[str]:
    out = []
    pos = 0
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m is None or m.end() == pos:
            raise LambdaSyntaxError(f"unexpected character at offset {pos}: {s[pos:pos + 10]!r}")
        out.append(next(g for g in m.groups() if g is not None))
        pos = m.end()
    return out


SExpr = Union[str, list]


def _read(tokens: List[str]) -> SExpr:
    if not tokens:
        raise LambdaSyntaxError("empty input")
    pos = 0

    def go() -> SExpr:
        nonlocal pos
        if pos >= len(tokens):
            raise LambdaSyntaxError("unbalanced parentheses")
        tok = tokens[pos]
        pos += 1
        if tok == ")":
            raise LambdaSyntaxError("unexpected ')'")
        if tok != "(":
            return tok
        items = []
        while True:
            if pos >= len(tokens):
                raise LambdaSyntaxError("unbalanced parentheses")
            if tokens[pos] == ")":
                pos += 1
                break
            items.append(go())
        if not items:
            raise LambdaSyntaxError("empty application '()'")
        return items

    tree = go()
    if pos != len(tokens):
        raise LambdaSyntaxError("trailing input after term")
    return tree


def _check_lam(node: list) -> None:
    if len(node) != 3 or not isinstance(node[1], str) or node[1].startswith("#"):
        raise LambdaSyntaxError("'lam' takes a variable and a body")


class _HigherOrder(Exception):
    pass


def parse_external_abstraction(s: str, signature: Optional[Iterable[Symbol]] = None
                               ) -> Optional[Abstraction]:
    """First-order abstraction from a pattern body with ``#k`` holes.

    Returns None when the body is higher-order: it contains a binder, a hole
    in head position, a bare hole, or a symbol applied to a number of
    arguments different from its arity (taken from ``signature`` when given,
    otherwise from its other uses in the body).  Malformed text raises
    :class:`LambdaSyntaxError`.
    """
    tree = _read(_tokenize(s))
    arity: Dict[str, int] = {}
    if signature is not None:
        for sym in signature:
            arity[sym.name] = sym.arity

    def conv(node: SExpr) -> Term:
        if isinstance(node, str):
            if node.startswith("#"):
                return Var(int(node[1:]))
            if node == "lam":
                raise LambdaSyntaxError("'lam' needs a variable and a body")
            return App(_sym(node, 0), ())
        head = node[0]
        if head == "lam":
            _check_lam(node)
            raise _HigherOrder
        if isinstance(head, list) or head.startswith("#"):
            if isinstance(head, list) and head and head[0] == "lam":
                _check_lam(head)
            raise _HigherOrder
        args = tuple(conv(a) for a in node[1:])
        return App(_sym(head, len(args)), args)

    def _sym(name: str, n: int) -> str:
        known = arity.setdefault(name, n)
        if known != n:
            raise _HigherOrder
        return name

    try:
        t = conv(tree)
    except _HigherOrder:
        return None
    if isinstance(t, Var):
        return None
    return Abstraction(alpha_normalize(t))


def parse_lambda(s: str) -> Term:
    """Inverse of :func:`to_lambda` for closed first-order terms."""
    tree = _read(_tokenize(s))
    bound: Dict[str, int] = {}

    def conv(node: SExpr) -> Term:
        if isinstance(node, str):
            if node in bound:
                return Var(bound[node])
            if node.startswith("#") or node == "lam":
                raise LambdaSyntaxError(f"unexpected {node!r}")
            return App(node, ())
        head = node[0]
        if not isinstance(head, str) or head.startswith("#") or head in bound or head == "lam":
            raise LambdaSyntaxError(f"not a first-order application: {head!r}")
        return App(head, tuple(conv(a) for a in node[1:]))

    while isinstance(tree, list) and tree[0] == "lam":
        _check_lam(tree)
        if tree[1] in bound:
            raise LambdaSyntaxError(f"binder {tree[1]} shadows an outer binder")
        bound[tree[1]] = len(bound)
        tree = tree[2]
    return conv(tree)
