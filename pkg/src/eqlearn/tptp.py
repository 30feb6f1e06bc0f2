"""TPTP CNF unit-equality problems, abstraction files and proof output.

Only the CNF dialect is accepted.  Lowercase identifiers are function
symbols, uppercase identifiers are variables, ``%`` starts a comment.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .abstraction import Abstraction
from .completion import Outcome, Proof, ReplayError, Status, replay_proof
from .problem import Problem
from .terms import (
    App,
    Equation,
    Symbol,
    Term,
    Var,
    alpha_normalize_many,
    format_position,
    match_term,
    parse_position,
    replace_at,
    shift_vars,
    substitute,
    subterm_at,
    symbols,
    variables,
)

INCLUDE_ENV = "TWITCH_INCLUDE_DIR"
SKOLEM_RE = re.compile(r"sk\d+$")


class TPTPError(ValueError):
    """Input rejected; ``clause`` names the offending clause when known."""

    def __init__(self, message: str, clause: Optional[str] = None, line: Optional[int] = None):
        self.clause = clause
        self.line = line
        where = []
        if clause is not None:
            where.append(f"clause {clause}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


# --------------------------------------------------------------------------
# lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*|/\*.*?\*/)
  | (?P<neq>!=)
  | (?P<punct>[(),.=|~\[\]&:!?])
  | (?P<dollar>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<upper>[A-Z][A-Za-z0-9_]*)
  | (?P<lower>[a-z][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
  | (?P<dquoted>"(?:[^"\\]|\\.)*")
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass
class Token:
    kind: str
    text: str
    line: int


def tokenize(text: str) -> List[Token]:
    out = []
    pos = 0
    line = 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TPTPError(f"unexpected character {text[pos]!r}", line=line)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            out.append(Token(kind, tok, line))
        line += tok.count("\n")
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens: List[Token], clause: Optional[str] = None):
        self.toks = tokens
        self.i = 0
        self.clause = clause
        self.var_ids: Dict[str, int] = {}

    def peek(self, offset: int = 0) -> Optional[Token]:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def error(self, msg: str) -> TPTPError:
        tok = self.peek()
        return TPTPError(msg, self.clause, tok.line if tok else None)

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise TPTPError(f"expected {text!r}, found {tok.text!r}", self.clause, tok.line)
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def term(self) -> Term:
        tok = self.next()
        if tok.kind == "upper":
            vid = self.var_ids.setdefault(tok.text, len(self.var_ids))
            return Var(vid)
        if tok.kind == "dollar":
            raise TPTPError(f"{tok.text} is not supported; only equality literals are",
                            self.clause, tok.line)
        if tok.kind not in ("lower", "quoted", "int"):
            raise TPTPError(f"expected a term, found {tok.text!r}", self.clause, tok.line)
        name = tok.text
        args: List[Term] = []
        if self.at("("):
            self.next()
            args.append(self.term())
            while self.at(","):
                self.next()
                args.append(self.term())
            self.expect(")")
        return App(name, tuple(args))


def parse_term(text: str, var_ids: Optional[Dict[str, int]] = None) -> Term:
    """Parse one term in TPTP syntax.

    Variables are numbered by first occurrence unless ``var_ids`` supplies
    (and collects) a name-to-id mapping.
    """
    p = _Parser(tokenize(text))
    if var_ids is not None:
        p.var_ids = var_ids
    t = p.term()
    if p.peek() is not None:
        raise p.error(f"trailing input {p.peek().text!r}")
    return t


def parse_equation(text: str) -> Equation:
    """``"s = t"`` with shared variables, alpha-normalized jointly."""
    p = _Parser(tokenize(text))
    lhs = p.term()
    p.expect("=")
    rhs = p.term()
    if p.peek() is not None:
        raise p.error(f"trailing input {p.peek().text!r}")
    return Equation(lhs, rhs)


# --------------------------------------------------------------------------
# problems

@dataclass
class _Clause:
    name: str
    role: str
    lhs: Term
    rhs: Term
    positive: bool
    var_names: Dict[str, int]
    line: int


def _parse_literal(p: _Parser) -> Tuple[Term, Term, bool]:
    if p.at("("):
        # parenthesised literal, or a non-unit disjunction in parentheses
        p.next()
        lhs, rhs, pos = _parse_literal(p)
        if p.at("|"):
            raise p.error("non-unit clause: only single equality literals are supported")
        p.expect(")")
        return lhs, rhs, pos
    if p.at("~"):
        p.next()
        lhs, rhs, pos = _parse_literal(p)
        return lhs, rhs, not pos
    lhs = p.term()
    tok = p.peek()
    if tok is None or tok.text not in ("=", "!="):
        if tok is not None and tok.text == "|":
            raise p.error("non-unit clause: only single equality literals are supported")
        raise p.error("only equality literals are supported (predicate atom found)")
    p.next()
    rhs = p.term()
    if p.at("|"):
        raise p.error("non-unit clause: only single equality literals are supported")
    return lhs, rhs, tok.text == "="


def _unquote(text: str) -> str:
    if text[:1] in "'\"" and text[-1:] == text[:1]:
        return re.sub(r"\\(.)", r"\1", text[1:-1])
    return text


def _parse_statements(text: str, source: str) -> List[Union[_Clause, Tuple[str, Optional[List[str]], int]]]:
    toks = tokenize(text)
    p = _Parser(toks)
    out = []
    while p.peek() is not None:
        head = p.next()
        if head.text == "include":
            p.expect("(")
            path_tok = p.next()
            if path_tok.kind not in ("quoted", "dquoted"):
                raise TPTPError("include expects a quoted file name", line=path_tok.line)
            selection = None
            if p.at(","):
                p.next()
                p.expect("[")
                selection = []
                while not p.at("]"):
                    selection.append(_unquote(p.next().text))
                    if p.at(","):
                        p.next()
                p.expect("]")
            p.expect(")")
            p.expect(".")
            out.append((_unquote(path_tok.text), selection, head.line))
            continue
        if head.text in ("fof", "tff", "thf", "tcf"):
            raise TPTPError(f"{head.text} formulas are not supported; only cnf is",
                            line=head.line)
        if head.text != "cnf":
            raise TPTPError(f"unexpected {head.text!r} at top level", line=head.line)
        p.expect("(")
        name_tok = p.next()
        name = _unquote(name_tok.text)
        p.clause = name
        p.var_ids = {}
        p.expect(",")
        role = p.next().text
        p.expect(",")
        lhs, rhs, positive = _parse_literal(p)
        if p.at(","):
            # annotations are ignored: skip to the closing parenthesis
            depth = 0
            while True:
                tok = p.next()
                if tok.text == "(":
                    depth += 1
                elif tok.text == ")":
                    if depth == 0:
                        p.i -= 1
                        break
                    depth -= 1
        p.expect(")")
        p.expect(".")
        out.append(_Clause(name, role, lhs, rhs, positive, dict(p.var_ids), head.line))
        p.clause = None
    return out


def _resolve_include(path: str, include_base: Optional[Union[str, Path]], here: Optional[Path]) -> Path:
    candidates = []
    if include_base is not None:
        candidates.append(Path(include_base) / path)
    env = os.environ.get(INCLUDE_ENV)
    if env:
        candidates.append(Path(env) / path)
    if here is not None:
        candidates.append(here / path)
    candidates.append(Path(path))
    for c in candidates:
        if c.is_file():
            return c
    raise TPTPError(f"unresolved include {path!r}")


def _collect(text: str, include_base, here: Optional[Path], selection=None, depth=0) -> List[_Clause]:
    if depth > 16:
        raise TPTPError("include nesting too deep")
    clauses = []
    for st in _parse_statements(text, str(here)):
        if isinstance(st, tuple):
            path, sel, _line = st
            f = _resolve_include(path, include_base, here)
            clauses.extend(_collect(f.read_text(), include_base, f.parent, sel, depth + 1))
        elif selection is None or st.name in selection:
            clauses.append(st)
    return clauses


def parse_problem(text: str, include_base: Optional[Union[str, Path]] = None,
                  name: str = "problem", source_dir: Optional[Union[str, Path]] = None) -> Problem:
    """Parse a CNF unit-equality problem.

    ``include('file')`` directives are resolved against ``include_base``,
    then ``$TWITCH_INCLUDE_DIR``, then ``source_dir``.  The single
    negated conjecture ``s != t`` becomes the goal ``s = t`` with its
    variables replaced by Skolem constants ``sk0, sk1, ...``.
    """
    here = Path(source_dir) if source_dir is not None else None
    clauses = _collect(text, include_base, here)
    axioms: List[Equation] = []
    names: List[str] = []
    goals: List[_Clause] = []
    arities: Dict[str, Tuple[int, str]] = {}
    for c in clauses:
        for t in (c.lhs, c.rhs):
            for s in symbols(t):
                if SKOLEM_RE.match(s.name):
                    raise TPTPError(f"symbol {s.name} uses the reserved Skolem prefix", c.name)
                seen = arities.get(s.name)
                if seen is None:
                    arities[s.name] = (s.arity, c.name)
                elif seen[0] != s.arity:
                    raise TPTPError(
                        f"arity inconsistency: {s.name} used with arity {seen[0]} "
                        f"(clause {seen[1]}) and {s.arity}", c.name)
        if c.role in ("axiom", "hypothesis"):
            if not c.positive:
                raise TPTPError("negative literal in an axiom; only the negated conjecture "
                                "may be a disequation", c.name)
            axioms.append(Equation(*_normalize_pair(c.lhs, c.rhs)))
            names.append(c.name)
        elif c.role == "negated_conjecture":
            if c.positive:
                raise TPTPError("negated conjecture must be a disequation s != t", c.name)
            goals.append(c)
        else:
            raise TPTPError(f"unsupported role {c.role!r}", c.name)
    if len(goals) > 1:
        raise TPTPError(f"multiple goals: {', '.join(g.name for g in goals)}", goals[1].name)
    if not goals:
        raise TPTPError("no negated_conjecture clause")
    g = goals[0]
    order = []
    for t in (g.lhs, g.rhs):
        for v in variables(t):
            if v not in order:
                order.append(v)
    sk = {v: App(f"sk{i}", ()) for i, v in enumerate(order)}
    goal = Equation(substitute(g.lhs, sk), substitute(g.rhs, sk))
    return Problem(name, tuple(axioms), goal, None, tuple(names), g.name)


def _normalize_pair(l: Term, r: Term) -> Tuple[Term, Term]:
    a, b = alpha_normalize_many([l, r])
    return a, b


def load_problem(path: Union[str, Path], include_base: Optional[Union[str, Path]] = None) -> Problem:
    path = Path(path)
    name = path.name
    for suffix in (".p", ".tptp", ".ueq"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    return parse_problem(path.read_text(), include_base, name, path.parent)


def _render_var_term(t: Term, skolem_as_vars: bool = False) -> str:
    if isinstance(t, Var):
        return f"X{t.id}"
    if skolem_as_vars and not t.args and SKOLEM_RE.match(t.name):
        return "SK" + t.name[2:]
    if not t.args:
        return t.name
    return f"{t.name}({','.join(_render_var_term(a, skolem_as_vars) for a in t.args)})"


_PLAIN_NAME = re.compile(r"[a-z][A-Za-z0-9_]*$")


def _clause_name(name: str) -> str:
    if _PLAIN_NAME.match(name):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def render_problem(problem: Problem) -> str:
    lines = [f"% {problem.name}"]
    for name, ax in zip(problem.axiom_names, problem.axioms):
        lines.append(f"cnf({_clause_name(name)}, axiom, {_render_var_term(ax.lhs)} = {_render_var_term(ax.rhs)}).")
    g = problem.goal
    lines.append(
        f"cnf({_clause_name(problem.goal_name)}, negated_conjecture, "
        f"{_render_var_term(g.lhs, True)} != {_render_var_term(g.rhs, True)}).")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# abstraction files

def parse_abstractions(text: str, signature: Optional[Iterable[Symbol]] = None) -> List[Abstraction]:
    """One pattern per line; ``resonator:`` prefix marks a resonator."""
    sig = None
    if signature is not None:
        sig = {}
        for s in signature:
            sig.setdefault(s.name, set()).add(s.arity)
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        resonator = False
        if line.startswith("resonator:"):
            resonator = True
            line = line[len("resonator:"):].strip()
        try:
            t = parse_term(line)
        except TPTPError as e:
            raise TPTPError(f"bad abstraction: {e}", line=lineno)
        if isinstance(t, Var):
            raise TPTPError("bare-variable pattern is not an abstraction", line=lineno)
        if sig is not None:
            for s in symbols(t):
                if s.name not in sig:
                    raise TPTPError(f"unknown symbol {s.name}", line=lineno)
                if s.arity not in sig[s.name]:
                    raise TPTPError(
                        f"arity mismatch for {s.name}: {s.arity} not in {sorted(sig[s.name])}",
                        line=lineno)
        out.append(Abstraction.of(t, resonator))
    return out


def render_abstractions(absts: Iterable[Abstraction]) -> str:
    return "".join(f"{a}\n" for a in absts)


# --------------------------------------------------------------------------
# proofs

def _ordered_sub_lemmas(p: Proof) -> List[Tuple[int, Proof]]:
    found: Dict[int, Proof] = {}
    stack = [p]
    seen = set()
    while stack:
        q = stack.pop()
        if id(q) in seen:
            continue
        seen.add(id(q))
        for rid, sub in q.sub_lemmas.items():
            found.setdefault(rid, sub)
            stack.append(sub)
    return sorted(found.items())


def _axioms_used(p: Proof) -> Dict[int, Equation]:
    out: Dict[int, Equation] = {}
    for q in [p] + [s for _, s in _ordered_sub_lemmas(p)]:
        for rid in q.axioms_cited():
            out[rid] = q.lemmas[rid]
    return out


def _render_chain(q: Proof) -> List[str]:
    lines = [f"  {_render_var_term(q.terms[0])}"]
    for t, j in zip(q.terms[1:], q.steps):
        lines.append(f"  = {_render_var_term(t)} [rule {j.rule}, {format_position(j.position)}]")
    return lines


def render_proof(p: Proof, name: str = "problem") -> str:
    """SZS-framed proof text: goal chain, then each lemma, then the axioms used.

    Raises :class:`ReplayError` if the proof does not replay.
    """
    replay_proof(p)
    lines = [f"% SZS status Unsatisfiable for {name}",
             f"% SZS output start Proof for {name}",
             f"goal: {_render_var_term(p.conclusion.lhs)} = {_render_var_term(p.conclusion.rhs)}"]
    lines += _render_chain(p)
    for rid, sub in _ordered_sub_lemmas(p):
        c = sub.conclusion
        lines.append(f"lemma {rid}: {_render_var_term(c.lhs)} = {_render_var_term(c.rhs)}")
        lines += _render_chain(sub)
    for rid, eq in sorted(_axioms_used(p).items()):
        lines.append(f"axiom {rid}: {_render_var_term(eq.lhs)} = {_render_var_term(eq.rhs)}")
    lines.append(f"% SZS output end Proof for {name}")
    return "\n".join(lines) + "\n"


def szs_status(outcome: Outcome) -> str:
    if outcome.status is Status.PROVED:
        return "Unsatisfiable"
    if outcome.status is Status.SATURATED:
        return "Satisfiable"
    return "Timeout" if outcome.reason == "time limit" else "GaveUp"


def render_outcome(outcome: Outcome, name: str = "problem") -> str:
    if outcome.status is Status.PROVED:
        return render_proof(outcome.proof, name)
    return f"% SZS status {szs_status(outcome)} for {name}\n"


@dataclass
class _Block:
    kind: str
    ident: Optional[int]
    lhs: Term
    rhs: Term
    chain: List[Tuple[Term, Optional[Tuple[int, Tuple[int, ...]]]]]


_STEP_RE = re.compile(r"^=\s*(.*?)\s*\[rule\s+(\d+),\s*([\w.]+)\]\s*$")
_HEAD_RE = re.compile(r"^(goal|lemma\s+(\d+)|axiom\s+(\d+)):\s*(.*)$")


def parse_proof_text(text: str) -> List[_Block]:
    blocks: List[_Block] = []
    var_ids: Dict[str, int] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        m = _HEAD_RE.match(line)
        if m:
            var_ids = {}
            kind = m.group(1).split()[0]
            ident = m.group(2) or m.group(3)
            lhs_s, rhs_s = m.group(4).split(" = ", 1)
            lhs = parse_term(lhs_s, var_ids)
            rhs = parse_term(rhs_s, var_ids)
            blocks.append(_Block(kind, int(ident) if ident else None, lhs, rhs, []))
            continue
        if not blocks:
            raise ReplayError(f"chain line outside a block: {line}")
        m = _STEP_RE.match(line)
        if m:
            t = parse_term(m.group(1), var_ids)
            blocks[-1].chain.append((t, (int(m.group(2)), parse_position(m.group(3)))))
        else:
            blocks[-1].chain.append((parse_term(line, var_ids), None))
    return blocks


def _step_ok(before: Term, after: Term, eq: Tuple[Term, Term], pos) -> bool:
    try:
        a = subterm_at(before, pos)
        b = subterm_at(after, pos)
    except (AttributeError, IndexError):
        return False
    if replace_at(before, pos, b) != after:
        return False
    l, r = eq
    shift = 1 + max([v for t in (a, b) for v in variables(t)] + [-1])
    l, r = shift_vars(l, shift), shift_vars(r, shift)
    for x, y in ((l, r), (r, l)):
        s = match_term(x, a)
        if s is not None and match_term(y, b, s) is not None:
            return True
    return False


def check_proof_text(text: str, problem: Optional[Problem] = None) -> None:
    """Replay a rendered proof.  Raises :class:`ReplayError` on any bad step."""
    blocks = parse_proof_text(text)
    eqs: Dict[int, Tuple[Term, Term]] = {}
    for b in blocks:
        if b.kind in ("lemma", "axiom"):
            eqs[b.ident] = (b.lhs, b.rhs)
    if problem is not None:
        known = {ax.key() for ax in problem.axioms}
        for b in blocks:
            if b.kind == "axiom" and Equation(b.lhs, b.rhs).key() not in known:
                raise ReplayError(f"axiom {b.ident} is not a problem axiom")
        goals = [b for b in blocks if b.kind == "goal"]
        if not goals or (goals[0].lhs, goals[0].rhs) != problem.goal.as_pair():
            raise ReplayError("proof does not conclude the problem's goal")
    for b in blocks:
        if b.kind == "axiom":
            continue
        if not b.chain:
            raise ReplayError(f"{b.kind} {b.ident} has no chain")
        if b.chain[0][0] != b.lhs or b.chain[-1][0] != b.rhs:
            raise ReplayError(f"{b.kind} {b.ident}: chain does not connect its statement")
        for (before, _), (after, just) in zip(b.chain, b.chain[1:]):
            if just is None:
                raise ReplayError(f"{b.kind} {b.ident}: unjustified step to {after}")
            rid, pos = just
            if rid not in eqs:
                raise ReplayError(f"{b.kind} {b.ident}: cites unknown lemma {rid}")
            if not _step_ok(before, after, eqs[rid], pos):
                raise ReplayError(
                    f"{b.kind} {b.ident}: {before} -> {after} is not a step by {rid} at "
                    f"{format_position(pos)}")
