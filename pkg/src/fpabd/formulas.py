"""Syntax of the two-layered probability logic.

Inner formulas are classical events (``Var``, ``Not``, ``And``, ``Or``).
Outer formulas combine probabilistic atoms ``Pr(event)`` and comparison
atoms ``Pr(event) op c`` with Łukasiewicz connectives.  The same connective
nodes are used over ``LVar``/``LCmp`` atoms for plain Łukasiewicz formulas.

All nodes are frozen dataclasses, so formulas hash and compare structurally.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

OPS = (">=", ">", "<=", "<")
LOWER_OPS = (">=", ">")
UPPER_OPS = ("<=", "<")
# complement of a comparison: not (x >= c) is x < c, and so on
NEGATED_OP = {">=": "<", ">": "<=", "<=": ">", "<": ">="}


class FormulaError(ValueError):
    """Malformed formula or problem text."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{message}{where}")


# ---------------------------------------------------------------- inner layer


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Inner"


@dataclass(frozen=True)
class And:
    args: tuple

    def __post_init__(self):
        if len(self.args) < 2:
            raise FormulaError("'and' needs at least two arguments")


@dataclass(frozen=True)
class Or:
    args: tuple

    def __post_init__(self):
        if len(self.args) < 2:
            raise FormulaError("'or' needs at least two arguments")


Inner = Union[Var, Not, And, Or]


# ---------------------------------------------------------------- outer layer


@dataclass(frozen=True)
class Pr:
    event: Inner


@dataclass(frozen=True)
class PrCmp:
    event: Inner
    op: str
    bound: Fraction

    def __post_init__(self):
        _check_cmp(self.op, self.bound)


@dataclass(frozen=True)
class LVar:
    """Propositional variable of a Łukasiewicz formula."""

    name: str


@dataclass(frozen=True)
class LCmp:
    name: str
    op: str
    bound: Fraction

    def __post_init__(self):
        _check_cmp(self.op, self.bound)


@dataclass(frozen=True)
class Neg:
    arg: "Formula"


@dataclass(frozen=True)
class Delta:
    arg: "Formula"


@dataclass(frozen=True)
class Odot:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Oplus:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Impl:
    left: "Formula"
    right: "Formula"


Atom = Union[Pr, PrCmp, LVar, LCmp]
Formula = Union[Pr, PrCmp, LVar, LCmp, Neg, Delta, Odot, Oplus, Impl]
BINARY = (Odot, Oplus, Impl)


def _check_cmp(op: str, bound: Fraction) -> None:
    if op not in OPS:
        raise FormulaError(f"unknown comparison {op!r}")
    if not isinstance(bound, Fraction):
        raise FormulaError("comparison bound must be a Fraction")
    if bound < 0 or bound > 1:
        raise FormulaError(f"constant outside [0,1]: {fmt_rational(bound)}")


# ---------------------------------------------------------------- shorthands


def iff(a: Formula, b: Formula) -> Formula:
    return Odot(Impl(a, b), Impl(b, a))


def approx(event: Inner, c: Fraction) -> Formula:
    return Odot(PrCmp(event, ">=", c), PrCmp(event, "<=", c))


def odot_all(items: Sequence[Formula]) -> Formula:
    """Right-nested conjunction of a nonempty sequence."""
    if not items:
        raise FormulaError("empty conjunction")
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Odot(f, out)
    return out


def and_all(items: Sequence[Inner]) -> Inner:
    items = tuple(items)
    if not items:
        raise FormulaError("empty conjunction")
    return items[0] if len(items) == 1 else And(items)


def or_all(items: Sequence[Inner]) -> Inner:
    items = tuple(items)
    if not items:
        raise FormulaError("empty disjunction")
    return items[0] if len(items) == 1 else Or(items)


# ---------------------------------------------------------------- traversal


def inner_vars(f: Inner) -> set[str]:
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, Not):
        return inner_vars(f.arg)
    out: set[str] = set()
    for a in f.args:
        out |= inner_vars(a)
    return out


def atoms(f: Formula) -> Iterator[Atom]:
    """Atoms of an outer or Łukasiewicz formula, left to right."""
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Neg, Delta)):
            stack.append(g.arg)
        elif isinstance(g, BINARY):
            stack.append(g.right)
            stack.append(g.left)
        else:
            yield g


def events_of(x: Formula | Iterable[Formula]) -> list[Inner]:
    """Events occurring under ``Pr``, deduplicated, in order of appearance."""
    formulas = [x] if _is_formula(x) else list(x)
    seen: dict[Inner, None] = {}
    for f in formulas:
        for a in atoms(f):
            if isinstance(a, (Pr, PrCmp)):
                seen.setdefault(a.event, None)
    return list(seen)


def formula_vars(x: Formula | Iterable[Formula]) -> set[str]:
    formulas = [x] if _is_formula(x) else list(x)
    out: set[str] = set()
    for f in formulas:
        for a in atoms(f):
            if isinstance(a, (Pr, PrCmp)):
                out |= inner_vars(a.event)
            else:
                out.add(a.name)
    return out


def _is_formula(x) -> bool:
    return isinstance(x, (Pr, PrCmp, LVar, LCmp, Neg, Delta, Odot, Oplus, Impl))


def size(f: Formula | Inner) -> int:
    if isinstance(f, (Var, LVar, LCmp)):
        return 1
    if isinstance(f, (Pr, PrCmp)):
        return 1 + size(f.event)
    if isinstance(f, (Not, Neg, Delta)):
        return 1 + size(f.arg)
    if isinstance(f, (And, Or)):
        return 1 + sum(size(a) for a in f.args)
    return 1 + size(f.left) + size(f.right)


def map_events(f: Formula, fn) -> Formula:
    """Rebuild ``f`` with every event replaced by ``fn(event)``."""
    if isinstance(f, Pr):
        return Pr(fn(f.event))
    if isinstance(f, PrCmp):
        return PrCmp(fn(f.event), f.op, f.bound)
    if isinstance(f, (LVar, LCmp)):
        return f
    if isinstance(f, Neg):
        return Neg(map_events(f.arg, fn))
    if isinstance(f, Delta):
        return Delta(map_events(f.arg, fn))
    return type(f)(map_events(f.left, fn), map_events(f.right, fn))


# ---------------------------------------------------------------- canonical order


def inner_key(f: Inner, order: dict[str, int]) -> tuple:
    if isinstance(f, Var):
        return (0, order.get(f.name, len(order)), f.name)
    if isinstance(f, Not):
        return (1, inner_key(f.arg, order))
    tag = 2 if isinstance(f, And) else 3
    return (tag, tuple(inner_key(a, order) for a in f.args))


def canonical_inner(f: Inner, order: dict[str, int]) -> Inner:
    """Sort the children of every and/or by declaration order."""
    if isinstance(f, Var):
        return f
    if isinstance(f, Not):
        return Not(canonical_inner(f.arg, order))
    args = sorted((canonical_inner(a, order) for a in f.args), key=lambda a: inner_key(a, order))
    return type(f)(tuple(args))


def canonical_formula(f: Formula, order: dict[str, int]) -> Formula:
    return map_events(f, lambda e: canonical_inner(e, order))


# ---------------------------------------------------------------- terms and literals


def term_literals(f: Inner) -> list[tuple[str, bool]] | None:
    """Literals of an L_CPL-term as (variable, polarity), or None if not a term."""
    parts = f.args if isinstance(f, And) else (f,)
    out = []
    for p in parts:
        if isinstance(p, Var):
            out.append((p.name, True))
        elif isinstance(p, Not) and isinstance(p.arg, Var):
            out.append((p.arg.name, False))
        else:
            return None
    return out


def is_term(f: Inner) -> bool:
    return term_literals(f) is not None


def term_from_literals(lits: Iterable[tuple[str, bool]], order: dict[str, int]) -> Inner:
    uniq = sorted(set(lits), key=lambda l: (order.get(l[0], len(order)), l[0], not l[1]))
    parts = [Var(v) if pos else Not(Var(v)) for v, pos in uniq]
    return and_all(parts)


def normalize_term(f: Inner, order: dict[str, int]) -> Inner:
    """Drop duplicate literals of a term and sort it."""
    lits = term_literals(f)
    if lits is None:
        raise FormulaError("not a conjunction of literals")
    return term_from_literals(lits, order)


def positive_shape(f: Inner) -> tuple[str, frozenset] | None:
    """Classify conjunctions/disjunctions of variables.

    Returns ("var", {v}), ("conj", vars) or ("disj", vars); None otherwise.
    """
    if isinstance(f, Var):
        return ("var", frozenset([f.name]))
    if isinstance(f, (And, Or)) and all(isinstance(a, Var) for a in f.args):
        names = frozenset(a.name for a in f.args)
        if len(names) == 1:
            return ("var", names)
        return ("conj" if isinstance(f, And) else "disj", names)
    return None


def positive_entails(a: tuple[str, frozenset], b: tuple[str, frozenset]) -> bool:
    """Classical entailment between conjunctions/disjunctions of variables."""
    ka, va = a
    kb, vb = b
    a_conj = ka in ("var", "conj")
    a_disj = ka in ("var", "disj")
    b_conj = kb in ("var", "conj")
    b_disj = kb in ("var", "disj")
    if a_conj and b_conj and vb <= va:
        return True
    if a_disj and b_disj and va <= vb:
        return True
    if a_conj and b_disj and va & vb:
        return True
    return False


# ---------------------------------------------------------------- PIL / PIT


@dataclass(frozen=True)
class PIL:
    event: Inner
    op: str
    bound: Fraction

    def __post_init__(self):
        _check_cmp(self.op, self.bound)

    @property
    def is_lower(self) -> bool:
        return self.op in LOWER_OPS

    def to_formula(self) -> PrCmp:
        return PrCmp(self.event, self.op, self.bound)

    def permits(self, x: Fraction) -> bool:
        return compare(x, self.op, self.bound)


@dataclass(frozen=True)
class PIT:
    literals: tuple

    def __post_init__(self):
        if not self.literals:
            raise FormulaError("a PIT needs at least one literal")

    def events(self) -> list[Inner]:
        return list(dict.fromkeys(l.event for l in self.literals))

    def to_formula(self) -> Formula:
        return odot_all([l.to_formula() for l in self.literals])

    def __len__(self) -> int:
        return len(self.literals)


def compare(x: Fraction, op: str, c: Fraction) -> bool:
    if op == ">=":
        return x >= c
    if op == ">":
        return x > c
    if op == "<=":
        return x <= c
    return x < c


def pil_from_formula(f: Formula) -> PIL | None:
    """A comparison atom (or its negation) over a term, as a PIL."""
    if isinstance(f, PrCmp) and is_term(f.event):
        return PIL(f.event, f.op, f.bound)
    if isinstance(f, Neg) and isinstance(f.arg, PrCmp) and is_term(f.arg.event):
        return PIL(f.arg.event, NEGATED_OP[f.arg.op], f.arg.bound)
    return None


def pit_from_formula(f: Formula | Iterable[Formula]) -> PIT | None:
    """Flatten an odot-tree of PILs; None if any leaf is not a PIL."""
    formulas = [f] if _is_formula(f) else list(f)
    lits: list[PIL] = []
    stack = list(reversed(formulas))
    while stack:
        g = stack.pop()
        if isinstance(g, Odot):
            stack.append(g.right)
            stack.append(g.left)
            continue
        lam = pil_from_formula(g) if isinstance(g, PrCmp) else None
        if lam is None:
            return None
        lits.append(lam)
    return PIT(tuple(lits)) if lits else None


_OP_RANK = {">=": 0, ">": 1, "<=": 2, "<": 3}


def _stronger_lower(a: PIL, b: PIL) -> PIL:
    if a.bound != b.bound:
        return a if a.bound > b.bound else b
    return a if a.op == ">" else b


def _stronger_upper(a: PIL, b: PIL) -> PIL:
    if a.bound != b.bound:
        return a if a.bound < b.bound else b
    return a if a.op == "<" else b


def canonical_pit(pit: PIT, order: dict[str, int]) -> PIT:
    """Keep the strongest lower and upper bound per event; sort literals."""
    lower: dict[Inner, PIL] = {}
    upper: dict[Inner, PIL] = {}
    for lam in pit.literals:
        ev = canonical_inner(lam.event, order)
        lam = PIL(ev, lam.op, lam.bound)
        table, pick = (lower, _stronger_lower) if lam.is_lower else (upper, _stronger_upper)
        table[ev] = pick(table[ev], lam) if ev in table else lam
    lits = list(lower.values()) + list(upper.values())
    return PIT(tuple(sort_pils(lits, order)))


def sort_pils(lits: Iterable[PIL], order: dict[str, int]) -> list[PIL]:
    return sorted(lits, key=lambda l: (inner_key(l.event, order), _OP_RANK[l.op], l.bound))


# ---------------------------------------------------------------- rendering


def fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def render(f) -> str:
    """Surface syntax for inner, outer and Łukasiewicz formulas, PILs and PITs."""
    if isinstance(f, PIT):
        items, lits, i = [], f.literals, 0
        while i < len(lits):
            a = lits[i]
            b = lits[i + 1] if i + 1 < len(lits) else None
            if b is not None and (a.op, b.op) == (">=", "<=") and a.event == b.event and a.bound == b.bound:
                items.append(f"(approx (pr {render(a.event)}) {fmt_rational(a.bound)})")
                i += 2
            else:
                items.append(render(a))
                i += 1
        out = items[-1]
        for it in reversed(items[:-1]):
            out = f"(odot {it} {out})"
        return out
    if isinstance(f, PIL):
        return render(f.to_formula())
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        return f"(not {render(f.arg)})"
    if isinstance(f, And):
        return "(and " + " ".join(render(a) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(render(a) for a in f.args) + ")"
    if isinstance(f, Pr):
        return f"(pr {render(f.event)})"
    if isinstance(f, PrCmp):
        return f"({f.op} (pr {render(f.event)}) {fmt_rational(f.bound)})"
    if isinstance(f, LVar):
        return f.name
    if isinstance(f, LCmp):
        return f"({f.op} {f.name} {fmt_rational(f.bound)})"
    if isinstance(f, Neg):
        return f"(neg {render(f.arg)})"
    if isinstance(f, Delta):
        return f"(delta {render(f.arg)})"
    if isinstance(f, Odot):
        # an adjacent >=/<= pair on one event prints as approx; it parses back identically
        l, r = f.left, f.right
        if (
            isinstance(l, PrCmp)
            and isinstance(r, PrCmp)
            and l.op == ">="
            and r.op == "<="
            and l.event == r.event
            and l.bound == r.bound
        ):
            return f"(approx (pr {render(l.event)}) {fmt_rational(l.bound)})"
        return f"(odot {render(l)} {render(r)})"
    if isinstance(f, Oplus):
        return f"(oplus {render(f.left)} {render(f.right)})"
    if isinstance(f, Impl):
        return f"(impl {render(f.left)} {render(f.right)})"
    raise TypeError(f"cannot render {type(f).__name__}")


# ---------------------------------------------------------------- tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<cmp>>=|<=|>|<)
  | (?P<num>-?\d+(?:/\d+)?)
  | (?P<punct>[(){};:=])
  | (?P<word>[A-Za-z_][A-Za-z0-9_\-]*)
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            out.append(Token(kind, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    return out


# ---------------------------------------------------------------- parser

_INNER_HEADS = ("not", "and", "or")
_KEYWORDS = {"pr", "not", "and", "or", "neg", "delta", "odot", "oplus", "impl", "approx"}


class _Parser:
    def __init__(self, text: str, declared: Sequence[str] | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.declared = list(declared) if declared is not None else None
        self.order = {v: k for k, v in enumerate(self.declared or [])}

    # token helpers
    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek() or (self.toks[-1] if self.toks else None)
        if tok is None:
            raise FormulaError(msg, 1, 1)
        raise FormulaError(msg, tok.line, tok.col)

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            self.error(f"expected {text!r}, got {tok.text!r}", tok)
        return tok

    def at(self, text: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok is not None and tok.text == text

    def done(self) -> bool:
        return self.i >= len(self.toks)

    # atoms
    def ident(self) -> str:
        tok = self.next()
        if tok.kind != "word" or tok.text in _KEYWORDS:
            self.error(f"expected a variable name, got {tok.text!r}", tok)
        if self.declared is not None and tok.text not in self.order:
            self.error(f"undeclared variable {tok.text!r}", tok)
        return tok.text

    def rational(self) -> Fraction:
        tok = self.next()
        if tok.kind != "num":
            self.error(f"expected a rational constant, got {tok.text!r}", tok)
        try:
            value = Fraction(tok.text)
        except ZeroDivisionError:
            self.error("zero denominator", tok)
        if value < 0 or value > 1:
            self.error(f"constant outside [0,1]: {tok.text}", tok)
        return value

    def integer(self) -> int:
        tok = self.next()
        if tok.kind != "num" or "/" in tok.text:
            self.error(f"expected an integer, got {tok.text!r}", tok)
        return int(tok.text)

    # inner formulas
    def inner(self) -> Inner:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        if tok.kind == "word":
            return Var(self.ident())
        if tok.text != "(":
            self.error(f"expected an event, got {tok.text!r}", tok)
        self.next()
        head = self.next()
        if head.text == "not":
            arg = self.inner()
            self.expect(")")
            return Not(arg)
        if head.text in ("and", "or"):
            args = [self.inner()]
            while not self.at(")"):
                args.append(self.inner())
            self.expect(")")
            if len(args) == 1:
                # (and p) is accepted and means p
                return args[0]
            node = And(tuple(args)) if head.text == "and" else Or(tuple(args))
            return canonical_inner(node, self.order)
        if head.kind == "word" and head.text not in _KEYWORDS and len(self.toks) > self.i and self.at(")"):
            # a parenthesised variable, as used in hypothesis lists
            self.i -= 1
            name = self.ident()
            self.expect(")")
            return Var(name)
        self.error(f"expected not/and/or, got {head.text!r}", head)

    def pr_event(self) -> Inner:
        self.expect("(")
        self.expect("pr")
        ev = self.inner()
        self.expect(")")
        return ev

    # outer formulas
    def outer(self) -> Formula:
        self.expect("(")
        head = self.next()
        h = head.text
        if h == "pr":
            ev = self.inner()
            self.expect(")")
            return Pr(ev)
        if head.kind == "cmp":
            ev = self.pr_event()
            c = self.rational()
            self.expect(")")
            return PrCmp(ev, h, c)
        if h == "approx":
            ev = self.pr_event()
            c = self.rational()
            self.expect(")")
            return approx(ev, c)
        if h in ("neg", "delta"):
            arg = self.outer()
            self.expect(")")
            return Neg(arg) if h == "neg" else Delta(arg)
        if h in ("odot", "oplus", "impl", "iff"):
            a = self.outer()
            b = self.outer()
            self.expect(")")
            if h == "iff":
                return iff(a, b)
            return {"odot": Odot, "oplus": Oplus, "impl": Impl}[h](a, b)
        self.error(f"unknown outer connective {h!r}", head)

    # Łukasiewicz formulas over plain variables
    def luk(self) -> Formula:
        tok = self.peek()
        if tok is not None and tok.kind == "word":
            return LVar(self.ident())
        self.expect("(")
        head = self.next()
        h = head.text
        if head.kind == "cmp":
            name = self.ident()
            c = self.rational()
            self.expect(")")
            return LCmp(name, h, c)
        if h in ("neg", "delta"):
            arg = self.luk()
            self.expect(")")
            return Neg(arg) if h == "neg" else Delta(arg)
        if h in ("odot", "oplus", "impl", "iff"):
            a = self.luk()
            b = self.luk()
            self.expect(")")
            if h == "iff":
                return iff(a, b)
            return {"odot": Odot, "oplus": Oplus, "impl": Impl}[h](a, b)
        self.error(f"unknown connective {h!r}", head)

    def starts_inner(self) -> bool:
        tok = self.peek()
        if tok is None:
            return False
        if tok.kind == "word":
            return True
        nxt = self.peek(1)
        return tok.text == "(" and nxt is not None and (nxt.text in _INNER_HEADS or nxt.text not in _KEYWORDS and nxt.kind == "word")


def parse_inner(text: str, declared: Sequence[str] | None = None) -> Inner:
    p = _Parser(text, declared)
    f = p.inner()
    if not p.done():
        p.error("trailing input")
    return f


def parse_outer(text: str, declared: Sequence[str] | None = None) -> Formula:
    p = _Parser(text, declared)
    f = p.outer()
    if not p.done():
        p.error("trailing input")
    return f


def parse_outer_list(text: str, declared: Sequence[str] | None = None) -> list[Formula]:
    """One or more outer formulas separated by whitespace."""
    p = _Parser(text, declared)
    out = []
    while not p.done():
        out.append(p.outer())
    if not out:
        raise FormulaError("no formula found", 1, 1)
    return out


def parse_pit(text: str, declared: Sequence[str] | None = None) -> PIT:
    """A PIT written as PILs (or odot/approx combinations of them)."""
    pit = pit_from_formula(parse_outer_list(text, declared))
    if pit is None:
        raise FormulaError("solution must be a conjunction of Pr(term) comparisons", 1, 1)
    return pit


def parse_luk(text: str, declared: Sequence[str] | None = None) -> Formula:
    p = _Parser(text, declared)
    f = p.luk()
    if not p.done():
        p.error("trailing input")
    return f


# ---------------------------------------------------------------- problems


@dataclass(frozen=True)
class TheoryQuery:
    """A theory with an optional observation, for sat/entail queries."""

    variables: tuple
    theory: tuple
    observation: Formula | None = None


@dataclass(frozen=True)
class AbductionProblem:
    """An FP abduction problem: theory, observation, hypotheses, granularity."""

    variables: tuple
    theory: tuple
    observation: Formula
    hypotheses: tuple
    granularity: int

    @property
    def order(self) -> dict[str, int]:
        return {v: k for k, v in enumerate(self.variables)}

    @property
    def varset(self) -> tuple:
        """Var[P]: variables of the theory and the observation, declaration order."""
        used = formula_vars(list(self.theory) + [self.observation])
        return tuple(v for v in self.variables if v in used)

    @property
    def values(self) -> list[Fraction]:
        n = self.granularity
        return [Fraction(k, n) for k in range(n + 1)]

    def in_values(self, c: Fraction) -> bool:
        return (c * self.granularity).denominator == 1

    def events(self) -> list[Inner]:
        """E[P]: events of theory and observation plus the hypotheses."""
        evs = dict.fromkeys(events_of(list(self.theory) + [self.observation]))
        for h in self.hypotheses:
            evs.setdefault(h, None)
        return list(evs)


@dataclass(frozen=True)
class PrAP:
    """Classical probabilistic abduction problem with a partial assignment."""

    variables: tuple
    theory: tuple  # inner formulas, read conjunctively
    observation: Inner
    hypotheses: tuple  # literals
    assignment: tuple  # (event, value) pairs

    @property
    def order(self) -> dict[str, int]:
        return {v: k for k, v in enumerate(self.variables)}

    @property
    def phi(self) -> Inner:
        if not self.theory:
            # empty theory: a tautology over the first hypothesis variable
            v = Var(self.variables[0])
            return Or((v, Not(v)))
        return and_all(self.theory)

    @property
    def varset(self) -> tuple:
        used: set[str] = set()
        for f in list(self.theory) + [self.observation] + list(self.hypotheses):
            used |= inner_vars(f)
        for e, _ in self.assignment:
            used |= inner_vars(e)
        return tuple(v for v in self.variables if v in used)


def parse_problem(text: str) -> TheoryQuery | AbductionProblem | PrAP:
    """Parse a problem file; the sections present decide the query type."""
    p = _Parser(text)
    tok = p.peek()
    if tok is None or tok.text != "vars":
        p.error("file must start with 'vars:'")
    p.next()
    p.expect(":")
    names = []
    while not p.at(";"):
        t = p.next()
        if t.kind != "word" or t.text in _KEYWORDS:
            p.error(f"bad variable name {t.text!r}", t)
        if t.text in names:
            p.error(f"variable {t.text!r} declared twice", t)
        names.append(t.text)
    p.expect(";")
    if not names:
        p.error("no variables declared")
    p.declared = names
    p.order = {v: k for k, v in enumerate(names)}

    granularity = None
    if p.at("granularity"):
        p.next()
        p.expect(":")
        gtok = p.peek()
        granularity = p.integer()
        if granularity < 1:
            p.error("granularity must be a positive integer", gtok)
        p.expect(";")

    theory: list[Formula] | None = None
    obs_tok = None
    hyps: list[Inner] | None = None
    hyp_toks: list[Token] = []
    events: list[tuple[Inner, Fraction]] | None = None
    cpl: list[Inner] | None = None
    raw_obs = None

    while not p.done():
        tok = p.next()
        key = tok.text
        if key == "theory":
            if theory is not None:
                p.error("duplicate theory section", tok)
            p.expect("{")
            theory = []
            while not p.at("}"):
                theory.append(p.outer())
            p.expect("}")
        elif key == "obs":
            if raw_obs is not None:
                p.error("duplicate obs section", tok)
            p.expect(":")
            obs_tok = p.peek()
            raw_obs = ("inner", p.inner()) if p.starts_inner() else ("outer", p.outer())
            p.expect(";")
        elif key == "hyps":
            if hyps is not None:
                p.error("duplicate hyps section", tok)
            p.expect(":")
            hyps = []
            while not p.at(";"):
                hyp_toks.append(p.peek())
                hyps.append(p.inner())
            p.expect(";")
        elif key == "events":
            if events is not None:
                p.error("duplicate events section", tok)
            p.expect("{")
            events = []
            while not p.at("}"):
                ev = p.inner()
                p.expect("=")
                events.append((ev, p.rational()))
            p.expect("}")
        elif key == "cpl-theory":
            if cpl is not None:
                p.error("duplicate cpl-theory section", tok)
            p.expect("{")
            cpl = []
            while not p.at("}"):
                cpl.append(p.inner())
            p.expect("}")
        else:
            p.error(f"unknown section {key!r}", tok)

    order = p.order
    if cpl is not None or events is not None:
        if theory is not None:
            raise FormulaError("a file cannot mix 'theory' with PrAP sections", 1, 1)
        if raw_obs is None or raw_obs[0] != "inner":
            raise FormulaError("a PrAP needs an event observation 'obs: <event> ;'", *(_pos(obs_tok)))
        hyp_list = []
        for h, t in zip(hyps or [], hyp_toks):
            lits = term_literals(h)
            if lits is None or len(lits) != 1:
                raise FormulaError("PrAP hypotheses must be literals", t.line, t.col)
            hyp_list.append(h)
        hyp_list = list(dict.fromkeys(hyp_list))
        prap = PrAP(
            variables=tuple(names),
            theory=tuple(cpl or ()),
            observation=raw_obs[1],
            hypotheses=tuple(hyp_list),
            assignment=tuple(events or ()),
        )
        base = set()
        for f in list(prap.theory) + [prap.observation]:
            base |= inner_vars(f)
        for h, t in zip(prap.hypotheses, hyp_toks):
            if not inner_vars(h) <= base:
                raise FormulaError("hypothesis variables must occur in the theory or observation", t.line, t.col)
        return prap

    if raw_obs is not None and raw_obs[0] != "outer":
        raise FormulaError("observation must be an outer formula", *(_pos(obs_tok)))
    obs = raw_obs[1] if raw_obs else None
    theory_t = tuple(theory or ())
    if hyps is None:
        return TheoryQuery(tuple(names), theory_t, obs)
    if obs is None:
        raise FormulaError("an abduction problem needs an observation", 1, 1)
    if granularity is None:
        raise FormulaError("granularity is mandatory for abduction problems", 1, 1)
    base = formula_vars(list(theory_t) + [obs])
    hyp_list = []
    for h, t in zip(hyps, hyp_toks):
        if not is_term(h):
            raise FormulaError("hypotheses must be conjunctions of literals", t.line, t.col)
        if not inner_vars(h) <= base:
            raise FormulaError("hypothesis variables must occur in the theory or observation", t.line, t.col)
        hyp_list.append(normalize_term(h, order))
    return AbductionProblem(
        variables=tuple(names),
        theory=theory_t,
        observation=obs,
        hypotheses=tuple(dict.fromkeys(hyp_list)),
        granularity=granularity,
    )


def _pos(tok: Token | None) -> tuple:
    return (tok.line, tok.col) if tok is not None else (1, 1)


# ---------------------------------------------------------------- printing problems


def render_problem(prob) -> str:
    """Problem text in the file grammar; parse_problem reads it back."""
    lines = ["vars: " + " ".join(prob.variables) + ";"]
    if isinstance(prob, AbductionProblem):
        lines.append(f"granularity: {prob.granularity};")
    if isinstance(prob, PrAP):
        lines.append("cpl-theory {")
        lines += ["  " + render(f) for f in prob.theory]
        lines.append("}")
        lines.append("events {")
        lines += [f"  {render(e)} = {fmt_rational(c)}" for e, c in prob.assignment]
        lines.append("}")
        lines.append(f"obs: {render(prob.observation)};")
        if prob.hypotheses:
            lines.append("hyps: " + " ".join(render(h) for h in prob.hypotheses) + ";")
        return "\n".join(lines) + "\n"
    lines.append("theory {")
    lines += ["  " + render(f) for f in prob.theory]
    lines.append("}")
    if prob.observation is not None:
        lines.append(f"obs: {render(prob.observation)};")
    if isinstance(prob, AbductionProblem):
        lines.append("hyps: " + " ".join(render(h) for h in prob.hypotheses) + ";")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- negated events


def normalize_negated_events(f: Formula, order: dict[str, int] | None = None) -> Formula:
    out = _normalize_negated(f)
    return canonical_formula(out, order or {})


def _normalize_negated(f: Formula) -> Formula:
    """Rewrite Pr(φ) with negated φ into negation-free form where possible.

    Uses Pr(¬φ) = ¬Pr(φ) and De Morgan.  Comparison atoms flip accordingly:
    Pr(¬φ) ≥ c becomes Pr(φ) ≤ 1−c.  Events that stay mixed are untouched.
    """
    if isinstance(f, Pr):
        pol, ev = _pull_negation(f.event)
        if ev is None:
            return f
        return Pr(ev) if pol else Neg(Pr(ev))
    if isinstance(f, PrCmp):
        pol, ev = _pull_negation(f.event)
        if ev is None:
            return f
        if pol:
            return PrCmp(ev, f.op, f.bound)
        flipped = {">=": "<=", ">": "<", "<=": ">=", "<": ">"}[f.op]
        return PrCmp(ev, flipped, 1 - f.bound)
    if isinstance(f, (LVar, LCmp)):
        return f
    if isinstance(f, Neg):
        inner = _normalize_negated(f.arg)
        if isinstance(inner, Neg):
            return inner.arg
        return Neg(inner)
    if isinstance(f, Delta):
        return Delta(_normalize_negated(f.arg))
    if isinstance(f, Impl):
        a = _normalize_negated(f.left)
        b = _normalize_negated(f.right)
        if isinstance(a, Neg):
            # ¬x → y equals x ⊕ y
            return Oplus(a.arg, b)
        return Impl(a, b)
    return type(f)(_normalize_negated(f.left), _normalize_negated(f.right))


def _negation_free(e: Inner) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, Not):
        return False
    return all(_negation_free(a) for a in e.args)


def _push(e: Inner, negate: bool) -> Inner | None:
    """Push negations to literals; None if a negated variable remains."""
    if isinstance(e, Var):
        return None if negate else e
    if isinstance(e, Not):
        return _push(e.arg, not negate)
    args = [_push(a, negate) for a in e.args]
    if any(a is None for a in args):
        return None
    cls = type(e)
    if negate:
        cls = Or if cls is And else And
    return cls(tuple(args))


def _pull_negation(e: Inner) -> tuple[bool, Inner | None]:
    """(polarity, negation-free event) with Pr(e) = Pr(ev) or 1 - Pr(ev).

    Returns (True, None) when e is already negation-free or cannot be made so.
    """
    if _negation_free(e):
        return True, None
    pos = _push(e, False)
    if pos is not None:
        return True, pos
    neg = _push(e, True)
    if neg is not None:
        return False, neg
    return True, None


# ---------------------------------------------------------------- fragments


@dataclass(frozen=True)
class FragmentReport:
    is_CP_events: bool = False
    is_CIP: bool = False
    is_PSC_theory: bool = False
    is_PSC_AP: bool = False
    is_PIC_theory: bool = False
    is_SPCF_theory: bool = False
    is_SPCF_AP: bool = False
    is_PIL: bool = False
    is_PIT: bool = False
    is_complete_PIT: bool = False

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _positive(e: Inner) -> bool:
    return positive_shape(e) is not None


def _psc_literals(f: Formula, positive: bool = True) -> bool:
    """Whether f (or its negation) is a ⊕ of Pr(σ) and ¬Pr(τ) with positive events."""
    if isinstance(f, Pr):
        return _positive(f.event)
    if isinstance(f, Neg):
        return _psc_literals(f.arg, not positive)
    if isinstance(f, Oplus) and positive:
        return _psc_literals(f.left, True) and _psc_literals(f.right, True)
    if isinstance(f, Odot) and not positive:
        return _psc_literals(f.left, False) and _psc_literals(f.right, False)
    if isinstance(f, Impl) and positive:
        return _psc_literals(f.left, False) and _psc_literals(f.right, True)
    return False


def is_psc(f: Formula) -> bool:
    return _psc_literals(f)


def is_pic(f: Formula, positive: bool = True) -> bool:
    """A ⊕ of comparison atoms, accepting ¬, → and ⊙ forms that unfold to one."""
    if isinstance(f, PrCmp):
        return True
    if isinstance(f, Neg):
        return is_pic(f.arg, not positive)
    if isinstance(f, Oplus) and positive:
        return is_pic(f.left, True) and is_pic(f.right, True)
    if isinstance(f, Odot) and not positive:
        return is_pic(f.left, False) and is_pic(f.right, False)
    if isinstance(f, Impl) and positive:
        return is_pic(f.left, False) and is_pic(f.right, True)
    return False


def _psc_theory(formulas: list) -> bool:
    from . import fragments

    if not fragments.is_chained_positive(events_of(formulas)):
        return False
    return all(is_psc(f) or (isinstance(f, PrCmp) and _positive(f.event)) for f in formulas)


def classify(obj, varset: Sequence[str] | None = None, granularity: int | None = None) -> FragmentReport:
    """Fragment membership flags for a theory, a problem, a formula or a PIT.

    For an abduction problem the theory flags refer to Γ ∪ {δ}, and the CP
    flag to all events of the problem including the hypotheses.
    """
    from . import fragments

    problem = obj if isinstance(obj, AbductionProblem) else None
    pit = None
    if isinstance(obj, PIT):
        pit = obj
        formulas = list(_pils_of(obj))
    elif isinstance(obj, (AbductionProblem, TheoryQuery)):
        formulas = list(obj.theory) + ([obj.observation] if obj.observation is not None else [])
        if varset is None:
            varset = obj.variables
        if granularity is None and problem is not None:
            granularity = problem.granularity
    elif _is_formula(obj):
        formulas = [obj]
    else:
        formulas = list(obj)
    if pit is None and formulas and not isinstance(obj, (AbductionProblem, TheoryQuery)):
        pit = pit_from_formula(formulas)
    events = problem.events() if problem is not None else events_of(formulas)
    cp = fragments.is_chained_positive(events)
    cip = fragments.is_chained_positive(events_of(formulas))
    psc_theory = cip and _psc_theory(formulas)
    spcf_theory = cip and fragments.is_spcf_theory(formulas)
    flags = dict(
        is_CP_events=cp,
        is_CIP=cip,
        is_PSC_theory=psc_theory,
        is_PIC_theory=bool(formulas) and all(is_pic(f) for f in formulas),
        is_SPCF_theory=spcf_theory,
        is_PIT=pit is not None,
        is_PIL=pit is not None and len(formulas) == 1 and len(pit) == 1,
    )
    if problem is not None:
        flags["is_PSC_AP"] = psc_theory and cp
        flags["is_SPCF_AP"] = spcf_theory and cp and isinstance(problem.observation, PrCmp)
    if pit is not None and varset is not None and granularity is not None:
        from .semantics import check_complete

        used = sorted({v for lam in pit.literals for v in inner_vars(lam.event)})
        vs = list(varset) if set(used) <= set(varset) else used
        flags["is_complete_PIT"] = check_complete(pit, vs, granularity).ok
    return FragmentReport(**flags)


def _pils_of(pit: PIT) -> list:
    return [lam.to_formula() for lam in pit.literals]
