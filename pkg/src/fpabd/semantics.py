"""Models and evaluation.

A world is an ``int`` bitmask over the model's variable list: bit ``i`` is
set iff ``varset[i]`` is true.  Distributions map worlds to exact
``Fraction`` weights; only entropy uses floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .formulas import (
    PIT,
    And,
    Delta,
    Formula,
    Impl,
    Inner,
    LCmp,
    LVar,
    Neg,
    Not,
    Odot,
    Oplus,
    Pr,
    PrCmp,
    Var,
    compare,
    inner_vars,
    term_literals,
)
from .limits import check_vars


class SemanticsError(ValueError):
    pass


@dataclass(frozen=True)
class ProbModel:
    varset: tuple
    dist: tuple  # sorted ((world, weight), ...) with weight > 0

    @staticmethod
    def from_weights(varset: Sequence[str], weights: Mapping[int, Fraction]) -> "ProbModel":
        items = tuple(sorted((w, Fraction(c)) for w, c in weights.items() if c != 0))
        if any(c < 0 for _, c in items):
            raise SemanticsError("negative weight")
        if sum((c for _, c in items), Fraction(0)) != 1:
            raise SemanticsError("weights do not sum to 1")
        return ProbModel(tuple(varset), items)

    @staticmethod
    def from_sets(varset: Sequence[str], weights: Mapping[Iterable[str], Fraction]) -> "ProbModel":
        return ProbModel.from_weights(varset, {world_of(varset, s): c for s, c in weights.items()})

    def weights(self) -> dict[int, Fraction]:
        return dict(self.dist)

    def world_sets(self) -> list[tuple[frozenset, Fraction]]:
        return [(world_members(self.varset, w), c) for w, c in self.dist]

    @property
    def support(self) -> list[int]:
        return [w for w, _ in self.dist]


def world_of(varset: Sequence[str], members: Iterable[str]) -> int:
    index = {v: i for i, v in enumerate(varset)}
    w = 0
    for m in members:
        if m not in index:
            raise SemanticsError(f"unknown variable {m!r}")
        w |= 1 << index[m]
    return w


def world_members(varset: Sequence[str], w: int) -> frozenset:
    return frozenset(v for i, v in enumerate(varset) if w >> i & 1)


def check_size(varset: Sequence[str]) -> None:
    check_vars(len(varset))


# ---------------------------------------------------------------- classical layer


def holds(phi: Inner, w: int, index: Mapping[str, int]) -> bool:
    if isinstance(phi, Var):
        try:
            return bool(w >> index[phi.name] & 1)
        except KeyError:
            raise SemanticsError(f"unknown variable {phi.name!r}") from None
    if isinstance(phi, Not):
        return not holds(phi.arg, w, index)
    if isinstance(phi, And):
        return all(holds(a, w, index) for a in phi.args)
    return any(holds(a, w, index) for a in phi.args)


def truth_vector(phi: Inner, varset: Sequence[str]) -> np.ndarray:
    """Boolean array over all 2^|varset| worlds, indexed by bitmask."""
    check_size(varset)
    bits = np.arange(1 << len(varset), dtype=np.int64)
    index = {v: i for i, v in enumerate(varset)}

    def go(f):
        if isinstance(f, Var):
            if f.name not in index:
                raise SemanticsError(f"unknown variable {f.name!r}")
            return (bits >> index[f.name]) & 1 == 1
        if isinstance(f, Not):
            return ~go(f.arg)
        parts = [go(a) for a in f.args]
        out = parts[0].copy()
        for p in parts[1:]:
            out = out & p if isinstance(f, And) else out | p
        return out

    return go(phi)


def truth_set(m: ProbModel | Sequence[str], phi: Inner) -> set[int]:
    varset = m.varset if isinstance(m, ProbModel) else tuple(m)
    return set(np.flatnonzero(truth_vector(phi, varset)).tolist())


def cpl_entails(phi: Inner, chi: Inner, varset: Sequence[str] | None = None) -> bool:
    """Classical entailment by truth table."""
    vs = tuple(sorted(inner_vars(phi) | inner_vars(chi))) if varset is None else tuple(varset)
    return bool(np.all(~truth_vector(phi, vs) | truth_vector(chi, vs)))


def measure_of(m: ProbModel, phi: Inner) -> Fraction:
    index = {v: i for i, v in enumerate(m.varset)}
    missing = inner_vars(phi) - set(index)
    if missing:
        raise SemanticsError(f"unknown variable {sorted(missing)[0]!r}")
    total = Fraction(0)
    for w, c in m.dist:
        if holds(phi, w, index):
            total += c
    return total


def conditional_probability(m: ProbModel, phi: Inner, chi: Inner) -> Fraction:
    denom = measure_of(m, chi)
    if denom == 0:
        raise SemanticsError("conditioning on an event of measure zero")
    return measure_of(m, And((phi, chi))) / denom


# ---------------------------------------------------------------- Łukasiewicz layer


def luk_neg(x: Fraction) -> Fraction:
    return 1 - x


def luk_odot(x: Fraction, y: Fraction) -> Fraction:
    return max(Fraction(0), x + y - 1)


def luk_oplus(x: Fraction, y: Fraction) -> Fraction:
    return min(Fraction(1), x + y)


def luk_impl(x: Fraction, y: Fraction) -> Fraction:
    return min(Fraction(1), 1 - x + y)


def _connective(f: Formula, atom_value) -> Fraction:
    if isinstance(f, Neg):
        return 1 - _connective(f.arg, atom_value)
    if isinstance(f, Delta):
        return Fraction(1) if _connective(f.arg, atom_value) == 1 else Fraction(0)
    if isinstance(f, Odot):
        return luk_odot(_connective(f.left, atom_value), _connective(f.right, atom_value))
    if isinstance(f, Oplus):
        return luk_oplus(_connective(f.left, atom_value), _connective(f.right, atom_value))
    if isinstance(f, Impl):
        return luk_impl(_connective(f.left, atom_value), _connective(f.right, atom_value))
    return atom_value(f)


def eval_luk(v: Mapping[str, Fraction], phi: Formula) -> Fraction:
    def atom(a):
        if isinstance(a, LVar):
            if a.name not in v:
                raise SemanticsError(f"unvalued variable {a.name!r}")
            return Fraction(v[a.name])
        if isinstance(a, LCmp):
            if a.name not in v:
                raise SemanticsError(f"unvalued variable {a.name!r}")
            return Fraction(1) if compare(Fraction(v[a.name]), a.op, a.bound) else Fraction(0)
        raise SemanticsError(f"{type(a).__name__} is not a Łukasiewicz atom")

    return _connective(phi, atom)


def eval_fp(m: ProbModel, alpha: Formula) -> Fraction:
    cache: dict[Inner, Fraction] = {}

    def mu(e):
        if e not in cache:
            cache[e] = measure_of(m, e)
        return cache[e]

    def atom(a):
        if isinstance(a, Pr):
            return mu(a.event)
        if isinstance(a, PrCmp):
            return Fraction(1) if compare(mu(a.event), a.op, a.bound) else Fraction(0)
        raise SemanticsError(f"{type(a).__name__} is not a probabilistic atom")

    return _connective(alpha, atom)


def product_model(varset: Sequence[str], marginals: Mapping[str, Fraction]) -> ProbModel:
    """Model in which the variables are independent with the given marginals."""
    weights: dict[int, Fraction] = {0: Fraction(1)}
    for i, v in enumerate(varset):
        p = Fraction(marginals.get(v, 0))
        nxt: dict[int, Fraction] = {}
        for w, c in weights.items():
            if p != 0:
                nxt[w | 1 << i] = nxt.get(w | 1 << i, 0) + c * p
            if p != 1:
                nxt[w] = nxt.get(w, 0) + c * (1 - p)
        weights = nxt
    return ProbModel.from_weights(varset, weights)


# ---------------------------------------------------------------- complete PITs


@dataclass
class Completeness:
    ok: bool
    reason: str = ""
    weights: dict = field(default_factory=dict)  # world -> value, zero values included


def check_complete(pit: PIT, varset: Sequence[str], granularity: int) -> Completeness:
    """Whether ``pit`` pins V-granular values on distinct full terms summing to 1."""
    index = {v: i for i, v in enumerate(varset)}
    bounds: dict[Inner, dict[str, set]] = {}
    for lam in pit.literals:
        if lam.op not in (">=", "<="):
            return Completeness(False, f"literal uses {lam.op}, expected a >=/<= pair")
        bounds.setdefault(lam.event, {">=": set(), "<=": set()})[lam.op].add(lam.bound)
    weights: dict[int, Fraction] = {}
    for ev, b in bounds.items():
        if len(b[">="]) != 1 or b[">="] != b["<="]:
            return Completeness(False, "an event is not pinned to a single value")
        lits = term_literals(ev)
        if lits is None:
            return Completeness(False, "event is not a term")
        names = [v for v, _ in lits]
        if len(set(names)) != len(names) or set(names) != set(varset):
            return Completeness(False, "event is not a full term over the variables")
        w = 0
        for v, pos in lits:
            if pos:
                w |= 1 << index[v]
        if w in weights:
            return Completeness(False, "two literals name the same world")
        c = next(iter(b[">="]))
        if (c * granularity).denominator != 1:
            return Completeness(False, f"value {c} is not in V")
        weights[w] = c
    if sum(weights.values(), Fraction(0)) != 1:
        return Completeness(False, "values do not sum to 1")
    return Completeness(True, "", weights)


def pit_to_model(pit: PIT, varset: Sequence[str], granularity: int) -> ProbModel:
    res = check_complete(pit, varset, granularity)
    if not res.ok:
        raise SemanticsError(f"not a complete PIT: {res.reason}")
    return ProbModel.from_weights(varset, res.weights)


def pit_values(pit: PIT) -> list[Fraction]:
    """Pinned values of an approx-pair PIT, one per event."""
    values: dict[Inner, Fraction] = {}
    for lam in pit.literals:
        values.setdefault(lam.event, lam.bound)
    return list(values.values())


def entropy_of_weights(weights: Iterable[Fraction]) -> float:
    return -sum(float(c) * math.log2(float(c)) for c in weights if c > 0) + 0.0


def entropy(pit: PIT) -> float:
    return entropy_of_weights(pit_values(pit))


def model_to_pit(m: ProbModel) -> PIT:
    """The complete PIT describing ``m``'s distribution (support worlds only)."""
    from .formulas import PIL, and_all

    lits = []
    for w, c in m.dist:
        term = and_all([Var(v) if w >> i & 1 else Not(Var(v)) for i, v in enumerate(m.varset)])
        lits.append(PIL(term, ">=", c))
        lits.append(PIL(term, "<=", c))
    return PIT(tuple(lits))
