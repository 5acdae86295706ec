"""Exact linear constraints: ``sum(coeffs[x] * x) + const  rel  0``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

RELS = (">=", ">", "=")


@dataclass(frozen=True)
class LinConstraint:
    coeffs: tuple  # sorted ((var, coeff), ...) with coeff != 0
    const: Fraction
    rel: str

    @staticmethod
    def make(coeffs: Mapping[Hashable, Fraction], const=0, rel: str = ">=") -> "LinConstraint":
        if rel not in RELS:
            raise ValueError(f"unknown relation {rel!r}")
        items = tuple(sorted(((k, Fraction(c)) for k, c in coeffs.items() if c != 0), key=lambda kv: _key(kv[0])))
        return LinConstraint(items, Fraction(const), rel)

    @property
    def strict(self) -> bool:
        return self.rel == ">"

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def value(self, point: Mapping[Hashable, Fraction]) -> Fraction:
        return sum((c * Fraction(point.get(k, 0)) for k, c in self.coeffs), self.const)

    def holds(self, point: Mapping[Hashable, Fraction]) -> bool:
        v = self.value(point)
        if self.rel == ">=":
            return v >= 0
        if self.rel == ">":
            return v > 0
        return v == 0

    def trivial(self) -> bool | None:
        """Truth value of a constraint without variables, else None."""
        if self.coeffs:
            return None
        return LinConstraint((), self.const, self.rel).holds({})


def _key(k):
    return (type(k).__name__, k) if isinstance(k, (int, str, tuple)) else (type(k).__name__, repr(k))


def geq(coeffs: Mapping, const=0) -> LinConstraint:
    return LinConstraint.make(coeffs, const, ">=")


def gt(coeffs: Mapping, const=0) -> LinConstraint:
    return LinConstraint.make(coeffs, const, ">")


def eq(coeffs: Mapping, const=0) -> LinConstraint:
    return LinConstraint.make(coeffs, const, "=")


@dataclass
class LinSystem:
    """Constraints plus the set of variables known to be nonnegative."""

    constraints: list = field(default_factory=list)
    nonneg: set = field(default_factory=set)

    def variables(self) -> list:
        seen: dict = {}
        for c in self.constraints:
            for k, _ in c.coeffs:
                seen.setdefault(k, None)
        for k in sorted(self.nonneg, key=_key):
            seen.setdefault(k, None)
        return list(seen)

    def add(self, c: LinConstraint) -> None:
        self.constraints.append(c)

    def extend(self, cs: Iterable[LinConstraint]) -> None:
        self.constraints.extend(cs)

    def check(self, point: Mapping) -> bool:
        if any(Fraction(point.get(k, 0)) < 0 for k in self.nonneg):
            return False
        return all(c.holds(point) for c in self.constraints)


@dataclass
class LPResult:
    feasible: bool
    point: dict | None = None
