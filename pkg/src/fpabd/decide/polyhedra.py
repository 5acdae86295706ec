"""Small exact polyhedral toolkit: emptiness, negation, set difference, projection.

A polyhedron is a list of ``LinConstraint`` rows (``>=``, ``>`` or ``=``).
"""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

from .linear import LinConstraint, LinSystem
from . import fourier_motzkin, simplex


def is_empty(rows: Sequence[LinConstraint], nonneg: Iterable[Hashable] = ()) -> bool:
    return not simplex.feasible(LinSystem(list(rows), set(nonneg))).feasible


def point_in(rows: Sequence[LinConstraint], nonneg: Iterable[Hashable] = ()) -> dict | None:
    res = simplex.feasible(LinSystem(list(rows), set(nonneg)))
    return res.point if res.feasible else None


def negate(row: LinConstraint) -> list[list[LinConstraint]]:
    """Complement of one row as a union of polyhedra."""
    neg = {k: -a for k, a in row.coeffs}
    if row.rel == ">=":
        return [[LinConstraint.make(neg, -row.const, ">")]]
    if row.rel == ">":
        return [[LinConstraint.make(neg, -row.const, ">=")]]
    pos = dict(row.coeffs)
    return [[LinConstraint.make(pos, row.const, ">")], [LinConstraint.make(neg, -row.const, ">")]]


def difference(p: list, qs: Sequence[list]) -> list[list]:
    """Pieces covering p minus the union of qs; every piece is nonempty."""
    pieces = [p] if not is_empty(p) else []
    for q in qs:
        nxt = []
        for piece in pieces:
            if is_empty(piece + q):
                nxt.append(piece)
                continue
            prefix = list(piece)
            for row in q:
                for part in negate(row):
                    cand = prefix + part
                    if not is_empty(cand):
                        nxt.append(cand)
                prefix = prefix + [row]
        pieces = nxt
    return pieces


def project(rows: Sequence[LinConstraint], nonneg: Iterable[Hashable], keep: Sequence[Hashable], max_rows: int = 20000):
    """Exact projection onto ``keep`` by Fourier–Motzkin (ResourceLimit on blow-up)."""
    out = fourier_motzkin.project(LinSystem(list(rows), set(nonneg)), keep, max_rows=max_rows)
    return out


def remove_redundant(rows: Sequence[LinConstraint], nonneg: Iterable[Hashable] = ()) -> list[LinConstraint]:
    """Drop rows implied by the others.

    A forward pass keeps a row only if the rows kept so far do not imply it,
    so every LP stays small; a backward pass then removes kept rows made
    redundant by later ones.
    """
    nonneg = set(nonneg)
    rows = list(dict.fromkeys(rows))
    if is_empty(rows, nonneg):
        return [LinConstraint.make({}, -1, ">=")]
    kept: list[LinConstraint] = []
    for r in rows:
        if kept and all(is_empty(kept + part, nonneg) for part in negate(r)):
            continue
        kept.append(r)
    i = 0
    while i < len(kept):
        others = kept[:i] + kept[i + 1 :]
        if all(is_empty(others + part, nonneg) for part in negate(kept[i])):
            kept = others
        else:
            i += 1
    return kept
