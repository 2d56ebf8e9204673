"""Cayley configurations of Laurent polynomial systems.

For ``q_1, ..., q_e`` in ``n`` variables the Cayley matrix has ``e``
block-indicator rows on top and the exponent vectors of each ``q_j`` below,
one column per monomial. Columns inside a block are in lexicographic
order of their exponents.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimMismatch, InputError, NonPositiveWeight, NotFullDim, NotSaturated, RankDeficient
from .exact import (
    IntMatrix,
    RatVector,
    det_int,
    identity,
    inverse_rat,
    matvec,
    rank_rat,
    smith_normal_form,
    solve_exact,
    transpose,
)
from .laurent import LaurentPoly, lex_first_exponent
from .triangulate import Configuration


@dataclass(frozen=True)
class CayleyConfig:
    n: int
    e: int
    block_sizes: tuple[int, ...]
    matrix: IntMatrix
    column_owner: tuple[int, ...]
    coefficients: tuple

    @property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        return transpose(self.matrix)

    @property
    def configuration(self) -> Configuration:
        return Configuration(self.columns)

    def __len__(self):
        return len(self.column_owner)


@dataclass(frozen=True)
class DeltaVector:
    v: RatVector
    u: RatVector

    @property
    def combined(self) -> RatVector:
        return self.v + self.u


def _check_dims(qs: Sequence[LaurentPoly]) -> int:
    if not qs:
        raise InputError("need at least one polynomial")
    n = qs[0].dim
    for q in qs:
        q.require_nonzero()
        if q.dim != n:
            raise DimMismatch("polynomials in differing numbers of variables")
    return n


def _difference_matrix(qs: Sequence[LaurentPoly]) -> list[list[int]]:
    """Exponent differences ``a - a_j0`` inside each block, as columns (n x K)."""
    n = qs[0].dim
    cols = []
    for q in qs:
        first = lex_first_exponent(q)
        cols.extend(tuple(a - b for a, b in zip(exp, first)) for exp in q.exponents() if exp != first)
    if not cols:
        return [[] for _ in range(n)]
    return [list(row) for row in transpose(cols)]


def build_cayley(qs: Sequence[LaurentPoly]) -> CayleyConfig:
    n = _check_dims(qs)
    e = len(qs)
    diffs = _difference_matrix(qs)
    if n and (not diffs[0] or rank_rat(diffs) < n):
        raise NotFullDim("the Minkowski sum of the Newton polytopes is not full-dimensional")
    columns, owner, coefs = [], [], []
    for j, q in enumerate(qs):
        for exp in sorted(q.terms):
            columns.append(tuple(int(i == j) for i in range(e)) + exp)
            owner.append(j)
            coefs.append(q.terms[exp])
    matrix = transpose(columns)
    _, s, _ = smith_normal_form(matrix)
    diag = tuple(s[i][i] for i in range(n + e))
    if any(d != 1 for d in diag):
        raise NotSaturated(f"columns generate a sublattice (Smith diagonal {list(diag)})", diag)
    return CayleyConfig(
        n=n,
        e=e,
        block_sizes=tuple(len(q.terms) for q in qs),
        matrix=matrix,
        column_owner=tuple(owner),
        coefficients=tuple(coefs),
    )


def _lattice_basis(qs: Sequence[LaurentPoly]) -> IntMatrix:
    """A square matrix Q whose columns span the exponent-difference lattice."""
    n = qs[0].dim
    diffs = _difference_matrix(qs)
    if not diffs[0] or rank_rat(diffs) < n:
        raise RankDeficient("exponent differences do not span Q^n")
    u, s, _ = smith_normal_form(diffs)
    u_inv = [[int(x) for x in row] for row in inverse_rat(u)]
    return tuple(tuple(u_inv[i][k] * s[k][k] for k in range(n)) for i in range(n))


def saturation_repair(qs: Sequence[LaurentPoly]) -> tuple[list[LaurentPoly], IntMatrix]:
    """Rewrite exponents in a basis of the lattice they generate.

    Returns ``(qs', Q)``: if the exponent lattice is already ``Z^n`` the
    input comes back unchanged with ``Q = I``. Otherwise each ``q_j`` is
    first divided by its lexicographically first monomial, then exponents
    ``a`` become ``Q^{-1} a``, i.e. the substitution ``y = x^{Q^{-1}}``.
    """
    n = _check_dims(qs)
    q_mat = _lattice_basis(qs)
    if abs(det_int(q_mat)) == 1:
        return list(qs), identity(n)
    q_inv = inverse_rat(q_mat)
    out = []
    for q in qs:
        first = lex_first_exponent(q)
        terms = {}
        for exp, c in q.terms.items():
            b = matvec(q_inv, [a - f for a, f in zip(exp, first)])
            assert all(x.denominator == 1 for x in b)
            terms[tuple(int(x) for x in b)] = c
        out.append(LaurentPoly(n, terms))
    return out, q_mat


def repair_problem(qs: Sequence[LaurentPoly], v: Sequence, u: Sequence):
    """Saturation repair together with the induced change of ``u``.

    Returns ``(qs', u', Q)``. The stringy integral transforms as
    ``amplitude(qs, v, u) = amplitude(qs', v, u') / |det Q|``.
    """
    new_qs, q_mat = saturation_repair(qs)
    u = [Fraction(x) for x in u]
    if abs(det_int(q_mat)) == 1:
        return new_qs, tuple(u), q_mat
    shifted = list(u)
    for q, vj in zip(qs, v):
        for i, a in enumerate(lex_first_exponent(q)):
            shifted[i] -= Fraction(vj) * a
    return new_qs, solve_exact(q_mat, shifted), q_mat


def assemble_delta(v: Sequence, u: Sequence) -> DeltaVector:
    v = tuple(Fraction(x) for x in v)
    u = tuple(Fraction(x) for x in u)
    if any(x <= 0 for x in v):
        raise NonPositiveWeight(f"weights v must be positive, got {[str(x) for x in v]}")
    return DeltaVector(v, u)
