"""Exact rational scalars and integer/rational linear algebra.

Rationals are :class:`fractions.Fraction` (always reduced, denominator
positive). Matrices are row-major tuples of tuples; nothing here mutates
its arguments.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence, Union

from .errors import NonSquare, ParseError, Singular

Rational = Union[int, Fraction]
IntMatrix = tuple[tuple[int, ...], ...]
RatVector = tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a Python int into a Fraction.

    Only the numerator may carry a sign. Floats are refused: exact
    pipelines must never see a rounded input.
    """
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise ParseError(f"rationals must be strings like 'p/q', got {value!r}")
    match = _RATIONAL_RE.match(value.strip())
    if match is None:
        raise ParseError(f"malformed rational {value!r}")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise ParseError(f"zero denominator in {value!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(q: Rational) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def as_matrix(m: Sequence[Sequence], kind=None) -> tuple[tuple, ...]:
    rows = tuple(tuple(kind(x) if kind else x for x in row) for row in m)
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return rows


def shape(m: Sequence[Sequence]) -> tuple[int, int]:
    return len(m), (len(m[0]) if len(m) else 0)


def transpose(m: Sequence[Sequence]) -> tuple[tuple, ...]:
    return tuple(zip(*m))


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple[tuple, ...]:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Sequence[Sequence], x: Sequence) -> tuple:
    return tuple(sum(r * xi for r, xi in zip(row, x)) for row in a)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def det_int(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix by Bareiss elimination."""
    n, c = shape(m)
    if n != c:
        raise NonSquare(f"determinant of a {n}x{c} matrix")
    if n == 0:
        return 1
    a = [list(map(int, row)) for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def det_rat(m: Sequence[Sequence[Rational]]) -> Fraction:
    """Exact determinant of a rational matrix (clears denominators, then Bareiss)."""
    n, c = shape(m)
    if n != c:
        raise NonSquare(f"determinant of a {n}x{c} matrix")
    scale = Fraction(1)
    rows = []
    for row in m:
        row = [Fraction(x) for x in row]
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // _gcd(lcm, x.denominator)
        rows.append([int(x * lcm) for x in row])
        scale /= lcm
    return det_int(rows) * scale


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def solve_exact(m: Sequence[Sequence[Rational]], b: Sequence[Rational]) -> RatVector:
    """Solve ``m x = b`` exactly over the rationals."""
    n, c = shape(m)
    if n != c:
        raise NonSquare(f"cannot solve with a {n}x{c} matrix")
    if len(b) != n:
        raise ValueError("right-hand side has the wrong length")
    a = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(m, b)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise Singular("matrix is singular")
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        row_k = a[k]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k] * inv
                row_i = a[i]
                for j in range(k, n + 1):
                    row_i[j] -= f * row_k[j]
    return tuple(a[i][n] / a[i][i] for i in range(n))


def inverse_rat(m: Sequence[Sequence[Rational]]) -> tuple[tuple[Fraction, ...], ...]:
    n, _ = shape(m)
    cols = [solve_exact(m, [int(i == j) for i in range(n)]) for j in range(n)]
    return transpose(cols)


def rank_rat(m: Sequence[Sequence[Rational]]) -> int:
    a = [[Fraction(x) for x in row] for row in m]
    rows, cols = shape(a)
    rank = 0
    for col in range(cols):
        piv = next((i for i in range(rank, rows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(rank + 1, rows):
            if a[i][col] != 0:
                f = a[i][col] / a[rank][col]
                for j in range(col, cols):
                    a[i][j] -= f * a[rank][j]
        rank += 1
        if rank == rows:
            break
    return rank


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, S, V)`` with ``U @ m @ V == S`` and U, V unimodular.

    S is diagonal with non-negative entries, each dividing the next.
    """
    r, c = shape(m)
    a = [list(map(int, row)) for row in m]
    u = [list(row) for row in identity(r)]
    v = [list(row) for row in identity(c)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for row in a:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    for t in range(min(r, c)):
        while True:
            entries = [(abs(a[i][j]), i, j) for i in range(t, r) for j in range(t, c) if a[i][j]]
            if not entries:
                break
            _, pi, pj = min(entries)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = a[t][t]
            clean = True
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    freeze = lambda mat: tuple(tuple(row) for row in mat)  # noqa: E731
    return freeze(u), freeze(a), freeze(v)


def smith_diagonal(m: Sequence[Sequence[int]]) -> tuple[int, ...]:
    _, s, _ = smith_normal_form(m)
    r, c = shape(s)
    return tuple(s[i][i] for i in range(min(r, c)))


def kernel_lattice(m: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """A Z-basis of ``{k in Z^cols : m k = 0}``."""
    r, c = shape(m)
    if c == 0:
        return []
    _, s, v = smith_normal_form(m)
    rank = sum(1 for i in range(min(r, c)) if s[i][i] != 0)
    return [tuple(v[i][j] for i in range(c)) for j in range(rank, c)]
