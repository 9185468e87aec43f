"""Howell normal form of submodules of (Z/n)^m.

Z/n is not a field, so echelon forms alone do not give canonical bases or
decidable membership.  The Howell form adds, for every pivot ``p``, the row
``(n / p) * row`` back into the elimination; the resulting basis is unique for
the module and spans every intersection with a trailing coordinate subspace
(the Howell property).
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

Row = tuple[int, ...]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b = g = gcd(a, b)``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return a, s0, t0


def _normalizing_unit(a: int, n: int) -> int:
    """A unit ``u`` of Z/n with ``u*a = gcd(a, n)`` (mod n)."""
    g = math.gcd(a, n)
    m = n // g
    if m == 1:
        return 1
    u = pow(a // g, -1, m)
    while math.gcd(u, n) != 1:
        u += m
    return u % n


def howell_form(rows: Iterable[Sequence[int]], n: int, width: int | None = None) -> tuple[Row, ...]:
    """Howell basis of the row span of ``rows`` over Z/n.

    Rows come out in pivot order; pivots divide ``n`` and entries above each
    pivot are reduced into ``[0, pivot)``.  Zero rows are dropped.
    """
    A = [[v % n for v in r] for r in rows]
    if width is None:
        width = len(A[0]) if A else 0
    if any(len(r) != width for r in A):
        raise ValueError("ragged rows")
    r = 0
    for j in range(width):
        i = r + 1
        while i < len(A):
            a, b = A[r][j], A[i][j]
            if b:
                g, s, t = _xgcd(a, b)
                u, v = -b // g, a // g
                ra, rb = A[r], A[i]
                A[r] = [(s * x + t * y) % n for x, y in zip(ra, rb)]
                A[i] = [(u * x + v * y) % n for x, y in zip(ra, rb)]
            i += 1
        if r >= len(A) or A[r][j] == 0:
            continue
        unit = _normalizing_unit(A[r][j], n)
        A[r] = [unit * x % n for x in A[r]]
        p = A[r][j]
        for k in range(r):
            q = A[k][j] // p
            if q:
                A[k] = [(x - q * y) % n for x, y in zip(A[k], A[r])]
        ann = [(n // p) * x % n for x in A[r]]
        if any(ann):
            A.append(ann)
        r += 1
    return tuple(tuple(row) for row in A[:r] if any(row))


def pivot(row: Row) -> int:
    return next(j for j, v in enumerate(row) if v)


def reduce_vector(basis: Sequence[Row], vec: Sequence[int], n: int) -> tuple[int, ...]:
    """Reduce ``vec`` against a Howell basis; the result is zero iff ``vec`` is in the span."""
    v = [x % n for x in vec]
    for row in basis:
        j = pivot(row)
        q = v[j] // row[j]
        if q:
            v = [(x - q * y) % n for x, y in zip(v, row)]
    return tuple(v)


def contains(basis: Sequence[Row], vec: Sequence[int], n: int) -> bool:
    return not any(reduce_vector(basis, vec, n))


def module_size(basis: Sequence[Row], n: int) -> int:
    """Number of elements of the span: the product of ``n / pivot`` over rows."""
    size = 1
    for row in basis:
        size *= n // row[pivot(row)]
    return size


def intersect_coordinates(basis_rows: Iterable[Sequence[int]], n: int, width: int, keep: Iterable[int]) -> list[tuple[int, ...]]:
    """Basis (in the original coordinates) of ``span ∩ {v : v_j = 0 for j not in keep}``.

    Columns outside ``keep`` are moved to the front; by the Howell property the
    rows whose leading entry falls among the kept columns span the intersection.
    """
    keep = sorted(set(keep))
    drop = [j for j in range(width) if j not in set(keep)]
    order = drop + keep
    permuted = [[r[j] for j in order] for r in basis_rows]
    H = howell_form(permuted, n, width)
    out = []
    for row in H:
        if pivot(row) >= len(drop):
            orig = [0] * width
            for pos, j in enumerate(order):
                orig[j] = row[pos]
            out.append(tuple(orig))
    return out
