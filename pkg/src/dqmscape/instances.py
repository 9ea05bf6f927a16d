"""Known threshold-separating instances and matrix-to-DQM preimages.

The three instances below are small dense cost matrices on which the
penalty thresholds separate:

* ``prime_above_star_one_hot``: gamma' = 6 > gamma* = 5 (k=2, l=2).
* ``double_prime_below_star_one_hot``: gamma'' = 11 < gamma* = 12 (k=2, l=2).
* ``double_prime_below_star_domain_wall``: gamma'' = -3 < gamma* = 3 (k=2, l=3),
  with a constant offset of -5 on the cost.
"""

from __future__ import annotations

from typing import Sequence

from .encode import EncodingDescriptor, EncodingKind, QuboPair, encode
from .model import DqmInstance

PRIME_ABOVE_STAR_ONE_HOT = (
    (3, 0, 2, 4),
    (0, 3, 1, 2),
    (0, 0, 4, 0),
    (0, 0, 0, 7),
)

DOUBLE_PRIME_BELOW_STAR_ONE_HOT = (
    (7, 0, 5, 4),
    (0, 7, 5, 9),
    (0, 0, 2, 0),
    (0, 0, 0, 6),
)

DOUBLE_PRIME_BELOW_STAR_DOMAIN_WALL = (
    (4, -2, 3, 1),
    (0, 1, 2, -2),
    (0, 0, -1, 4),
    (0, 0, 0, -4),
)
DOMAIN_WALL_OFFSET = -5.0


def _upper_terms(matrix: Sequence[Sequence[float]]) -> dict[tuple[int, int], float]:
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("cost matrix must be square")
    return {(u, v): float(matrix[u][v]) for u in range(n) for v in range(u, n) if matrix[u][v]}


def qubo_from_matrix(matrix, kind, k: int, l: int, offset: float = 0.0) -> QuboPair:
    """Pair an upper-triangular cost matrix with the encoding's standard penalty.

    Entries below the diagonal are ignored.
    """
    desc = EncodingDescriptor(kind, k, l)
    if len(matrix) != desc.n:
        raise ValueError(f"{desc.kind.value} with k={k}, l={l} needs a {desc.n}x{desc.n} matrix")
    penalty = encode(DqmInstance(k, l, {}), desc.kind)
    return QuboPair(desc.n, _upper_terms(matrix), offset, penalty.penalty_terms, penalty.penalty_offset, desc)


def one_hot_preimage(matrix, k: int, l: int) -> DqmInstance:
    """DQM whose identity-order one-hot cost matrix is ``matrix``."""
    if len(matrix) != k * l:
        raise ValueError(f"need a {k * l}x{k * l} matrix")
    terms = []
    for (u, v), value in _upper_terms(matrix).items():
        terms.append(((v // l, u // l, v % l, u % l), value))
    return DqmInstance.from_terms(k, l, terms)


def domain_wall_preimage(matrix, k: int, l: int, offset: float = 0.0) -> DqmInstance:
    """DQM whose identity-order domain-wall cost is ``matrix`` plus ``offset``.

    Uses ``b[i, a] = sum of x[i, alpha] over alpha > a``, which the wall
    substitution maps back to ``b[i, a]`` exactly, and writes the constant as
    ``offset * (sum_alpha x[0, alpha])**2``.
    """
    m = l - 1
    if len(matrix) != k * m:
        raise ValueError(f"need a {k * m}x{k * m} matrix")

    def above(u):
        i, a = divmod(u, m)
        return [(i, alpha) for alpha in range(a + 1, l)]

    terms = []
    for (u, v), value in _upper_terms(matrix).items():
        for i, alpha in above(u):
            for j, beta in above(v):
                terms.append(((i, j, alpha, beta), value))
    if offset:
        for alpha in range(l):
            for beta in range(l):
                terms.append(((0, 0, alpha, beta), offset))
    return DqmInstance.from_terms(k, l, terms)


def prime_above_star_one_hot() -> QuboPair:
    return qubo_from_matrix(PRIME_ABOVE_STAR_ONE_HOT, EncodingKind.ONE_HOT, 2, 2)


def double_prime_below_star_one_hot() -> QuboPair:
    return qubo_from_matrix(DOUBLE_PRIME_BELOW_STAR_ONE_HOT, EncodingKind.ONE_HOT, 2, 2)


def double_prime_below_star_domain_wall() -> QuboPair:
    return qubo_from_matrix(
        DOUBLE_PRIME_BELOW_STAR_DOMAIN_WALL, EncodingKind.DOMAIN_WALL, 2, 3, DOMAIN_WALL_OFFSET
    )
