"""Exhaustive solution-landscape analysis of a :class:`~dqmscape.encode.QuboPair`.

Every state ``x`` has an energy line ``f(x; gamma) = c(x) + gamma * p(x)``.
A state is a strict local minimum at ``gamma`` when every Hamming-1
neighbour ``y`` satisfies ``(c(y) - c(x)) + gamma * (p(y) - p(x)) > 0``.
Each neighbour contributes one linear constraint on ``gamma``, so the set
of ``gamma`` where ``x`` is a strict local minimum is an open interval.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .encode import (
    EncodingKind,
    QuboPair,
    as_bits,
    bits_to_str,
    cost_of,
    index_to_bits,
    penalty_of,
    wall_count,
)
from .errors import EnumerationLimitError

DEFAULT_MAX_VARS = 24
_CHUNK = 1 << 16

__all__ = [
    "DEFAULT_MAX_VARS",
    "GammaInterval",
    "RegisterClass",
    "SolutionRecord",
    "LandscapeStats",
    "EnergyLine",
    "Landscape",
    "enumerate_solutions",
    "is_local_min",
    "local_min_interval",
    "penalty_delta",
    "classify_register",
    "register_classes",
    "landscape_stats",
    "closed_form_stats",
    "energy_lines",
    "valid_neighbor_count",
    "sweep_rows",
]


@dataclass(frozen=True)
class GammaInterval:
    """Open interval ``(lower, upper)``; every empty interval compares equal."""

    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if not self.lower < self.upper:
            object.__setattr__(self, "lower", math.inf)
            object.__setattr__(self, "upper", -math.inf)

    @property
    def empty(self) -> bool:
        return not self.lower < self.upper

    def __contains__(self, gamma: float) -> bool:
        return self.lower < gamma < self.upper

    def to_dict(self) -> dict:
        if self.empty:
            return {"lower": None, "upper": None, "empty": True}
        return {
            "lower": None if self.lower == -math.inf else self.lower,
            "upper": None if self.upper == math.inf else self.upper,
            "empty": False,
        }


class RegisterClass(str, enum.Enum):
    """Domain-wall register label, from the set of achievable ``-dp`` values."""

    VALID = "Valid"
    A = "A"  # {-1, 0, +1}
    B = "B"  # {0, +1}
    C = "C"  # {-1, 0}
    D = "D"  # {0}
    E = "E"  # {+1}


_CLASS_BY_SET = {
    frozenset({-1, 0, 1}): RegisterClass.A,
    frozenset({0, 1}): RegisterClass.B,
    frozenset({-1, 0}): RegisterClass.C,
    frozenset({0}): RegisterClass.D,
    frozenset({1}): RegisterClass.E,
}


@lru_cache(maxsize=None)
def _classify(register: tuple[int, ...]) -> RegisterClass:
    walls = wall_count(register)
    if walls == 1:
        return RegisterClass.VALID
    gains = set()
    for u in range(len(register)):
        flipped = register[:u] + (1 - register[u],) + register[u + 1:]
        gains.add(walls - wall_count(flipped))
    try:
        return _CLASS_BY_SET[frozenset(gains)]
    except KeyError:
        raise AssertionError(f"register {register} has unclassifiable -dp set {sorted(gains)}") from None


def classify_register(register_bits, kind=EncodingKind.DOMAIN_WALL) -> RegisterClass:
    """Label a single domain-wall register by brute force over its flips."""
    if EncodingKind(kind) is not EncodingKind.DOMAIN_WALL:
        raise ValueError(f"register classes are defined for domain-wall registers only, not {kind}")
    return _classify(as_bits(register_bits))


def register_classes(q: QuboPair, bits) -> tuple[RegisterClass, ...] | None:
    """Per-register classes for a domain-wall QUBO, ``None`` for other encodings."""
    desc = q.descriptor
    if desc is None or desc.kind is not EncodingKind.DOMAIN_WALL:
        return None
    bits = as_bits(bits, q.n)
    return tuple(_classify(bits[desc.register_slice(i)]) for i in range(desc.k))


# ---------------------------------------------------------------------------
# Scalar, single-state queries
# ---------------------------------------------------------------------------


def _flip(bits: tuple[int, ...], u: int) -> tuple[int, ...]:
    return bits[:u] + (1 - bits[u],) + bits[u + 1:]


def penalty_delta(q: QuboPair, bits, flip_index: int) -> float:
    """``p(flip(x, u)) - p(x)``."""
    bits = as_bits(bits, q.n)
    if not 0 <= flip_index < q.n:
        raise IndexError(f"flip index {flip_index} out of range for n={q.n}")
    return penalty_of(q, _flip(bits, flip_index)) - penalty_of(q, bits)


def _neighbour_deltas(q: QuboPair, bits) -> Iterator[tuple[float, float]]:
    bits = as_bits(bits, q.n)
    c0, p0 = cost_of(q, bits), penalty_of(q, bits)
    for u in range(q.n):
        nb = _flip(bits, u)
        yield cost_of(q, nb) - c0, penalty_of(q, nb) - p0


def is_local_min(q: QuboPair, bits, gamma: float) -> bool:
    """True iff every Hamming-1 neighbour has strictly greater ``f`` at ``gamma``."""
    return all(dc + gamma * dp > 0 for dc, dp in _neighbour_deltas(q, bits))


def _interval_from_deltas(deltas) -> GammaInterval:
    lower, upper = -math.inf, math.inf
    for dc, dp in deltas:
        if dp > 0:
            lower = max(lower, -dc / dp)
        elif dp < 0:
            upper = min(upper, -dc / dp)
        elif dc <= 0:
            return GammaInterval(math.inf, -math.inf)
    return GammaInterval(lower, upper)


def local_min_interval(q: QuboPair, bits) -> GammaInterval:
    """Open ``gamma`` interval on which ``bits`` is a strict local minimum."""
    return _interval_from_deltas(_neighbour_deltas(q, bits))


def _is_valid(q: QuboPair, bits: tuple[int, ...]) -> bool:
    return penalty_of(q, bits) == 0


def valid_neighbor_count(q: QuboPair, bits) -> int:
    """Number of valid Hamming-1 neighbours of a valid state.

    One-hot valid states are never adjacent, so they always give 0.
    """
    bits = as_bits(bits, q.n)
    if not _is_valid(q, bits):
        raise ValueError(f"{bits_to_str(bits)} is not a valid solution")
    return sum(_is_valid(q, _flip(bits, u)) for u in range(q.n))


# ---------------------------------------------------------------------------
# Vectorized exhaustive view
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolutionRecord:
    index: int
    bits: str
    valid: bool
    cost: float
    penalty: float
    register_classes: tuple[RegisterClass, ...] | None
    valid_neighbor_count: int
    local_min_interval: GammaInterval

    def to_dict(self) -> dict:
        return {
            "bits": self.bits,
            "valid": self.valid,
            "cost": self.cost,
            "penalty": self.penalty,
            "register_classes": (
                None if self.register_classes is None else [c.value for c in self.register_classes]
            ),
            "valid_neighbor_count": self.valid_neighbor_count,
            "local_min_interval": self.local_min_interval.to_dict(),
        }


class Landscape:
    """Cost and penalty of all ``2**n`` states of ``q``, indexed by integer.

    State ``s`` has variable ``u`` equal to bit ``u`` of ``s``.  Arrays are
    filled in fixed-size chunks in index order, so results do not depend on
    how the work is split.
    """

    def __init__(self, q: QuboPair, max_vars: int = DEFAULT_MAX_VARS):
        if q.n > max_vars:
            raise EnumerationLimitError(q.n, max_vars)
        self.q = q
        self.n = q.n
        self.size = 1 << q.n
        self.cost = np.empty(self.size)
        self.penalty = np.empty(self.size)
        shifts = np.arange(self.n, dtype=np.int64)
        cq, pq = q.cost_matrix, q.penalty_matrix
        for start in range(0, self.size, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, self.size), dtype=np.int64)
            x = ((idx[:, None] >> shifts) & 1).astype(float)
            self.cost[idx] = np.einsum("si,ij,sj->s", x, cq, x) + q.cost_offset
            self.penalty[idx] = np.einsum("si,ij,sj->s", x, pq, x) + q.penalty_offset
        self.cost.flags.writeable = False
        self.penalty.flags.writeable = False
        self.valid = self.penalty == 0
        self.index = np.arange(self.size, dtype=np.int64)

    def neighbour(self, u: int) -> np.ndarray:
        return self.index ^ (1 << u)

    def deltas(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """``(c(y) - c(x), p(y) - p(x))`` for ``y`` = ``x`` with bit ``u`` flipped."""
        nb = self.neighbour(u)
        return self.cost[nb] - self.cost, self.penalty[nb] - self.penalty

    def energies(self, gamma: float) -> np.ndarray:
        return self.cost + gamma * self.penalty

    def local_min_mask(self, gamma: float) -> np.ndarray:
        mask = np.ones(self.size, dtype=bool)
        for u in range(self.n):
            dc, dp = self.deltas(u)
            mask &= dc + gamma * dp > 0
        return mask

    @cached_property
    def intervals(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-state ``(lower, upper)`` of the local-minimum interval.

        Empty intervals come back as ``(inf, -inf)``.
        """
        lower = np.full(self.size, -np.inf)
        upper = np.full(self.size, np.inf)
        empty = np.zeros(self.size, dtype=bool)
        with np.errstate(divide="ignore", invalid="ignore"):
            for u in range(self.n):
                dc, dp = self.deltas(u)
                bound = -dc / dp
                lower = np.where(dp > 0, np.maximum(lower, bound), lower)
                upper = np.where(dp < 0, np.minimum(upper, bound), upper)
                empty |= (dp == 0) & (dc <= 0)
        empty |= ~(lower < upper)
        lower[empty] = np.inf
        upper[empty] = -np.inf
        return lower, upper

    @cached_property
    def valid_neighbour_counts(self) -> np.ndarray:
        counts = np.zeros(self.size, dtype=np.int64)
        for u in range(self.n):
            counts += self.valid[self.neighbour(u)]
        return counts

    def bits(self, index: int) -> tuple[int, ...]:
        return index_to_bits(int(index), self.n)

    def bitstring(self, index: int) -> str:
        return bits_to_str(self.bits(index))

    def record(self, index: int) -> SolutionRecord:
        lower, upper = self.intervals
        bits = self.bits(index)
        return SolutionRecord(
            index=int(index),
            bits=bits_to_str(bits),
            valid=bool(self.valid[index]),
            cost=float(self.cost[index]),
            penalty=float(self.penalty[index]),
            register_classes=register_classes(self.q, bits),
            valid_neighbor_count=int(self.valid_neighbour_counts[index]),
            local_min_interval=GammaInterval(float(lower[index]), float(upper[index])),
        )


def as_landscape(q, max_vars: int = DEFAULT_MAX_VARS) -> Landscape:
    return q if isinstance(q, Landscape) else Landscape(q, max_vars)


def enumerate_solutions(q: QuboPair, max_vars: int = DEFAULT_MAX_VARS) -> list[SolutionRecord]:
    """One record per state, in ascending integer order."""
    land = as_landscape(q, max_vars)
    return [land.record(i) for i in range(land.size)]


# ---------------------------------------------------------------------------
# Structural summaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LandscapeStats:
    n: int
    valid_count: int
    invalid_count: int
    max_penalty: float
    nonzero_interaction_count: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def landscape_stats(q, max_vars: int = DEFAULT_MAX_VARS) -> LandscapeStats:
    land = as_landscape(q, max_vars)
    q = land.q
    offdiag = {key for key in (*q.cost_terms, *q.penalty_terms) if key[0] != key[1]}
    valid = int(land.valid.sum())
    return LandscapeStats(
        n=q.n,
        valid_count=valid,
        invalid_count=land.size - valid,
        max_penalty=float(land.penalty.max()),
        nonzero_interaction_count=len(offdiag),
    )


def closed_form_stats(kind, k: int, l: int) -> dict:
    """Closed-form counts for a ``(k, l)`` one-hot or domain-wall encoding."""
    kind = EncodingKind(kind)
    if kind is EncodingKind.ONE_HOT:
        n, max_penalty = k * l, k * (l - 1) ** 2
    elif kind is EncodingKind.DOMAIN_WALL:
        n, max_penalty = k * (l - 1), k * ((l - 1) // 2)
    else:
        raise ValueError("closed forms cover one-hot and domain-wall only")
    return {
        "n": n,
        "pairwise_interactions": n * (n - 1) // 2,
        "valid_count": l**k,
        "invalid_count": 2**n - l**k,
        "max_penalty": max_penalty,
    }


@dataclass(frozen=True)
class EnergyLine:
    bits: str
    slope: float
    intercept: float
    valid: bool


def energy_lines(q, max_vars: int = DEFAULT_MAX_VARS) -> list[EnergyLine]:
    land = as_landscape(q, max_vars)
    return [
        EnergyLine(land.bitstring(i), float(land.penalty[i]), float(land.cost[i]), bool(land.valid[i]))
        for i in range(land.size)
    ]


def sweep_rows(q, gammas: Sequence[float], max_vars: int = DEFAULT_MAX_VARS) -> Iterator[tuple]:
    """Long-form ``(gamma, bits, valid, f)`` rows, gamma-major, states in index order."""
    land = as_landscape(q, max_vars)
    names = [land.bitstring(i) for i in range(land.size)]
    for gamma in gammas:
        gamma = float(gamma)
        f = land.cost + gamma * land.penalty
        for i in range(land.size):
            yield gamma, names[i], bool(land.valid[i]), float(f[i])
