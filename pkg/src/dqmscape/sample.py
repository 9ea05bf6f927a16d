"""Minimizers of ``f(x) = c(x) + gamma * p(x)`` at a fixed ``gamma``.

``exhaustive_min`` is the ground truth; ``greedy_descent`` is the
best-improvement single-flip polish applied to samples; ``simulated_annealing``
is a single-flip Metropolis baseline with geometric cooling.

Random streams come from numpy's PCG64 via ``default_rng``/``SeedSequence``,
which is platform independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .encode import QuboPair, as_bits, bits_to_index, bits_to_str
from .landscape import DEFAULT_MAX_VARS, as_landscape

__all__ = [
    "Sample",
    "DescentStep",
    "DescentTrace",
    "AnnealSchedule",
    "exhaustive_min",
    "greedy_descent",
    "sample_and_polish",
    "simulated_annealing",
]


@dataclass(frozen=True)
class Sample:
    bits: str
    f: float


class _Objective:
    """Dense view of ``f`` with O(n) single-flip deltas."""

    def __init__(self, q: QuboPair, gamma: float):
        m = np.asarray(q.cost_matrix) + gamma * np.asarray(q.penalty_matrix)
        self.diag = np.diag(m).copy()
        self.coupling = m + m.T
        np.fill_diagonal(self.coupling, 0.0)
        self.matrix = m
        self.offset = q.cost_offset + gamma * q.penalty_offset

    def energy(self, x: np.ndarray) -> float:
        return float(x @ self.matrix @ x + self.offset)

    def field(self, x: np.ndarray) -> np.ndarray:
        return self.diag + self.coupling @ x

    def flip_deltas(self, x: np.ndarray, h: np.ndarray) -> np.ndarray:
        return (1.0 - 2.0 * x) * h


def exhaustive_min(q: QuboPair, gamma: float, max_vars: int = DEFAULT_MAX_VARS) -> Sample:
    """Global minimum of ``f``; ties go to the smallest integer index."""
    land = as_landscape(q, max_vars)
    f = land.energies(gamma)
    best = int(np.argmin(f))
    return Sample(land.bitstring(best), float(f[best]))


# ---------------------------------------------------------------------------
# Greedy descent
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DescentStep:
    flip_index: int
    f_before: float
    f_after: float


@dataclass(frozen=True)
class DescentTrace:
    start: str
    steps: tuple[DescentStep, ...]
    final: str
    final_f: float

    @property
    def step_count(self) -> int:
        return len(self.steps)

    @property
    def start_f(self) -> float:
        return self.steps[0].f_before if self.steps else self.final_f


def greedy_descent(q: QuboPair, gamma: float, start_bits) -> DescentTrace:
    """Apply the best strictly improving flip until none is left.

    Ties between equally good flips go to the lowest index.  The final state
    has no neighbour with strictly smaller ``f``; it is a strict local
    minimum unless it sits on the edge of a plateau.
    """
    start = as_bits(start_bits, q.n)
    obj = _Objective(q, gamma)
    x = np.array(start, dtype=float)
    h = obj.field(x)
    f = obj.energy(x)
    steps = []
    # f strictly decreases, so no state repeats and the loop ends within 2**n steps.
    while True:
        delta = obj.flip_deltas(x, h)
        u = int(np.argmin(delta))
        if not delta[u] < 0:
            break
        change = 1.0 - 2.0 * x[u]
        x[u] += change
        h += obj.coupling[:, u] * change
        f_after = obj.energy(x)
        steps.append(DescentStep(u, f, f_after))
        f = f_after
    return DescentTrace(bits_to_str(start), tuple(steps), bits_to_str(x.astype(int)), f)


def sample_and_polish(q: QuboPair, gamma: float, sample_bits) -> DescentTrace:
    """Bring an externally produced sample to a local minimum by greedy descent."""
    if isinstance(sample_bits, Sample):
        sample_bits = sample_bits.bits
    return greedy_descent(q, gamma, sample_bits)


# ---------------------------------------------------------------------------
# Simulated annealing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling: temperature is multiplied by ``cooling`` after each sweep."""

    initial_temperature: float = 10.0
    cooling: float = 0.95
    sweeps: int = 200
    restarts: int = 0

    def __post_init__(self):
        if not (self.initial_temperature > 0 and math.isfinite(self.initial_temperature)):
            raise ValueError(f"initial_temperature must be positive, got {self.initial_temperature}")
        if not 0 < self.cooling < 1:
            raise ValueError(f"cooling must lie in (0, 1), got {self.cooling}")
        if self.sweeps < 1:
            raise ValueError(f"sweeps must be positive, got {self.sweeps}")
        if self.restarts < 0:
            raise ValueError(f"restarts must be non-negative, got {self.restarts}")


@dataclass(frozen=True)
class AnnealResult(Sample):
    sweeps: int = 0
    runs: int = 1
    run_f: tuple[float, ...] = field(default=(), compare=False)


def _anneal_once(obj: _Objective, n: int, schedule: AnnealSchedule, rng: np.random.Generator):
    x = rng.integers(0, 2, size=n).astype(float)
    h = obj.field(x)
    f = obj.energy(x)
    best_x, best_f = x.copy(), f
    temperature = schedule.initial_temperature
    for _ in range(schedule.sweeps):
        draws = rng.random(n)
        for u in range(n):
            delta = (1.0 - 2.0 * x[u]) * h[u]
            if delta <= 0 or draws[u] < math.exp(-delta / temperature):
                change = 1.0 - 2.0 * x[u]
                x[u] += change
                h += obj.coupling[:, u] * change
                f += delta
                if f < best_f:
                    best_x, best_f = x.copy(), f
        temperature *= schedule.cooling
    # Re-evaluate to shed accumulated rounding from the incremental updates.
    return best_x.astype(int), obj.energy(best_x)


def simulated_annealing(
    q: QuboPair, gamma: float, schedule: AnnealSchedule | None = None, seed=None
) -> AnnealResult:
    """Best state seen over ``1 + restarts`` independent annealing runs.

    Each run draws from its own child of ``SeedSequence(seed)``.  The merged
    result is the lowest ``f``, ties broken by smallest integer index.
    """
    schedule = schedule or AnnealSchedule()
    obj = _Objective(q, gamma)
    children = np.random.SeedSequence(seed).spawn(schedule.restarts + 1)
    runs = [_anneal_once(obj, q.n, schedule, np.random.default_rng(child)) for child in children]
    best_x, best_f = min(runs, key=lambda r: (r[1], bits_to_index(r[0])))
    return AnnealResult(
        bits_to_str(best_x), best_f, sweeps=schedule.sweeps, runs=len(runs), run_f=tuple(r[1] for r in runs)
    )
