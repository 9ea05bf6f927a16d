"""Penalty-strength thresholds of encoded DQMs, computed by full enumeration.

All thresholds are reductions over the exhaustive :class:`Landscape`:

``gamma_star``
    above it the cheapest valid state is the unique-energy global minimum.
``gamma_prime_oh``
    one-hot: above it no invalid state is a strict local minimum.
``gamma_double_prime_oh`` / ``gamma_triple_prime_oh``
    one-hot: below the first no valid state is a strict local minimum,
    above the second every valid state is.
``gamma_prime_dw_partial``
    domain-wall analogue of ``gamma_prime``, restricted to invalid states
    that can lose a wall in one flip.
``gamma_double_prime_dw``
    domain-wall analogue of ``gamma_double_prime_oh``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .encode import EncodingKind, QuboPair, encode
from .errors import DegenerateInstanceError
from .landscape import DEFAULT_MAX_VARS, Landscape, as_landscape
from .model import DqmInstance, random_dqm

PREDICATES = ("gamma_prime_gt_star", "gamma_double_prime_lt_star")

__all__ = [
    "PREDICATES",
    "Threshold",
    "PartialThreshold",
    "ThresholdReport",
    "PredicateReport",
    "SearchResult",
    "gamma_star",
    "gamma_prime_oh",
    "gamma_double_prime_oh",
    "gamma_triple_prime_oh",
    "gamma_prime_dw_partial",
    "gamma_double_prime_dw",
    "threshold_report",
    "verify_predicates",
    "search_counterexample",
]


@dataclass(frozen=True)
class Threshold:
    """A threshold value with the states that realise it.

    ``witness`` is the outer arg-extremal state; ``partner`` the neighbour
    (or, for ``gamma_star``, the optimal valid state) that fixes its value.
    """

    value: float
    witness: str | None = None
    partner: str | None = None

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class PartialThreshold(Threshold):
    unremovable_exists: bool = False
    unremovable_count: int = 0


def _descriptor_kind(land: Landscape) -> EncodingKind | None:
    desc = land.q.descriptor
    return None if desc is None else desc.kind


def _require_kind(land: Landscape, kind: EncodingKind, what: str) -> None:
    got = _descriptor_kind(land)
    if got is not kind:
        raise ValueError(f"{what} requires a {kind.value} QUBO, got {got.value if got else 'no descriptor'}")


def _land(q, max_vars) -> Landscape:
    return as_landscape(q, max_vars)


# ---------------------------------------------------------------------------
# gamma*
# ---------------------------------------------------------------------------


def gamma_star(q, max_vars: int = DEFAULT_MAX_VARS) -> Threshold:
    """``max over invalid x' of (c(x*) - c(x')) / p(x')``.

    ``c(x*)`` is the minimum valid cost; ties for ``x*`` are allowed.
    """
    land = _land(q, max_vars)
    if not land.valid.any():
        raise DegenerateInstanceError("no valid solutions: gamma* is undefined")
    invalid = np.flatnonzero(~land.valid)
    if invalid.size == 0:
        raise DegenerateInstanceError("no invalid solutions: gamma* is undefined")
    valid = np.flatnonzero(land.valid)
    x_star = valid[np.argmin(land.cost[valid])]
    c_star = land.cost[x_star]
    ratios = (c_star - land.cost[invalid]) / land.penalty[invalid]
    pos = int(np.argmax(ratios))
    return Threshold(float(ratios[pos]), land.bitstring(invalid[pos]), land.bitstring(x_star))


# ---------------------------------------------------------------------------
# One-hot
# ---------------------------------------------------------------------------


def _escape_table(land: Landscape, use) -> tuple[np.ndarray, np.ndarray]:
    """Per state, min over flips selected by ``use(dp)`` of ``dc / -dp``.

    Returns ``(best_value, best_flip)``; states with no selected flip get
    ``inf`` and flip ``-1``.
    """
    best = np.full(land.size, np.inf)
    arg = np.full(land.size, -1, dtype=np.int64)
    with np.errstate(divide="ignore", invalid="ignore"):
        for u in range(land.n):
            dc, dp = land.deltas(u)
            sel = use(dp)
            ratio = np.where(sel, dc / -dp, np.inf)
            better = sel & (ratio < best)
            best = np.where(better, ratio, best)
            arg = np.where(better, u, arg)
    return best, arg


def gamma_prime_oh(q, max_vars: int = DEFAULT_MAX_VARS) -> Threshold:
    """``max over invalid x_a of min over penalty-lowering flips of
    (c(x_b) - c(x_a)) / (p(x_a) - p(x_b))``."""
    land = _land(q, max_vars)
    _require_kind(land, EncodingKind.ONE_HOT, "gamma_prime_oh")
    invalid = np.flatnonzero(~land.valid)
    if invalid.size == 0:
        raise DegenerateInstanceError("no invalid solutions")
    best, arg = _escape_table(land, lambda dp: dp < 0)
    if np.any(arg[invalid] < 0):
        bad = invalid[np.argmax(arg[invalid] < 0)]
        raise AssertionError(f"invalid one-hot state {land.bitstring(bad)} has no penalty-lowering flip")
    pos = int(np.argmax(best[invalid]))
    a = invalid[pos]
    return Threshold(float(best[a]), land.bitstring(a), land.bitstring(a ^ (1 << int(arg[a]))))


def _valid_gap_table(land: Landscape) -> tuple[np.ndarray, np.ndarray]:
    """Per state, max over invalid neighbours of ``c(x_a) - c(x_b)``, with argmax flip."""
    best = np.full(land.size, -np.inf)
    arg = np.full(land.size, -1, dtype=np.int64)
    for u in range(land.n):
        nb = land.neighbour(u)
        gap = np.where(~land.valid[nb], land.cost - land.cost[nb], -np.inf)
        better = gap > best
        best = np.where(better, gap, best)
        arg = np.where(better, u, arg)
    return best, arg


def _oh_valid_thresholds(land: Landscape) -> tuple[Threshold, Threshold]:
    valid = np.flatnonzero(land.valid)
    if valid.size == 0:
        raise DegenerateInstanceError("no valid solutions")
    gaps, arg = _valid_gap_table(land)
    inner = gaps[valid]
    lo, hi = valid[int(np.argmin(inner))], valid[int(np.argmax(inner))]

    def mk(a):
        return Threshold(float(gaps[a]), land.bitstring(a), land.bitstring(a ^ (1 << int(arg[a]))))

    return mk(lo), mk(hi)


def gamma_double_prime_oh(q, max_vars: int = DEFAULT_MAX_VARS) -> Threshold:
    """``min over valid x_a of max over neighbours x_b of c(x_a) - c(x_b)``."""
    land = _land(q, max_vars)
    _require_kind(land, EncodingKind.ONE_HOT, "gamma_double_prime_oh")
    return _oh_valid_thresholds(land)[0]


def gamma_triple_prime_oh(q, max_vars: int = DEFAULT_MAX_VARS) -> Threshold:
    """``max over valid x_a of max over neighbours x_b of c(x_a) - c(x_b)``."""
    land = _land(q, max_vars)
    _require_kind(land, EncodingKind.ONE_HOT, "gamma_triple_prime_oh")
    return _oh_valid_thresholds(land)[1]


# ---------------------------------------------------------------------------
# Domain-wall
# ---------------------------------------------------------------------------


def gamma_prime_dw_partial(q, max_vars: int = DEFAULT_MAX_VARS) -> PartialThreshold:
    """Escape threshold over invalid states that can lose a wall in one flip.

    A wall-removing flip (``dp = -1``) escapes when ``gamma > c(x_b) - c(x_a)``.
    ``unremovable_exists`` flags invalid states with no such flip, whose
    local-minimum status no ``gamma`` can control from above.
    """
    land = _land(q, max_vars)
    _require_kind(land, EncodingKind.DOMAIN_WALL, "gamma_prime_dw_partial")
    invalid = np.flatnonzero(~land.valid)
    best, arg = _escape_table(land, lambda dp: dp < 0)
    removable = invalid[arg[invalid] >= 0]
    unremovable = int(invalid.size - removable.size)
    if removable.size == 0:
        return PartialThreshold(-math.inf, None, None, unremovable > 0, unremovable)
    a = removable[int(np.argmax(best[removable]))]
    return PartialThreshold(
        float(best[a]),
        land.bitstring(a),
        land.bitstring(a ^ (1 << int(arg[a]))),
        unremovable > 0,
        unremovable,
    )


def gamma_double_prime_dw(q, max_vars: int = DEFAULT_MAX_VARS) -> Threshold:
    """``min over x_a of max over invalid neighbours x_b of c(x_a) - c(x_b)``.

    ``x_a`` ranges over valid states with no valid neighbour of strictly
    lower cost; equal-cost valid neighbours do not exclude a state.
    """
    land = _land(q, max_vars)
    _require_kind(land, EncodingKind.DOMAIN_WALL, "gamma_double_prime_dw")
    valid = np.flatnonzero(land.valid)
    if valid.size == 0:
        raise DegenerateInstanceError("no valid solutions")
    if np.all(land.cost[valid] == land.cost[valid[0]]):
        raise DegenerateInstanceError("all valid solutions have equal cost (trivial DQM)")
    has_lower_valid = np.zeros(land.size, dtype=bool)
    for u in range(land.n):
        nb = land.neighbour(u)
        has_lower_valid |= land.valid[nb] & (land.cost[nb] < land.cost)
    candidates = valid[~has_lower_valid[valid]]
    if candidates.size == 0:
        raise DegenerateInstanceError("no valid solution lacks a cheaper valid neighbour")
    gaps, arg = _valid_gap_table(land)
    a = candidates[int(np.argmin(gaps[candidates]))]
    partner = None if arg[a] < 0 else land.bitstring(a ^ (1 << int(arg[a])))
    return Threshold(float(gaps[a]), land.bitstring(a), partner)


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


def _json_number(v):
    if v is None or not math.isfinite(v):
        return None
    return v


@dataclass
class ThresholdReport:
    kind: str
    gamma_star: float
    gamma_prime: float | None = None
    gamma_double_prime: float | None = None
    gamma_triple_prime: float | None = None
    dw_unremovable_flag: bool | None = None
    witnesses: dict[str, str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "encoding": self.kind,
            "gamma_star": _json_number(self.gamma_star),
            "gamma_prime": _json_number(self.gamma_prime),
            "gamma_double_prime": _json_number(self.gamma_double_prime),
            "gamma_triple_prime": _json_number(self.gamma_triple_prime),
            "dw_unremovable_flag": self.dw_unremovable_flag,
            "witnesses": dict(self.witnesses),
            "notes": list(self.notes),
        }


def threshold_report(q, max_vars: int = DEFAULT_MAX_VARS) -> ThresholdReport:
    """Every threshold that applies to ``q``'s encoding.

    A domain-wall instance whose valid costs are all equal has no
    ``gamma_double_prime``; that is recorded in ``notes`` rather than raised.
    """
    land = _land(q, max_vars)
    kind = _descriptor_kind(land)
    star = gamma_star(land)
    report = ThresholdReport(kind.value if kind else "raw", star.value)
    report.witnesses["gamma_star"] = star.witness
    report.witnesses["x_star"] = star.partner
    if kind is EncodingKind.ONE_HOT:
        prime = gamma_prime_oh(land)
        dprime, tprime = _oh_valid_thresholds(land)
        report.gamma_prime = prime.value
        report.gamma_double_prime = dprime.value
        report.gamma_triple_prime = tprime.value
        report.witnesses.update(
            gamma_prime=prime.witness,
            gamma_double_prime=dprime.witness,
            gamma_triple_prime=tprime.witness,
        )
    elif kind is EncodingKind.DOMAIN_WALL:
        partial = gamma_prime_dw_partial(land)
        report.gamma_prime = partial.value
        report.dw_unremovable_flag = partial.unremovable_exists
        if partial.witness:
            report.witnesses["gamma_prime"] = partial.witness
        if partial.unremovable_exists:
            report.notes.append(
                f"{partial.unremovable_count} invalid solutions cannot lose a domain wall; "
                "gamma_prime does not certify absence of invalid local minima"
            )
        try:
            dprime = gamma_double_prime_dw(land)
        except DegenerateInstanceError as exc:
            report.notes.append(f"gamma_double_prime undefined: {exc}")
        else:
            report.gamma_double_prime = dprime.value
            report.witnesses["gamma_double_prime"] = dprime.witness
    return report


# ---------------------------------------------------------------------------
# Brute-force predicate checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredicateReport:
    gamma: float
    x_star_is_global_min: bool
    no_invalid_local_min: bool
    all_valid_local_min: bool
    no_valid_local_min: bool
    valid_local_min_count: int
    invalid_local_min_count: int
    invalid_local_minima: tuple[str, ...]
    valid_local_minima: tuple[str, ...]

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["invalid_local_minima"] = list(self.invalid_local_minima)
        d["valid_local_minima"] = list(self.valid_local_minima)
        return d


def verify_predicates(q, gamma: float, max_vars: int = DEFAULT_MAX_VARS) -> PredicateReport:
    """Evaluate the landscape claims at one ``gamma`` by full enumeration.

    ``x_star_is_global_min`` holds when the minimum valid cost lies strictly
    below ``f`` of every invalid state.
    """
    land = _land(q, max_vars)
    mins = land.local_min_mask(gamma)
    f = land.energies(gamma)
    valid, invalid = land.valid, ~land.valid
    c_star = land.cost[valid].min() if valid.any() else math.inf
    star_ok = bool(valid.any()) and (not invalid.any() or bool(c_star < f[invalid].min()))
    vmin = np.flatnonzero(mins & valid)
    imin = np.flatnonzero(mins & invalid)
    return PredicateReport(
        gamma=float(gamma),
        x_star_is_global_min=star_ok,
        no_invalid_local_min=imin.size == 0,
        all_valid_local_min=bool(valid.any()) and bool(np.all(mins[valid])),
        no_valid_local_min=vmin.size == 0,
        valid_local_min_count=int(vmin.size),
        invalid_local_min_count=int(imin.size),
        invalid_local_minima=tuple(land.bitstring(i) for i in imin),
        valid_local_minima=tuple(land.bitstring(i) for i in vmin),
    )


# ---------------------------------------------------------------------------
# Random counterexample search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    dqm: DqmInstance
    qubo: QuboPair
    report: ThresholdReport
    draws: int


def _holds(predicate: str, report: ThresholdReport) -> bool:
    if predicate == "gamma_prime_gt_star":
        other = report.gamma_prime
        return other is not None and math.isfinite(other) and other > report.gamma_star
    other = report.gamma_double_prime
    return other is not None and math.isfinite(other) and other < report.gamma_star


def search_counterexample(
    kind,
    k: int,
    l: int,
    coeff_lo: int,
    coeff_hi: int,
    predicate: str,
    seed,
    budget: int,
    max_vars: int = DEFAULT_MAX_VARS,
) -> SearchResult | None:
    """Draw random integer instances until ``predicate`` holds, or give up.

    Instances come from one generator seeded with ``seed``, so the draw
    sequence, and therefore the result, is reproducible.
    """
    if predicate not in PREDICATES:
        raise ValueError(f"unknown predicate {predicate!r}; choose from {PREDICATES}")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    kind = EncodingKind(kind)
    rng = np.random.default_rng(seed)
    for draw in range(1, budget + 1):
        dqm = random_dqm(k, l, coeff_lo, coeff_hi, rng)
        q = encode(dqm, kind)
        try:
            report = threshold_report(q, max_vars)
        except DegenerateInstanceError:
            continue
        if _holds(predicate, report):
            return SearchResult(dqm, q, report, draw)
    return None
