import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_bits
from dqmscape import (
    AnnealSchedule,
    DqmInstance,
    EncodingKind,
    EnumerationLimitError,
    Landscape,
    QuboPair,
    encode,
    evaluate_qubo,
    exhaustive_min,
    gamma_prime_oh,
    greedy_descent,
    is_local_min,
    random_dqm,
    sample_and_polish,
    simulated_annealing,
)
from dqmscape.encode import bits_to_str

OH = EncodingKind.ONE_HOT


def test_exhaustive_prime_instance(q_prime):
    s = exhaustive_min(q_prime, 6)
    assert (s.bits, s.f) == ("0110", 8)


def test_exhaustive_tie_break_zero_qubo():
    q = encode(DqmInstance(2, 2, {}), OH)
    s = exhaustive_min(q, 1.0)
    # valid states 1010 (5), 0110 (6), 1001 (9), 0101 (10) as integers
    assert (s.bits, s.f) == ("1010", 0)


def test_exhaustive_single_variable():
    s = exhaustive_min(QuboPair(1, {(0, 0): -1.0}, 0.0, {}, 0.0), 123.0)
    assert (s.bits, s.f) == ("1", -1)


def test_exhaustive_cap():
    with pytest.raises(EnumerationLimitError):
        exhaustive_min(encode(DqmInstance(5, 5, {}), OH), 1.0)


def test_greedy_from_zero_ends_valid(q_prime):
    t = greedy_descent(q_prime, 6.001, "0000")
    assert t.final in {"1010", "0110", "1001", "0101"}


def test_greedy_stuck_at_invalid_minimum(q_prime):
    t = greedy_descent(q_prime, 5.5, "1000")
    assert t.step_count == 0 and t.final == "1000"
    assert t.final_f == 3 + 5.5


def test_greedy_trace_invariants(q_dprime):
    land = Landscape(q_dprime)
    for start in all_bits(4):
        t = greedy_descent(q_dprime, 3.0, start)
        f = [t.start_f] + [s.f_after for s in t.steps]
        assert all(b < a for a, b in zip(f, f[1:]))
        x = list(start)
        for s in t.steps:
            x[s.flip_index] ^= 1
            assert s.f_after == pytest.approx(evaluate_qubo(q_dprime, x, 3.0))
        assert t.final_f == pytest.approx(evaluate_qubo(q_dprime, t.final, 3.0))
        idx = int(t.final[::-1], 2)
        f_all = land.energies(3.0)
        assert all(f_all[idx ^ (1 << u)] >= f_all[idx] for u in range(4))
        assert (t.final_f < t.start_f) == (t.step_count > 0)


def test_greedy_best_improvement_lowest_index():
    # flipping either bit lowers f by the same amount; index 0 wins
    q = QuboPair(2, {(0, 0): -1.0, (1, 1): -1.0, (0, 1): 5.0}, 0.0, {}, 0.0)
    t = greedy_descent(q, 0.0, "00")
    assert [s.flip_index for s in t.steps] == [0]
    assert t.final == "10"


def test_greedy_length_mismatch(q_prime):
    with pytest.raises(ValueError):
        greedy_descent(q_prime, 1.0, "101")


def test_polish_strict_minimum_unchanged(q_prime):
    assert is_local_min(q_prime, "0110", 6.001)
    assert sample_and_polish(q_prime, 6.001, "0110").step_count == 0


def test_polish_can_end_invalid_below_prime(q_prime):
    finals = {sample_and_polish(q_prime, 5.5, b).final for b in all_bits(4)}
    assert "1000" in finals


@pytest.mark.parametrize("seed", range(6))
def test_polish_above_prime_is_valid(seed):
    q = encode(random_dqm(2, 3, -1, 1, seed=seed, continuous=True), OH)
    g = gamma_prime_oh(q).value
    gamma = g + 1e-6 * max(1.0, abs(g))
    for bits in all_bits(q.n):
        final = sample_and_polish(q, gamma, bits).final
        assert final in _valid_strings(q)


def _valid_strings(q):
    land = Landscape(q)
    return {land.bitstring(i) for i in np.flatnonzero(land.valid)}


@pytest.mark.parametrize(
    "kwargs",
    [
        {"initial_temperature": 0},
        {"initial_temperature": float("inf")},
        {"cooling": 1.0},
        {"cooling": 0.0},
        {"sweeps": 0},
        {"restarts": -1},
    ],
)
def test_schedule_validation(kwargs):
    with pytest.raises(ValueError):
        AnnealSchedule(**kwargs)


def test_sa_deterministic(q_prime):
    a = simulated_annealing(q_prime, 6.001, AnnealSchedule(restarts=2), seed=42)
    b = simulated_annealing(q_prime, 6.001, AnnealSchedule(restarts=2), seed=42)
    assert a == b and a.runs == 3


def test_sa_one_sweep_bounded_by_exhaustive(q_dprime):
    best = exhaustive_min(q_dprime, 12.5).f
    for seed in range(10):
        r = simulated_annealing(q_dprime, 12.5, AnnealSchedule(sweeps=1), seed=seed)
        assert r.f >= best
        assert r.f == pytest.approx(evaluate_qubo(q_dprime, r.bits, 12.5))


def test_sa_restarts_take_best(q_dprime):
    r = simulated_annealing(q_dprime, 12.5, AnnealSchedule(sweeps=2, restarts=4), seed=3)
    assert r.f == min(r.run_f)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-5, 20))
def test_exhaustive_is_lower_bound(seed, gamma):
    q = encode(random_dqm(2, 2, -9, 9, seed=seed), OH)
    best = exhaustive_min(q, gamma).f
    start = bits_to_str(np.random.default_rng(seed).integers(0, 2, 4))
    assert greedy_descent(q, gamma, start).final_f >= best - 1e-9
    assert simulated_annealing(q, gamma, AnnealSchedule(sweeps=5), seed).f >= best - 1e-9
