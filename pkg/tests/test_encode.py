import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_bits, domain_wall_penalty_oracle, one_hot_penalty_oracle, walls_oracle
from dqmscape import (
    DqmInstance,
    EncodingDescriptor,
    EncodingKind,
    FormatError,
    QuboPair,
    build_k_hot_penalty,
    cost_of,
    decode,
    encode,
    encode_bits,
    encode_domain_wall,
    encode_one_hot,
    evaluate_dqm,
    evaluate_qubo,
    export_qubo,
    import_qubo,
    penalty_of,
    random_dqm,
)
from dqmscape.encode import wall_count
from dqmscape.instances import (
    DOMAIN_WALL_OFFSET,
    DOUBLE_PRIME_BELOW_STAR_DOMAIN_WALL,
    PRIME_ABOVE_STAR_ONE_HOT,
    domain_wall_preimage,
    one_hot_preimage,
)

OH = EncodingKind.ONE_HOT
DW = EncodingKind.DOMAIN_WALL


def test_descriptor_sizes():
    assert EncodingDescriptor(OH, 3, 4).n == 12
    assert EncodingDescriptor(DW, 3, 4).n == 9
    assert EncodingDescriptor(EncodingKind.K_HOT, 1, 4, khot_count=2).n == 4


@pytest.mark.parametrize(
    "args",
    [
        (OH, 2, 3, [[0, 1, 2], [0, 0, 1]]),
        (OH, 2, 3, [[0, 1, 2]]),
        (DW, 1, 1, None),
    ],
)
def test_descriptor_rejects_bad_perms(args):
    with pytest.raises(ValueError):
        EncodingDescriptor(*args)


def test_khot_count_range():
    with pytest.raises(ValueError):
        build_k_hot_penalty(4, 0)
    with pytest.raises(ValueError):
        build_k_hot_penalty(4, 5)


def test_one_hot_zero_dqm_penalty():
    q = encode_one_hot(DqmInstance(2, 3, {}))
    assert penalty_of(q, "000000") == 2
    assert penalty_of(q, "100001") == 0


def test_one_hot_penalty_structure():
    q = encode_one_hot(DqmInstance(2, 3, {}))
    assert q.penalty_offset == 2
    for (u, v), value in q.penalty_terms.items():
        if u == v:
            assert value == -1
        else:
            assert u // 3 == v // 3 and value == 2
    assert len(q.penalty_terms) == 6 + 2 * 3


def test_prime_instance_cost_matrix(prime_dqm):
    q = encode_one_hot(prime_dqm)
    assert q.cost_matrix.tolist() == [list(map(float, row)) for row in PRIME_ABOVE_STAR_ONE_HOT]


@pytest.mark.parametrize("bits,cost,pen", [("1000", 3, 1), ("0110", 8, 0), ("0000", 0, 2), ("1111", 26, 2)])
def test_prime_instance_cost_penalty(q_prime, bits, cost, pen):
    assert cost_of(q_prime, bits) == cost
    assert penalty_of(q_prime, bits) == pen
    assert evaluate_qubo(q_prime, bits, 2.5) == cost + 2.5 * pen


def test_all_zero_bits_gives_offsets():
    q = encode_domain_wall(random_dqm(2, 3, -9, 9, seed=0))
    assert evaluate_qubo(q, "0000", 1.75) == q.cost_offset + 1.75 * q.penalty_offset


@pytest.mark.parametrize("bits,pen", [("01", 1), ("00", 0), ("10", 0), ("11", 0)])
def test_domain_wall_single_register_l3(bits, pen):
    q = encode_domain_wall(DqmInstance(1, 3, {}))
    assert penalty_of(q, bits) == pen
    assert q.penalty_offset == 0


def test_domain_wall_penalty_structure():
    q = encode_domain_wall(DqmInstance(1, 5, {}))
    assert q.penalty_terms == {(1, 1): 1.0, (2, 2): 1.0, (3, 3): 1.0, (0, 1): -1.0, (1, 2): -1.0, (2, 3): -1.0}


def test_dw_instance_preimage_round_trip(q_dw):
    d = domain_wall_preimage(DOUBLE_PRIME_BELOW_STAR_DOMAIN_WALL, 2, 3, DOMAIN_WALL_OFFSET)
    q = encode_domain_wall(d)
    assert q.cost_terms == q_dw.cost_terms
    assert q.cost_offset == q_dw.cost_offset == DOMAIN_WALL_OFFSET
    assert q == q_dw


def test_prime_instance_preimage_is_the_fixture(prime_dqm):
    assert one_hot_preimage(PRIME_ABOVE_STAR_ONE_HOT, 2, 2) == prime_dqm


@pytest.mark.parametrize(
    "kind,k,l",
    [(OH, 1, 2), (OH, 2, 2), (OH, 2, 3), (OH, 3, 3), (OH, 2, 4), (OH, 3, 4),
     (DW, 1, 2), (DW, 2, 3), (DW, 3, 3), (DW, 2, 4), (DW, 3, 4), (DW, 2, 5), (DW, 1, 8)],
)
def test_penalty_identity_exhaustive(kind, k, l):
    q = encode(DqmInstance(k, l, {}), kind)
    oracle = one_hot_penalty_oracle if kind is OH else domain_wall_penalty_oracle
    assert q.n <= 12
    for bits in all_bits(q.n):
        assert penalty_of(q, bits) == oracle(bits, k, l)


@pytest.mark.parametrize("l,count,bits,pen", [(4, 2, "1100", 0), (4, 2, "1110", 1), (4, 2, "0000", 4), (4, 1, "1111", 9)])
def test_k_hot_penalty(l, count, bits, pen):
    q = build_k_hot_penalty(l, count)
    assert penalty_of(q, bits) == pen
    assert not q.cost_terms


def test_k_hot_expansion():
    q = build_k_hot_penalty(3, 2)
    assert q.penalty_offset == 4
    assert q.penalty_terms == {(0, 0): -3.0, (1, 1): -3.0, (2, 2): -3.0, (0, 1): 2.0, (0, 2): 2.0, (1, 2): 2.0}


def test_k_hot_decode():
    desc = build_k_hot_penalty(4, 2).descriptor
    assert decode("0110", desc).valid
    res = decode("0111", desc)
    assert not res.valid and res.violations[0].count == 3


def _perm_cases():
    rng = np.random.default_rng(11)
    for kind in (OH, DW):
        for k, l in [(1, 2), (2, 2), (2, 3), (3, 3), (2, 4)]:
            perms = [list(rng.permutation(l)) for _ in range(k)]
            yield kind, k, l, perms


@pytest.mark.parametrize("kind,k,l,perms", list(_perm_cases()))
def test_energy_consistency_and_decode_identity_with_perms(kind, k, l, perms):
    d = random_dqm(k, l, -9, 9, seed=k * 10 + l)
    q = encode(d, kind, perms)
    for a in itertools.product(range(l), repeat=k):
        bits = encode_bits(a, q.descriptor)
        assert cost_of(q, bits) == pytest.approx(evaluate_dqm(d, a), rel=1e-12, abs=1e-12)
        assert penalty_of(q, bits) == 0
        assert decode(bits, q.descriptor).assignment == tuple(a)


def test_perms_change_domain_wall_invalid_energies():
    d = random_dqm(1, 3, -9, 9, seed=5)
    a = encode_domain_wall(d)
    b = encode_domain_wall(d, [[2, 1, 0]])
    assert cost_of(a, "01") != cost_of(b, "01") or cost_of(a, "11") != cost_of(b, "11")


def test_decode_one_hot_examples():
    desc = EncodingDescriptor(OH, 2, 2)
    assert decode("1010", desc).assignment == (0, 0)
    res = decode("1000", desc)
    assert not res.valid
    assert [(v.register, v.count) for v in res.violations] == [(1, 0)]


def test_decode_domain_wall_class_d_register():
    desc = EncodingDescriptor(DW, 1, 6)
    res = decode("00110", desc)
    assert not res.valid
    assert res.violations[0].count == 2


def test_decode_domain_wall_value_is_wall_position():
    desc = EncodingDescriptor(DW, 1, 4)
    assert [decode(b, desc).assignment for b in ("000", "100", "110", "111")] == [(0,), (1,), (2,), (3,)]


def test_decode_length_mismatch():
    with pytest.raises(ValueError):
        decode("101", EncodingDescriptor(OH, 2, 2))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=0, max_size=10))
def test_wall_count_matches_oracle(register):
    assert wall_count(register) == walls_oracle(register)


@pytest.mark.parametrize("k,l", [(2, 2), (2, 3), (3, 3), (2, 4)])
def test_variable_and_interaction_counts(k, l):
    d = random_dqm(k, l, 1, 9, seed=0)
    oh, dw = encode_one_hot(d), encode_domain_wall(d)
    assert oh.n - dw.n == k
    for q in (oh, dw):
        off = {key for key in set(q.cost_terms) | set(q.penalty_terms) if key[0] != key[1]}
        assert len(off) <= q.n * (q.n - 1) // 2


# Largest cost coefficient: domain-wall is not always at least one-hot.


def test_largest_coefficient_counterexample_exists():
    d = DqmInstance(1, 2, {(0, 0, 0, 0): 5.0, (0, 0, 1, 1): 5.0})
    assert encode_domain_wall(d).max_abs_cost_coefficient() == 0
    assert encode_one_hot(d).max_abs_cost_coefficient() == 5


@pytest.mark.parametrize("k,l", [(3, 3), (2, 4)])
def test_largest_coefficient_mixed_sign_family(k, l):
    larger = 0
    for seed in range(100):
        d = random_dqm(k, l, -9, 9, seed=seed)
        dw = encode_domain_wall(d).max_abs_cost_coefficient()
        oh = encode_one_hot(d).max_abs_cost_coefficient()
        assert dw >= oh
        larger += dw > oh
    assert larger > 0


# QUBO text format


def test_export_import_round_trip(q_prime, q_dw):
    for q in (q_prime, q_dw, build_k_hot_penalty(4, 2)):
        assert import_qubo(export_qubo(q)) == q


def test_export_is_sorted_cost_first(q_prime):
    lines = [ln for ln in export_qubo(q_prime).splitlines() if ln[:1] in "cp"]
    tags = [ln.split()[0] for ln in lines]
    assert tags == sorted(tags)
    cost = [tuple(map(int, ln.split()[1:3])) for ln in lines if ln.startswith("c")]
    assert cost == sorted(cost)


def test_header_only_document():
    q = import_qubo("n 3\noffset_cost 0\noffset_penalty 0\n")
    assert q.n == 3 and not q.cost_terms and not q.penalty_terms
    assert import_qubo(export_qubo(q)) == q


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)), st.floats(allow_nan=False, allow_infinity=False), max_size=10),
       st.floats(allow_nan=False, allow_infinity=False))
def test_round_trip_bit_exact(raw, offset):
    terms = {(min(u, v), max(u, v)): x for (u, v), x in raw.items()}
    q = QuboPair(5, terms, offset, {}, 0.0)
    assert import_qubo(export_qubo(q)) == q


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("n 2\nc 1 0 1.0\n", "line 2"),
        ("n 2\nc 0 2 1.0\n", "range"),
        ("n 2\nc 0 1 1.0\nc 0 1 2.0\n", "duplicate"),
        ("n 2\nq 0 1 1.0\n", "line 2"),
        ("c 0 1 1.0\nn 2\n", "line 1"),
        ("n 2\nn 3\n", "line 2"),
        ("n 2\nc 0 1 abc\n", "line 2"),
        ("offset_cost 1\n", "missing"),
    ],
)
def test_import_errors(text, fragment):
    with pytest.raises(FormatError, match=fragment):
        import_qubo(text)


def test_quboPair_validation():
    with pytest.raises(ValueError):
        QuboPair(2, {(1, 0): 1.0}, 0.0, {}, 0.0)
    with pytest.raises(ValueError):
        QuboPair(2, {(0, 2): 1.0}, 0.0, {}, 0.0)
    assert QuboPair(2, {(0, 1): 0.0}, 0.0, {}, 0.0).cost_terms == {}
