import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commdeg import engine, groups
from commdeg.engine import CommParams
from commdeg.errors import BruteCapExceeded, ForeignSubgroup


def oracle_counts(G, pools):
    """Histogram of left-normed commutator values by literal enumeration.

    Nested python loops over itertools.product, folding with G.product and
    G.inverse only; shares nothing with the engine's recurrence or its
    vectorized block kernel.
    """
    counts = [0] * G.order
    for tup in itertools.product(*pools):
        v = tup[0]
        for y in tup[1:]:
            v = G.product(
                G.product(G.inverse(v), G.inverse(y)), G.product(v, y)
            )
        counts[v] += 1
    return counts


def oracle_prob(H, K, n, m, g):
    G = H.parent
    pools = [H.members] * n + [K.members] * m
    counts = oracle_counts(G, pools)
    return Fraction(counts[g], H.order**n * K.order**m)


def test_commutator_convention(s3):
    # [x, y] = x^-1 y^-1 x y, checked against hand multiplication
    x, y = 2, 1
    expected = s3.product(
        s3.product(s3.inverse(x), s3.inverse(y)), s3.product(x, y)
    )
    assert engine.commutator(s3, x, y) == expected
    assert engine.left_normed_commutator(s3, [x, y]) == expected
    assert engine.left_normed_commutator(s3, [x, y, 0]) == 0


def test_commuting_degree_frozen_values(s3, q8):
    assert engine.commutativity_degree(s3).value == Fraction(1, 2)
    assert engine.commutativity_degree(q8).value == Fraction(5, 8)


def test_nilpotency_degree_weight_three(s3):
    full = groups.full_subgroup(s3)
    assert engine.nilpotency_degree(s3, full, 2).value == Fraction(3, 4)


def test_s3_single_element_probabilities(s3):
    full = groups.full_subgroup(s3)
    three_cycle = engine.prob_fast(CommParams(full, full, 1, 1, 1))
    transposition = engine.prob_fast(CommParams(full, full, 1, 1, 2))
    assert three_cycle.value == Fraction(1, 4)
    assert transposition.value == 0


def test_comm_distribution_s3_weight_two(s3):
    dist = engine.comm_distribution(groups.full_subgroup(s3), 2)
    assert dist.counts == (18, 9, 0, 9, 0, 0)
    assert dist.total == 36
    assert dist.support() == (0, 1, 3)


def test_counts_match_oracle_on_mixed_pairs(s3, q8):
    cases = []
    for G in (s3, q8):
        full = groups.full_subgroup(G)
        cyc = groups.subgroup_closure(G, [1])
        cases += [
            (full, full, 1, 1),
            (full, cyc, 2, 1),
            (cyc, full, 1, 2),
            (cyc, cyc, 2, 2),
        ]
    for H, K, n, m in cases:
        got = engine.final_counts(H, K, n, m)
        want = oracle_counts(H.parent, [H.members] * n + [K.members] * m)
        assert list(got) == want


def test_prob_fast_equals_prob_brute(s3):
    full = groups.full_subgroup(s3)
    tr = groups.subgroup_closure(s3, [2])
    for n, m in [(1, 1), (2, 1), (1, 2)]:
        for g in range(s3.order):
            params = CommParams(tr, full, n, m, g)
            assert engine.prob_fast(params).value == engine.prob_brute(params).value


def test_brute_cap_is_enforced(s3):
    full = groups.full_subgroup(s3)
    with pytest.raises(BruteCapExceeded):
        engine.prob_brute(CommParams(full, full, 2, 2, 0), cap=100)


def test_brute_threads_agree(q8):
    full = groups.full_subgroup(q8)
    params = CommParams(full, full, 2, 1, 0)
    assert (
        engine.prob_brute(params, threads=4).value
        == engine.prob_brute(params, threads=1).value
    )


def test_profile_sums_to_one(s3, q8):
    for G in (s3, q8):
        H = groups.subgroup_closure(G, [1])
        K = groups.full_subgroup(G)
        profile = engine.prob_profile(H, K, 2, 1)
        assert sum(p.value for p in profile.values()) == 1


def test_class_formula_exact_at_m_one(s3, q8):
    for G in (s3, q8):
        full = groups.full_subgroup(G)
        sub = groups.subgroup_closure(G, [1])
        for H, K in [(full, full), (sub, full), (full, sub), (sub, sub)]:
            for n in (1, 2):
                for g in range(G.order):
                    params = CommParams(H, K, n, 1, g)
                    assert (
                        engine.prob_class_formula(params, "derived").value
                        == engine.prob_fast(params).value
                    )


def test_class_formula_overcounts_at_m_two(s3):
    full = groups.full_subgroup(s3)
    params = CommParams(full, full, 1, 2, 0)
    assert engine.prob_class_formula(params, "derived").value == Fraction(66, 216)
    assert engine.prob_fast(params).value == Fraction(162, 216)


def test_class_formula_paper_predicate_matches_at_weight_two(s3):
    full = groups.full_subgroup(s3)
    for g in range(s3.order):
        params = CommParams(full, full, 1, 1, g)
        assert (
            engine.prob_class_formula(params, "paper").value
            == engine.prob_fast(params).value
        )


def test_zeta_counts(s3, a3_in_s3):
    assert engine.zeta_count(a3_in_s3, 1) == 3
    for g in range(s3.order):
        want = oracle_counts(s3, [a3_in_s3.members, range(6)])[g]
        assert engine.zeta_count(a3_in_s3, g) == want
        assert engine.zeta_count_nm(a3_in_s3, 1, 1, g) == want


def test_y_set_size(s3):
    flip = groups.subgroup_closure(s3, [2])
    # x in S3 with C_<(12)>(x) = 1: the four elements outside that centralizer
    assert engine.y_set_size(groups.full_subgroup(s3), flip, 1) == 4


def test_value_set_and_generated_subgroup(s3, a3_in_s3):
    full = groups.full_subgroup(s3)
    assert engine.commutator_value_set(full, full, 1, 1) == (0, 1, 3)
    derived = engine.nested_commutator_subgroup(full, full, 1, 1)
    assert derived.members == a3_in_s3.members
    triv = engine.nested_commutator_subgroup(
        groups.trivial_subgroup(s3), full, 1, 1
    )
    assert triv.is_trivial


def test_relative_probability_frozen(s3, a3_in_s3):
    full = groups.full_subgroup(s3)
    assert engine.prob_fast(CommParams(a3_in_s3, full, 1, 1, 0)).value == Fraction(
        2, 3
    )
    assert engine.prob_fast(CommParams(a3_in_s3, full, 1, 1, 1)).value == Fraction(
        1, 6
    )


def test_extend_rejects_foreign_subgroup(s3, q8):
    dist = engine.comm_distribution(groups.full_subgroup(s3), 1)
    with pytest.raises(ForeignSubgroup):
        engine.extend_by_conjugators(dist, groups.full_subgroup(q8), 1)


def test_bigint_path_matches_int64_path(monkeypatch, s3):
    full = groups.full_subgroup(s3)
    fast = engine._extend_counts(s3, [1] * 6, full.members, 2)
    monkeypatch.setattr(engine, "_INT64_SAFE", 1)
    slow = engine._extend_counts(s3, [1] * 6, full.members, 2)
    assert fast == slow


def test_prob_json_round_trip(s3):
    full = groups.full_subgroup(s3)
    p = engine.prob_fast(CommParams(full, full, 1, 1, 1))
    payload = engine.prob_to_json(p)
    q = engine.prob_from_json(s3, payload)
    assert q.value == p.value
    assert q.method == p.method
    assert q.params.g == p.params.g
    assert q.params.H.members == p.params.H.members


def test_distribution_csv(s3):
    dist = engine.comm_distribution(groups.full_subgroup(s3), 2)
    lines = engine.distribution_csv(dist).splitlines()
    assert lines[0] == "element_id,count"
    assert lines[1] == "0,18"
    assert len(lines) == 7


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_total_mass_is_the_tuple_space(data):
    G = data.draw(
        st.sampled_from(
            [
                groups.named_group("S", 3),
                groups.named_group("D", 4),
                groups.named_group("C", 5),
            ]
        )
    )
    seed = data.draw(st.integers(0, G.order - 1))
    H = groups.subgroup_closure(G, [seed])
    K = groups.full_subgroup(G)
    n = data.draw(st.integers(1, 2))
    m = data.draw(st.integers(1, 2))
    counts = engine.final_counts(H, K, n, m)
    assert sum(counts) == H.order**n * K.order**m
    assert all(c >= 0 for c in counts)
