import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rremo.bitstring import BitString, Permutation, apply_permutation, blocks, xor
from rremo.objectives import (RRRMO, URRRMO, Dominance, SizeLimitError, compare, dominates,
                              hypermutation_hard_sigma, make_problem, rrrmo_eval,
                              rrrmo_front, rrrmo_membership, urrrmo_eval, urrrmo_front,
                              urrrmo_instance_eval, urrrmo_subsets)
from rremo.rng import Rng


def B(s):
    return BitString.from_str(s.replace(" ", ""))


# --------------------------------------------------------------------------
# dominance


def test_compare_examples():
    assert compare((82, 80), (37, 30)) is Dominance.DOMINATES
    assert compare((81, 81), (82, 80)) is Dominance.INCOMPARABLE
    assert compare((5, 5), (5, 5)) is Dominance.EQUAL


@given(st.tuples(st.integers(0, 9), st.integers(0, 9)), st.tuples(st.integers(0, 9), st.integers(0, 9)))
def test_compare_antisymmetric(a, b):
    ab, ba = compare(a, b), compare(b, a)
    assert (ab is Dominance.DOMINATES) == (ba is Dominance.DOMINATED_BY)
    assert (ab is Dominance.EQUAL) == (ba is Dominance.EQUAL) == (a == b)
    assert dominates(a, b) == (ab is Dominance.DOMINATES)


# --------------------------------------------------------------------------
# RRRMO


@pytest.mark.parametrize("x,f", [
    ("0000000000", (10, 10)),
    ("1110000000", (37, 30)),
    ("0111111110", (81, 81)),
    ("1011111110", (0, 0)),
])
def test_rrrmo_values(x, f):
    assert rrrmo_eval(B(x), 10) == f


def test_rrrmo_membership_examples():
    assert rrrmo_membership(B("0111111110"), 10).in_F
    assert rrrmo_membership(B("0111111000"), 10).in_Fprime
    m = rrrmo_membership(B("1011111110"), 10)
    assert not m.in_G and not m.in_F


def test_rrrmo_rejects_bad_n():
    with pytest.raises(ValueError):
        RRRMO(12)


def test_rrrmo_front_small():
    assert [(str(x), f) for x, f in rrrmo_front(5)] == [("11110", (21, 20)), ("01111", (20, 21))]
    assert sorted(f for _, f in rrrmo_front(10)) == [(80, 82), (81, 81), (82, 80)]


@pytest.mark.parametrize("n", [5, 10, 25, 100])
def test_rrrmo_front_shape(n):
    front = rrrmo_front(n)
    assert len(front) == n // 5 + 1
    assert len({f for _, f in front}) == len(front)
    for i, (x, f) in enumerate(front):
        assert rrrmo_eval(x, n) == f
        assert f == (4 * n * n // 5 + n // 5 - i, 4 * n * n // 5 + i)
        assert rrrmo_membership(x, n).in_F


def test_rrrmo_G_dominates_rest_n10():
    n = 10
    fits = [rrrmo_eval(BitString(n, v), n) for v in range(1 << n)]
    flags = [rrrmo_membership(BitString(n, v), n) for v in range(1 << n)]
    inside = {f for f, m in zip(fits, flags) if m.in_G}
    outside = {f for f, m in zip(fits, flags) if not m.in_G and not m.in_F}
    assert outside == {(0, 0)}
    assert all(dominates(a, (0, 0)) for a in inside)


def test_rrrmo_pareto_index_and_plateau():
    p = RRRMO(10)
    for i, (x, f) in enumerate(p.front()):
        assert p.pareto_index(f) == i
    assert p.pareto_index((37, 30)) is None
    assert p.on_plateau(p.evaluate(B("0111111000")))
    assert not p.on_plateau(p.evaluate(B("0111110000")))


# --------------------------------------------------------------------------
# uRRRMO


def test_urrrmo_subset_examples():
    f = urrrmo_subsets(B("10101010 11100000"), 16)
    assert f.L_in_U and f.R_in_C
    f = urrrmo_subsets(B("00000000 10101010"), 16)
    assert f.R_in_T and not f.R_in_C


@pytest.mark.parametrize("x,f", [
    ("10101010 11100000", (31, 41)),
    ("11111111 10101010", (56, 48)),
    ("01100000 11011011", (0, 0)),
    ("10101010 11011011", (2, 8)),
])
def test_urrrmo_values(x, f):
    assert urrrmo_eval(B(x), 16) == f


@pytest.mark.parametrize("n", [16, 32, 64])
def test_instance_with_mask_equal_to_image(n):
    rng = Rng(n)
    sigma = Permutation([v + 1 for v in np.random.default_rng(n).permutation(n)])
    x = BitString(n, rng.bits(n))
    z = apply_permutation(x, sigma)
    assert urrrmo_instance_eval(x, sigma, z) == (3 * n, 2 * n)


def test_identity_instance_matches_plain():
    rng = Rng(3)
    for _ in range(200):
        x = BitString(32, rng.bits(32))
        assert urrrmo_instance_eval(x, Permutation.identity(32), BitString.zeros(32)) == \
            urrrmo_eval(x, 32)


@settings(max_examples=200)
@given(st.sampled_from([16, 32, 48]).flatmap(lambda n: st.tuples(
    st.permutations(range(1, n + 1)).map(Permutation),
    st.integers(0, (1 << n) - 1).map(lambda v, n=n: BitString(n, v)),
    st.integers(0, (1 << n) - 1).map(lambda v, n=n: BitString(n, v)))))
def test_instance_composition(t):
    sigma, x, z = t
    expected = urrrmo_eval(xor(apply_permutation(x, sigma), z), x.n)
    assert urrrmo_instance_eval(x, sigma, z) == expected
    p = URRRMO(x.n, sigma, z)
    assert p.evaluate(x) == expected


def test_urrrmo_fronts():
    f16 = urrrmo_front(16, enumerate_W=True)
    assert f16.fitness_vectors == [(48 + k, 56 - k) for k in range(9)]
    assert f16.preimage_count == 144 and len(set(f16.W)) == 144
    assert {urrrmo_eval(w, 16) for w in f16.W} == set(f16.fitness_vectors)
    f32 = urrrmo_front(32, enumerate_W=True)
    assert len(f32.fitness_vectors) == 17
    assert f32.preimage_count == 22032 == len(f32.W)
    assert all(urrrmo_subsets(w, 32).in_W for w in f32.W[::97])
    with pytest.raises(SizeLimitError):
        urrrmo_front(64, enumerate_W=True)
    assert len(urrrmo_front(160).fitness_vectors) == 81


def test_urrrmo_cases_disjoint_n16():
    # the evaluator asserts exclusivity; a sweep over all strings exercises it
    n = 16
    seen_K_and_W = 0
    for v in range(1 << n):
        x = BitString(n, v)
        f = urrrmo_subsets(x, n)
        urrrmo_eval(x, n)
        seen_K_and_W += f.in_K and f.in_W
        assert not (f.L_in_U and f.L_in_P)
        assert not (f.R_in_C and f.R_in_T)
    assert seen_K_and_W == 0


def test_hypermutation_hard_sigma():
    sigma = hypermutation_hard_sigma(16)
    x = B("AABBCCDDEEFFGGHH".translate(str.maketrans("ABCDEFGH", "01010101")))
    y = apply_permutation(B("1111111100000000"), sigma)
    assert str(y) == "1111000011110000"
    # block order L1 L3 R1 R3 L2 L4 R2 R4
    labels = "AABBCCDDEEFFGGHH"
    assert "".join(labels[sigma(i) - 1] for i in range(1, 17)) == "AACCEEGGBBDDFFHH"
    assert apply_permutation(apply_permutation(x, sigma), sigma.inverse()) == x
    with pytest.raises(ValueError):
        hypermutation_hard_sigma(20)


def test_hard_sigma_block_order_larger_n():
    n = 64
    x = BitString(n, Rng(1).bits(n))
    b = blocks(x)
    y = apply_permutation(x, hypermutation_hard_sigma(n))
    parts = [b.L1, b.L3, b.R1, b.R3, b.L2, b.L4, b.R2, b.R4]
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    assert y == out


def test_make_problem_labels_and_masks():
    assert make_problem("rrrmo", 20).label == "rrrmo"
    p = make_problem("urrrmo-sigma-z", 32, "hypermut-hard", "random", Rng(5))
    assert p.label == "urrrmo-sigma-z[sigma=hypermut-hard;z=random]"
    assert p.sigma == hypermutation_hard_sigma(32)
    q = make_problem("urrrmo-sigma-z", 32, "hypermut-hard", "random", Rng(5))
    assert p.z == q.z
    with pytest.raises(ValueError):
        make_problem("urrrmo-sigma-z", 32, z="random")
    with pytest.raises(ValueError):
        make_problem("onemax", 10)


def test_pareto_set_of_transformed_instance():
    p = make_problem("urrrmo-sigma-z", 16, "hypermut-hard", "random", Rng(9))
    W = p.pareto_set()
    assert len(W) == 144
    assert {p.evaluate(w) for w in W} == set(p.front_vectors())


def test_antichain_size_bounds_on_rrrmo_constructions():
    n = 20
    p = RRRMO(n)
    for k in (1, 5, 12):
        S = [BitString.from_str("0" * i + "1" * k + "0" * (n - k - i)) for i in range(n - k + 1)]
        fits = [p.evaluate(x) for x in S]
        for a, b in itertools.combinations(fits, 2):
            assert compare(a, b) is Dominance.INCOMPARABLE
        assert len(S) == p.antichain_bound(S, fits)
