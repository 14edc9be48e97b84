import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rremo.bitstring import (BitString, Permutation, apply_permutation, blocks, count_statistics,
                             hamming, xor)


def bitstrings(min_n=1, max_n=80):
    return st.integers(min_n, max_n).flatmap(
        lambda n: st.integers(0, (1 << n) - 1).map(lambda v: BitString(n, v)))


def same_length(k, min_n=1, max_n=80):
    return st.integers(min_n, max_n).flatmap(
        lambda n: st.tuples(*[st.integers(0, (1 << n) - 1).map(lambda v, n=n: BitString(n, v))
                              for _ in range(k)]))


def perm_and_string(max_n=40):
    return st.integers(1, max_n).flatmap(lambda n: st.tuples(
        st.permutations(range(1, n + 1)).map(Permutation),
        st.integers(0, (1 << n) - 1).map(lambda v: BitString(n, v))))


# --------------------------------------------------------------------------
# construction and indexing


def test_literal_round_trip():
    x = BitString.from_str("0010110")
    assert str(x) == "0010110"
    assert len(x) == 7
    assert list(x) == [0, 0, 1, 0, 1, 1, 0]
    assert BitString.from_bits([0, 0, 1, 0, 1, 1, 0]) == x


def test_index_is_one_based_and_circular():
    x = BitString.from_str("1000")
    assert x[1] == 1
    assert x[2] == 0
    assert x[5] == x[1]
    assert x[0] == x[4]


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        BitString.from_str("10a1")
    with pytest.raises(ValueError):
        BitString(3, 8)
    with pytest.raises(ValueError):
        BitString(0)
    with pytest.raises(AttributeError):
        BitString(3, 1).value = 2


# --------------------------------------------------------------------------
# statistics


def test_statistics_worked_example():
    s = count_statistics(BitString.from_str("111001011011"))
    assert (s.ones, s.zeros, s.LO, s.TO, s.LZ, s.TZ) == (8, 4, 3, 2, 0, 0)


@pytest.mark.parametrize("n", [1, 7, 64, 65, 130])
def test_statistics_constant_strings(n):
    z = count_statistics(BitString.zeros(n))
    assert (z.ones, z.zeros, z.LO, z.TO, z.LZ, z.TZ) == (0, n, 0, 0, n, n)
    o = count_statistics(BitString.ones(n))
    assert (o.ones, o.zeros, o.LO, o.TO, o.LZ, o.TZ) == (n, 0, n, n, 0, 0)


@given(bitstrings())
def test_statistics_match_text_scan(x):
    s = count_statistics(x)
    t = str(x)
    assert s.ones == t.count("1") and s.ones + s.zeros == x.n
    assert s.LO == len(t) - len(t.lstrip("1"))
    assert s.TO == len(t) - len(t.rstrip("1"))
    assert s.LZ == len(t) - len(t.lstrip("0"))
    assert s.TZ == len(t) - len(t.rstrip("0"))
    assert s.LO + s.TZ <= x.n and s.LZ + s.TO <= x.n
    if s.LO == x.n:
        assert x == BitString.ones(x.n)


# --------------------------------------------------------------------------
# hamming, xor, permutations


@pytest.mark.parametrize("a,b,d", [("1111", "1111", 0), ("1111", "0000", 4), ("1100", "1010", 2)])
def test_hamming_examples(a, b, d):
    assert hamming(BitString.from_str(a), BitString.from_str(b)) == d


@pytest.mark.parametrize("a,b,out", [("1100", "0000", "1100"), ("1100", "1100", "0000"),
                                     ("1100", "1010", "0110")])
def test_xor_examples(a, b, out):
    assert xor(BitString.from_str(a), BitString.from_str(b)) == BitString.from_str(out)


def test_length_mismatch_rejected():
    with pytest.raises(ValueError):
        hamming(BitString.zeros(3), BitString.zeros(4))
    with pytest.raises(ValueError):
        xor(BitString.zeros(3), BitString.zeros(4))


@given(same_length(3))
def test_hamming_metric(t):
    x, y, z = t
    assert hamming(x, y) == hamming(y, x)
    assert (hamming(x, y) == 0) == (x == y)
    assert hamming(x, z) <= hamming(x, y) + hamming(y, z)


@given(same_length(3))
def test_xor_group_laws(t):
    x, y, z = t
    assert xor(xor(x, y), z) == xor(x, xor(y, z))
    assert xor(x, y) == xor(y, x)
    assert xor(x, BitString.zeros(x.n)) == x
    assert xor(x, x) == BitString.zeros(x.n)


def test_permutation_examples():
    assert apply_permutation(BitString.from_str("1010"), Permutation.identity(4)) == \
        BitString.from_str("1010")
    assert apply_permutation(BitString.from_str("1010"), Permutation([4, 3, 2, 1])) == \
        BitString.from_str("0101")
    assert apply_permutation(BitString.from_str("100"), Permutation([2, 1, 3])) == \
        BitString.from_str("010")


def test_permutation_must_be_bijection():
    with pytest.raises(ValueError):
        Permutation([1, 1, 3])
    with pytest.raises(ValueError):
        Permutation([0, 1, 2])


@given(perm_and_string())
def test_permutation_inverse_round_trip(t):
    sigma, x = t
    y = apply_permutation(x, sigma)
    assert apply_permutation(y, sigma.inverse()) == x
    for i in range(1, x.n + 1):
        assert y[i] == x[sigma(i)]


# --------------------------------------------------------------------------
# blocks


def test_blocks_examples():
    b = blocks(BitString.from_str("1111111100000000"))
    assert str(b.L) == "11111111" and str(b.R) == "00000000"
    assert all(str(v) == "11" for v in b.left_blocks())
    assert all(str(v) == "00" for v in b.right_blocks())
    b = blocks(BitString.from_str("1010101011100000"))
    assert [str(v) for v in b.left_blocks() + b.right_blocks()] == \
        ["10", "10", "10", "10", "11", "10", "00", "00"]


def test_blocks_need_multiple_of_16():
    with pytest.raises(ValueError):
        blocks(BitString.zeros(24))


@settings(max_examples=300)
@given(st.sampled_from([16, 32, 48, 64, 128]).flatmap(
    lambda n: st.integers(0, (1 << n) - 1).map(lambda v: BitString(n, v))))
def test_blocks_concatenate_back(x):
    b = blocks(x)
    assert b.L + b.R == x
    parts = b.left_blocks() + b.right_blocks()
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    assert out == x
