"""Bi-objective royal-road benchmarks: RRRMO and the uRRRMO class.

Both functions are maximised.  Problem instances validate their length at
construction and are immutable afterwards.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

from .bitstring import (
    BitString,
    Permutation,
    apply_permutation,
    count_statistics,
    leading_ones,
    leading_zeros,
    trailing_ones,
    trailing_zeros,
)

#: largest W enumeration accepted by :func:`urrrmo_front`
ENUMERATION_LIMIT = 10**6


class SizeLimitError(ValueError):
    """Requested enumeration exceeds the configured guard."""


class Fitness(NamedTuple):
    f1: int
    f2: int


class Dominance(enum.Enum):
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated_by"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def compare(a: Sequence[int], b: Sequence[int]) -> Dominance:
    a1, a2 = a
    b1, b2 = b
    if a1 == b1 and a2 == b2:
        return Dominance.EQUAL
    if a1 >= b1 and a2 >= b2:
        return Dominance.DOMINATES
    if a1 <= b1 and a2 <= b2:
        return Dominance.DOMINATED_BY
    return Dominance.INCOMPARABLE


def dominates(a: Sequence[int], b: Sequence[int]) -> bool:
    """Strict Pareto dominance of ``a`` over ``b``."""
    return a[0] >= b[0] and a[1] >= b[1] and (a[0] > b[0] or a[1] > b[1])


def weakly_dominates(a: Sequence[int], b: Sequence[int]) -> bool:
    return a[0] >= b[0] and a[1] >= b[1]


# --------------------------------------------------------------------------
# RRRMO


def _check_rrrmo_n(n: int) -> None:
    if n <= 0 or n % 5:
        raise ValueError(f"RRRMO needs n divisible by 5, got {n}")


def _check_length(x: BitString, n: int) -> None:
    if x.n != n:
        raise ValueError(f"expected a string of length {n}, got {x.n}")


@dataclass(frozen=True)
class RRRMOFlags:
    in_G: bool
    in_F: bool
    in_Fprime: bool


def rrrmo_eval(x: BitString, n: int) -> Fitness:
    _check_length(x, n)
    ones = x.value.bit_count()
    lz, tz = leading_zeros(x), trailing_zeros(x)
    in_f = 5 * ones == 4 * n and 5 * (lz + tz) == n
    if 5 * ones <= 3 * n or in_f:
        return Fitness(n * ones + tz, n * ones + lz)
    return Fitness(0, 0)


def rrrmo_membership(x: BitString, n: int) -> RRRMOFlags:
    _check_length(x, n)
    s = count_statistics(x)
    # 0^i 1^k 0^(n-k-i) is exactly: k ones and LZ + TZ = n - k
    in_f = 5 * s.ones == 4 * n and s.LZ + s.TZ == n - s.ones
    in_fp = 5 * s.ones == 3 * n and s.LZ + s.TZ == n - s.ones
    return RRRMOFlags(in_G=5 * s.ones <= 3 * n or in_f, in_F=in_f, in_Fprime=in_fp)


def _block_string(n: int, lead: int, ones: int) -> BitString:
    return BitString.from_str("0" * lead + "1" * ones + "0" * (n - lead - ones))


def rrrmo_front(n: int) -> list[tuple[BitString, Fitness]]:
    """Pareto set ``{0^i 1^(4n/5) 0^(n/5-i)}`` with fitness, ordered by ``i``."""
    _check_rrrmo_n(n)
    k = 4 * n // 5
    out = []
    for i in range(n // 5 + 1):
        out.append((_block_string(n, i, k), Fitness(n * k + n // 5 - i, n * k + i)))
    return out


# --------------------------------------------------------------------------
# uRRRMO


def _check_urrrmo_n(n: int) -> None:
    if n <= 0 or n % 16:
        raise ValueError(f"uRRRMO needs n divisible by 16, got {n}")


@dataclass(frozen=True)
class URRRMOFlags:
    L_in_U: bool
    L_in_P: bool
    R_in_C: bool
    R_in_T: bool

    @property
    def in_K(self) -> bool:
        return self.L_in_U or self.R_in_C

    @property
    def in_W(self) -> bool:
        return self.L_in_P and self.R_in_T


def _half_stats(v: int, h: int):
    """(ones, LO, TO, LZ, TZ) of an ``h``-bit half stored MSB-first in ``v``."""
    m = (1 << h) - 1
    inv = v ^ m
    lz = h - v.bit_length()
    lo = h - inv.bit_length()
    tz = h if v == 0 else (v & -v).bit_length() - 1
    to = h if inv == 0 else (inv & -inv).bit_length() - 1
    return v.bit_count(), lo, to, lz, tz


def _subsets_from_value(v: int, n: int):
    h, b = n // 2, n // 8
    left, right = v >> h, v & ((1 << h) - 1)
    bmask = (1 << b) - 1
    l_counts = [((left >> (h - (j + 1) * b)) & bmask).bit_count() for j in range(4)]
    r_counts = [((right >> (h - (j + 1) * b)) & bmask).bit_count() for j in range(4)]
    l_ones, l_lo, _, _, l_tz = _half_stats(left, h)
    _, r_lo, r_to, r_lz, r_tz = _half_stats(right, h)
    # c in [n/24, n/12] without fractions
    in_u = all(24 * c >= n and 12 * c <= n for c in l_counts)
    in_p = l_lo + l_tz == h
    in_c = r_lo + r_tz == h or r_lz + r_to == h
    in_t = all(16 * c == n for c in r_counts)
    return URRRMOFlags(in_u, in_p, in_c, in_t), (l_ones, l_lo, l_tz), (r_lo, r_to, r_lz, r_tz)


def urrrmo_subsets(x: BitString, n: int) -> URRRMOFlags:
    _check_length(x, n)
    _check_urrrmo_n(n)
    return _subsets_from_value(x.value, n)[0]


def urrrmo_eval(x: BitString, n: int) -> Fitness:
    _check_length(x, n)
    _check_urrrmo_n(n)
    return _urrrmo_value(x.value, n)


def _urrrmo_value(v: int, n: int) -> Fitness:
    flags, (l_ones, l_lo, l_tz), (r_lo, r_to, r_lz, r_tz) = _subsets_from_value(v, n)
    h = n // 2
    if r_lo != 0:
        g1, g2 = r_lo, h + r_tz
    else:
        g1, g2 = h + r_lz, r_to
    case1 = flags.L_in_U and not flags.R_in_C
    case2 = flags.R_in_C
    case3 = flags.L_in_P and flags.R_in_T
    assert case1 + case2 + case3 <= 1, "uRRRMO cases overlap"
    if case1:
        return Fitness(g1, g2)
    if case2:
        off = 2 * n - l_ones
        return Fitness(g1 + off, g2 + off)
    if case3:
        return Fitness(l_lo + 3 * n, l_tz + 3 * n)
    return Fitness(0, 0)


def urrrmo_instance_eval(x: BitString, sigma: Permutation, z: BitString) -> Fitness:
    """uRRRMO applied to ``sigma(x) XOR z``."""
    _check_urrrmo_n(x.n)
    if z.n != x.n:
        raise ValueError("mask length differs from string length")
    y = apply_permutation(x, sigma)
    return _urrrmo_value(y.value ^ z.value, x.n)


@dataclass(frozen=True)
class URRRMOFront:
    fitness_vectors: list[Fitness]
    preimage_count: int
    W: Optional[list[BitString]] = None


def _balanced_blocks(b: int) -> list[int]:
    return [sum(1 << (b - 1 - i) for i in pos) for pos in itertools.combinations(range(b), b // 2)]


def urrrmo_front(n: int, enumerate_W: bool = False) -> URRRMOFront:
    _check_urrrmo_n(n)
    h, b = n // 2, n // 8
    vectors = [Fitness(3 * n + k, 3 * n + h - k) for k in range(h + 1)]
    count = (h + 1) * math.comb(b, b // 2) ** 4
    if not enumerate_W:
        return URRRMOFront(vectors, count)
    if count > ENUMERATION_LIMIT:
        raise SizeLimitError(f"|W| = {count} exceeds enumeration limit {ENUMERATION_LIMIT}")
    balanced = _balanced_blocks(b)
    rights = [
        (r1 << 3 * b) | (r2 << 2 * b) | (r3 << b) | r4
        for r1, r2, r3, r4 in itertools.product(balanced, repeat=4)
    ]
    W = []
    for a in range(h + 1):
        left = ((1 << a) - 1) << (h - a)
        W.extend(BitString(n, (left << h) | r) for r in rights)
    return URRRMOFront(vectors, count, W)


def hypermutation_hard_sigma(n: int) -> Permutation:
    """Block permutation giving ``(L1, L3, R1, R3, L2, L4, R2, R4)``."""
    _check_urrrmo_n(n)
    b = n // 8
    order = (0, 2, 4, 6, 1, 3, 5, 7)
    return Permutation(src * b + t + 1 for src in order for t in range(b))


# --------------------------------------------------------------------------
# problem instances


class RRRMO:
    """The royal road for one-point crossover."""

    kind = "rrrmo"

    def __init__(self, n: int):
        _check_rrrmo_n(n)
        self.n = n
        k = 4 * n // 5
        self._front_sum = 2 * n * k + n // 5
        self._front_base = n * k
        self._plateau_sum = 2 * n * (3 * n // 5) + 2 * n // 5

    def __repr__(self) -> str:
        return f"RRRMO(n={self.n})"

    @property
    def label(self) -> str:
        return "rrrmo"

    def evaluate(self, x: BitString) -> Fitness:
        return rrrmo_eval(x, self.n)

    def membership(self, x: BitString) -> RRRMOFlags:
        return rrrmo_membership(x, self.n)

    def front(self) -> list[tuple[BitString, Fitness]]:
        return rrrmo_front(self.n)

    def front_vectors(self) -> list[Fitness]:
        return [f for _, f in rrrmo_front(self.n)]

    @property
    def front_size(self) -> int:
        return self.n // 5 + 1

    def pareto_index(self, f: Sequence[int]) -> Optional[int]:
        if f[0] + f[1] != self._front_sum:
            return None
        return f[1] - self._front_base

    def on_plateau(self, f: Sequence[int]) -> bool:
        """True for members of F', the 3n/5-ones plateau."""
        return f[0] + f[1] == self._plateau_sum

    def antichain_bound(self, genomes: Sequence[BitString], fits: Sequence[Fitness]) -> int:
        if not fits or any(f == (0, 0) for f in fits):
            return 1
        k = genomes[0].value.bit_count()
        return 1 if k == 0 else self.n - k + 1

    def kernel_spec(self):
        return 0, self.n, None, 0


class URRRMO:
    """uRRRMO, optionally composed as ``uRRRMO(sigma(x) XOR z)``."""

    kind = "urrrmo"

    def __init__(self, n: int, sigma: Optional[Permutation] = None, z: Optional[BitString] = None,
                 label: Optional[str] = None):
        _check_urrrmo_n(n)
        if sigma is not None and sigma.n != n:
            raise ValueError(f"permutation on 1..{sigma.n} does not match n={n}")
        if z is not None and z.n != n:
            raise ValueError(f"mask length {z.n} does not match n={n}")
        if sigma is not None and sigma.is_identity():
            sigma = None
        if z is not None and z.value == 0:
            z = None
        self.n = n
        self.sigma = sigma
        self.z = z
        self._label = label
        self._front_sum = 6 * n + n // 2

    def __repr__(self) -> str:
        return f"URRRMO(n={self.n}, sigma={self.sigma!r}, z={self.z!r})"

    @property
    def label(self) -> str:
        if self._label:
            return self._label
        return "urrrmo" if self.sigma is None and self.z is None else "urrrmo-sigma-z"

    @property
    def transformed(self) -> bool:
        return self.sigma is not None or self.z is not None

    def transform(self, x: BitString) -> BitString:
        if self.sigma is not None:
            x = apply_permutation(x, self.sigma)
        if self.z is not None:
            x = BitString(x.n, x.value ^ self.z.value)
        return x

    def evaluate(self, x: BitString) -> Fitness:
        _check_length(x, self.n)
        return _urrrmo_value(self.transform(x).value, self.n)

    def subsets(self, x: BitString) -> URRRMOFlags:
        _check_length(x, self.n)
        return _subsets_from_value(self.transform(x).value, self.n)[0]

    def front_vectors(self) -> list[Fitness]:
        return urrrmo_front(self.n).fitness_vectors

    def pareto_set(self) -> list[BitString]:
        """Pre-images of the Pareto front under this instance's transform."""
        W = urrrmo_front(self.n, enumerate_W=True).W
        if not self.transformed:
            return W
        inv = self.sigma.inverse() if self.sigma is not None else None
        zv = self.z.value if self.z is not None else 0
        out = []
        for w in W:
            y = BitString(self.n, w.value ^ zv)
            out.append(apply_permutation(y, inv) if inv is not None else y)
        return out

    @property
    def front_size(self) -> int:
        return self.n // 2 + 1

    def pareto_index(self, f: Sequence[int]) -> Optional[int]:
        if f[0] + f[1] != self._front_sum or f[0] < 3 * self.n or f[1] < 3 * self.n:
            return None
        return f[0] - 3 * self.n

    def on_plateau(self, f: Sequence[int]) -> bool:
        return False

    def antichain_bound(self, genomes: Sequence[BitString], fits: Sequence[Fitness]) -> int:
        if not fits or any(f == (0, 0) for f in fits):
            return 1
        return self.n

    def kernel_spec(self):
        perm = self.sigma.sources() if self.sigma is not None else None
        return 1, self.n, perm, (self.z.value if self.z is not None else 0)


Problem = Union[RRRMO, URRRMO]


def parse_sigma(text: str, n: int) -> Permutation:
    text = text.strip()
    if text == "identity":
        return Permutation.identity(n)
    if text == "hypermut-hard":
        return hypermutation_hard_sigma(n)
    sigma = Permutation.from_string(text)
    if sigma.n != n:
        raise ValueError(f"explicit permutation has length {sigma.n}, expected {n}")
    return sigma


def make_problem(name: str, n: int, sigma: str = "identity", z: str = "0",
                 z_source=None) -> Problem:
    """Build a problem from its CLI selection string.

    ``z`` is a bit literal, ``"0"`` for the all-zeros mask, or ``"random"``;
    a random mask is drawn from ``z_source`` (an :class:`~rremo.rng.Rng`).
    """
    if name == "rrrmo":
        return RRRMO(n)
    if name == "urrrmo":
        return URRRMO(n)
    if name == "urrrmo-sigma-z":
        _check_urrrmo_n(n)
        perm = parse_sigma(sigma, n)
        if z == "random":
            if z_source is None:
                raise ValueError("random z needs an rng")
            mask = BitString(n, z_source.bits(n))
        elif z in ("0", "zero", ""):
            mask = BitString.zeros(n)
        else:
            mask = BitString.from_str(z)
        label = f"urrrmo-sigma-z[sigma={sigma};z={z}]"
        return URRRMO(n, perm, mask, label=label)
    raise ValueError(f"unknown problem {name!r}")
