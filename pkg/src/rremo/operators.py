"""Variation operators: three mutations and two crossovers.

All operators take an :class:`~rremo.rng.Rng` and consume it in a fixed,
documented order so that the compiled kernel can mirror them draw for draw.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .bitstring import BitString
from .rng import Rng

NORMALISATION_TOL = 1e-12


# --------------------------------------------------------------------------
# radius distributions


@dataclass(frozen=True)
class RadiusDistribution:
    """Weights over Hamming radii ``0..n``."""

    weights: tuple[float, ...]
    label: str = "custom"

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if not w:
            raise ValueError("radius distribution needs at least one weight")
        if any(v < 0 or math.isnan(v) for v in w):
            raise ValueError("radius weights must be non-negative")
        if abs(math.fsum(w) - 1.0) > NORMALISATION_TOL:
            raise ValueError(f"radius weights sum to {math.fsum(w)!r}, not 1")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return len(self.weights) - 1

    @classmethod
    def point(cls, k: int, n: int) -> "RadiusDistribution":
        if not 0 <= k <= n:
            raise ValueError(f"point radius {k} outside 0..{n}")
        w = [0.0] * (n + 1)
        w[k] = 1.0
        return cls(tuple(w), f"point:{k}")

    @classmethod
    def uniform(cls, n: int) -> "RadiusDistribution":
        # fsum-normalised so the check holds for every n
        w = [1.0 / (n + 1)] * (n + 1)
        return cls(tuple(w), "uniform")

    @classmethod
    def binomial(cls, n: int) -> "RadiusDistribution":
        """Radius law of standard bit mutation, Bin(n, 1/n)."""
        p = 1.0 / n
        w = [math.comb(n, k) * p**k * (1.0 - p) ** (n - k) for k in range(n + 1)]
        s = math.fsum(w)
        return cls(tuple(v / s for v in w), "binomial-1-over-n")

    @classmethod
    def from_preset(cls, preset: str, n: int) -> "RadiusDistribution":
        preset = preset.strip()
        if preset == "uniform":
            return cls.uniform(n)
        if preset == "binomial-1-over-n":
            return cls.binomial(n)
        if preset.startswith("point:"):
            from .expr import eval_int

            return cls.point(eval_int(preset[len("point:"):], n=n), n)
        raise ValueError(f"unknown radius preset {preset!r}")

    def cdf(self) -> list[float]:
        """Cumulative table used for inverse-transform sampling.

        Entries from the last positive weight onward are pinned to 1.0 so
        that rounding can never select a radius outside the support.
        """
        acc = list(itertools.accumulate(self.weights))
        last = max(i for i, v in enumerate(self.weights) if v > 0)
        for i in range(last, len(acc)):
            acc[i] = 1.0
        return acc

    def mean(self) -> float:
        return math.fsum(k * w for k, w in enumerate(self.weights))


def sample_radius(cdf: Sequence[float], rng: Rng) -> int:
    # first k with u < cdf[k]
    return bisect.bisect_right(cdf, rng.uniform())


# --------------------------------------------------------------------------
# mutation


def _random_flip_mask(n: int, r: int, rng: Rng) -> int:
    """Integer mask with exactly ``r`` set bits, uniform over all such masks."""
    if r == 0:
        return 0
    select = r if r <= n - r else n - r
    chosen = 0
    got = 0
    while got < select:
        bit = 1 << (n - 1 - rng.below(n))
        if not chosen & bit:
            chosen |= bit
            got += 1
    if select != r:
        chosen ^= (1 << n) - 1
    return chosen


def flip_random_positions(x: BitString, r: int, rng: Rng) -> BitString:
    """Uniform point on the Hamming sphere of radius ``r`` around ``x``."""
    if not 0 <= r <= x.n:
        raise ValueError(f"radius {r} outside 0..{x.n}")
    return BitString(x.n, x.value ^ _random_flip_mask(x.n, r, rng))


def unary_unbiased_mutation(x: BitString, dist: RadiusDistribution, rng: Rng,
                            cdf: Optional[Sequence[float]] = None) -> BitString:
    if dist.n != x.n:
        raise ValueError(f"radius distribution on 0..{dist.n} used with n={x.n}")
    r = sample_radius(cdf if cdf is not None else dist.cdf(), rng)
    return BitString(x.n, x.value ^ _random_flip_mask(x.n, r, rng))


def standard_bit_mutation(x: BitString, rng: Rng) -> BitString:
    """Flip each bit independently with probability ``1/n``.

    Sampled as a Bin(n, 1/n) flip count followed by a uniform choice of
    positions, which has the same distribution as per-bit coin flips.
    """
    return unary_unbiased_mutation(x, RadiusDistribution.binomial(x.n), rng)


def hypermutation(x: BitString, r: float, rng: Rng) -> BitString:
    """Somatic contiguous hypermutation with flip rate ``r`` in a circular window."""
    if not 0.0 < r <= 1.0:
        raise ValueError(f"hypermutation rate must lie in (0, 1], got {r}")
    n = x.n
    c = rng.below(n)
    length = rng.below(n + 1)
    if length == 0:
        return x
    v = x.value
    for j in range(length):
        if r >= 1.0 or rng.uniform() < r:
            v ^= 1 << (n - 1 - (c + j) % n)
    return BitString(n, v)


# --------------------------------------------------------------------------
# crossover


def _prefix_mask(n: int, c: int) -> int:
    # string positions 1..c
    return ((1 << c) - 1) << (n - c)


def one_point_crossover_at(x: BitString, y: BitString, c: int) -> tuple[BitString, BitString]:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} != {y.n}")
    if not 0 <= c <= x.n:
        raise ValueError(f"cut point {c} outside 0..{x.n}")
    n = x.n
    pm = _prefix_mask(n, c)
    sm = ((1 << n) - 1) ^ pm
    return (BitString(n, (x.value & pm) | (y.value & sm)),
            BitString(n, (y.value & pm) | (x.value & sm)))


def one_point_crossover(x: BitString, y: BitString, rng: Rng) -> tuple[BitString, BitString]:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} != {y.n}")
    return one_point_crossover_at(x, y, rng.below(x.n + 1))


def uniform_crossover(x: BitString, y: BitString, rng: Rng) -> tuple[BitString, BitString]:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} != {y.n}")
    n = x.n
    m = rng.bits(n)
    inv = ((1 << n) - 1) ^ m
    return (BitString(n, (x.value & m) | (y.value & inv)),
            BitString(n, (y.value & m) | (x.value & inv)))


def pick_one_offspring(pair: tuple[BitString, BitString], rng: Rng) -> BitString:
    return pair[rng.coin()]


# --------------------------------------------------------------------------
# operator selection strings


class Mutation:
    """Mutation operator chosen by a CLI string: ``std``, ``unbiased:<preset>``, ``hyper:<r>``."""

    RADIUS = 0
    HYPER = 1

    def __init__(self, spec: str, n: int):
        self.spec = spec.strip()
        self.n = n
        self.dist: Optional[RadiusDistribution] = None
        self.rate = 0.0
        if self.spec == "std":
            self.kind = self.RADIUS
            self.dist = RadiusDistribution.binomial(n)
        elif self.spec.startswith("unbiased:"):
            self.kind = self.RADIUS
            self.dist = RadiusDistribution.from_preset(self.spec[len("unbiased:"):], n)
        elif self.spec.startswith("hyper:"):
            self.kind = self.HYPER
            try:
                self.rate = float(_parse_fraction(self.spec[len("hyper:"):]))
            except ValueError:
                raise ValueError(f"bad hypermutation rate in {self.spec!r}") from None
            if not 0.0 < self.rate <= 1.0:
                raise ValueError(f"hypermutation rate must lie in (0, 1], got {self.rate}")
        else:
            raise ValueError(f"unknown mutation operator {spec!r}")
        self._cdf = self.dist.cdf() if self.dist is not None else None

    def __repr__(self) -> str:
        return f"Mutation({self.spec!r}, n={self.n})"

    @property
    def cdf(self) -> Optional[list[float]]:
        return self._cdf

    def expected_flip_rate(self) -> float:
        """Marginal probability that a given position is flipped."""
        if self.kind == self.HYPER:
            return self.rate / 2
        return self.dist.mean() / self.n

    def __call__(self, x: BitString, rng: Rng) -> BitString:
        if self.kind == self.HYPER:
            return hypermutation(x, self.rate, rng)
        r = sample_radius(self._cdf, rng)
        return BitString(x.n, x.value ^ _random_flip_mask(x.n, r, rng))


def _parse_fraction(text: str) -> float:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


CROSSOVERS = {"none": 0, "onepoint": 1, "uniform": 2}


class Crossover:
    """Crossover chosen by a CLI string: ``none``, ``onepoint``, ``uniform``."""

    def __init__(self, spec: str):
        self.spec = spec.strip()
        if self.spec not in CROSSOVERS:
            raise ValueError(f"unknown crossover operator {spec!r}")
        self.code = CROSSOVERS[self.spec]

    def __repr__(self) -> str:
        return f"Crossover({self.spec!r})"

    def __call__(self, x: BitString, y: BitString, rng: Rng) -> tuple[BitString, BitString]:
        if self.code == 1:
            return one_point_crossover(x, y, rng)
        if self.code == 2:
            return uniform_crossover(x, y, rng)
        return x, y
