"""Packed bit strings and the counting statistics used by the benchmark functions.

A :class:`BitString` of length ``n`` is stored as a Python ``int`` whose most
significant bit (bit ``n - 1``) is string position 1 and whose least significant
bit is string position ``n``.  Parsing ``"1100"`` therefore gives ``value=12``.
All public indexing is 1-based.
"""

from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple, Sequence


class BitString:
    """Immutable fixed-length binary genome."""

    __slots__ = ("n", "value")

    def __init__(self, n: int, value: int = 0):
        if n <= 0:
            raise ValueError(f"length must be positive, got {n}")
        if value < 0 or value >> n:
            raise ValueError(f"value {value} does not fit in {n} bits")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("BitString is immutable")

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit literal: {text!r}")
        return cls(len(text), int(text, 2))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitString":
        bits = list(bits)
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bit values must be 0 or 1, got {b!r}")
            value = (value << 1) | b
        return cls(len(bits), value)

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls(n, (1 << n) - 1)

    @property
    def mask(self) -> int:
        return (1 << self.n) - 1

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        """Bit at 1-based position ``i``, read circularly (``n + 1`` is ``1``)."""
        k = (i - 1) % self.n
        return (self.value >> (self.n - 1 - k)) & 1

    def __iter__(self) -> Iterator[int]:
        for k in range(self.n - 1, -1, -1):
            yield (self.value >> k) & 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self.n == other.n and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.n, self.value))

    def __str__(self) -> str:
        return format(self.value, f"0{self.n}b")

    def __repr__(self) -> str:
        return f"BitString('{self}')"

    def __xor__(self, other: "BitString") -> "BitString":
        return xor(self, other)

    def __add__(self, other: "BitString") -> "BitString":
        return BitString(self.n + other.n, (self.value << other.n) | other.value)

    def complement(self) -> "BitString":
        return BitString(self.n, self.value ^ self.mask)

    def substring(self, start: int, length: int) -> "BitString":
        """Bits ``start .. start + length - 1`` (1-based, no wrap-around)."""
        if start < 1 or length < 1 or start + length - 1 > self.n:
            raise ValueError(f"substring [{start}, {start + length - 1}] outside 1..{self.n}")
        shift = self.n - (start - 1) - length
        return BitString(length, (self.value >> shift) & ((1 << length) - 1))

    def flip(self, *positions: int) -> "BitString":
        v = self.value
        for i in positions:
            v ^= 1 << (self.n - 1 - ((i - 1) % self.n))
        return BitString(self.n, v)

    def ones_count(self) -> int:
        return self.value.bit_count()


class BitStats(NamedTuple):
    ones: int
    zeros: int
    LO: int
    TO: int
    LZ: int
    TZ: int


def _trailing_zeros(v: int, n: int) -> int:
    if v == 0:
        return n
    return (v & -v).bit_length() - 1


def leading_ones(x: BitString) -> int:
    return x.n - (x.value ^ x.mask).bit_length()


def leading_zeros(x: BitString) -> int:
    return x.n - x.value.bit_length()


def trailing_zeros(x: BitString) -> int:
    return _trailing_zeros(x.value, x.n)


def trailing_ones(x: BitString) -> int:
    return _trailing_zeros(x.value ^ x.mask, x.n)


def count_statistics(x: BitString) -> BitStats:
    ones = x.value.bit_count()
    return BitStats(
        ones=ones,
        zeros=x.n - ones,
        LO=leading_ones(x),
        TO=trailing_ones(x),
        LZ=leading_zeros(x),
        TZ=trailing_zeros(x),
    )


def _same_length(x: BitString, y: BitString) -> None:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} != {y.n}")


def hamming(x: BitString, y: BitString) -> int:
    _same_length(x, y)
    return (x.value ^ y.value).bit_count()


def xor(x: BitString, z: BitString) -> BitString:
    _same_length(x, z)
    return BitString(x.n, x.value ^ z.value)


class Permutation:
    """Bijection on ``1..n``; ``mapping[i - 1]`` holds the image of ``i``."""

    __slots__ = ("mapping",)

    def __init__(self, mapping: Sequence[int]):
        mapping = tuple(int(v) for v in mapping)
        n = len(mapping)
        if n == 0 or sorted(mapping) != list(range(1, n + 1)):
            raise ValueError("permutation must be a bijection on 1..n")
        self.mapping = mapping

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @classmethod
    def from_string(cls, text: str) -> "Permutation":
        return cls(int(tok) for tok in text.split(","))

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __len__(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i - 1]

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.mapping == other.mapping

    def __hash__(self) -> int:
        return hash(self.mapping)

    def __repr__(self) -> str:
        return f"Permutation({list(self.mapping)})"

    def __str__(self) -> str:
        return ",".join(map(str, self.mapping))

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.mapping, 1))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.mapping, 1):
            inv[v - 1] = i
        return Permutation(inv)

    def sources(self) -> list[int]:
        """0-based source position for every 0-based output position."""
        return [v - 1 for v in self.mapping]


def apply_permutation(x: BitString, sigma: Permutation) -> BitString:
    """Return ``(x[sigma(1)], ..., x[sigma(n)])``."""
    if sigma.n != x.n:
        raise ValueError(f"permutation on 1..{sigma.n} applied to length {x.n}")
    n, v = x.n, x.value
    out = 0
    for src in sigma.mapping:
        out = (out << 1) | ((v >> (n - src)) & 1)
    return BitString(n, out)


class Blocks(NamedTuple):
    L: BitString
    R: BitString
    L1: BitString
    L2: BitString
    L3: BitString
    L4: BitString
    R1: BitString
    R2: BitString
    R3: BitString
    R4: BitString

    def left_blocks(self) -> tuple[BitString, ...]:
        return (self.L1, self.L2, self.L3, self.L4)

    def right_blocks(self) -> tuple[BitString, ...]:
        return (self.R1, self.R2, self.R3, self.R4)


def blocks(x: BitString) -> Blocks:
    """Split into halves ``L``, ``R`` and eighths ``L1..L4``, ``R1..R4``."""
    n = x.n
    if n % 16:
        raise ValueError(f"block split needs n divisible by 16, got {n}")
    h, b = n // 2, n // 8
    parts = [x.substring(1 + k * b, b) for k in range(8)]
    return Blocks(x.substring(1, h), x.substring(h + 1, h), *parts)
