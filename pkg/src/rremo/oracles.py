"""Independent checkers for the structural claims behind the benchmarks.

The evaluators here are written directly from the set definitions on numpy
bit matrices and never call the membership or front routines of
``rremo.objectives`` except to compare against them.  Each check returns an
:class:`OracleReport`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy import stats

from . import _backend
from .bitstring import BitString
from .objectives import Fitness, SizeLimitError
from .operators import Crossover, Mutation
from .rng import Rng

ENUMERATION_GUARD = 2**24
PAIR_GUARD = 10**7
SIGMA_BAND = 3.0


@dataclass
class OracleReport:
    claim: str
    passed: bool
    observed: dict = field(default_factory=dict)
    tolerance: str = "exact"
    sample_size: int = 0
    counterexample: object = None
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        obs = ", ".join(f"{k}={_short(v)}" for k, v in self.observed.items())
        s = f"[{status}] {self.claim}: {obs} (tolerance {self.tolerance}, samples {self.sample_size})"
        if self.counterexample is not None:
            s += f" counterexample={self.counterexample}"
        if self.note:
            s += f" note: {self.note}"
        return s


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)) and len(v) > 8:
        return f"[{len(v)} values]"
    return v


# --------------------------------------------------------------------------
# vectorised evaluation on bit matrices (row = string, column = position)


def bits_matrix(values, n: int) -> np.ndarray:
    """Rows of 0/1 bytes for integer-encoded strings (position 1 = highest bit)."""
    v = np.asarray(values, dtype=np.uint64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    return ((v[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)


def _first(mask: np.ndarray) -> np.ndarray:
    n = mask.shape[1]
    return np.where(mask.any(axis=1), mask.argmax(axis=1), n).astype(np.int64)


def run_stats(B: np.ndarray):
    """ones, LO, TO, LZ, TZ of every row."""
    ones = B.sum(axis=1, dtype=np.int64)
    rev = B[:, ::-1]
    return ones, _first(B == 0), _first(rev == 0), _first(B == 1), _first(rev == 1)


def _instance(problem):
    kind, n, perm, z = problem.kernel_spec()
    sources = np.asarray(perm, dtype=np.int64) if perm is not None else None
    zbits = bits_matrix([z], n)[0] if z else None
    return kind, n, sources, zbits


def _transform(B, sources, zbits):
    if sources is not None:
        B = B[:, sources]
    if zbits is not None:
        B = B ^ zbits
    return B


def rrrmo_values(B: np.ndarray) -> np.ndarray:
    n = B.shape[1]
    ones, _, _, lz, tz = run_stats(B)
    # F: exactly 4n/5 ones forming one contiguous block
    in_f = (5 * ones == 4 * n) & (lz + ones + tz == n)
    in_g = (5 * ones <= 3 * n) | in_f
    f = np.zeros((len(B), 2), dtype=np.int64)
    f[:, 0] = np.where(in_g, n * ones + tz, 0)
    f[:, 1] = np.where(in_g, n * ones + lz, 0)
    return f


def urrrmo_parts(B: np.ndarray):
    n = B.shape[1]
    h, b = n // 2, n // 8
    L, R = B[:, :h], B[:, h:]
    lc = L.reshape(len(B), 4, b).sum(axis=2)
    rc = R.reshape(len(B), 4, b).sum(axis=2)
    l_ones, l_lo, _, _, l_tz = run_stats(L)
    _, r_lo, r_to, r_lz, r_tz = run_stats(R)
    in_u = ((24 * lc >= n) & (12 * lc <= n)).all(axis=1)
    in_p = l_lo + l_tz == h
    in_c = (r_lo + r_tz == h) | (r_lz + r_to == h)
    in_t = (16 * rc == n).all(axis=1)
    return dict(U=in_u, P=in_p, C=in_c, T=in_t, l_ones=l_ones, l_lo=l_lo, l_tz=l_tz,
                r_lo=r_lo, r_to=r_to, r_lz=r_lz, r_tz=r_tz)


def urrrmo_values(B: np.ndarray) -> np.ndarray:
    n = B.shape[1]
    h = n // 2
    s = urrrmo_parts(B)
    base1 = np.where(s["r_lo"] != 0, s["r_lo"], h + s["r_lz"])
    base2 = np.where(s["r_lo"] != 0, h + s["r_tz"], s["r_to"])
    case1 = s["U"] & ~s["C"]
    case2 = s["C"]
    case3 = s["P"] & s["T"]
    off = 2 * n - s["l_ones"]
    f = np.zeros((len(B), 2), dtype=np.int64)
    f[:, 0] = np.select([case1, case2, case3], [base1, base1 + off, s["l_lo"] + 3 * n], 0)
    f[:, 1] = np.select([case1, case2, case3], [base2, base2 + off, s["l_tz"] + 3 * n], 0)
    return f


def evaluate_matrix(problem, B: np.ndarray) -> np.ndarray:
    kind, n, sources, zbits = _instance(problem)
    Y = _transform(B, sources, zbits)
    return rrrmo_values(Y) if kind == 0 else urrrmo_values(Y)


# --------------------------------------------------------------------------
# exhaustive Pareto front


class ParetoSet(NamedTuple):
    vectors: list
    preimages: list


def _nondominated_vectors(vectors: np.ndarray) -> np.ndarray:
    """Distinct maximal vectors among unique rows."""
    order = np.lexsort((-vectors[:, 1], -vectors[:, 0]))
    best2 = -1
    keep = []
    for i in order:
        if vectors[i, 1] > best2:
            keep.append(i)
            best2 = vectors[i, 1]
    return vectors[keep]


def brute_force_pareto(problem, n: Optional[int] = None, chunk: int = 1 << 18) -> ParetoSet:
    """Exact Pareto front and Pareto set by scanning all ``2**n`` strings."""
    n = problem.n if n is None else n
    if n != problem.n:
        raise ValueError(f"problem has length {problem.n}, asked for n={n}")
    if 2**n > ENUMERATION_GUARD:
        raise SizeLimitError(f"2^{n} strings exceed the enumeration guard 2^24")
    total = 1 << n
    seen = set()
    for start in range(0, total, chunk):
        vals = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        f = evaluate_matrix(problem, bits_matrix(vals, n))
        seen.update(map(tuple, np.unique(f, axis=0).tolist()))
    front = _nondominated_vectors(np.array(sorted(seen), dtype=np.int64))
    front_set = set(map(tuple, front.tolist()))
    pre = []
    for start in range(0, total, chunk):
        vals = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        f = evaluate_matrix(problem, bits_matrix(vals, n))
        hit = np.fromiter((tuple(r) in front_set for r in f.tolist()), dtype=bool, count=len(f))
        pre.extend(BitString(n, int(v)) for v in vals[hit])
    vectors = sorted(Fitness(int(a), int(b)) for a, b in front.tolist())
    return ParetoSet(vectors, pre)


# --------------------------------------------------------------------------
# antichain lemma


def _strictly_dominates(a, b) -> bool:
    return a[0] >= b[0] and a[1] >= b[1] and (a[0] > b[0] or a[1] > b[1])


def antichain_bound_check(S: Sequence, problem) -> OracleReport:
    """Size bound for a set of mutually non-dominated individuals.

    Individuals sharing a fitness vector count once, as duplicates do in a
    multiset first layer.
    """
    claim = "antichain-bound"
    fits = [tuple(int(v) for v in ind.fitness) for ind in S]
    vecs = sorted(set(fits))
    for a, b in itertools.combinations(vecs, 2):
        if _strictly_dominates(a, b) or _strictly_dominates(b, a):
            return OracleReport(claim, False, {"size": len(vecs)},
                                counterexample=(a, b), note="precondition: input is not an antichain")
    kind, n, _, _ = problem.kernel_spec()
    m = len(vecs)
    if m <= 1:
        return OracleReport(claim, True, {"size": m, "bound": 1}, "|S| <= bound", m)
    if (0, 0) in vecs:
        return OracleReport(claim, False, {"size": m}, counterexample=(0, 0),
                            note="precondition: zero-fitness point in a multi-point antichain")
    if kind == 0:
        ks = {ind.genome.value.bit_count() for ind in S}
        if len(ks) != 1:
            return OracleReport(claim, False, {"ones_counts": sorted(ks)},
                                note="positive-fitness antichain mixes ones counts")
        k = ks.pop()
        bound = 1 if k == 0 else n - k + 1
        obs = {"size": m, "k": k, "bound": bound}
    else:
        bound = n
        obs = {"size": m, "bound": bound}
    return OracleReport(claim, m <= bound, obs, "|S| <= bound", m,
                        counterexample=None if m <= bound else vecs)


# --------------------------------------------------------------------------
# protect-layer lemma


def _layers(F: np.ndarray) -> np.ndarray:
    a0, a1 = F[:, 0][:, None], F[:, 1][:, None]
    dom = (a0 >= a0.T) & (a1 >= a1.T) & ((a0 > a0.T) | (a1 > a1.T))  # dom[i, j]: i beats j
    rank = np.full(len(F), -1, dtype=np.int64)
    alive = np.ones(len(F), dtype=bool)
    r = 0
    while alive.any():
        beaten = (dom & alive[:, None]).any(axis=0)
        layer = alive & ~beaten
        rank[layer] = r
        alive &= ~layer
        r += 1
    return rank


def _crowding(F: np.ndarray, members: np.ndarray) -> np.ndarray:
    cd = np.zeros(len(members))
    if len(members) == 0:
        return cd
    for k in range(2):
        vals = F[members, k]
        order = np.argsort(-vals, kind="stable")
        span = vals[order[0]] - vals[order[-1]]
        cd[order[0]] += np.inf
        if len(order) > 1:
            cd[order[-1]] += np.inf
        if span and len(order) > 2:
            gaps = (vals[order[:-2]] - vals[order[2:]]) / span
            cd[order[1:-1]] += gaps
    return cd


def protect_layer_check(fits: Sequence, mu: int, survivors: Optional[Sequence[int]] = None,
                        layering=None) -> OracleReport:
    """Positive crowding distances in the first layer and survival of its vectors.

    ``fits`` is the merged population; ``survivors`` the indices kept.  When
    they are not given the survivors are recomputed here.  A supplied
    ``layering`` is compared against the independent recomputation.
    """
    claim = "protect-layer"
    F = np.asarray([tuple(f) for f in fits], dtype=np.int64).reshape(-1, 2)
    rank = _layers(F)
    cd = np.zeros(len(F))
    for r in range(rank.max() + 1 if len(F) else 0):
        members = np.flatnonzero(rank == r)
        cd[members] = _crowding(F, members)
    if layering is not None:
        if list(layering.rank) != rank.tolist():
            return OracleReport(claim, False, {}, counterexample="rank mismatch",
                                note="supplied layering disagrees with recomputation")
        if not np.array_equal(np.asarray(layering.cdist, dtype=float), cd):
            return OracleReport(claim, False, {}, counterexample="crowding mismatch",
                                note="supplied crowding distances disagree with recomputation")
    first = np.flatnonzero(rank == 0)
    vectors = {tuple(v) for v in F[first].tolist()}
    m = len(vectors)
    positive = int((cd[first] > 0).sum())
    ok_count = positive <= 4 * m
    if survivors is None:
        order = sorted(range(len(F)), key=lambda i: (rank[i], -cd[i], i))
        survivors = order[:mu]
    kept = {tuple(F[i].tolist()) for i in survivors}
    applies = mu >= 4 * m
    missing = sorted(vectors - kept) if applies else []
    ok_survival = not missing
    obs = {"m": m, "positive_cdist": positive, "mu": mu, "survival_applies": applies}
    cex = None
    if not ok_count:
        cex = f"{positive} positive distances > 4m = {4 * m}"
    elif missing:
        cex = f"lost vectors {missing}"
    return OracleReport(claim, ok_count and ok_survival, obs, "count <= 4m; all F1 vectors kept",
                        len(F), cex)


# --------------------------------------------------------------------------
# Hamming distances between the uRRRMO subsets


def default_subset_predicates() -> dict:
    """Membership tests for U, P, C, T on half strings (rows of a bit matrix)."""

    def U(H, n):
        c = H.reshape(len(H), 4, -1).sum(axis=2)
        return ((24 * c >= n) & (12 * c <= n)).all(axis=1)

    def P(H, n):
        _, lo, _, _, tz = run_stats(H)
        return lo + tz == n // 2

    def C(H, n):
        _, lo, to, lz, tz = run_stats(H)
        return (lo + tz == n // 2) | (lz + to == n // 2)

    def T(H, n):
        c = H.reshape(len(H), 4, -1).sum(axis=2)
        return (16 * c == n).all(axis=1)

    return {"U": U, "P": P, "C": C, "T": T}


def _half_str(v: int, h: int) -> str:
    return format(int(v), f"0{h}b")


def _pair_distances(A: np.ndarray, Bv: np.ndarray, lo: int, hi: int, h: int):
    """min, max and first out-of-range pair over the product A x B."""
    dmin, dmax, bad = None, None, None
    step = max(1, PAIR_GUARD // max(1, len(Bv)) // 10)
    for s in range(0, len(A), step):
        d = np.bitwise_count(A[s:s + step, None] ^ Bv[None, :]).astype(np.int64)
        cmin, cmax = int(d.min()), int(d.max())
        dmin = cmin if dmin is None else min(dmin, cmin)
        dmax = cmax if dmax is None else max(dmax, cmax)
        if bad is None:
            out = np.argwhere((d < lo) | (d > hi))
            if len(out):
                i, j = out[0]
                bad = (_half_str(A[s + i], h), _half_str(Bv[j], h), int(d[i, j]))
    return dmin, dmax, bad


def _sample_blocks(gen: np.random.Generator, count: int, b: int, allowed: Sequence[int]) -> np.ndarray:
    """Uniform samples from block strings whose ones count lies in ``allowed``."""
    w = np.array([math.comb(b, c) for c in allowed], dtype=float)
    cs = gen.choice(np.asarray(allowed), size=count, p=w / w.sum())
    keys = gen.random((count, b))
    ranks = np.argsort(np.argsort(keys, axis=1), axis=1)
    bits = (ranks < cs[:, None]).astype(np.uint64)
    weights = np.uint64(1) << np.arange(b - 1, -1, -1, dtype=np.uint64)
    return (bits * weights).sum(axis=1).astype(np.uint64)


def _sample_half(gen, count, n, allowed):
    b = n // 8
    out = np.zeros(count, dtype=np.uint64)
    for _ in range(4):
        out = (out << np.uint64(b)) | _sample_blocks(gen, count, b, allowed)
    return out


def hamming_bounds_check(n: int, sample_size: int = 10**6, mode: str = "auto",
                         seed: int = 0, predicates: Optional[dict] = None) -> list[OracleReport]:
    """Distances U x P within [n/8, 3n/8] and C x T within [3n/16, 5n/16].

    ``mode`` is ``enumerate``, ``sample`` or ``auto`` (enumerate when both
    products have at most 10^7 pairs and half strings fit 16 bits).
    """
    if n <= 0 or n % 16:
        raise ValueError(f"hamming bounds need n divisible by 16, got {n}")
    if mode not in ("auto", "enumerate", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    h, b = n // 2, n // 8
    if h > 64:
        raise SizeLimitError("half strings longer than 64 bits are not supported")
    preds = default_subset_predicates()
    preds.update(predicates or {})
    u_allowed = [c for c in range(b + 1) if 24 * c >= n and 12 * c <= n]
    size_u = sum(math.comb(b, c) for c in u_allowed) ** 4
    size_t = math.comb(b, b // 2) ** 4
    size_p, size_c = h + 1, 2 * h
    if mode == "auto":
        small = size_u * size_p <= PAIR_GUARD and size_c * size_t <= PAIR_GUARD
        mode = "enumerate" if small and h <= 16 else "sample"
    bounds = {"UxP": (n // 8, 3 * n // 8), "CxT": (3 * n // 16, 5 * n // 16)}
    if n % 8 or (3 * n) % 16:
        raise ValueError("bounds are integral only for n divisible by 16")

    if mode == "enumerate":
        if h > 20:
            raise SizeLimitError(f"cannot enumerate 2^{h} half strings")
        halves = np.arange(1 << h, dtype=np.uint64)
        H = bits_matrix(halves, h)
        sets = {k: halves[np.asarray(preds[k](H, n), dtype=bool)] for k in "UPCT"}
        pairs = {"UxP": ("U", "P"), "CxT": ("C", "T")}
        reports = []
        for name, (a, c) in pairs.items():
            A, Bv = sets[a], sets[c]
            if len(A) * len(Bv) > PAIR_GUARD:
                raise SizeLimitError(f"{name} has {len(A) * len(Bv)} pairs > 10^7")
            lo, hi = bounds[name]
            if len(A) == 0 or len(Bv) == 0:
                reports.append(OracleReport(f"hamming-{name}", False, {"sizes": (len(A), len(Bv))},
                                            note="empty subset"))
                continue
            dmin, dmax, bad = _pair_distances(A, Bv, lo, hi, h)
            reports.append(OracleReport(
                f"hamming-{name}", bad is None,
                {"n": n, "mode": "enumerate", "min": dmin, "max": dmax, "interval": (lo, hi),
                 "sizes": (len(A), len(Bv))},
                f"closed interval [{lo}, {hi}]", len(A) * len(Bv), bad))
        return reports

    gen = np.random.Generator(np.random.PCG64(seed))
    U = _sample_half(gen, sample_size, n, u_allowed)
    T = _sample_half(gen, sample_size, n, [b // 2])
    full = (1 << h) - 1
    path = np.array([((1 << k) - 1) << (h - k) for k in range(h + 1)], dtype=np.uint64)
    circle = np.array(sorted({int(v) for v in path} | {full ^ int(v) for v in path}),
                      dtype=np.uint64)
    P = path[gen.integers(0, len(path), size=sample_size)]
    C = circle[gen.integers(0, len(circle), size=sample_size)]
    reports = []
    for name, A, Bv, ka, kb in (("UxP", U, P, "U", "P"), ("CxT", C, T, "C", "T")):
        keep = np.asarray(preds[ka](bits_matrix(A, h), n), dtype=bool) & \
            np.asarray(preds[kb](bits_matrix(Bv, h), n), dtype=bool)
        A, Bv = A[keep], Bv[keep]
        lo, hi = bounds[name]
        d = np.bitwise_count(A ^ Bv).astype(np.int64)
        badi = np.flatnonzero((d < lo) | (d > hi))
        cex = None
        if len(badi):
            i = badi[0]
            cex = (_half_str(A[i], h), _half_str(Bv[i], h), int(d[i]))
        reports.append(OracleReport(
            f"hamming-{name}", len(badi) == 0 and len(d) > 0,
            {"n": n, "mode": "sample", "min": int(d.min()) if len(d) else None,
             "max": int(d.max()) if len(d) else None, "interval": (lo, hi)},
            f"closed interval [{lo}, {hi}]", int(len(d)), cex))
    return reports


# --------------------------------------------------------------------------
# operator statistics


def _flip_counts(mutation: Mutation, x: BitString, samples: int, rng: Rng, backend: str,
                 chunk: int = 1 << 16) -> np.ndarray:
    n = x.n
    W = (n + 63) // 64
    counts = np.zeros(64 * W, dtype=np.int64)
    compiled = backend != "python" and _backend.available() and \
        _backend.default_backend() == "compiled"
    xw = _backend.int_to_words(x.value, n)
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        if compiled:
            out = _backend.mutate_batch(mutation, x, m, rng)
        else:
            out = np.empty((m, W), dtype=np.uint64)
            for i in range(m):
                out[i] = _backend.int_to_words(mutation(x, rng).value, n)
        flips = np.ascontiguousarray(out ^ xw).view(np.uint8)
        counts += np.unpackbits(flips, axis=1, bitorder="little").sum(axis=0, dtype=np.int64)
        done += m
    # integer bit j is string position n-1-j
    return counts[:n][::-1]


def operator_flip_frequency(mutation: Mutation, x: BitString, samples: int, rng: Rng,
                            backend: str = "auto", expected: Optional[float] = None) -> OracleReport:
    """Empirical per-position flip rate with 3-sigma binomial bands."""
    if samples < 10**4:
        raise ValueError("flip frequency needs at least 10^4 samples")
    p = mutation.expected_flip_rate() if expected is None else expected
    counts = _flip_counts(mutation, x, samples, rng, backend)
    rates = counts / samples
    sigma = math.sqrt(p * (1 - p) / samples)
    if sigma == 0:
        ok = bool(np.all(rates == p))
        z = np.zeros_like(rates)
    else:
        z = (rates - p) / sigma
        ok = bool(np.all(np.abs(z) <= SIGMA_BAND))
    worst = int(np.argmax(np.abs(z)))
    cex = None if ok else f"position {worst + 1}: rate {rates[worst]:.6f} (z={z[worst]:.2f})"
    return OracleReport(
        f"flip-frequency[{mutation.spec}]", ok,
        {"n": x.n, "expected": p, "band": SIGMA_BAND * sigma, "min_rate": float(rates.min()),
         "max_rate": float(rates.max()), "max_abs_z": float(np.abs(z).max()), "rates": rates.tolist()},
        f"+-{SIGMA_BAND:g} sigma per position", samples, cex)


def complementarity_check(crossover: Crossover, n: int, pairs: int, rng: Rng,
                          backend: str = "auto", chunk: int = 1 << 16) -> OracleReport:
    """``z xor zbar == x xor y`` for random parent pairs."""
    W = (n + 63) // 64
    top = n - 64 * (W - 1)
    top_mask = np.uint64((1 << top) - 1) if top < 64 else np.uint64(2**64 - 1)
    compiled = backend != "python" and _backend.available() and \
        _backend.default_backend() == "compiled"
    gen = np.random.Generator(np.random.PCG64(rng.next_u64()))
    violations, done, cex = 0, 0, None
    while done < pairs:
        m = min(chunk, pairs - done)
        xs = gen.integers(0, 2**64, size=(m, W), dtype=np.uint64, endpoint=False)
        ys = gen.integers(0, 2**64, size=(m, W), dtype=np.uint64, endpoint=False)
        xs[:, -1] &= top_mask
        ys[:, -1] &= top_mask
        if compiled:
            z, zb = _backend.crossover_batch(crossover, n, xs, ys, rng)
        else:
            z = np.empty_like(xs)
            zb = np.empty_like(xs)
            for i in range(m):
                a = BitString(n, _backend.words_to_int(xs[i]))
                c = BitString(n, _backend.words_to_int(ys[i]))
                u, v = crossover(a, c, rng)
                z[i] = _backend.int_to_words(u.value, n)
                zb[i] = _backend.int_to_words(v.value, n)
        bad = np.flatnonzero(((z ^ zb) != (xs ^ ys)).any(axis=1))
        if len(bad) and cex is None:
            cex = (hex(_backend.words_to_int(xs[bad[0]])), hex(_backend.words_to_int(ys[bad[0]])))
        violations += len(bad)
        done += m
    return OracleReport(f"complementarity[{crossover.spec}]", violations == 0,
                        {"n": n, "violations": violations}, "zero violations", pairs, cex)


def unbiasedness_check(mutation: Mutation, x: BitString, samples: int, rng: Rng,
                       alpha: float = 1e-3) -> OracleReport:
    """Chi-square tests that the flip mask is uniform on each Hamming sphere.

    Unbiased operators pick the radius first and then a uniform point on the
    sphere, so within every radius all masks are equally likely.  When the
    operator has an explicit radius law, its fit is tested as well.
    """
    n = x.n
    if n > 16:
        raise SizeLimitError("unbiasedness test tallies all 2^n masks; use n <= 16")
    counts = np.zeros(1 << n, dtype=np.int64)
    chunk = 1 << 16
    done = 0
    compiled = _backend.available() and _backend.default_backend() == "compiled"
    while done < samples:
        m = min(chunk, samples - done)
        if compiled:
            out = _backend.mutate_batch(mutation, x, m, rng)[:, 0]
        else:
            out = np.array([mutation(x, rng).value for _ in range(m)], dtype=np.uint64)
        counts += np.bincount((out ^ np.uint64(x.value)).astype(np.int64), minlength=1 << n)
        done += m
    radius = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    stat, dof = 0.0, 0
    for r in range(n + 1):
        sphere = counts[radius == r]
        tot = sphere.sum()
        if tot == 0 or len(sphere) < 2:
            continue
        e = tot / len(sphere)
        stat += float(((sphere - e) ** 2 / e).sum())
        dof += len(sphere) - 1
    p_sphere = float(stats.chi2.sf(stat, dof)) if dof else 1.0
    obs = {"n": n, "sphere_chi2": stat, "sphere_dof": dof, "sphere_p": p_sphere}
    ok = p_sphere >= alpha
    if mutation.dist is not None:
        radius_counts = np.bincount(radius, weights=counts, minlength=n + 1)
        expected = np.asarray(mutation.dist.weights) * samples
        keep = expected >= 5
        obs_k = list(radius_counts[keep]) + [radius_counts[~keep].sum()]
        exp_k = list(expected[keep]) + [expected[~keep].sum()]
        if exp_k[-1] < 5:
            # fold a sparse tail into the last regular bin
            tail_o, tail_e = obs_k.pop(), exp_k.pop()
            obs_k[-1] += tail_o
            exp_k[-1] += tail_e
        if len(exp_k) >= 2:
            rs = stats.chisquare(obs_k, exp_k)
            obs.update(radius_chi2=float(rs.statistic), radius_p=float(rs.pvalue))
            ok = ok and rs.pvalue >= alpha
    return OracleReport(f"unbiasedness[{mutation.spec}]", ok, obs, f"p >= {alpha:g}", samples)


# --------------------------------------------------------------------------
# jump probability probes

PREDICATES = {
    "any": 0, "G": 1, "Gprime": 2, "F": 3, "Fprime": 4, "K": 5, "W": 6, "pareto": 7,
    "F-center": 8, "F-noncenter": 9,
}


def predicate_holds(problem, name: str, x: BitString) -> bool:
    """Membership of ``x`` (after the instance transform) in a named set."""
    if name not in PREDICATES:
        raise ValueError(f"unknown predicate {name!r}; choose from {', '.join(PREDICATES)}")
    if name == "any":
        return True
    kind, n, sources, zbits = _instance(problem)
    Y = _transform(bits_matrix([x.value], n), sources, zbits)
    if name == "pareto":
        f = rrrmo_values(Y) if kind == 0 else urrrmo_values(Y)
        return problem.pareto_index(tuple(int(v) for v in f[0])) is not None
    if name in ("K", "W"):
        if kind != 1:
            return False
        s = urrrmo_parts(Y)
        return bool(s["U"][0] or s["C"][0]) if name == "K" else bool(s["P"][0] and s["T"][0])
    ones, _, _, lz, tz = (int(v[0]) for v in run_stats(Y))
    block = lz + ones + tz == n
    in_f = 5 * ones == 4 * n and block
    center = n % 10 == 0 and lz == n // 10
    return {
        "G": 5 * ones <= 3 * n or in_f,
        "Gprime": 2 * n <= 5 * ones <= 3 * n,
        "F": in_f,
        "Fprime": 5 * ones == 3 * n and block,
        "F-center": in_f and center,
        "F-noncenter": in_f and not center,
    }[name]


def _block(n, lead, ones):
    return BitString(n, ((1 << ones) - 1) << (n - lead - ones))


def _sample_direct(problem, name, rng) -> Optional[BitString]:
    kind, n, perm, z = problem.kernel_spec()
    if kind != 0 or perm is not None or z:
        return None
    if name == "F":
        return _block(n, rng.below(n // 5 + 1), 4 * n // 5)
    if name == "Fprime":
        return _block(n, rng.below(2 * n // 5 + 1), 3 * n // 5)
    if name == "F-center" and n % 10 == 0:
        return _block(n, n // 10, 4 * n // 5)
    if name == "F-noncenter" and n % 10 == 0:
        i = rng.below(n // 5)
        return _block(n, i + 1 if i >= n // 10 else i, 4 * n // 5)
    return None


def _probe_python(problem, mutation, source, target, samples, max_tries, rng):
    hits = tries = 0
    for _ in range(samples):
        x = _sample_direct(problem, source, rng)
        if x is None:
            k = 0
            while True:
                if k >= max_tries:
                    return hits, tries, True
                x = BitString(problem.n, rng.bits(problem.n))
                k += 1
                tries += 1
                if predicate_holds(problem, source, x):
                    break
        else:
            tries += 1
        if predicate_holds(problem, target, mutation(x, rng)):
            hits += 1
    return hits, tries, False


def clopper_pearson_upper(hits: int, samples: int, confidence: float = 0.95) -> float:
    """One-sided exact binomial upper confidence bound."""
    if hits >= samples:
        return 1.0
    return float(stats.beta.ppf(confidence, hits + 1, samples - hits))


def jump_probability_probe(problem, source: str, target: str, mutation: Mutation, samples: int,
                           rng: Rng, max_tries: int = 10**6, backend: str = "auto",
                           confidence: float = 0.95, min_samples: int = 10**5) -> OracleReport:
    """Hit rate of ``target`` after one mutation of a random ``source`` point.

    Small F-type sources on plain RRRMO are sampled directly; other sources by
    rejection from uniform strings, giving up after ``max_tries`` draws for a
    single source point.
    """
    for name in (source, target):
        if name not in PREDICATES:
            raise ValueError(f"unknown predicate {name!r}; choose from {', '.join(PREDICATES)}")
    if samples < min_samples:
        raise ValueError(f"probe needs at least {min_samples} samples, got {samples}")
    if _backend.use_compiled(backend, problem):
        hits, tries, exhausted = _backend.probe(problem, mutation, PREDICATES[source],
                                                PREDICATES[target], samples, max_tries, rng)
    else:
        hits, tries, exhausted = _probe_python(problem, mutation, source, target, samples,
                                               max_tries, rng)
    claim = f"probe[{problem.label}:{source}->{target}:{mutation.spec}]"
    if exhausted:
        return OracleReport(claim, False, {"hits": hits, "source_draws": tries},
                            note=f"no {source} point found within {max_tries} draws")
    upper = clopper_pearson_upper(hits, samples, confidence)
    return OracleReport(claim, hits == 0,
                        {"hits": hits, "rate": hits / samples, "upper_bound": upper,
                         "confidence": confidence, "source_draws": tries},
                        "zero hits", samples,
                        None if hits == 0 else f"{hits} hits")


# --------------------------------------------------------------------------
# named claims for the command line


def _claim_fronts(quick, seed):
    from .objectives import make_problem, rrrmo_front, urrrmo_front

    out = []
    for n in (5, 10, 15) if quick else (5, 10, 15, 20):
        bf = brute_force_pareto(make_problem("rrrmo", n))
        closed = rrrmo_front(n)
        ok = bf.vectors == sorted(f for _, f in closed) and \
            sorted(x.value for x in bf.preimages) == sorted(x.value for x, _ in closed)
        out.append(OracleReport(f"front[rrrmo n={n}]", ok,
                                {"vectors": len(bf.vectors), "preimages": len(bf.preimages)}))
    p = make_problem("urrrmo", 16)
    bf = brute_force_pareto(p)
    closed = urrrmo_front(16, enumerate_W=True)
    ok = bf.vectors == sorted(closed.fitness_vectors) and \
        sorted(x.value for x in bf.preimages) == sorted(x.value for x in closed.W)
    out.append(OracleReport("front[urrrmo n=16]", ok,
                            {"vectors": len(bf.vectors), "preimages": len(bf.preimages)}))
    return out


def _claim_antichain(quick, seed):
    from .algorithms import Individual
    from .objectives import make_problem

    out = []
    for n, k in ((20, 12), (20, 1), (40, 24)):
        p = make_problem("rrrmo", n)
        S = [Individual(g, p.evaluate(g)) for g in (_block(n, i, k) for i in range(n - k + 1))]
        out.append(antichain_bound_check(S, p))
    return out


def _claim_protect(quick, seed):
    from .objectives import make_problem

    gen = np.random.Generator(np.random.PCG64(seed))
    p = make_problem("rrrmo", 20)
    reps = 100 if quick else 1000
    worst = None
    for _ in range(reps):
        vals = gen.integers(0, 1 << 20, size=200, dtype=np.uint64)
        fits = evaluate_matrix(p, bits_matrix(vals, 20))
        rep = protect_layer_check(fits.tolist(), mu=200)
        if not rep.passed:
            worst = rep
            break
    rep = worst or OracleReport("protect-layer[random rrrmo n=20]", True, {"populations": reps},
                                "count <= 4m", reps * 200)
    return [rep]


def _claim_hamming(quick, seed):
    return hamming_bounds_check(16) + hamming_bounds_check(
        32, sample_size=10**5 if quick else 10**6, mode="sample", seed=seed)


def _claim_flips(quick, seed):
    n = 100
    samples = 10**5 if quick else 10**6
    x = BitString(n, Rng(seed).bits(n))
    out = []
    for spec in ("std", "hyper:0.25", "hyper:0.5", "hyper:1", "unbiased:point:1"):
        out.append(operator_flip_frequency(Mutation(spec, n), x, samples, Rng(trial_key(seed, spec))))
    for xo in ("uniform", "onepoint"):
        out.append(complementarity_check(Crossover(xo), n, samples, Rng(trial_key(seed, xo))))
    return out


def _claim_unbiased(quick, seed):
    n = 8
    samples = 10**5 if quick else 10**6
    x = BitString(n, 0b10110010)
    return [unbiasedness_check(Mutation(spec, n), x, samples, Rng(trial_key(seed, spec)))
            for spec in ("std", "unbiased:uniform", "unbiased:point:3")]


def _claim_probe_rrrmo(quick, seed):
    from .objectives import make_problem

    samples = 10**5 if quick else 10**7
    p = make_problem("rrrmo", 40)
    return [jump_probability_probe(p, "Gprime", "F", Mutation(spec, 40), samples,
                                   Rng(trial_key(seed, spec)))
            for spec in ("unbiased:uniform", "unbiased:binomial-1-over-n", "unbiased:point:n/5",
                         "std")]


def _claim_probe_urrrmo(quick, seed):
    from .objectives import make_problem

    samples = 10**5 if quick else 10**7
    p = make_problem("urrrmo-sigma-z", 64, sigma="hypermut-hard", z="0")
    return [jump_probability_probe(p, "K", "W", Mutation(spec, 64), samples,
                                   Rng(trial_key(seed, spec)))
            for spec in ("hyper:1/3", "hyper:1/2", "hyper:1")]


def _claim_centered(quick, seed):
    from .objectives import make_problem

    p = make_problem("rrrmo", 40)
    rep = jump_probability_probe(p, "F-noncenter", "F-center", Mutation("unbiased:point:1", 40),
                                 10**5, Rng(seed))
    return [rep]


def trial_key(seed: int, label: str) -> int:
    """Stable per-check seed derived from a base seed and a text label."""
    from .rng import trial_seed

    return trial_seed(seed, *label.encode())


CLAIMS: dict[str, Callable[[bool, int], list[OracleReport]]] = {
    "fronts": _claim_fronts,
    "antichain": _claim_antichain,
    "protect-layer": _claim_protect,
    "hamming": _claim_hamming,
    "operators": _claim_flips,
    "unbiased": _claim_unbiased,
    "probe-rrrmo": _claim_probe_rrrmo,
    "probe-urrrmo": _claim_probe_urrrmo,
    "centered-point": _claim_centered,
}


def run_claims(names: Sequence[str], quick: bool = False, seed: int = 2024) -> list[OracleReport]:
    if "all" in names:
        names = list(CLAIMS)
    unknown = [n for n in names if n not in CLAIMS]
    if unknown:
        raise ValueError(f"unknown claim(s) {unknown}; choose from all, {', '.join(CLAIMS)}")
    out = []
    for name in names:
        out.extend(CLAIMS[name](quick, seed))
    return out
