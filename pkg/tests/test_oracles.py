
import numpy as np
import pytest

from rremo.algorithms import Individual, nsgaii_run, survival_order
from rremo.bitstring import BitString
from rremo.objectives import SizeLimitError, make_problem, rrrmo_front, urrrmo_front
from rremo.operators import Crossover, Mutation
from rremo.oracles import (CLAIMS, antichain_bound_check, brute_force_pareto,
                           clopper_pearson_upper, complementarity_check, evaluate_matrix,
                           bits_matrix, hamming_bounds_check, jump_probability_probe,
                           operator_flip_frequency, predicate_holds, protect_layer_check,
                           run_claims, unbiasedness_check)
from rremo.rng import Rng


def B(s):
    return BitString.from_str(s)


# --------------------------------------------------------------------------
# independent evaluators and fronts


@pytest.mark.parametrize("spec", [("rrrmo", 10, "identity", "0"), ("urrrmo", 32, "identity", "0"),
                                  ("urrrmo-sigma-z", 48, "hypermut-hard", "random")])
def test_vectorised_evaluator_agrees(spec):
    name, n, sigma, z = spec
    p = make_problem(name, n, sigma, z, Rng(3))
    rng = Rng(4)
    vals = [rng.bits(n) for _ in range(3000)]
    got = evaluate_matrix(p, bits_matrix(np.array(vals, dtype=np.uint64), n))
    assert got.tolist() == [list(p.evaluate(BitString(n, v))) for v in vals]


def test_brute_force_rrrmo_small():
    bf = brute_force_pareto(make_problem("rrrmo", 5))
    assert bf.vectors == [(20, 21), (21, 20)]
    assert sorted(str(x) for x in bf.preimages) == ["01111", "11110"]
    bf = brute_force_pareto(make_problem("rrrmo", 10))
    closed = rrrmo_front(10)
    assert bf.vectors == sorted(f for _, f in closed)
    assert sorted(x.value for x in bf.preimages) == sorted(x.value for x, _ in closed)


def test_brute_force_urrrmo_16():
    bf = brute_force_pareto(make_problem("urrrmo", 16))
    front = urrrmo_front(16, enumerate_W=True)
    assert bf.vectors == front.fitness_vectors and len(bf.vectors) == 9
    assert len(bf.preimages) == 144
    assert sorted(x.value for x in bf.preimages) == sorted(w.value for w in front.W)


def test_brute_force_guard():
    with pytest.raises(SizeLimitError):
        brute_force_pareto(make_problem("rrrmo", 25))


# --------------------------------------------------------------------------
# antichain and protect-layer checks


def _shifted_block(n, k):
    p = make_problem("rrrmo", n)
    genomes = [B("0" * i + "1" * k + "0" * (n - k - i)) for i in range(n - k + 1)]
    return p, [Individual(g, p.evaluate(g)) for g in genomes]


def test_antichain_boundary_construction():
    p, S = _shifted_block(20, 12)
    rep = antichain_bound_check(S, p)
    assert rep.passed and rep.observed["size"] == rep.observed["bound"] == 9


def test_antichain_precondition_failure():
    p = make_problem("rrrmo", 10)
    S = [Individual(g, p.evaluate(g)) for g in (B("0111111110"), B("1110000000"))]
    rep = antichain_bound_check(S, p)
    assert not rep.passed and "precondition" in rep.note and rep.counterexample is not None


def test_antichain_bound_detects_oversized_set():
    # a fake problem that claims tiny bounds: the check must compare sizes
    p, S = _shifted_block(20, 12)

    class Tight:
        def kernel_spec(self):
            return 0, 14, None, 0

    rep = antichain_bound_check(S, Tight())
    assert not rep.passed and rep.counterexample


def test_protect_layer_random_populations():
    p = make_problem("rrrmo", 20)
    gen = np.random.Generator(np.random.PCG64(8))
    for _ in range(100):
        fits = evaluate_matrix(p, bits_matrix(gen.integers(0, 1 << 20, 200, dtype=np.uint64), 20))
        rep = protect_layer_check(fits.tolist(), mu=200)
        assert rep.passed, rep.line()


def test_protect_layer_single_vector():
    rep = protect_layer_check([(5, 5)] * 10, mu=4)
    assert rep.passed and rep.observed["positive_cdist"] <= 4
    assert rep.observed["m"] == 1


def test_protect_layer_detects_lost_vector():
    fits = [(3, 1), (2, 2), (1, 3), (0, 0)]
    rep = protect_layer_check(fits, mu=12, survivors=[0, 2, 3])
    assert not rep.passed and "lost" in rep.counterexample


def test_protect_layer_over_nsgaii_run():
    p = make_problem("urrrmo", 16)
    mu = 4 * p.front_size + 4
    checked = []

    def monitor(state):
        if state.last_layering is None:
            return
        survivors = survival_order(state.last_layering)[:mu]
        rep = protect_layer_check([ind.fitness for ind in state.last_merged], mu, survivors,
                                  layering=state.last_layering)
        assert rep.passed, rep.line()
        checked.append(rep.observed["survival_applies"])

    res = nsgaii_run(p, Mutation("std", 16), Crossover("uniform"), 0.5, mu, 40_000, Rng(6),
                     monitor=monitor)
    # early first layers can hold more than mu/4 vectors; later ones must be protected
    assert res.success and checked and checked[-1] and sum(checked) > len(checked) // 2


# --------------------------------------------------------------------------
# Hamming bounds


def test_hamming_enumeration_n16():
    reps = hamming_bounds_check(16)
    by = {r.claim: r for r in reps}
    assert all(r.passed for r in reps)
    assert by["hamming-UxP"].observed["mode"] == "enumerate"
    assert 2 <= by["hamming-UxP"].observed["min"] and by["hamming-UxP"].observed["max"] <= 6
    assert 3 <= by["hamming-CxT"].observed["min"] and by["hamming-CxT"].observed["max"] <= 5


def test_hamming_sampling_n32():
    reps = hamming_bounds_check(32, sample_size=10**5, mode="sample", seed=1)
    assert all(r.passed for r in reps)
    assert all(r.sample_size > 0 for r in reps)


def test_hamming_corrupted_predicate_fails():
    bad_T = {"T": lambda H, n: (H.reshape(len(H), 4, -1).sum(2) <= n // 16).all(1)}
    reps = hamming_bounds_check(16, mode="enumerate", predicates=bad_T)
    cxt = [r for r in reps if r.claim == "hamming-CxT"][0]
    assert not cxt.passed and cxt.counterexample is not None


def test_hamming_rejects_bad_n():
    with pytest.raises(ValueError):
        hamming_bounds_check(24)


# --------------------------------------------------------------------------
# operator statistics


def test_flip_frequency_report_shape():
    m = Mutation("hyper:0.5", 50)
    rep = operator_flip_frequency(m, BitString.zeros(50), 20_000, Rng(1))
    assert rep.observed["expected"] == 0.25 and len(rep.observed["rates"]) == 50
    assert rep.observed["max_abs_z"] < 5


def test_flip_frequency_detects_wrong_rate():
    m = Mutation("std", 50)
    rep = operator_flip_frequency(m, BitString.zeros(50), 20_000, Rng(1), expected=0.03)
    assert not rep.passed and "position" in rep.counterexample


def test_flip_frequency_point_radius_exact():
    m = Mutation("unbiased:point:0", 20)
    rep = operator_flip_frequency(m, BitString.ones(20), 10**4, Rng(1))
    assert rep.passed and rep.observed["max_rate"] == 0.0


def test_flip_frequency_min_samples():
    with pytest.raises(ValueError):
        operator_flip_frequency(Mutation("std", 10), BitString.zeros(10), 100, Rng(0))


@pytest.mark.parametrize("backend", ["auto", "python"])
def test_complementarity(backend):
    rep = complementarity_check(Crossover("uniform"), 70, 5000, Rng(2), backend=backend)
    assert rep.passed and rep.observed["violations"] == 0


def test_complementarity_detects_broken_operator():
    class Broken:
        spec = "broken"

        def __call__(self, x, y, rng):
            return x, x

    rep = complementarity_check(Broken(), 20, 1000, Rng(2), backend="python")
    assert not rep.passed and rep.observed["violations"] > 0


def test_unbiasedness_accepts_unbiased_and_rejects_hypermutation():
    x = B("10110010")
    assert unbiasedness_check(Mutation("std", 8), x, 200_000, Rng(3)).passed
    assert unbiasedness_check(Mutation("unbiased:uniform", 8), x, 200_000, Rng(4)).passed
    # contiguous windows make some masks far likelier than others
    assert not unbiasedness_check(Mutation("hyper:0.5", 8), x, 200_000, Rng(5)).passed


# --------------------------------------------------------------------------
# probes


def test_predicates():
    p = make_problem("rrrmo", 10)
    assert predicate_holds(p, "F", B("0111111110"))
    assert predicate_holds(p, "F-center", B("0111111110"))
    assert predicate_holds(p, "F-noncenter", B("1111111100"))
    assert predicate_holds(p, "Fprime", B("0111111000"))
    assert predicate_holds(p, "Gprime", B("0111100000"))
    assert not predicate_holds(p, "G", B("1011111110"))
    assert predicate_holds(p, "pareto", B("0011111111"))
    q = make_problem("urrrmo", 16)
    assert predicate_holds(q, "K", B("1010101011100000"))
    assert predicate_holds(q, "W", B("1111111110101010"))
    with pytest.raises(ValueError):
        predicate_holds(q, "Q", B("1" * 16))


@pytest.mark.parametrize("backend", ["auto", "python"])
def test_identity_probe(backend):
    p = make_problem("rrrmo", 20)
    rep = jump_probability_probe(p, "F", "F", Mutation("unbiased:point:0", 20), 2000, Rng(1),
                                 backend=backend, min_samples=1000)
    assert rep.observed["rate"] == 1.0 and rep.observed["hits"] == 2000


def test_small_probe_zero_hits():
    p = make_problem("rrrmo", 40)
    rep = jump_probability_probe(p, "Gprime", "F", Mutation("std", 40), 10**5, Rng(2))
    assert rep.passed and rep.observed["hits"] == 0
    assert rep.observed["upper_bound"] == pytest.approx(1 - 0.05 ** (1 / 10**5), rel=1e-6)


def test_centered_point_unreachable_at_radius_one():
    p = make_problem("rrrmo", 40)
    rep = jump_probability_probe(p, "F-noncenter", "F-center", Mutation("unbiased:point:1", 40),
                                 10**5, Rng(3))
    assert rep.passed


def test_probe_reports_missing_source():
    p = make_problem("rrrmo", 20)
    rep = jump_probability_probe(p, "K", "F", Mutation("std", 20), 10, Rng(0), max_tries=50,
                                 min_samples=1)
    assert not rep.passed and "no K point" in rep.note


def test_probe_minimum_samples():
    with pytest.raises(ValueError):
        jump_probability_probe(make_problem("rrrmo", 20), "F", "F", Mutation("std", 20), 10,
                               Rng(0))


def test_clopper_pearson():
    assert clopper_pearson_upper(0, 100) == pytest.approx(1 - 0.05 ** 0.01)
    assert clopper_pearson_upper(5, 5) == 1.0
    assert 0.05 < clopper_pearson_upper(5, 100) < 0.11


# --------------------------------------------------------------------------
# named claims


def test_quick_claims_run():
    reps = run_claims(["fronts", "antichain", "centered-point"], quick=True)
    assert reps and all(r.passed for r in reps)
    assert all(r.line().startswith("[PASS]") for r in reps)


def test_unknown_claim():
    with pytest.raises(ValueError):
        run_claims(["nope"])
    assert "hamming" in CLAIMS
