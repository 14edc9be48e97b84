# cython: language_level=3, boundscheck=False, wraparound=False
"""Thin Cython layer over the C kernel in ``_kernel/kernel.c``.

Callers pass an :class:`rremo.rng.Rng`; the kernel draws from the same PCG64
state through numpy's ``bitgen_t`` interface, so the Python object's stream
advances exactly as if the pure-Python path had run.
"""

import numpy as np
cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdint cimport int64_t, uint64_t
from numpy.random cimport bitgen_t

cnp.import_array()


cdef extern from "kernel.h":
    ctypedef struct rr_problem:
        int kind
        int n
        int W
        int64_t front_size

    ctypedef struct rr_mutation:
        int kind
        const double *cdf
        double rate

    ctypedef struct rr_result:
        int64_t evaluations
        int64_t generations
        int64_t first_hit
        int64_t plateau_hit
        int64_t covered
        int64_t max_pop
        int64_t viol_antichain
        int64_t viol_protect_count
        int64_t viol_protect_survival
        int64_t pop_size
        int64_t pop_cap
        uint64_t *pop
        int64_t *fit

    int rr_problem_init(rr_problem *p, int kind, int n, const int *perm, const uint64_t *zmask) nogil
    void rr_evaluate(const rr_problem *p, const uint64_t *x, uint64_t *scratch, int64_t *f) nogil
    int rr_gsemo(const rr_problem *p, const rr_mutation *m, int xover, double pc,
                 int64_t budget, int check, bitgen_t *g, rr_result *res) nogil
    int rr_nsgaii(const rr_problem *p, const rr_mutation *m, int xover, double pc, int mu,
                  int64_t budget, int check, bitgen_t *g, rr_result *res) nogil
    int rr_probe(const rr_problem *p, const rr_mutation *m, int src_pred, int tgt_pred,
                 int64_t samples, int64_t max_tries, bitgen_t *g,
                 int64_t *hits, int64_t *tries) nogil
    void rr_mutate_batch(const rr_mutation *m, bitgen_t *g, const uint64_t *x, int n, int W,
                         int64_t samples, uint64_t *out) nogil
    void rr_crossover_batch(int kind, bitgen_t *g, const uint64_t *xs, const uint64_t *ys,
                            int n, int W, int64_t samples, uint64_t *outz, uint64_t *outzb) nogil


cdef bitgen_t *_bitgen(object rng) except NULL:
    capsule = rng.bit_generator.capsule
    cdef bitgen_t *g = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
    return g


cdef class _Problem:
    """Keeps the permutation / mask buffers alive while the kernel uses them."""
    cdef rr_problem p
    cdef object perm
    cdef object zmask

    def __init__(self, int kind, int n, perm, zwords):
        cdef const int *pp = NULL
        cdef const uint64_t *zp = NULL
        cdef int[::1] pv
        cdef uint64_t[::1] zv
        if perm is not None:
            self.perm = np.ascontiguousarray(perm, dtype=np.intc)
            pv = self.perm
            pp = &pv[0]
        if zwords is not None:
            self.zmask = np.ascontiguousarray(zwords, dtype=np.uint64)
            zv = self.zmask
            zp = &zv[0]
        if rr_problem_init(&self.p, kind, n, pp, zp) != 0:
            raise ValueError(f"kernel does not support problem kind={kind}, n={n}")


cdef class _Mutation:
    cdef rr_mutation m
    cdef object cdf

    def __init__(self, int kind, cdf, double rate):
        cdef double[::1] cv
        self.m.kind = kind
        self.m.rate = rate
        self.m.cdf = NULL
        if cdf is not None:
            self.cdf = np.ascontiguousarray(cdf, dtype=np.float64)
            cv = self.cdf
            self.m.cdf = &cv[0]


def evaluate_words(int kind, int n, perm, zwords, x):
    """Fitness of every row of ``x`` (shape (samples, W), little-endian words)."""
    cdef _Problem prob = _Problem(kind, n, perm, zwords)
    cdef uint64_t[:, ::1] xv = np.ascontiguousarray(x, dtype=np.uint64)
    out = np.empty((xv.shape[0], 2), dtype=np.int64)
    cdef int64_t[:, ::1] ov = out
    scratch = np.empty(prob.p.W, dtype=np.uint64)
    cdef uint64_t[::1] sv = scratch
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            rr_evaluate(&prob.p, &xv[i, 0], &sv[0], &ov[i, 0])
    return out


cdef dict _result(rr_result *res, object pop, object fit):
    size = min(res.pop_size, res.pop_cap)
    return {
        "evaluations": res.evaluations,
        "generations": res.generations,
        "first_hit": res.first_hit,
        "plateau_hit": res.plateau_hit,
        "covered": res.covered,
        "max_pop": res.max_pop,
        "antichain": res.viol_antichain,
        "protect_count": res.viol_protect_count,
        "protect_survival": res.viol_protect_survival,
        "pop_size": res.pop_size,
        "pop": pop[:size],
        "fit": fit[:size],
    }


def gsemo(rng, int kind, int n, perm, zwords, int mut_kind, cdf, double rate,
          int xover, double pc, int64_t budget, bint check):
    cdef _Problem prob = _Problem(kind, n, perm, zwords)
    cdef _Mutation mut = _Mutation(mut_kind, cdf, rate)
    cdef int64_t cap = 8 * n + 64
    pop = np.zeros((cap, prob.p.W), dtype=np.uint64)
    fit = np.zeros((cap, 2), dtype=np.int64)
    cdef uint64_t[:, ::1] pv = pop
    cdef int64_t[:, ::1] fv = fit
    cdef rr_result res
    res.pop_cap = cap
    res.pop = &pv[0, 0]
    res.fit = &fv[0, 0]
    cdef bitgen_t *g = _bitgen(rng)
    cdef int status
    with rng.bit_generator.lock:
        with nogil:
            status = rr_gsemo(&prob.p, &mut.m, xover, pc, budget, check, g, &res)
    if status != 0:
        raise MemoryError("GSEMO kernel failed to allocate")
    if res.pop_size > cap:
        raise RuntimeError(f"GSEMO population {res.pop_size} exceeds kernel capacity {cap}")
    return _result(&res, pop, fit)


def nsgaii(rng, int kind, int n, perm, zwords, int mut_kind, cdf, double rate,
           int xover, double pc, int mu, int64_t budget, bint check):
    cdef _Problem prob = _Problem(kind, n, perm, zwords)
    cdef _Mutation mut = _Mutation(mut_kind, cdf, rate)
    pop = np.zeros((mu, prob.p.W), dtype=np.uint64)
    fit = np.zeros((mu, 2), dtype=np.int64)
    cdef uint64_t[:, ::1] pv = pop
    cdef int64_t[:, ::1] fv = fit
    cdef rr_result res
    res.pop_cap = mu
    res.pop = &pv[0, 0]
    res.fit = &fv[0, 0]
    cdef bitgen_t *g = _bitgen(rng)
    cdef int status
    with rng.bit_generator.lock:
        with nogil:
            status = rr_nsgaii(&prob.p, &mut.m, xover, pc, mu, budget, check, g, &res)
    if status != 0:
        raise MemoryError("NSGA-II kernel failed to allocate")
    return _result(&res, pop, fit)


def probe(rng, int kind, int n, perm, zwords, int mut_kind, cdf, double rate,
          int src_pred, int tgt_pred, int64_t samples, int64_t max_tries):
    """Returns (hits, source draws, exhausted flag)."""
    cdef _Problem prob = _Problem(kind, n, perm, zwords)
    cdef _Mutation mut = _Mutation(mut_kind, cdf, rate)
    cdef int64_t hits = 0, tries = 0
    cdef bitgen_t *g = _bitgen(rng)
    cdef int status
    with rng.bit_generator.lock:
        with nogil:
            status = rr_probe(&prob.p, &mut.m, src_pred, tgt_pred, samples, max_tries, g,
                              &hits, &tries)
    if status < 0:
        raise MemoryError("probe kernel failed to allocate")
    return hits, tries, status == 1


def mutate_batch(rng, int n, x_words, int mut_kind, cdf, double rate, int64_t samples):
    cdef _Mutation mut = _Mutation(mut_kind, cdf, rate)
    cdef int W = (n + 63) // 64
    cdef uint64_t[::1] xv = np.ascontiguousarray(x_words, dtype=np.uint64)
    out = np.empty((samples, W), dtype=np.uint64)
    cdef uint64_t[:, ::1] ov = out
    cdef bitgen_t *g = _bitgen(rng)
    if samples == 0:
        return out
    with rng.bit_generator.lock:
        with nogil:
            rr_mutate_batch(&mut.m, g, &xv[0], n, W, samples, &ov[0, 0])
    return out


def crossover_batch(rng, int n, int kind, xs, ys):
    cdef int W = (n + 63) // 64
    cdef uint64_t[:, ::1] xv = np.ascontiguousarray(xs, dtype=np.uint64)
    cdef uint64_t[:, ::1] yv = np.ascontiguousarray(ys, dtype=np.uint64)
    cdef int64_t samples = xv.shape[0]
    outz = np.empty((samples, W), dtype=np.uint64)
    outzb = np.empty((samples, W), dtype=np.uint64)
    cdef uint64_t[:, ::1] zv = outz
    cdef uint64_t[:, ::1] zbv = outzb
    cdef bitgen_t *g = _bitgen(rng)
    if samples == 0:
        return outz, outzb
    with rng.bit_generator.lock:
        with nogil:
            rr_crossover_batch(kind, g, &xv[0, 0], &yv[0, 0], n, W, samples, &zv[0, 0], &zbv[0, 0])
    return outz, outzb
