/* Compiled inner loops for rremo: evaluation, variation, GSEMO, NSGA-II, probes.
 *
 * Genomes are little-endian arrays of W = ceil(n/64) words holding the same
 * integer as the Python BitString: string position p (0-based) is integer
 * bit n-1-p.  Random draws follow the rules documented in rremo/rng.py.
 */
#ifndef RREMO_KERNEL_H
#define RREMO_KERNEL_H

#include <stdint.h>
#include "numpy/random/bitgen.h"

enum { RR_RRRMO = 0, RR_URRRMO = 1 };
enum { RR_MUT_RADIUS = 0, RR_MUT_HYPER = 1 };
enum { RR_X_NONE = 0, RR_X_ONEPOINT = 1, RR_X_UNIFORM = 2 };
enum {
    RR_PRED_ANY = 0,
    RR_PRED_G = 1,
    RR_PRED_GPRIME = 2,
    RR_PRED_F = 3,
    RR_PRED_FPRIME = 4,
    RR_PRED_K = 5,
    RR_PRED_W = 6,
    RR_PRED_PARETO = 7,
    RR_PRED_F_CENTER = 8,
    RR_PRED_F_NONCENTER = 9
};

typedef struct {
    int kind;
    int n;
    int W;
    const int *perm;          /* NULL: identity; else perm[p] = source position */
    const uint64_t *zmask;    /* NULL: zero mask */
    int64_t front_sum;
    int64_t front_base;
    int64_t plateau_sum;
    int64_t front_size;
} rr_problem;

typedef struct {
    int kind;
    const double *cdf;        /* n+1 entries, RR_MUT_RADIUS only */
    double rate;              /* RR_MUT_HYPER only */
} rr_mutation;

typedef struct {
    int64_t evaluations;
    int64_t generations;
    int64_t first_hit;        /* -1 when absent */
    int64_t plateau_hit;      /* -1 when absent */
    int64_t covered;
    int64_t max_pop;
    int64_t viol_antichain;
    int64_t viol_protect_count;
    int64_t viol_protect_survival;
    int64_t pop_size;
    int64_t pop_cap;          /* capacity of pop / fit supplied by caller */
    uint64_t *pop;            /* pop_cap * W words */
    int64_t *fit;             /* pop_cap * 2 */
} rr_result;

int rr_problem_init(rr_problem *p, int kind, int n, const int *perm, const uint64_t *zmask);
void rr_evaluate(const rr_problem *p, const uint64_t *x, uint64_t *scratch, int64_t *f);

void rr_mutate(const rr_mutation *m, bitgen_t *g, uint64_t *x, int n, int W, uint64_t *scratch);
void rr_crossover(int kind, bitgen_t *g, const uint64_t *x, const uint64_t *y,
                  uint64_t *z, uint64_t *zb, int n, int W);

int rr_gsemo(const rr_problem *p, const rr_mutation *m, int xover, double pc,
             int64_t budget, int check, bitgen_t *g, rr_result *res);
int rr_nsgaii(const rr_problem *p, const rr_mutation *m, int xover, double pc, int mu,
              int64_t budget, int check, bitgen_t *g, rr_result *res);

int rr_probe(const rr_problem *p, const rr_mutation *m, int src_pred, int tgt_pred,
             int64_t samples, int64_t max_tries, bitgen_t *g,
             int64_t *hits, int64_t *tries);
int rr_predicate(const rr_problem *p, int pred, const uint64_t *x, uint64_t *scratch);

void rr_mutate_batch(const rr_mutation *m, bitgen_t *g, const uint64_t *x, int n, int W,
                     int64_t samples, uint64_t *out);
void rr_crossover_batch(int kind, bitgen_t *g, const uint64_t *xs, const uint64_t *ys,
                        int n, int W, int64_t samples, uint64_t *outz, uint64_t *outzb);

#endif
