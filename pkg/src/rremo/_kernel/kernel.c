#include "kernel.h"

#include <math.h>
#include <stdlib.h>
#include <string.h>

/* ------------------------------------------------------------------ rng */

static inline uint64_t rr_next(bitgen_t *g) { return g->next_raw(g->state); }

static inline uint64_t rr_below(bitgen_t *g, uint64_t k)
{
    if (k <= 1)
        return 0;
    uint64_t threshold = (0 - k) % k;
    for (;;) {
        uint64_t r = rr_next(g);
        if (r >= threshold)
            return r % k;
    }
}

static inline double rr_uniform(bitgen_t *g)
{
    return (double)(rr_next(g) >> 11) * (1.0 / 9007199254740992.0);
}

static inline int rr_coin(bitgen_t *g) { return (int)(rr_next(g) >> 63); }

static inline uint64_t top_mask(int n, int W)
{
    int tb = n - 64 * (W - 1);
    return tb >= 64 ? ~0ULL : ((1ULL << tb) - 1);
}

static void random_bits(bitgen_t *g, uint64_t *x, int n, int W)
{
    for (int j = 0; j < W; ++j)
        x[j] = rr_next(g);
    x[W - 1] &= top_mask(n, W);
}

/* ------------------------------------------------------------ bit stats */

static inline void flip_pos(uint64_t *x, int n, int p)
{
    int b = n - 1 - p;
    x[b >> 6] ^= 1ULL << (b & 63);
}

static inline int get_bit(const uint64_t *x, int b) { return (int)((x[b >> 6] >> (b & 63)) & 1ULL); }

static inline int popcount_words(const uint64_t *x, int W)
{
    int c = 0;
    for (int j = 0; j < W; ++j)
        c += __builtin_popcountll(x[j]);
    return c;
}

/* run of `val` bits at the start of the string (top integer bits) */
static int lead_run(const uint64_t *x, int n, int W, int val)
{
    int count = 0;
    int tb = n - 64 * (W - 1);
    for (int k = W - 1; k >= 0; --k) {
        int nb = (k == W - 1) ? tb : 64;
        uint64_t w = val ? ~x[k] : x[k];
        if (nb < 64)
            w &= (1ULL << nb) - 1;
        if (w == 0) {
            count += nb;
            continue;
        }
        count += __builtin_clzll(w) - (64 - nb);
        break;
    }
    return count;
}

/* run of `val` bits at the end of the string (low integer bits) */
static int trail_run(const uint64_t *x, int n, int W, int val)
{
    int count = 0;
    int tb = n - 64 * (W - 1);
    for (int k = 0; k < W; ++k) {
        int nb = (k == W - 1) ? tb : 64;
        uint64_t w = val ? ~x[k] : x[k];
        if (nb < 64)
            w &= (1ULL << nb) - 1;
        if (w == 0) {
            count += nb;
            continue;
        }
        count += __builtin_ctzll(w);
        break;
    }
    return count;
}

static inline uint64_t extract_bits(const uint64_t *x, int W, int lo, int len)
{
    int w = lo >> 6, s = lo & 63;
    uint64_t v = x[w] >> s;
    if (s && w + 1 < W)
        v |= x[w + 1] << (64 - s);
    if (len < 64)
        v &= (1ULL << len) - 1;
    return v;
}

typedef struct {
    int ones, lo, to, lz, tz;
} half_stats;

static inline half_stats word_stats(uint64_t v, int h)
{
    half_stats s;
    uint64_t m = h >= 64 ? ~0ULL : ((1ULL << h) - 1);
    uint64_t inv = ~v & m;
    s.ones = __builtin_popcountll(v);
    s.lz = v ? __builtin_clzll(v) - (64 - h) : h;
    s.lo = inv ? __builtin_clzll(inv) - (64 - h) : h;
    s.tz = v ? __builtin_ctzll(v) : h;
    s.to = inv ? __builtin_ctzll(inv) : h;
    return s;
}

/* ----------------------------------------------------------- problems */

int rr_problem_init(rr_problem *p, int kind, int n, const int *perm, const uint64_t *zmask)
{
    if (n <= 0)
        return -1;
    p->kind = kind;
    p->n = n;
    p->W = (n + 63) / 64;
    p->perm = perm;
    p->zmask = zmask;
    if (kind == RR_RRRMO) {
        if (n % 5)
            return -1;
        int64_t k = 4 * (int64_t)n / 5;
        p->front_sum = 2 * (int64_t)n * k + n / 5;
        p->front_base = (int64_t)n * k;
        p->plateau_sum = 2 * (int64_t)n * (3 * n / 5) + 2 * n / 5;
        p->front_size = n / 5 + 1;
    } else if (kind == RR_URRRMO) {
        if (n % 16 || n > 128)
            return -1;
        p->front_sum = 6 * (int64_t)n + n / 2;
        p->front_base = 3 * (int64_t)n;
        p->plateau_sum = -1;
        p->front_size = n / 2 + 1;
    } else {
        return -1;
    }
    return 0;
}

/* y = sigma(x) xor z; returns x itself when no transform is configured */
static const uint64_t *transform(const rr_problem *p, const uint64_t *x, uint64_t *y)
{
    if (!p->perm && !p->zmask)
        return x;
    int n = p->n, W = p->W;
    if (p->perm) {
        memset(y, 0, sizeof(uint64_t) * W);
        for (int q = 0; q < n; ++q) {
            if (get_bit(x, n - 1 - p->perm[q])) {
                int b = n - 1 - q;
                y[b >> 6] |= 1ULL << (b & 63);
            }
        }
    } else {
        memcpy(y, x, sizeof(uint64_t) * W);
    }
    if (p->zmask)
        for (int j = 0; j < W; ++j)
            y[j] ^= p->zmask[j];
    return y;
}

typedef struct {
    int in_u, in_p, in_c, in_t;
    half_stats l, r;
} urrrmo_parts;

static void urrrmo_split(const rr_problem *p, const uint64_t *y, urrrmo_parts *u)
{
    int n = p->n, W = p->W, h = n / 2, b = n / 8;
    uint64_t left = extract_bits(y, W, h, h);
    uint64_t right = extract_bits(y, W, 0, h);
    uint64_t bm = (1ULL << b) - 1;
    u->in_u = 1;
    u->in_t = 1;
    for (int j = 0; j < 4; ++j) {
        int cl = __builtin_popcountll((left >> (h - (j + 1) * b)) & bm);
        int cr = __builtin_popcountll((right >> (h - (j + 1) * b)) & bm);
        if (!(24 * cl >= n && 12 * cl <= n))
            u->in_u = 0;
        if (16 * cr != n)
            u->in_t = 0;
    }
    u->l = word_stats(left, h);
    u->r = word_stats(right, h);
    u->in_p = u->l.lo + u->l.tz == h;
    u->in_c = (u->r.lo + u->r.tz == h) || (u->r.lz + u->r.to == h);
}

/* returns the case (1, 2, 3) or 0 for the default (0, 0) branch */
static int urrrmo_value(const rr_problem *p, const uint64_t *y, int64_t *f)
{
    int n = p->n, h = n / 2;
    urrrmo_parts u;
    urrrmo_split(p, y, &u);
    int64_t g1, g2;
    if (u.r.lo != 0) {
        g1 = u.r.lo;
        g2 = h + u.r.tz;
    } else {
        g1 = h + u.r.lz;
        g2 = u.r.to;
    }
    if (u.in_u && !u.in_c) {
        f[0] = g1;
        f[1] = g2;
        return 1;
    }
    if (u.in_c) {
        int64_t off = 2 * (int64_t)n - u.l.ones;
        f[0] = g1 + off;
        f[1] = g2 + off;
        return 2;
    }
    if (u.in_p && u.in_t) {
        f[0] = u.l.lo + 3 * (int64_t)n;
        f[1] = u.l.tz + 3 * (int64_t)n;
        return 3;
    }
    f[0] = 0;
    f[1] = 0;
    return 0;
}

static void rrrmo_value(const rr_problem *p, const uint64_t *y, int64_t *f)
{
    int n = p->n, W = p->W;
    int ones = popcount_words(y, W);
    int lz = lead_run(y, n, W, 0);
    int tz = trail_run(y, n, W, 0);
    int in_f = 5 * ones == 4 * n && 5 * (lz + tz) == n;
    if (5 * ones <= 3 * n || in_f) {
        f[0] = (int64_t)n * ones + tz;
        f[1] = (int64_t)n * ones + lz;
    } else {
        f[0] = 0;
        f[1] = 0;
    }
}

void rr_evaluate(const rr_problem *p, const uint64_t *x, uint64_t *scratch, int64_t *f)
{
    const uint64_t *y = transform(p, x, scratch);
    if (p->kind == RR_RRRMO)
        rrrmo_value(p, y, f);
    else
        urrrmo_value(p, y, f);
}

static inline int64_t pareto_index(const rr_problem *p, const int64_t *f)
{
    if (f[0] + f[1] != p->front_sum)
        return -1;
    if (p->kind == RR_RRRMO)
        return f[1] - p->front_base;
    if (f[0] < p->front_base || f[1] < p->front_base)
        return -1;
    return f[0] - p->front_base;
}

static inline int on_plateau(const rr_problem *p, const int64_t *f)
{
    return p->kind == RR_RRRMO && f[0] + f[1] == p->plateau_sum;
}

/* ----------------------------------------------------------- variation */

static void flip_random_positions(bitgen_t *g, uint64_t *x, int n, int W, int r, uint64_t *mask)
{
    if (r == 0)
        return;
    int select = r <= n - r ? r : n - r;
    memset(mask, 0, sizeof(uint64_t) * W);
    int got = 0;
    while (got < select) {
        int b = n - 1 - (int)rr_below(g, (uint64_t)n);
        uint64_t bit = 1ULL << (b & 63);
        if (!(mask[b >> 6] & bit)) {
            mask[b >> 6] |= bit;
            ++got;
        }
    }
    if (select != r) {
        for (int j = 0; j < W; ++j)
            mask[j] = ~mask[j];
        mask[W - 1] &= top_mask(n, W);
    }
    for (int j = 0; j < W; ++j)
        x[j] ^= mask[j];
}

static inline int sample_radius(bitgen_t *g, const double *cdf, int n)
{
    double u = rr_uniform(g);
    int k = 0;
    while (k < n && !(u < cdf[k]))
        ++k;
    return k;
}

void rr_mutate(const rr_mutation *m, bitgen_t *g, uint64_t *x, int n, int W, uint64_t *scratch)
{
    if (m->kind == RR_MUT_RADIUS) {
        int r = sample_radius(g, m->cdf, n);
        flip_random_positions(g, x, n, W, r, scratch);
        return;
    }
    int c = (int)rr_below(g, (uint64_t)n);
    int len = (int)rr_below(g, (uint64_t)n + 1);
    double rate = m->rate;
    for (int j = 0; j < len; ++j) {
        if (rate >= 1.0 || rr_uniform(g) < rate)
            flip_pos(x, n, (c + j) % n);
    }
}

void rr_crossover(int kind, bitgen_t *g, const uint64_t *x, const uint64_t *y,
                  uint64_t *z, uint64_t *zb, int n, int W)
{
    if (kind == RR_X_ONEPOINT) {
        int c = (int)rr_below(g, (uint64_t)n + 1);
        int lo = n - c; /* prefix = integer bits [lo, n) */
        for (int j = 0; j < W; ++j) {
            uint64_t pm;
            int start = 64 * j;
            if (lo <= start)
                pm = ~0ULL;
            else if (lo >= start + 64)
                pm = 0;
            else
                pm = ~((1ULL << (lo - start)) - 1);
            z[j] = (x[j] & pm) | (y[j] & ~pm);
            zb[j] = (y[j] & pm) | (x[j] & ~pm);
        }
        z[W - 1] &= top_mask(n, W);
        zb[W - 1] &= top_mask(n, W);
    } else if (kind == RR_X_UNIFORM) {
        for (int j = 0; j < W; ++j) {
            uint64_t m = rr_next(g);
            z[j] = (x[j] & m) | (y[j] & ~m);
            zb[j] = (y[j] & m) | (x[j] & ~m);
        }
        z[W - 1] &= top_mask(n, W);
        zb[W - 1] &= top_mask(n, W);
    } else {
        memcpy(z, x, sizeof(uint64_t) * W);
        memcpy(zb, y, sizeof(uint64_t) * W);
    }
}

void rr_mutate_batch(const rr_mutation *m, bitgen_t *g, const uint64_t *x, int n, int W,
                     int64_t samples, uint64_t *out)
{
    uint64_t *scratch = malloc(sizeof(uint64_t) * W);
    for (int64_t s = 0; s < samples; ++s) {
        uint64_t *o = out + s * W;
        memcpy(o, x, sizeof(uint64_t) * W);
        rr_mutate(m, g, o, n, W, scratch);
    }
    free(scratch);
}

void rr_crossover_batch(int kind, bitgen_t *g, const uint64_t *xs, const uint64_t *ys,
                        int n, int W, int64_t samples, uint64_t *outz, uint64_t *outzb)
{
    for (int64_t s = 0; s < samples; ++s)
        rr_crossover(kind, g, xs + s * W, ys + s * W, outz + s * W, outzb + s * W, n, W);
}

/* ------------------------------------------------------------ dominance */

static inline int dom(const int64_t *a, const int64_t *b)
{
    return a[0] >= b[0] && a[1] >= b[1] && (a[0] > b[0] || a[1] > b[1]);
}

static inline int weak(const int64_t *a, const int64_t *b) { return a[0] >= b[0] && a[1] >= b[1]; }

static int64_t antichain_bound(const rr_problem *p, const uint64_t *first_genome,
                               const int64_t *fit, const int *members, int count)
{
    for (int i = 0; i < count; ++i) {
        const int64_t *f = fit + 2 * (members ? members[i] : i);
        if (f[0] == 0 && f[1] == 0)
            return 1;
    }
    if (count == 0)
        return 1;
    if (p->kind == RR_URRRMO)
        return p->n;
    int k = popcount_words(first_genome, p->W);
    return k == 0 ? 1 : p->n - k + 1;
}

/* --------------------------------------------------------------- GSEMO */

int rr_gsemo(const rr_problem *p, const rr_mutation *m, int xover, double pc,
             int64_t budget, int check, bitgen_t *g, rr_result *res)
{
    const int n = p->n, W = p->W;
    size_t wb = sizeof(uint64_t) * W;
    int64_t cap = 2 * (int64_t)n + 8;
    uint64_t *pop = malloc(wb * cap);
    int64_t *fit = malloc(sizeof(int64_t) * 2 * cap);
    uint64_t *buf = malloc(wb * 5);
    if (!pop || !fit || !buf) {
        free(pop);
        free(fit);
        free(buf);
        return -1;
    }
    uint64_t *child = buf, *z = buf + W, *zb = buf + 2 * W, *scratch = buf + 3 * W,
             *ybuf = buf + 4 * W;

    int64_t size = 1, evals = 1, gens = 0, first_hit = -1, plateau_hit = -1, covered = 0;
    int64_t max_pop = 1, viol = 0;
    int64_t f[2];

    random_bits(g, pop, n, W);
    rr_evaluate(p, pop, ybuf, fit);
    if (pareto_index(p, fit) >= 0) {
        first_hit = 1;
        covered = 1;
    }
    if (on_plateau(p, fit))
        plateau_hit = 1;

    while (covered < p->front_size && evals < budget) {
        int64_t i1 = (int64_t)rr_below(g, (uint64_t)size);
        if (rr_uniform(g) < pc) {
            int64_t i2 = (int64_t)rr_below(g, (uint64_t)size);
            rr_crossover(xover, g, pop + i1 * W, pop + i2 * W, z, zb, n, W);
            memcpy(child, rr_coin(g) ? zb : z, wb);
        } else {
            memcpy(child, pop + i1 * W, wb);
        }
        rr_mutate(m, g, child, n, W, scratch);
        rr_evaluate(p, child, ybuf, f);
        ++evals;
        ++gens;
        int64_t pi = pareto_index(p, f);
        if (pi >= 0 && first_hit < 0)
            first_hit = evals;

        int rejected = 0;
        for (int64_t j = 0; j < size; ++j) {
            if (dom(fit + 2 * j, f)) {
                rejected = 1;
                break;
            }
        }
        if (rejected)
            continue;

        int seen = 0;
        int64_t k = 0;
        for (int64_t j = 0; j < size; ++j) {
            const int64_t *fj = fit + 2 * j;
            if (weak(f, fj)) {
                if (fj[0] == f[0] && fj[1] == f[1])
                    seen = 1;
                continue;
            }
            if (k != j) {
                memcpy(pop + k * W, pop + j * W, wb);
                fit[2 * k] = fj[0];
                fit[2 * k + 1] = fj[1];
            }
            ++k;
        }
        if (k + 1 > cap) {
            int64_t ncap = 2 * cap;
            uint64_t *np_ = realloc(pop, wb * ncap);
            if (!np_)
                goto fail;
            pop = np_;
            int64_t *nf = realloc(fit, sizeof(int64_t) * 2 * ncap);
            if (!nf)
                goto fail;
            fit = nf;
            cap = ncap;
        }
        memcpy(pop + k * W, child, wb);
        fit[2 * k] = f[0];
        fit[2 * k + 1] = f[1];
        size = k + 1;
        if (pi >= 0 && !seen)
            ++covered;
        if (plateau_hit < 0 && on_plateau(p, f))
            plateau_hit = evals;
        if (size > max_pop)
            max_pop = size;
        if (check) {
            int ok = 1;
            for (int64_t j = 0; j < size - 1; ++j) {
                if (weak(f, fit + 2 * j) || weak(fit + 2 * j, f)) {
                    ok = 0;
                    break;
                }
            }
            if (!ok || size > antichain_bound(p, pop, fit, NULL, (int)size))
                ++viol;
        }
    }

    res->evaluations = evals;
    res->generations = gens;
    res->first_hit = first_hit;
    res->plateau_hit = plateau_hit;
    res->covered = covered;
    res->max_pop = max_pop;
    res->viol_antichain = viol;
    res->viol_protect_count = 0;
    res->viol_protect_survival = 0;
    res->pop_size = size;
    {
        int64_t out = size < res->pop_cap ? size : res->pop_cap;
        memcpy(res->pop, pop, wb * out);
        memcpy(res->fit, fit, sizeof(int64_t) * 2 * out);
    }
    free(pop);
    free(fit);
    free(buf);
    return 0;
fail:
    free(pop);
    free(fit);
    free(buf);
    return -1;
}

/* -------------------------------------------------------------- sorting */

typedef int (*rr_cmp)(const void *ctx, int a, int b);

/* stable merge sort of idx[0..len) */
static void merge_sort(int *idx, int *tmp, int len, rr_cmp cmp, const void *ctx)
{
    if (len < 2)
        return;
    if (len <= 16) {
        for (int i = 1; i < len; ++i) {
            int v = idx[i], j = i - 1;
            while (j >= 0 && cmp(ctx, idx[j], v) > 0) {
                idx[j + 1] = idx[j];
                --j;
            }
            idx[j + 1] = v;
        }
        return;
    }
    int half = len / 2;
    merge_sort(idx, tmp, half, cmp, ctx);
    merge_sort(idx + half, tmp, len - half, cmp, ctx);
    int i = 0, j = half, k = 0;
    while (i < half && j < len)
        tmp[k++] = cmp(ctx, idx[j], idx[i]) < 0 ? idx[j++] : idx[i++];
    while (i < half)
        tmp[k++] = idx[i++];
    while (j < len)
        tmp[k++] = idx[j++];
    memcpy(idx, tmp, sizeof(int) * len);
}

typedef struct {
    const int64_t *fit;
    const int *rank;
    const double *cd;
    int obj;
} sort_ctx;

static int cmp_obj_desc(const void *c, int a, int b)
{
    const sort_ctx *s = c;
    int64_t fa = s->fit[2 * a + s->obj], fb = s->fit[2 * b + s->obj];
    return fa > fb ? -1 : (fa < fb ? 1 : 0);
}

static int cmp_f1f2_desc(const void *c, int a, int b)
{
    const sort_ctx *s = c;
    const int64_t *fa = s->fit + 2 * a, *fb = s->fit + 2 * b;
    if (fa[0] != fb[0])
        return fa[0] > fb[0] ? -1 : 1;
    if (fa[1] != fb[1])
        return fa[1] > fb[1] ? -1 : 1;
    return 0;
}

static int cmp_survival(const void *c, int a, int b)
{
    const sort_ctx *s = c;
    if (s->rank[a] != s->rank[b])
        return s->rank[a] < s->rank[b] ? -1 : 1;
    if (s->cd[a] != s->cd[b])
        return s->cd[a] > s->cd[b] ? -1 : 1;
    return 0;
}

/* Non-dominated layers for N points (0-based ranks).  Points are visited in
 * (f1 desc, f2 desc) order; the last point placed in a layer has that layer's
 * largest f2, so one comparison decides membership and the layers can be
 * binary-searched. */
static int nd_sort(const int64_t *fit, int N, int *rank, int *order, int *tmp, int *last)
{
    sort_ctx s = {fit, NULL, NULL, 0};
    for (int i = 0; i < N; ++i)
        order[i] = i;
    merge_sort(order, tmp, N, cmp_f1f2_desc, &s);
    int nl = 0;
    for (int t = 0; t < N; ++t) {
        int q = order[t];
        int lo = 0, hi = nl;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (dom(fit + 2 * last[mid], fit + 2 * q))
                lo = mid + 1;
            else
                hi = mid;
        }
        rank[q] = lo;
        last[lo] = q;
        if (lo == nl)
            ++nl;
    }
    return nl;
}

/* Crowding distances per layer; members[] receives indices grouped by layer
 * (ascending index inside a layer), start[] the layer offsets. */
static void crowding(const int64_t *fit, int N, const int *rank, int nl, double *cd,
                     int *members, int *start, int *sorted, int *tmp)
{
    for (int l = 0; l <= nl; ++l)
        start[l] = 0;
    for (int i = 0; i < N; ++i)
        start[rank[i] + 1]++;
    for (int l = 0; l < nl; ++l)
        start[l + 1] += start[l];
    for (int l = 0; l < nl; ++l)
        tmp[l] = start[l];
    for (int i = 0; i < N; ++i)
        members[tmp[rank[i]]++] = i;
    for (int i = 0; i < N; ++i)
        cd[i] = 0.0;

    sort_ctx s = {fit, NULL, NULL, 0};
    for (int l = 0; l < nl; ++l) {
        int K = start[l + 1] - start[l];
        const int *mem = members + start[l];
        for (int obj = 0; obj < 2; ++obj) {
            memcpy(sorted, mem, sizeof(int) * K);
            s.obj = obj;
            merge_sort(sorted, tmp, K, cmp_obj_desc, &s);
            int first = sorted[0], lastm = sorted[K - 1];
            int64_t span = fit[2 * first + obj] - fit[2 * lastm + obj];
            cd[first] += INFINITY;
            if (lastm != first)
                cd[lastm] += INFINITY;
            if (span) {
                for (int pos = 1; pos < K - 1; ++pos) {
                    int64_t d = fit[2 * sorted[pos - 1] + obj] - fit[2 * sorted[pos + 1] + obj];
                    cd[sorted[pos]] += (double)d / (double)span;
                }
            }
        }
    }
}

/* ------------------------------------------------------------- NSGA-II */

static inline int tournament(bitgen_t *g, int mu, const int *rank, const double *cd)
{
    int a = (int)rr_below(g, (uint64_t)mu);
    int b = (int)rr_below(g, (uint64_t)mu);
    if (rank[a] != rank[b])
        return rank[a] < rank[b] ? a : b;
    if (cd[a] != cd[b])
        return cd[a] > cd[b] ? a : b;
    return rr_coin(g) == 0 ? a : b;
}

static int64_t count_covered(const rr_problem *p, const int64_t *fit, int count, unsigned char *seen)
{
    memset(seen, 0, (size_t)p->front_size);
    int64_t c = 0;
    for (int i = 0; i < count; ++i) {
        int64_t pi = pareto_index(p, fit + 2 * i);
        if (pi >= 0 && !seen[pi]) {
            seen[pi] = 1;
            ++c;
        }
    }
    return c;
}

int rr_nsgaii(const rr_problem *p, const rr_mutation *m, int xover, double pc, int mu,
              int64_t budget, int check, bitgen_t *g, rr_result *res)
{
    const int n = p->n, W = p->W, N = 2 * mu;
    size_t wb = sizeof(uint64_t) * W;
    uint64_t *R = malloc(wb * N);
    uint64_t *P = malloc(wb * mu);
    int64_t *Rf = malloc(sizeof(int64_t) * 2 * N);
    int64_t *Pf = malloc(sizeof(int64_t) * 2 * mu);
    int *rank = malloc(sizeof(int) * N);
    int *Prank = malloc(sizeof(int) * mu);
    double *cd = malloc(sizeof(double) * N);
    double *Pcd = malloc(sizeof(double) * mu);
    int *ibuf = malloc(sizeof(int) * (7 * N + 2));
    uint64_t *buf = malloc(wb * 3);
    unsigned char *seen = malloc((size_t)p->front_size + 1);
    unsigned char *surv = malloc((size_t)N);
    int status = 0;
    if (!R || !P || !Rf || !Pf || !rank || !Prank || !cd || !Pcd || !ibuf || !buf || !seen || !surv) {
        status = -1;
        goto done;
    }
    int *order = ibuf, *tmp = ibuf + N, *last = ibuf + 2 * N, *members = ibuf + 3 * N,
        *start = ibuf + 4 * N, *sorted = ibuf + 5 * N + 2;
    uint64_t *scratch = buf, *ybuf = buf + W;

    int64_t evals = 0, gens = 0, first_hit = -1;
    int64_t v_anti = 0, v_cnt = 0, v_surv = 0;

    for (int i = 0; i < mu; ++i) {
        random_bits(g, P + (size_t)i * W, n, W);
        rr_evaluate(p, P + (size_t)i * W, ybuf, Pf + 2 * i);
        ++evals;
        if (first_hit < 0 && pareto_index(p, Pf + 2 * i) >= 0)
            first_hit = evals;
    }
    {
        int nl = nd_sort(Pf, mu, Prank, order, tmp, last);
        crowding(Pf, mu, Prank, nl, Pcd, members, start, sorted, tmp);
    }
    int64_t covered = count_covered(p, Pf, mu, seen);

    while (covered < p->front_size && evals + mu <= budget) {
        memcpy(R, P, wb * mu);
        memcpy(Rf, Pf, sizeof(int64_t) * 2 * mu);
        for (int i = 0; i < mu / 2; ++i) {
            int a = tournament(g, mu, Prank, Pcd);
            int b = tournament(g, mu, Prank, Pcd);
            uint64_t *s1 = R + (size_t)(mu + 2 * i) * W, *s2 = s1 + W;
            if (rr_uniform(g) < pc) {
                rr_crossover(xover, g, P + (size_t)a * W, P + (size_t)b * W, s1, s2, n, W);
            } else {
                memcpy(s1, P + (size_t)a * W, wb);
                memcpy(s2, P + (size_t)b * W, wb);
            }
            rr_mutate(m, g, s1, n, W, scratch);
            rr_mutate(m, g, s2, n, W, scratch);
            for (int t = 0; t < 2; ++t) {
                int idx = mu + 2 * i + t;
                rr_evaluate(p, R + (size_t)idx * W, ybuf, Rf + 2 * idx);
                ++evals;
                if (first_hit < 0 && pareto_index(p, Rf + 2 * idx) >= 0)
                    first_hit = evals;
            }
        }

        int nl = nd_sort(Rf, N, rank, order, tmp, last);
        crowding(Rf, N, rank, nl, cd, members, start, sorted, tmp);
        for (int i = 0; i < N; ++i)
            order[i] = i;
        sort_ctx sc = {Rf, rank, cd, 0};
        merge_sort(order, tmp, N, cmp_survival, &sc);

        if (check) {
            /* layer 0 occupies members[start[0] .. start[1]) */
            int K = start[1] - start[0];
            const int *f1m = members + start[0];
            memset(surv, 0, (size_t)N);
            for (int j = 0; j < mu; ++j)
                surv[order[j]] = 1;
            memcpy(sorted, f1m, sizeof(int) * K);
            sort_ctx s0 = {Rf, NULL, NULL, 0};
            merge_sort(sorted, tmp, K, cmp_f1f2_desc, &s0);
            int64_t mvec = 0, positive = 0;
            int all_kept = 1;
            for (int j = 0; j < K;) {
                int e = j, kept = 0;
                while (e < K && Rf[2 * sorted[e]] == Rf[2 * sorted[j]] &&
                       Rf[2 * sorted[e] + 1] == Rf[2 * sorted[j] + 1]) {
                    if (surv[sorted[e]])
                        kept = 1;
                    ++e;
                }
                ++mvec;
                if (!kept)
                    all_kept = 0;
                j = e;
            }
            for (int j = 0; j < K; ++j)
                if (cd[f1m[j]] > 0)
                    ++positive;
            if (mvec > antichain_bound(p, R + (size_t)f1m[0] * W, Rf, f1m, K))
                ++v_anti;
            if (positive > 4 * mvec)
                ++v_cnt;
            if (mu >= 4 * mvec && !all_kept)
                ++v_surv;
        }

        for (int j = 0; j < mu; ++j) {
            int s = order[j];
            memcpy(P + (size_t)j * W, R + (size_t)s * W, wb);
            Pf[2 * j] = Rf[2 * s];
            Pf[2 * j + 1] = Rf[2 * s + 1];
            Prank[j] = rank[s];
            Pcd[j] = cd[s];
        }
        covered = count_covered(p, Pf, mu, seen);
        ++gens;
    }

    res->evaluations = evals;
    res->generations = gens;
    res->first_hit = first_hit;
    res->plateau_hit = -1;
    res->covered = covered;
    res->max_pop = mu;
    res->viol_antichain = v_anti;
    res->viol_protect_count = v_cnt;
    res->viol_protect_survival = v_surv;
    res->pop_size = mu;
    {
        int64_t out = mu < res->pop_cap ? mu : res->pop_cap;
        memcpy(res->pop, P, wb * out);
        memcpy(res->fit, Pf, sizeof(int64_t) * 2 * out);
    }

done:
    free(R);
    free(P);
    free(Rf);
    free(Pf);
    free(rank);
    free(Prank);
    free(cd);
    free(Pcd);
    free(ibuf);
    free(buf);
    free(seen);
    free(surv);
    return status;
}

/* --------------------------------------------------------------- probes */

int rr_predicate(const rr_problem *p, int pred, const uint64_t *x, uint64_t *scratch)
{
    if (pred == RR_PRED_ANY)
        return 1;
    const uint64_t *y = transform(p, x, scratch);
    int n = p->n, W = p->W;
    if (pred == RR_PRED_PARETO) {
        int64_t f[2];
        if (p->kind == RR_RRRMO)
            rrrmo_value(p, y, f);
        else
            urrrmo_value(p, y, f);
        return pareto_index(p, f) >= 0;
    }
    if (pred == RR_PRED_K || pred == RR_PRED_W) {
        if (p->kind != RR_URRRMO)
            return 0;
        urrrmo_parts u;
        urrrmo_split(p, y, &u);
        return pred == RR_PRED_K ? (u.in_u || u.in_c) : (u.in_p && u.in_t);
    }
    int ones = popcount_words(y, W);
    int lz = lead_run(y, n, W, 0), tz = trail_run(y, n, W, 0);
    int in_f = 5 * ones == 4 * n && lz + tz == n - ones;
    switch (pred) {
    case RR_PRED_G:
        return 5 * ones <= 3 * n || in_f;
    case RR_PRED_GPRIME:
        return 5 * ones >= 2 * n && 5 * ones <= 3 * n;
    case RR_PRED_F:
        return in_f;
    case RR_PRED_FPRIME:
        return 5 * ones == 3 * n && lz + tz == n - ones;
    case RR_PRED_F_CENTER:
        return in_f && n % 10 == 0 && lz == n / 10;
    case RR_PRED_F_NONCENTER:
        return in_f && !(n % 10 == 0 && lz == n / 10);
    default:
        return 0;
    }
}

static void block_string(uint64_t *x, int n, int W, int lead, int ones)
{
    memset(x, 0, sizeof(uint64_t) * W);
    for (int q = lead; q < lead + ones; ++q)
        flip_pos(x, n, q);
}

/* direct samplers for the tiny RRRMO sets; returns 0 if `pred` has none */
static int sample_direct(const rr_problem *p, int pred, bitgen_t *g, uint64_t *x)
{
    if (p->kind != RR_RRRMO || p->perm || p->zmask)
        return 0;
    int n = p->n;
    int i;
    switch (pred) {
    case RR_PRED_F:
        i = (int)rr_below(g, (uint64_t)(n / 5 + 1));
        block_string(x, n, p->W, i, 4 * n / 5);
        return 1;
    case RR_PRED_FPRIME:
        i = (int)rr_below(g, (uint64_t)(2 * n / 5 + 1));
        block_string(x, n, p->W, i, 3 * n / 5);
        return 1;
    case RR_PRED_F_CENTER:
        if (n % 10)
            return 0;
        block_string(x, n, p->W, n / 10, 4 * n / 5);
        return 1;
    case RR_PRED_F_NONCENTER:
        if (n % 10)
            return 0;
        i = (int)rr_below(g, (uint64_t)(n / 5));
        if (i >= n / 10)
            ++i;
        block_string(x, n, p->W, i, 4 * n / 5);
        return 1;
    default:
        return 0;
    }
}

int rr_probe(const rr_problem *p, const rr_mutation *m, int src_pred, int tgt_pred,
             int64_t samples, int64_t max_tries, bitgen_t *g, int64_t *hits, int64_t *tries)
{
    int n = p->n, W = p->W;
    uint64_t *buf = malloc(sizeof(uint64_t) * 3 * W);
    if (!buf)
        return -1;
    uint64_t *x = buf, *scratch = buf + W, *ybuf = buf + 2 * W;
    int64_t h = 0, t = 0;
    int status = 0;
    for (int64_t s = 0; s < samples; ++s) {
        if (!sample_direct(p, src_pred, g, x)) {
            int64_t k = 0;
            for (;;) {
                if (k >= max_tries) {
                    status = 1;
                    goto out;
                }
                random_bits(g, x, n, W);
                ++k;
                ++t;
                if (rr_predicate(p, src_pred, x, ybuf))
                    break;
            }
        } else {
            ++t;
        }
        rr_mutate(m, g, x, n, W, scratch);
        if (rr_predicate(p, tgt_pred, x, ybuf))
            ++h;
    }
out:
    *hits = h;
    *tries = t;
    free(buf);
    return status;
}
