#include "agb/weak_learners.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <memory>
#include <unordered_set>

#include "agb/oracles.hpp"
#include "agb/wht.hpp"

namespace agb {

namespace {

std::string fmt(const char* f, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

}  // namespace

WeakLearnerHandle exhaustive_weak(ConceptClass c, double alpha, double gamma) {
    if (!(gamma > 0.0 && gamma <= alpha))
        throw std::invalid_argument("weak learner needs 0 < gamma <= alpha");
    WeakLearnerHandle h;
    h.alpha = alpha;
    h.gamma = gamma;
    h.name = "exhaustive(" + c.kind_name() + ")";
    h.invoke = [c = std::move(c), gamma](const ExampleDistribution& a, const RoundContext&,
                                         uint64_t) -> WeakOutcome {
        OptResult opt = exact_opt(a, c);
        if (opt.gamma < gamma)
            return WeakOutcome::fail(
                fmt("best class advantage %.6g below gamma %.6g", opt.gamma, gamma));
        return WeakOutcome::success(opt.best, opt.gamma);
    };
    return h;
}

WeakLearnerHandle throttled_weak(ConceptClass c, double alpha, double gamma, int retries) {
    if (!(gamma > 0.0 && gamma <= alpha))
        throw std::invalid_argument("throttled learner needs 0 < gamma <= alpha");
    WeakLearnerHandle h;
    h.alpha = alpha;
    h.gamma = gamma;
    h.name = "throttled(" + c.kind_name() + ")";
    h.invoke = [c = std::move(c), alpha, gamma, retries](
                   const ExampleDistribution& a, const RoundContext&,
                   uint64_t seed) -> WeakOutcome {
        OptResult opt = exact_opt(a, c);
        if (opt.gamma < alpha)
            return WeakOutcome::fail(
                fmt("optimal advantage %.6g below alpha %.6g", opt.gamma, alpha));
        if (opt.gamma <= 2.0 * gamma) return WeakOutcome::success(opt.best, opt.gamma);

        // Knock the advantage down to ~1.5*gamma by flipping each point with
        // probability p; accept a mask only if the measured advantage lands in
        // the [gamma, 2*gamma] window.
        const Domain dom = a.domain();
        const double p = (1.0 - 1.5 * gamma / opt.gamma) / 2.0;
        std::vector<double> g = opt.best.table(dom);
        std::vector<double> w(dom.size());
        for (uint64_t x = 0; x < dom.size(); ++x)
            w[x] = a.dist().prob(x) * a.phi()(x) * g[x];
        CounterRng rng(seed, derive_stream(seed, {0x7707, 0}));
        for (int t = 0; t < retries; ++t) {
            std::vector<double> masked(dom.size());
            KahanSum ip;
            for (uint64_t x = 0; x < dom.size(); ++x) {
                double m = rng.next_unit() < p ? -1.0 : 1.0;
                masked[x] = g[x] * m;
                ip.add(w[x] * m);
            }
            double adv = ip.value() / 2.0;
            if (adv >= gamma && adv <= 2.0 * gamma)
                return WeakOutcome::success(BoundedFn::boolean_from_pm1(dom.n, masked), adv);
        }
        // Window missed on every retry (degenerate realization granularity):
        // fall back to the honest optimum so the contract still holds.
        WeakOutcome out = WeakOutcome::success(opt.best, opt.gamma);
        out.diagnostic = "throttle window missed; returning unthrottled optimum";
        return out;
    };
    return h;
}

WeakLearnerHandle parity_weak_dense(double advantage_threshold) {
    if (!(advantage_threshold >= 0.0))
        throw std::invalid_argument("advantage threshold must be nonnegative");
    WeakLearnerHandle h;
    h.alpha = advantage_threshold;
    h.gamma = advantage_threshold;
    h.name = "parity-dense";
    h.invoke = [advantage_threshold](const ExampleDistribution& a, const RoundContext&,
                                     uint64_t) -> WeakOutcome {
        std::vector<double> coefs =
            parity_correlations(a.dist(), a.phi().table(a.domain()));
        PeakCoefficient peak = peak_abs(coefs);
        double adv = std::abs(peak.value) / 2.0;
        if (adv <= advantage_threshold)
            return WeakOutcome::fail(fmt("max parity advantage %.6g at or below threshold %.6g",
                                         adv, advantage_threshold));
        return WeakOutcome::success(
            BoundedFn::parity(a.n(), peak.index, sign_pm1(peak.value)), adv);
    };
    return h;
}

// ---------------------------------------------------------------------------
// Prefix search over Fourier indices with membership queries.
// ---------------------------------------------------------------------------

namespace {

/// Largest width for which per-level histograms are materialized densely.
constexpr int kHistogramBits = 20;

struct Bucket {
    uint64_t prefix;
    double estimate;
};

}  // namespace

KmOutcome km_search_fn(int n, const std::function<double(uint64_t)>& eval,
                       const KmConfig& cfg, uint64_t seed, QueryCounter& counter) {
    Domain dom(n);
    if (!(cfg.theta > 0.0 && cfg.theta <= 1.0))
        throw std::invalid_argument("coefficient threshold must be in (0,1]");
    const double theta = cfg.theta;
    const uint64_t cap =
        cfg.max_coeffs ? cfg.max_coeffs
                       : static_cast<uint64_t>(std::ceil(4.0 / (theta * theta)));
    const double dprime = cfg.split_confidence
                              ? cfg.delta / (static_cast<double>(n + 1) *
                                             static_cast<double>(cap))
                              : cfg.delta / static_cast<double>(n + 1);
    const double logterm = std::log(2.0 / dprime);
    const uint64_t m_bucket = static_cast<uint64_t>(
        std::ceil(cfg.bucket_sample_scale * 8.0 * logterm / std::pow(theta, 4)));
    const uint64_t m_leaf = static_cast<uint64_t>(
        std::ceil(cfg.bucket_sample_scale * 32.0 * logterm / (theta * theta)));

    KmOutcome out;
    CounterRng rng(seed, derive_stream(seed, {0x6b6d, 0}));
    std::vector<uint64_t> survivors{0};  // the empty prefix

    for (int k = 1; k <= n; ++k) {
        if (!counter.try_spend(2 * m_bucket)) {
            out.exhausted = true;
            return out;
        }
        out.queries_used += 2 * m_bucket;
        const uint64_t kmask = (uint64_t{1} << k) - 1;
        const int rest = n - k;

        // Candidate buckets: both one-bit extensions of every survivor.
        std::vector<uint64_t> cands;
        cands.reserve(survivors.size() * 2);
        for (uint64_t s : survivors) {
            cands.push_back(s);
            cands.push_back(s | (uint64_t{1} << (k - 1)));
        }

        std::vector<Bucket> keep;
        if (k <= kHistogramBits) {
            // One shared batch serves every bucket at this level: histogram the
            // pair products over u xor u', then one transform reads them all.
            std::vector<double> hist(uint64_t{1} << k, 0.0);
            for (uint64_t j = 0; j < m_bucket; ++j) {
                uint64_t u = rng.next_u64() & kmask;
                uint64_t u2 = rng.next_u64() & kmask;
                uint64_t v = rest ? (rng.next_u64() & ((uint64_t{1} << rest) - 1)) : 0;
                double f1 = eval(u | (v << k));
                double f2 = eval(u2 | (v << k));
                hist[u ^ u2] += f1 * f2;
            }
            wht_inplace(hist);
            const double inv = 1.0 / static_cast<double>(m_bucket);
            for (uint64_t p : cands) {
                double est = hist[p] * inv;
                if (est >= theta * theta / 2.0) keep.push_back({p, est});
            }
        } else {
            // Wide level: store the batch once and score candidate buckets only.
            std::vector<uint64_t> ds(m_bucket);
            std::vector<double> prods(m_bucket);
            for (uint64_t j = 0; j < m_bucket; ++j) {
                uint64_t u = rng.next_u64() & kmask;
                uint64_t u2 = rng.next_u64() & kmask;
                uint64_t v = rest ? (rng.next_u64() & ((uint64_t{1} << rest) - 1)) : 0;
                ds[j] = u ^ u2;
                prods[j] = eval(u | (v << k)) * eval(u2 | (v << k));
            }
            for (uint64_t p : cands) {
                KahanSum acc;
                for (uint64_t j = 0; j < m_bucket; ++j)
                    acc.add(std::popcount(p & ds[j]) & 1 ? -prods[j] : prods[j]);
                double est = acc.value() / static_cast<double>(m_bucket);
                if (est >= theta * theta / 2.0) keep.push_back({p, est});
            }
        }

        out.max_level_buckets = std::max(out.max_level_buckets, uint64_t(keep.size()));
        std::sort(keep.begin(), keep.end(), [](const Bucket& a, const Bucket& b) {
            return a.estimate > b.estimate || (a.estimate == b.estimate && a.prefix < b.prefix);
        });
        if (keep.size() > cap) keep.resize(cap);
        survivors.clear();
        for (const Bucket& b : keep) survivors.push_back(b.prefix);
        if (survivors.empty()) return out;
    }

    // Full-length survivors: estimate the signed coefficients directly from one
    // shared batch of uniform points.
    if (!counter.try_spend(m_leaf)) {
        out.exhausted = true;
        return out;
    }
    out.queries_used += m_leaf;
    const uint64_t nmask = dom.mask();
    std::vector<double> ests(survivors.size(), 0.0);
    if (n <= kHistogramBits) {
        std::vector<double> hist(dom.size(), 0.0);
        for (uint64_t j = 0; j < m_leaf; ++j) {
            uint64_t x = rng.next_u64() & nmask;
            hist[x] += eval(x);
        }
        wht_inplace(hist);
        for (size_t i = 0; i < survivors.size(); ++i)
            ests[i] = hist[survivors[i]] / static_cast<double>(m_leaf);
    } else {
        std::vector<uint64_t> xs(m_leaf);
        std::vector<double> vals(m_leaf);
        for (uint64_t j = 0; j < m_leaf; ++j) {
            xs[j] = rng.next_u64() & nmask;
            vals[j] = eval(xs[j]);
        }
        for (size_t i = 0; i < survivors.size(); ++i) {
            KahanSum acc;
            for (uint64_t j = 0; j < m_leaf; ++j)
                acc.add(std::popcount(survivors[i] & xs[j]) & 1 ? -vals[j] : vals[j]);
            ests[i] = acc.value() / static_cast<double>(m_leaf);
        }
    }
    for (size_t i = 0; i < survivors.size(); ++i)
        if (std::abs(ests[i]) >= 0.75 * theta)
            out.coeffs.push_back({survivors[i], ests[i]});
    std::sort(out.coeffs.begin(), out.coeffs.end(),
              [](const KmCoefficient& a, const KmCoefficient& b) {
                  double ma = std::abs(a.estimate), mb = std::abs(b.estimate);
                  return ma > mb || (ma == mb && a.mask < b.mask);
              });
    return out;
}

KmOutcome km_search(const BoundedFn& target, const KmConfig& cfg, uint64_t seed,
                    uint64_t query_budget) {
    QueryCounter counter;
    counter.budget = query_budget;
    BoundedFn t = target;
    KmOutcome out = km_search_fn(
        t.n(), [t](uint64_t x) { return t(x); }, cfg, seed, counter);
    return out;
}

// ---------------------------------------------------------------------------
// Query-mode parity weak learner (prefix search + candidate cache).
// ---------------------------------------------------------------------------

namespace {

struct KmWeakState {
    std::vector<uint64_t> cache;
    std::shared_ptr<QueryCounter> counter;
};

}  // namespace

WeakLearnerHandle km_parity_weak(const KmWeakConfig& cfg) {
    if (!(cfg.gamma > 0.0)) throw std::invalid_argument("km learner needs gamma > 0");
    if (!(cfg.theta_floor > 0.0 && cfg.theta_floor <= cfg.theta_start))
        throw std::invalid_argument("km learner needs 0 < theta_floor <= theta_start");
    WeakLearnerHandle h;
    h.gamma = cfg.gamma;
    h.alpha = cfg.alpha > 0.0 ? cfg.alpha : cfg.gamma;
    h.name = "parity-query";
    auto state = std::make_shared<KmWeakState>();
    if (cfg.shared_counter) {
        state->counter = cfg.shared_counter;
    } else {
        state->counter = std::make_shared<QueryCounter>();
        state->counter->budget = cfg.query_budget;
    }

    h.invoke = [cfg, state](const ExampleDistribution&, const RoundContext& ctx,
                            uint64_t seed) -> WeakOutcome {
        if (!ctx.base || !ctx.residual)
            return WeakOutcome::fail("query-mode learner needs the round context");
        if (!ctx.base->dist().is_uniform())
            return WeakOutcome::fail("query-mode learner requires a uniform base marginal");
        const int n = ctx.base->n();
        const BoundedFn residual_fn = *ctx.residual;
        // Memoize residual evaluations for the duration of the round: sampled
        // points repeat heavily on small domains, while each evaluation replays
        // the whole ensemble behind the residual. The query counter still
        // accounts for every logical query.
        std::shared_ptr<std::vector<double>> memo;
        std::shared_ptr<std::vector<char>> have;
        std::function<double(uint64_t)> psi;
        if (n <= 20) {
            memo = std::make_shared<std::vector<double>>(uint64_t{1} << n, 0.0);
            have = std::make_shared<std::vector<char>>(uint64_t{1} << n, 0);
            psi = [residual_fn, memo, have](uint64_t x) {
                if (!(*have)[x]) {
                    (*memo)[x] = residual_fn(x);
                    (*have)[x] = 1;
                }
                return (*memo)[x];
            };
        } else {
            psi = [residual_fn](uint64_t x) { return residual_fn(x); };
        }
        const double mass = ctx.mass;
        const double gamma = cfg.gamma;
        // A hypothesis parity has round advantage coef/(2*mass), so the
        // coefficient magnitude worth finding is 2*gamma*mass — floored, since
        // tinier coefficients are unaffordable to certify.
        const double need = std::max(cfg.theta_floor, 2.0 * gamma * mass);
        const uint64_t before = state->counter->used;

        auto coef_to_adv = [mass](double coef) { return std::abs(coef) / (2.0 * mass); };
        auto make_result = [&](uint64_t mask, double coef) {
            WeakOutcome o = WeakOutcome::success(BoundedFn::parity(n, mask, sign_pm1(coef)),
                                                 coef_to_adv(coef));
            o.queries_used = state->counter->used - before;
            return o;
        };

        // Phase 1: re-certify cached candidate masks from one shared batch.
        if (!state->cache.empty()) {
            const double logterm = std::log(2.0 / cfg.delta);
            const uint64_t m_cert =
                static_cast<uint64_t>(std::ceil(32.0 * logterm / (need * need)));
            if (!state->counter->try_spend(m_cert)) {
                WeakOutcome o = WeakOutcome::fail("query budget exhausted");
                o.queries_used = state->counter->used - before;
                return o;
            }
            CounterRng rng(seed, derive_stream(seed, {0x6b63, ctx.round}));
            const uint64_t nmask = Domain(n).mask();
            uint64_t best_mask = 0;
            double best_coef = 0.0;
            if (n <= kHistogramBits) {
                std::vector<double> hist(uint64_t{1} << n, 0.0);
                for (uint64_t j = 0; j < m_cert; ++j) {
                    uint64_t x = rng.next_u64() & nmask;
                    hist[x] += psi(x);
                }
                wht_inplace(hist);
                for (uint64_t mask : state->cache) {
                    double est = hist[mask] / static_cast<double>(m_cert);
                    if (std::abs(est) > std::abs(best_coef)) {
                        best_coef = est;
                        best_mask = mask;
                    }
                }
            } else {
                std::vector<uint64_t> xs(m_cert);
                std::vector<double> vals(m_cert);
                for (uint64_t j = 0; j < m_cert; ++j) {
                    xs[j] = rng.next_u64() & nmask;
                    vals[j] = psi(xs[j]);
                }
                for (uint64_t mask : state->cache) {
                    KahanSum acc;
                    for (uint64_t j = 0; j < m_cert; ++j)
                        acc.add(std::popcount(mask & xs[j]) & 1 ? -vals[j] : vals[j]);
                    double est = acc.value() / static_cast<double>(m_cert);
                    if (std::abs(est) > std::abs(best_coef)) {
                        best_coef = est;
                        best_mask = mask;
                    }
                }
            }
            // The batch certifies coefficients at the `need` scale only: a bare
            // advantage bar would pass estimation noise whenever gamma is far
            // below the certification precision, and the booster would then
            // reject the proposal and stop while real coefficients remain.
            if (std::abs(best_coef) >= 0.75 * need && coef_to_adv(best_coef) > 0.75 * gamma) {
                // Promote the winner so later rounds certify it first.
                auto it = std::find(state->cache.begin(), state->cache.end(), best_mask);
                if (it != state->cache.begin() && it != state->cache.end())
                    std::rotate(state->cache.begin(), it, it + 1);
                return make_result(best_mask, best_coef);
            }
        }

        // Phase 2: full prefix search, halving the threshold until a usable
        // coefficient appears or the floor says there is none.
        double theta = std::min(1.0, std::max(cfg.theta_start, need));
        uint64_t attempt = 0;
        while (true) {
            theta = std::max(theta, need);
            KmConfig kc;
            kc.theta = theta;
            kc.delta = cfg.delta;
            kc.split_confidence = false;  // light: the booster re-measures anyway
            KmOutcome found =
                km_search_fn(n, psi, kc, derive_stream(seed, {0x6b66, ctx.round, attempt++}),
                             *state->counter);
            if (found.exhausted) {
                WeakOutcome o = WeakOutcome::fail("query budget exhausted");
                o.queries_used = state->counter->used - before;
                return o;
            }
            if (!found.coeffs.empty()) {
                // Merge fresh discoveries into the cache, new ones first.
                std::vector<uint64_t> merged;
                std::unordered_set<uint64_t> seen;
                for (const KmCoefficient& kcf : found.coeffs)
                    if (seen.insert(kcf.mask).second) merged.push_back(kcf.mask);
                for (uint64_t mask : state->cache)
                    if (seen.insert(mask).second) merged.push_back(mask);
                if (merged.size() > cfg.max_cached) merged.resize(cfg.max_cached);
                state->cache = std::move(merged);

                const KmCoefficient& top = found.coeffs.front();
                if (coef_to_adv(top.estimate) > 0.75 * gamma)
                    return make_result(top.mask, top.estimate);
            }
            if (theta <= need * (1.0 + 1e-12)) {
                WeakOutcome o = WeakOutcome::fail(
                    fmt("no coefficient above the search floor %.6g (advantage goal %.6g)",
                        need, gamma));
                o.queries_used = state->counter->used - before;
                return o;
            }
            theta = std::max(need, theta / 2.0);
        }
    };
    return h;
}

}  // namespace agb
