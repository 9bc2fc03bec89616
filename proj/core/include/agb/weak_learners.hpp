#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "agb/concept_class.hpp"
#include "agb/weak_learner.hpp"

namespace agb {

/** Scans the whole class (and negations when the class is negation-closed) and
 *  returns the exact-advantage argmax when it clears `gamma`; otherwise Fail.
 *  Realizes a (gamma, gamma)-weak learner, hence (alpha, gamma)-weak for any
 *  alpha >= gamma. Dense instance access. */
WeakLearnerHandle exhaustive_weak(ConceptClass c, double alpha, double gamma);

/** Test double exercising alpha > gamma: fails unless the class optimum clears
 *  `alpha`; otherwise hands back the optimum with its advantage deliberately
 *  knocked down into [gamma, 2*gamma] by a seeded pointwise sign mask
 *  (up to `retries` attempts; falls back to the unthrottled optimum when the
 *  window cannot be hit). Every returned advantage is measured, not assumed. */
WeakLearnerHandle throttled_weak(ConceptClass c, double alpha, double gamma, int retries = 8);

/** Walsh-Hadamard argmax over all signed parities of the round label function
 *  under the round marginal (any dense marginal). Fails below the advantage
 *  threshold. */
WeakLearnerHandle parity_weak_dense(double advantage_threshold);

// ---------------------------------------------------------------------------
// Membership-query heavy-coefficient search.
// ---------------------------------------------------------------------------

/** Budgeted evaluation counter shared across a pipeline's query-driven calls. */
struct QueryCounter {
    uint64_t used = 0;
    uint64_t budget = UINT64_MAX;

    bool try_spend(uint64_t k) {
        if (k > budget - used) return false;
        used += k;
        return true;
    }
};

struct KmConfig {
    double theta = 0.25;  // coefficient magnitude threshold
    double delta = 0.05;  // overall failure probability
    /// Per-level batch size is ceil(bucket_sample_scale * 8 ln(2/delta') / theta^4)
    /// with delta' = delta / (levels * bucket cap) when split_confidence is true.
    double bucket_sample_scale = 1.0;
    bool split_confidence = true;
    uint64_t max_coeffs = 0;  // survivor cap per level; 0 => ceil(4/theta^2)
};

struct KmCoefficient {
    uint64_t mask = 0;
    double estimate = 0.0;
};

struct KmOutcome {
    std::vector<KmCoefficient> coeffs;  // sorted by |estimate| descending
    uint64_t queries_used = 0;
    bool exhausted = false;       // query budget ran out before finishing
    uint64_t max_level_buckets = 0;  // widest pre-cap survivor front observed
};

/** Prefix search for the heavy Fourier coefficients of `eval` (a [-1,1]-valued
 *  function on n bits, uniform measure): bucket weights over fixed low-bit
 *  prefixes are estimated from one shared paired-sample batch per level; buckets
 *  survive at estimate >= theta^2/2 (capped at the survivor cap); full-length
 *  survivors are re-estimated directly and kept at |estimate| >= 3*theta/4.
 *  With the default sampling constants the output contains every coefficient
 *  with |coef| >= theta and nothing below theta/4, with probability >= 1-delta. */
KmOutcome km_search_fn(int n, const std::function<double(uint64_t)>& eval,
                       const KmConfig& cfg, uint64_t seed, QueryCounter& counter);

/// Convenience overload over a BoundedFn target with an optional budget.
KmOutcome km_search(const BoundedFn& target, const KmConfig& cfg, uint64_t seed,
                    uint64_t query_budget = UINT64_MAX);

/** Membership-query parity learner for boosting rounds on a uniform base
 *  marginal. Reads the round's residual from the RoundContext, certifies
 *  previously found masks against fresh shared sample batches first, and runs
 *  the prefix search (threshold schedule halving down to theta_floor) only when
 *  no cached candidate clears `gamma`. The handle keeps a candidate cache and a
 *  cumulative query budget across rounds, so use one handle per boosting run. */
struct KmWeakConfig {
    double gamma = 0.0;        // advertised advantage (required)
    double alpha = 0.0;        // contract alpha; defaults to gamma when 0
    double theta_start = 0.5;
    double theta_floor = 0.04;
    double delta = 0.05;       // per-estimate confidence (light; callers re-measure)
    uint64_t query_budget = UINT64_MAX;
    uint64_t max_cached = 512;
    /// Optional caller-owned counter (its budget governs); lets pipelines read
    /// the cumulative query usage after a run.
    std::shared_ptr<QueryCounter> shared_counter;
};
WeakLearnerHandle km_parity_weak(const KmWeakConfig& cfg);

}  // namespace agb
