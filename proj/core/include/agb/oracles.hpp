#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agb/concept_class.hpp"
#include "agb/function_space.hpp"

namespace agb {

/** Additive-error estimation budget. sample_size() is the Hoeffding count for
 *  range-1 averages (misclassification indicators): with that many draws the
 *  error estimate is within `tolerance` with probability >= 1 - confidence; the
 *  correlation 1 - 2*error inherits twice the tolerance. */
struct EstimationBudget {
    double tolerance = 0.05;
    double confidence = 0.01;

    EstimationBudget() = default;
    EstimationBudget(double tol, double conf);

    uint64_t sample_size() const;
};

/** Label-query access with budget accounting. Each query returns ±1 with mean
 *  phi(x) (deterministic for boolean instances) and consumes one unit. */
class MembershipOracle {
  public:
    MembershipOracle(const ExampleDistribution& a, uint64_t seed, uint64_t stream,
                     uint64_t budget = UINT64_MAX);

    int query(uint64_t x);
    uint64_t used() const { return used_; }
    uint64_t budget() const { return budget_; }
    uint64_t remaining() const { return budget_ - used_; }
    bool exhausted() const { return used_ >= budget_; }
    int n() const { return a_->n(); }

  private:
    const ExampleDistribution* a_;
    CounterRng rng_;
    uint64_t used_ = 0;
    uint64_t budget_;
};

/// m independent draws from the instance.
std::vector<LabeledExample> draw_examples(const ExampleDistribution& a, uint64_t m,
                                          CounterRng& rng);

/// Round instance (D, (phi - h)/2); accepts any phi in [-1,1].
ExampleDistribution residual_half(const ExampleDistribution& a, const BoundedFn& h);

/// Round instance (D, clip(f - h)); requires a boolean instance.
ExampleDistribution residual_clipped(const ExampleDistribution& a, const BoundedFn& h);

/** Boolean-ization by splitting each point into a (+) and a (-) copy on an
 *  extra high bit: mass D(x)(1+phi(x))/2 goes to (x,+) with label +1 and
 *  D(x)(1-phi(x))/2 to (x,-) with label -1. Functions on the original domain
 *  lift by ignoring the extra bit, which preserves every inner product and
 *  disagreement exactly. */
ExampleDistribution point_split(const ExampleDistribution& a);

/// Restrict a split-domain hypothesis back to the original domain (reads the
/// extra-bit-0 copy).
BoundedFn split_restrict(const BoundedFn& h_split, int original_n);

/** Residual-reweighted view used by distribution-independent weak learners:
 *  D_h(x) = D(x) |clip(f-h)(x)| / mass, with mass N_h = E_D|clip(f-h)|. */
struct Reweighted {
    ExampleDistribution instance;  // (D_h, f)
    double mass = 0.0;             // N_h
    double smoothness = 0.0;       // max_x D_h(x)/D(x) over D's support
};
Reweighted reweighted_dh(const ExampleDistribution& a, const BoundedFn& h);

/// (D, f*M) for boolean f and measure M.
ExampleDistribution measure_product(const ExampleDistribution& a, const Measure& m);

/** Sampled estimate of the disagreement Pr[g(x) != b] for a boolean hypothesis,
 *  with the correlation recovered as 1 - 2*error. */
struct CorrelationEstimate {
    double corr = 0.0;
    double err = 0.0;
    uint64_t samples = 0;
};
CorrelationEstimate estimate_correlation(const ExampleDistribution& a, const BoundedFn& g,
                                         const EstimationBudget& budget, CounterRng& rng);

/** Brute-force best member of a class: minimizes disagreement, considering
 *  negations when the class is negation-closed. */
struct OptResult {
    double delta = 0.5;
    double gamma = 0.0;
    uint64_t index = 0;
    int sign = +1;
    BoundedFn best;
    std::string name;
};
OptResult exact_opt(const ExampleDistribution& a, const ConceptClass& c);

}  // namespace agb
