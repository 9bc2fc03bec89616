#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "agb/boosters.hpp"
#include "agb/function_space.hpp"
#include "agb/weak_learners.hpp"

namespace agb {

/** sign(sum of member functions); an inner sum of exactly 0 resolves to +1. */
struct ThresholdOfClass {
    int n = 1;
    std::vector<BoundedFn> terms;

    double raw_sum(uint64_t x) const;
    int eval(uint64_t x) const { return sign_pm1(raw_sum(x)); }
    BoundedFn to_fn() const;
};

/** One conjunction: variables in pos_mask must be 1, those in neg_mask must
 *  be 0. An empty term (both masks zero) is identically true. */
struct DnfTerm {
    uint64_t pos_mask = 0;
    uint64_t neg_mask = 0;
};

/** OR of conjunctions, as a ±1 function (+1 = some term satisfied). A formula
 *  with no terms is identically -1. */
struct DnfFormula {
    int n = 1;
    std::vector<DnfTerm> terms;

    bool eval_bool(uint64_t x) const;
    int eval(uint64_t x) const { return eval_bool(x) ? +1 : -1; }
    BoundedFn to_fn() const;
};

// ---------------------------------------------------------------------------
// Weak-to-strong.
// ---------------------------------------------------------------------------

enum class StrongEngine { Distance, ClippedEnergy };

/// tau -> a weak learner whose contract alpha is tau.
using WeakFamily = std::function<WeakLearnerHandle(double tau)>;

struct StrongResult {
    BoostResult boost;
    double tau = 0.0;  // the accuracy parameter handed to the family (epsilon/3)
};

/** Boosts the family's (tau, gamma(tau))-instantiation at tau = epsilon/3 with
 *  boosting accuracy epsilon/3; total excess error is then at most epsilon
 *  over the class optimum (2*tau from the engine's alpha-slack + tau). */
StrongResult weak_to_strong(const ExampleDistribution& a, const WeakFamily& family,
                            double epsilon, double delta, uint64_t seed,
                            BoostMode mode = BoostMode::Exact,
                            StrongEngine engine = StrongEngine::Distance);

// ---------------------------------------------------------------------------
// Decision trees over the uniform marginal.
// ---------------------------------------------------------------------------

enum class AccessMode { Dense, Query };

struct DtParams {
    uint64_t s = 16;  ///< competing tree size (leaf count)
    double epsilon = 0.05;
    double delta = 0.05;
    AccessMode access = AccessMode::Dense;
    BoostMode mode = BoostMode::Exact;
    uint64_t query_budget = UINT64_MAX;  ///< Query access only
};

struct DtResult {
    BoostResult boost;
    double tau = 0.0;      // epsilon/3
    double gamma_w = 0.0;  // tau / (2s): the parity learner's advantage goal
    uint64_t queries_used = 0;
};

/** Agnostic tree learner: competes with every size-s decision tree. A size-s
 *  tree within disagreement 1/2 - tau of the labels forces some parity
 *  coefficient of magnitude >= 2*tau/s, so boosting the parity learner with
 *  advantage goal tau/(2s) at accuracy epsilon/3 lands within epsilon of the
 *  best tree. Dense access uses the exact transform argmax; Query access uses
 *  the budgeted prefix search. Uniform marginal required. */
DtResult learn_decision_tree_agnostic(const ExampleDistribution& a, const DtParams& p,
                                      uint64_t seed);

// ---------------------------------------------------------------------------
// PAC learning of thresholds over a class.
// ---------------------------------------------------------------------------

struct PacParams {
    uint64_t w = 1;  ///< promised threshold width of the target
    double epsilon = 0.05;
    double delta = 0.05;
    BoostMode mode = BoostMode::Exact;
    uint64_t round_budget = 0;  ///< 0 derives ceil((256/27)*(w/epsilon)^2)
};

struct PacResult {
    BoostResult boost;
    double gamma = 0.0;  // epsilon / (4w)
    /// True when the loop could not reach the target error: either the
    /// advantage supply dried up early or the round budget ran out — the
    /// width promise (or the learner) is at fault.
    bool contract_violation = false;
};

uint64_t pac_round_budget(uint64_t w, double epsilon);

/** Realizable-case learner for targets promised to be width-w thresholds over
 *  a negation-closed class. Runs the clipped-residual loop with advantage goal
 *  epsilon/(4w), no rebalancing, stopping at measured error <= epsilon. While
 *  the error exceeds epsilon some class member keeps advantage >= epsilon/(2w)
 *  (majority-discriminator argument), so a faithful agnostic learner never
 *  stalls within the round budget. */
PacResult pac_learn_threshold(const ExampleDistribution& a,
                              const WeakLearnerHandle& agnostic_c, const PacParams& p,
                              uint64_t seed);

struct DnfLearnParams {
    PacParams pac;  ///< pac.w is required: the threshold-width bound for the formula
    AccessMode access = AccessMode::Dense;
    uint64_t query_budget = UINT64_MAX;
};

struct DnfLearnResult {
    PacResult pac;
    uint64_t queries_used = 0;
};

/** PAC-learns a DNF over the uniform marginal via the threshold learner with
 *  C = parities. An s-term formula satisfies f(x)*(2*#satisfied(x) - 1) >= 1
 *  pointwise and that witness has Fourier 1-norm at most 2s+1, so width
 *  w = 2s+1 always meets the promise. */
DnfLearnResult pac_learn_dnf(const DnfFormula& f, const DnfLearnParams& p, uint64_t seed);

}  // namespace agb
