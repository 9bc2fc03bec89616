#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agb/concept_class.hpp"
#include "agb/function_space.hpp"
#include "agb/weak_learner.hpp"

namespace agb {

/// E_D[M].
double density(const Measure& m, const BaseDistribution& d);

/** A Boolean target claimed to disagree with every class approximator on at
 *  least a lambda fraction (under D). */
struct HardnessInstance {
    ExampleDistribution a;  // (D, f), Boolean
    ConceptClass c;
    double lambda = 0.0;
};

struct MeasureWeakResult {
    bool found = false;
    BoundedFn g;
    double advantage = 0.0;  ///< certified advantage of g on (D_M, f)
    double density = 0.0;    ///< mu_D(M)
    std::string diagnostic;
};

/** Adapter from weak agnostic learning to weak approximation under a measure:
 *  runs `weak` on (D, f*M) and certifies the returned hypothesis's advantage
 *  under the normalized measure via E_{D_M}[g f] = E_D[g f M] / mu_D(M).
 *  Whenever mu_D(M) >= 2*(opt + alpha) the instance (D, f*M) is within the
 *  learner's contract, so Success is guaranteed. */
MeasureWeakResult weak_from_measure(const ExampleDistribution& a,
                                    const WeakLearnerHandle& weak, const Measure& m,
                                    uint64_t seed);

struct HardcoreResult {
    bool refuted = false;  ///< hardness claim failed: an approximator was found

    // Refutation branch.
    BoundedFn refuting_sign;
    double refuted_error = 0.0;

    // Certificate branch.
    Measure measure;
    double density = 0.0;
    double gamma = 0.0;
    std::string worst_concept;
    double worst_advantage = 0.0;  ///< max over the class (and negations) on (D_M, f)

    double achieved_error = 0.0;  ///< Pr_D[f != sign(h)] at stop
    double lambda = 0.0;          ///< input hardness level, echoed
    double lambda_opt = 0.0;      ///< exact class disagreement, for cross-checking
    bool lambda_warning = false;  ///< lambda exceeds what the class actually attains
    uint64_t rounds = 0;
    uint64_t balance_updates = 0;
};

/** Hard-core measure construction: the reweighting boosting loop with the
 *  exhaustive class scan as the approximator finder. Each round rebalances,
 *  then checks Pr_D[f != sign(h)] — dropping below lambda refutes hardness and
 *  returns sign(h). Otherwise the candidate measure is M = |clip(f - h)|; when
 *  no class member (or negation) reaches advantage gamma under (D_M, f), M is
 *  returned with density >= 2*lambda - epsilon and the exhaustively verified
 *  advantage bound. */
HardcoreResult construct_hardcore_measure(const HardnessInstance& inst, double gamma,
                                          double epsilon, uint64_t seed);

struct SetResult {
    std::vector<uint64_t> words;  ///< membership bitset, bit k = point k
    uint64_t size = 0;
    double fraction = 0.0;         ///< |S| / |X|
    double worst_advantage = 0.0;  ///< re-verified on the uniform distribution over S
    std::string worst_concept;
    int retries = 0;

    bool contains(uint64_t x) const { return (words[x >> 6] >> (x & 63)) & 1; }
};

/** Independent rounding of a measure into a set: x joins with probability
 *  M(x). Retries (up to 8 fresh seeds) if the draw comes out empty. Requires
 *  the uniform marginal; reports the worst class advantage over uniform-on-S. */
SetResult measure_to_set(const Measure& m, const HardnessInstance& inst, uint64_t seed);

}  // namespace agb
