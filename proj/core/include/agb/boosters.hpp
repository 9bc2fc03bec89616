#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "agb/ensemble.hpp"
#include "agb/function_space.hpp"
#include "agb/weak_learner.hpp"

namespace agb {

/// Exact: inner products and errors are computed densely. Sampled: every
/// decision the loop makes is driven by Hoeffding-sized label-sample estimates
/// (the hypothesis state itself is still tracked densely).
enum class BoostMode { Exact, Sampled };

enum class StopReason {
    BothFailed,    ///< weak learner rejected and no balancing step applies
    RoundCapHit,   ///< update budget exceeded — a contract violation upstream
    ZeroResidual,  ///< h matches the target exactly
    TargetReached  ///< requested error reached, or the error plateaued
};

std::string to_string(BoostMode m);
std::string to_string(StopReason r);

struct BoostParams {
    double alpha = 0.1;
    double gamma = 0.05;
    double epsilon = 0.05;
    double delta = 0.05;  ///< total failure probability budget in Sampled mode
    BoostMode mode = BoostMode::Exact;

    /// Stop once the measured error of sign(h) drops to this value.
    std::optional<double> target_error;

    /// When false, rounds whose weak invocation is rejected stop the loop
    /// immediately instead of rebalancing (used by the PAC-style loops).
    bool balancing = true;

    /// Update budgets; 0 means "derive from gamma/epsilon".
    uint64_t weak_cap = 0;
    uint64_t balance_cap = 0;

    /// Plateau window for the reweighting booster; 0 derives ceil(1/gamma^2).
    uint64_t stagnation_window = 0;

    void validate() const;

    /// 2 * ceil(2 / (3 gamma^2)) — twice the analytic weak-update count.
    uint64_t effective_weak_cap() const;
    /// 2 * ceil(4 / (3 epsilon^2)) — twice the analytic balance count.
    uint64_t effective_balance_cap() const;
    /// ceil(1 / gamma^2) non-improving rounds before the plateau stop.
    uint64_t effective_stagnation_window() const;
    /// Safety cap for the reweighting loop: the plateau rule halts within
    /// (4/eps + 1) * (window + 1) rounds, doubled for slack.
    uint64_t effective_weak_cap_reweighted() const;

    /// Per-estimate confidence so that all sampled estimates in one run hold
    /// simultaneously with probability >= 1 - delta.
    double confidence_each() const;
};

/** One accepted update. Unavailable columns are NaN: potential needs dense
 *  access (Exact mode only); n_h/smoothness/error_estimate are filled by the
 *  reweighting booster's weak rounds. */
struct TranscriptRow {
    uint64_t round = 0;
    StepKind kind = StepKind::Weak;
    double gamma_hat = std::numeric_limits<double>::quiet_NaN();
    double potential = std::numeric_limits<double>::quiet_NaN();
    double n_h = std::numeric_limits<double>::quiet_NaN();
    double error_estimate = std::numeric_limits<double>::quiet_NaN();
    double smoothness = std::numeric_limits<double>::quiet_NaN();
};

struct BoostResult {
    Ensemble ensemble{1};
    BoundedFn final_sign;  ///< sign(h) on the instance's original domain
    StopReason stop = StopReason::BothFailed;
    std::string stop_detail;
    uint64_t rounds = 0;
    uint64_t weak_updates = 0;
    uint64_t balance_updates = 0;
    /// Exact mode: exact disagreement of final_sign. Sampled mode: final estimate.
    double final_error = std::numeric_limits<double>::quiet_NaN();
    /// True when the loop ran on the point-split lift of a non-Boolean target;
    /// the ensemble then lives on the lifted (n+1)-bit domain while final_sign
    /// is restricted back.
    bool lifted = false;
    std::vector<TranscriptRow> transcript;
};

/** Distance-potential booster. Round target: (phi - h)/2. Accepts an update
 *  when the measured advantage exceeds 3*gamma/4, stepping by the measured
 *  advantage; otherwise rebalances against -sign(h) while that advantage stays
 *  at or above epsilon/2. Final guarantee: error <= opt + 2*alpha + epsilon. */
BoostResult a2boost(const ExampleDistribution& a, const WeakLearnerHandle& weak,
                    const BoostParams& p, uint64_t seed);

/** Clipped-residual booster. Round target: clip(f - h); monitored potential is
 *  the piecewise energy. Non-Boolean targets are point-split first. Final
 *  guarantee: error <= opt + alpha + epsilon. */
BoostResult aboost(const ExampleDistribution& a, const WeakLearnerHandle& weak,
                   const BoostParams& p, uint64_t seed);

/** Reweighting booster for distribution-independent weak learners. Each round
 *  first rebalances, then runs the learner on (D_h, f) where D_h upweights by
 *  |clip(f-h)|, stepping by advantage * residual mass. Stops on learner
 *  failure, explicit target, or an error plateau. Final guarantee:
 *  error <= opt / (1 - 2*alpha) + epsilon. */
BoostResult aboostdi(const ExampleDistribution& a, const WeakLearnerHandle& weak_di,
                     const BoostParams& p, uint64_t seed);

}  // namespace agb
