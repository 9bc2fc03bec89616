#pragma once

#include <vector>

#include "agb/function_space.hpp"

namespace agb {

enum class StepKind { Weak, Balance };

/** One additive update: h <- clip(h + weight * g). */
struct EnsembleStep {
    StepKind kind = StepKind::Weak;
    double weight = 0.0;
    BoundedFn g;
};

/** An ordered, clipped sum of base hypotheses. Evaluation is the left fold
 *  h_0 = 0, h_{i+1}(x) = clip(h_i(x) + w_i g_i(x)); the fold does NOT commute with
 *  flattening into a plain linear combination, so every evaluation replays the
 *  steps in order. */
struct Ensemble {
    int n = 1;
    std::vector<EnsembleStep> steps;

    explicit Ensemble(int n_bits = 1) : n(n_bits) { Domain check(n_bits); }

    double eval(uint64_t x) const {
        double h = 0.0;
        for (const EnsembleStep& s : steps) h = project_p1(h + s.weight * s.g(x));
        return h;
    }

    int sign_at(uint64_t x) const { return sign_pm1(eval(x)); }

    /// Replay all steps over a dense domain (must be at least as wide as n).
    std::vector<double> eval_table(const Domain& dom) const;

    /// The ensemble as a real-valued function view.
    BoundedFn as_fn() const;

    /// sign(eval) materialized as a packed boolean function.
    BoundedFn sign_fn() const;

    size_t count(StepKind k) const {
        size_t c = 0;
        for (const auto& s : steps) c += (s.kind == k);
        return c;
    }
};

}  // namespace agb
