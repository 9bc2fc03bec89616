#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "agb/function_space.hpp"

namespace agb {

/** Extra round information some learners use. `residual` is the round's label
 *  function expressed on the base instance's domain, and `mass` is the
 *  normalization of a reweighted round marginal (1 when the round marginal is
 *  the base marginal itself). Query-driven learners analyze `residual` under
 *  the base marginal instead of touching the round instance's dense tables. */
struct RoundContext {
    const ExampleDistribution* base = nullptr;
    const BoundedFn* residual = nullptr;
    double mass = 1.0;
    uint64_t round = 0;
};

struct WeakOutcome {
    bool found = false;
    BoundedFn g;
    double advantage = 0.0;  // the learner's own measurement; callers re-measure
    uint64_t queries_used = 0;
    std::string diagnostic;

    static WeakOutcome fail(std::string why) {
        WeakOutcome o;
        o.diagnostic = std::move(why);
        return o;
    }
    static WeakOutcome success(BoundedFn g_, double adv) {
        WeakOutcome o;
        o.found = true;
        o.g = std::move(g_);
        o.advantage = adv;
        return o;
    }
};

/** A weak learner as the boosters consume it. Contract: whenever some concept
 *  in the learner's class has advantage >= alpha on the given instance, invoke
 *  returns a hypothesis with advantage >= gamma (up to the learner's own
 *  estimation confidence). The seed fully determines any internal sampling. */
struct WeakLearnerHandle {
    double alpha = 0.0;
    double gamma = 0.0;
    std::string name;
    std::function<WeakOutcome(const ExampleDistribution&, const RoundContext&, uint64_t)>
        invoke;
};

}  // namespace agb
