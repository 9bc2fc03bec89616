#include "agb/applications.hpp"

#include <cmath>
#include <stdexcept>

namespace agb {

double ThresholdOfClass::raw_sum(uint64_t x) const {
    KahanSum acc;
    for (const BoundedFn& t : terms) acc.add(t(x));
    return acc.value();
}

BoundedFn ThresholdOfClass::to_fn() const {
    Domain dom(n);
    std::vector<double> table(dom.size());
    for (uint64_t x = 0; x < dom.size(); ++x)
        table[x] = static_cast<double>(eval(x));
    return BoundedFn::boolean_from_pm1(n, table);
}

bool DnfFormula::eval_bool(uint64_t x) const {
    for (const DnfTerm& t : terms)
        if ((x & t.pos_mask) == t.pos_mask && (x & t.neg_mask) == 0) return true;
    return false;
}

BoundedFn DnfFormula::to_fn() const {
    Domain dom(n);
    std::vector<double> table(dom.size());
    for (uint64_t x = 0; x < dom.size(); ++x)
        table[x] = static_cast<double>(eval(x));
    return BoundedFn::boolean_from_pm1(n, table);
}

StrongResult weak_to_strong(const ExampleDistribution& a, const WeakFamily& family,
                            double epsilon, double delta, uint64_t seed, BoostMode mode,
                            StrongEngine engine) {
    if (!(epsilon > 0.0 && epsilon <= 0.5))
        throw std::invalid_argument("epsilon must be in (0, 1/2]");
    StrongResult out;
    out.tau = epsilon / 3.0;
    WeakLearnerHandle weak = family(out.tau);
    if (!(weak.gamma > 0.0) || weak.gamma > weak.alpha)
        throw std::invalid_argument("weak family produced an invalid (alpha, gamma) pair");
    BoostParams p;
    p.alpha = weak.alpha;
    p.gamma = weak.gamma;
    p.epsilon = out.tau;
    p.delta = delta;
    p.mode = mode;
    out.boost = engine == StrongEngine::Distance ? a2boost(a, weak, p, seed)
                                                 : aboost(a, weak, p, seed);
    return out;
}

DtResult learn_decision_tree_agnostic(const ExampleDistribution& a, const DtParams& p,
                                      uint64_t seed) {
    if (!a.dist().is_uniform())
        throw std::invalid_argument("the tree learner requires a uniform marginal");
    if (p.s == 0) throw std::invalid_argument("tree size must be positive");

    DtResult out;
    out.tau = p.epsilon / 3.0;
    out.gamma_w = out.tau / (2.0 * static_cast<double>(p.s));

    auto counter = std::make_shared<QueryCounter>();
    counter->budget = p.query_budget;
    WeakFamily family = [&](double tau) -> WeakLearnerHandle {
        double goal = tau / (2.0 * static_cast<double>(p.s));
        if (p.access == AccessMode::Dense) {
            // Fail exactly at the booster's acceptance threshold so rejection
            // means "nothing useful remains".
            WeakLearnerHandle h = parity_weak_dense(0.75 * goal);
            h.alpha = tau;
            h.gamma = goal;
            return h;
        }
        KmWeakConfig kc;
        kc.gamma = goal;
        kc.alpha = tau;
        kc.shared_counter = counter;
        return km_parity_weak(kc);
    };

    StrongResult strong = weak_to_strong(a, family, p.epsilon, p.delta, seed, p.mode,
                                         StrongEngine::Distance);
    out.boost = std::move(strong.boost);
    out.queries_used = counter->used;
    return out;
}

uint64_t pac_round_budget(uint64_t w, double epsilon) {
    double r = static_cast<double>(w) / epsilon;
    return static_cast<uint64_t>(std::ceil(256.0 / 27.0 * r * r));
}

PacResult pac_learn_threshold(const ExampleDistribution& a,
                              const WeakLearnerHandle& agnostic_c, const PacParams& p,
                              uint64_t seed) {
    if (p.w == 0) throw std::invalid_argument("threshold width must be positive");
    if (!(p.epsilon > 0.0 && p.epsilon <= 0.5))
        throw std::invalid_argument("epsilon must be in (0, 1/2]");
    PacResult out;
    out.gamma = p.epsilon / (4.0 * static_cast<double>(p.w));

    BoostParams bp;
    bp.gamma = out.gamma;
    bp.alpha = std::max(agnostic_c.alpha, out.gamma);
    bp.epsilon = p.epsilon / 2.0;
    bp.delta = p.delta;
    bp.mode = p.mode;
    bp.balancing = false;
    bp.target_error = p.epsilon;
    bp.weak_cap = p.round_budget ? p.round_budget : pac_round_budget(p.w, p.epsilon);

    out.boost = aboost(a, agnostic_c, bp, seed);
    out.contract_violation = !(out.boost.final_error <= p.epsilon);
    return out;
}

DnfLearnResult pac_learn_dnf(const DnfFormula& f, const DnfLearnParams& p, uint64_t seed) {
    if (p.pac.w == 0)
        throw std::invalid_argument("DNF learning needs the threshold-width bound w");
    DnfLearnResult out;
    ExampleDistribution a(BaseDistribution::uniform(f.n), f.to_fn());
    double gamma = p.pac.epsilon / (4.0 * static_cast<double>(p.pac.w));

    auto counter = std::make_shared<QueryCounter>();
    counter->budget = p.query_budget;
    WeakLearnerHandle weak;
    if (p.access == AccessMode::Dense) {
        weak = parity_weak_dense(0.75 * gamma);
        weak.alpha = weak.gamma = gamma;
    } else {
        KmWeakConfig kc;
        kc.gamma = gamma;
        kc.shared_counter = counter;
        weak = km_parity_weak(kc);
    }
    out.pac = pac_learn_threshold(a, weak, p.pac, seed);
    out.queries_used = counter->used;
    return out;
}

}  // namespace agb
