#include "agb/boosters.hpp"

#include <cmath>
#include <optional>
#include <cstdio>
#include <stdexcept>

#include "agb/oracles.hpp"

namespace agb {

std::string to_string(BoostMode m) {
    return m == BoostMode::Exact ? "exact" : "sampled";
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::BothFailed: return "both_failed";
        case StopReason::RoundCapHit: return "round_cap_hit";
        case StopReason::ZeroResidual: return "zero_residual";
        case StopReason::TargetReached: return "target_reached";
    }
    return "unknown";
}

void BoostParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 0.5))
        throw std::invalid_argument("alpha must be in (0, 1/2]");
    if (!(gamma > 0.0 && gamma <= alpha))
        throw std::invalid_argument("gamma must be in (0, alpha]");
    if (!(epsilon > 0.0 && epsilon <= 0.5))
        throw std::invalid_argument("epsilon must be in (0, 1/2]");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("delta must be in (0, 1)");
    if (target_error && !(*target_error >= 0.0 && *target_error <= 1.0))
        throw std::invalid_argument("target error must be in [0, 1]");
}

uint64_t BoostParams::effective_weak_cap() const {
    if (weak_cap) return weak_cap;
    return 2 * static_cast<uint64_t>(std::ceil(2.0 / (3.0 * gamma * gamma)));
}

uint64_t BoostParams::effective_balance_cap() const {
    if (balance_cap) return balance_cap;
    return 2 * static_cast<uint64_t>(std::ceil(4.0 / (3.0 * epsilon * epsilon)));
}

uint64_t BoostParams::effective_stagnation_window() const {
    if (stagnation_window) return stagnation_window;
    return static_cast<uint64_t>(std::ceil(1.0 / (gamma * gamma)));
}

uint64_t BoostParams::effective_weak_cap_reweighted() const {
    if (weak_cap) return weak_cap;
    double window = static_cast<double>(effective_stagnation_window());
    return 2 * static_cast<uint64_t>(std::ceil((4.0 / epsilon + 1.0) * (window + 1.0)));
}

double BoostParams::confidence_each() const {
    return delta /
           (2.0 * static_cast<double>(effective_weak_cap() + effective_balance_cap()) + 4.0);
}

namespace {

enum class Flavor { Half, Clipped };

std::string fmt2(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

/** Shared per-run machinery: the dense hypothesis state, exact dense
 *  functionals, and the Hoeffding-sized sampled estimators. */
struct LoopCore {
    const ExampleDistribution& a;
    const BoostParams& p;
    uint64_t seed;
    Flavor flavor;
    bool exact;
    Domain dom;
    std::vector<double> dtab;
    std::vector<double> phit;  // dense target, Exact mode only
    std::vector<double> h;
    BoostResult* out;
    uint64_t m_gamma = 0;  // draws per advantage estimate (tolerance gamma/4)
    uint64_t m_eps = 0;    // draws per balance/error estimate (tolerance eps/4)
    uint64_t est_counter = 0;

    LoopCore(const ExampleDistribution& inst, const BoostParams& params, uint64_t sd,
             Flavor fl, BoostResult* result, double delta_each)
        : a(inst),
          p(params),
          seed(sd),
          flavor(fl),
          exact(params.mode == BoostMode::Exact),
          dom(inst.domain()),
          dtab(inst.dist().dense()),
          h(dom.size(), 0.0),
          out(result) {
        if (exact) phit = a.phi().table(dom);
        m_gamma = EstimationBudget(p.gamma / 4.0, delta_each).sample_size();
        m_eps = EstimationBudget(p.epsilon / 4.0, delta_each).sample_size();
    }

    CounterRng fresh_rng() {
        return CounterRng(seed, derive_stream(seed, {0xE571, est_counter++}));
    }

    double resid(double label, double hx) const {
        return flavor == Flavor::Half ? (label - hx) / 2.0 : project_p1(label - hx);
    }

    /// Advantage of g on the round instance (D, residual).
    double advantage_of(const BoundedFn& g) {
        if (exact) {
            KahanSum acc;
            for (uint64_t x = 0; x < dom.size(); ++x)
                acc.add(dtab[x] * resid(phit[x], h[x]) * g(x));
            return acc.value() / 2.0;
        }
        CounterRng rng = fresh_rng();
        KahanSum acc;
        for (uint64_t i = 0; i < m_gamma; ++i) {
            LabeledExample ex = a.sample(rng);
            acc.add(resid(static_cast<double>(ex.b), h[ex.x]) * g(ex.x));
        }
        return acc.value() / (2.0 * static_cast<double>(m_gamma));
    }

    /// Advantage of the rebalancing hypothesis -sign(h) on the round instance.
    double balance_advantage() {
        if (exact) {
            KahanSum acc;
            for (uint64_t x = 0; x < dom.size(); ++x)
                acc.add(dtab[x] * resid(phit[x], h[x]) *
                        -static_cast<double>(sign_pm1(h[x])));
            return acc.value() / 2.0;
        }
        CounterRng rng = fresh_rng();
        KahanSum acc;
        for (uint64_t i = 0; i < m_eps; ++i) {
            LabeledExample ex = a.sample(rng);
            acc.add(resid(static_cast<double>(ex.b), h[ex.x]) *
                    -static_cast<double>(sign_pm1(h[ex.x])));
        }
        return acc.value() / (2.0 * static_cast<double>(m_eps));
    }

    /// Disagreement of sign(h) with the target.
    double error_now() {
        if (exact) {
            KahanSum acc;
            for (uint64_t x = 0; x < dom.size(); ++x)
                acc.add(dtab[x] * phit[x] * static_cast<double>(sign_pm1(h[x])));
            return (1.0 - acc.value()) / 2.0;
        }
        CounterRng rng = fresh_rng();
        KahanSum acc;
        for (uint64_t i = 0; i < m_eps; ++i) {
            LabeledExample ex = a.sample(rng);
            if (ex.b != sign_pm1(h[ex.x])) acc.add(1.0);
        }
        return acc.value() / static_cast<double>(m_eps);
    }

    /// Monitored potential (Exact mode): squared distance for the half-residual
    /// flavor, piecewise energy for the clipped one.
    double potential_now() {
        if (!exact) return std::numeric_limits<double>::quiet_NaN();
        KahanSum acc;
        for (uint64_t x = 0; x < dom.size(); ++x) {
            double u = phit[x] - h[x];
            acc.add(dtab[x] * (flavor == Flavor::Half ? u * u : potential_r(u)));
        }
        return acc.value();
    }

    /// True only when h equals the target on every point (Exact mode).
    bool residual_is_zero() {
        if (!exact) return false;
        for (uint64_t x = 0; x < dom.size(); ++x)
            if (phit[x] != h[x]) return false;
        return true;
    }

    void apply_step(StepKind kind, double weight, const BoundedFn& g, uint64_t round,
                    TranscriptRow extra = {}) {
        for (uint64_t x = 0; x < dom.size(); ++x) h[x] = project_p1(h[x] + weight * g(x));
        out->ensemble.steps.push_back({kind, weight, g});
        TranscriptRow row = extra;
        row.round = round;
        row.kind = kind;
        row.potential = potential_now();
        out->transcript.push_back(row);
    }

    BoundedFn negated_sign_fn() const {
        std::vector<double> t(dom.size());
        for (uint64_t x = 0; x < dom.size(); ++x)
            t[x] = -static_cast<double>(sign_pm1(h[x]));
        return BoundedFn::boolean_from_pm1(dom.n, t);
    }

    BoundedFn sign_fn() const {
        std::vector<double> t(dom.size());
        for (uint64_t x = 0; x < dom.size(); ++x)
            t[x] = static_cast<double>(sign_pm1(h[x]));
        return BoundedFn::boolean_from_pm1(dom.n, t);
    }

    /// Run the inner rebalancing loop. Returns the number of steps applied;
    /// sets *capped when the balance budget was exceeded. last_adv receives the
    /// final (rejecting) measured advantage.
    uint64_t rebalance(uint64_t round, bool* capped, double* last_adv) {
        uint64_t steps = 0;
        *capped = false;
        while (true) {
            double adv_b = balance_advantage();
            *last_adv = adv_b;
            if (adv_b < p.epsilon / 2.0) return steps;
            TranscriptRow extra;
            extra.gamma_hat = adv_b;
            apply_step(StepKind::Balance, adv_b, negated_sign_fn(), round, extra);
            ++steps;
            ++out->balance_updates;
            if (out->balance_updates > p.effective_balance_cap()) {
                *capped = true;
                return steps;
            }
        }
    }
};

BoostResult run_additive(const ExampleDistribution& a0, const WeakLearnerHandle& weak,
                         const BoostParams& p, uint64_t seed, Flavor flavor) {
    p.validate();
    const bool lift = flavor == Flavor::Clipped && !a0.boolean();
    const ExampleDistribution a = lift ? point_split(a0) : a0;

    BoostResult out;
    out.ensemble = Ensemble(a.n());
    out.lifted = lift;
    LoopCore core(a, p, seed, flavor, &out, p.confidence_each());
    const uint64_t weak_cap = p.effective_weak_cap();

    for (uint64_t round = 0;; ++round) {
        out.rounds = round + 1;
        if (core.residual_is_zero()) {
            out.stop = StopReason::ZeroResidual;
            out.stop_detail = "hypothesis matches the target on every point";
            break;
        }

        BoundedFn h_fn = BoundedFn::dense(a.n(), core.h);
        ExampleDistribution round_inst =
            flavor == Flavor::Half ? residual_half(a, h_fn) : residual_clipped(a, h_fn);
        RoundContext ctx;
        ctx.base = &a;
        ctx.residual = &round_inst.phi();
        ctx.mass = 1.0;
        ctx.round = round;

        WeakOutcome wk = weak.invoke(round_inst, ctx, derive_stream(seed, {0xAB0, round}));
        bool accepted = false;
        bool capped = false;
        std::string weak_note = wk.diagnostic;
        if (wk.found) {
            double gamma_hat = core.advantage_of(wk.g);
            if (gamma_hat > 0.75 * p.gamma) {
                TranscriptRow extra;
                extra.gamma_hat = gamma_hat;
                core.apply_step(StepKind::Weak, gamma_hat, wk.g, round, extra);
                ++out.weak_updates;
                accepted = true;
                if (out.weak_updates > weak_cap) {
                    out.stop = StopReason::RoundCapHit;
                    out.stop_detail =
                        "weak-update budget exceeded: accepted advantages are not "
                        "shrinking the potential";
                    break;
                }
            } else {
                weak_note = fmt2("measured advantage %.6g at or below 3*gamma/4 = %.6g",
                                 gamma_hat, 0.75 * p.gamma);
            }
        }

        if (p.target_error) {
            double err = core.error_now();
            if (err <= *p.target_error) {
                out.stop = StopReason::TargetReached;
                out.stop_detail =
                    fmt2("measured error %.6g at or below target %.6g", err, *p.target_error);
                break;
            }
        }

        if (!accepted) {
            if (!p.balancing) {
                out.stop = StopReason::BothFailed;
                out.stop_detail = weak_note.empty() ? "weak learner rejected" : weak_note;
                break;
            }
            double last_adv = 0.0;
            uint64_t steps = core.rebalance(round, &capped, &last_adv);
            if (capped) {
                out.stop = StopReason::RoundCapHit;
                out.stop_detail = "balance-update budget exceeded";
                break;
            }
            if (steps == 0) {
                out.stop = StopReason::BothFailed;
                out.stop_detail =
                    (weak_note.empty() ? std::string("weak learner rejected") : weak_note) +
                    "; " +
                    fmt2("balance advantage %.6g below epsilon/2 = %.6g", last_adv,
                         p.epsilon / 2.0);
                break;
            }
        }
    }

    BoundedFn sign_full = core.sign_fn();
    if (lift) {
        BoundedFn restricted = split_restrict(sign_full, a0.n());
        out.final_sign =
            BoundedFn::boolean_from_pm1(a0.n(), restricted.table(a0.domain()));
    } else {
        out.final_sign = sign_full;
    }
    out.final_error = p.mode == BoostMode::Exact ? delta_gamma(a0, out.final_sign).delta
                                                 : core.error_now();
    return out;
}

}  // namespace

BoostResult a2boost(const ExampleDistribution& a, const WeakLearnerHandle& weak,
                    const BoostParams& p, uint64_t seed) {
    return run_additive(a, weak, p, seed, Flavor::Half);
}

BoostResult aboost(const ExampleDistribution& a, const WeakLearnerHandle& weak,
                   const BoostParams& p, uint64_t seed) {
    return run_additive(a, weak, p, seed, Flavor::Clipped);
}

BoostResult aboostdi(const ExampleDistribution& a, const WeakLearnerHandle& weak_di,
                     const BoostParams& p, uint64_t seed) {
    p.validate();
    if (!a.boolean())
        throw std::invalid_argument(
            "the reweighting booster needs a Boolean target; point-split first");

    BoostResult out;
    out.ensemble = Ensemble(a.n());
    const uint64_t weak_cap = p.effective_weak_cap_reweighted();
    const uint64_t window = p.effective_stagnation_window();
    const double delta_each =
        p.delta / (2.0 * static_cast<double>(weak_cap + p.effective_balance_cap()) + 4.0);
    LoopCore core(a, p, seed, Flavor::Clipped, &out, delta_each);

    double best_err = 1.0;
    uint64_t stagnant = 0;
    for (uint64_t round = 0;; ++round) {
        out.rounds = round + 1;

        bool capped = false;
        double last_adv = 0.0;
        core.rebalance(round, &capped, &last_adv);
        if (capped) {
            out.stop = StopReason::RoundCapHit;
            out.stop_detail = "balance-update budget exceeded";
            break;
        }

        if (core.residual_is_zero()) {
            out.stop = StopReason::ZeroResidual;
            out.stop_detail = "hypothesis matches the target on every point";
            break;
        }

        BoundedFn h_fn = BoundedFn::dense(a.n(), core.h);
        std::optional<Reweighted> rw_opt;
        try {
            rw_opt.emplace(reweighted_dh(a, h_fn));
        } catch (const std::domain_error& e) {
            out.stop = StopReason::ZeroResidual;
            out.stop_detail = e.what();
            break;
        }
        Reweighted& rw = *rw_opt;

        double err = core.error_now();
        if (p.target_error && err <= *p.target_error) {
            out.stop = StopReason::TargetReached;
            out.stop_detail =
                fmt2("measured error %.6g at or below target %.6g", err, *p.target_error);
            break;
        }

        std::vector<double> psi(core.dom.size());
        for (uint64_t x = 0; x < core.dom.size(); ++x)
            psi[x] = project_p1(core.phit.empty() ? a.phi()(x) - core.h[x]
                                                  : core.phit[x] - core.h[x]);
        BoundedFn psi_fn = BoundedFn::dense(a.n(), std::move(psi));
        RoundContext ctx;
        ctx.base = &a;
        ctx.residual = &psi_fn;
        ctx.mass = rw.mass;
        ctx.round = round;

        WeakOutcome wk =
            weak_di.invoke(rw.instance, ctx, derive_stream(seed, {0xD1, round}));
        if (!wk.found) {
            out.stop = StopReason::BothFailed;
            out.stop_detail = wk.diagnostic.empty() ? "weak learner rejected" : wk.diagnostic;
            break;
        }

        double gamma_hat;
        if (core.exact) {
            gamma_hat = delta_gamma(rw.instance, wk.g).gamma;
        } else {
            CounterRng rng = core.fresh_rng();
            KahanSum acc;
            for (uint64_t i = 0; i < core.m_gamma; ++i) {
                LabeledExample ex = rw.instance.sample(rng);
                acc.add(static_cast<double>(ex.b) * wk.g(ex.x));
            }
            gamma_hat = acc.value() / (2.0 * static_cast<double>(core.m_gamma));
        }
        if (gamma_hat <= 0.75 * p.gamma) {
            out.stop = StopReason::BothFailed;
            out.stop_detail =
                fmt2("measured reweighted advantage %.6g at or below 3*gamma/4 = %.6g",
                     gamma_hat, 0.75 * p.gamma);
            break;
        }

        TranscriptRow extra;
        extra.gamma_hat = gamma_hat;
        extra.n_h = rw.mass;
        extra.error_estimate = err;
        extra.smoothness = rw.smoothness;
        core.apply_step(StepKind::Weak, gamma_hat * rw.mass, wk.g, round, extra);
        ++out.weak_updates;
        if (out.weak_updates > weak_cap) {
            out.stop = StopReason::RoundCapHit;
            out.stop_detail =
                "weak-update budget exceeded: accepted advantages are not shrinking "
                "the potential";
            break;
        }

        if (err < best_err - p.epsilon / 4.0) {
            best_err = err;
            stagnant = 0;
        } else if (++stagnant > window) {
            out.stop = StopReason::TargetReached;
            out.stop_detail = fmt2(
                "error plateaued near %.6g (no epsilon/4 improvement in %.0f rounds)", err,
                static_cast<double>(stagnant));
            break;
        }
    }

    out.final_sign = core.sign_fn();
    out.final_error = core.exact ? delta_gamma(a, out.final_sign).delta : core.error_now();
    return out;
}

}  // namespace agb
