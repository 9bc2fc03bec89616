#include "agb/hardcore.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "agb/oracles.hpp"

namespace agb {

double density(const Measure& m, const BaseDistribution& d) {
    if (m.n != d.n())
        throw std::invalid_argument("measure and distribution domains differ");
    KahanSum acc;
    for (uint64_t x = 0; x < d.domain().size(); ++x) acc.add(d.prob(x) * m(x));
    return acc.value();
}

MeasureWeakResult weak_from_measure(const ExampleDistribution& a,
                                    const WeakLearnerHandle& weak, const Measure& m,
                                    uint64_t seed) {
    if (!a.boolean())
        throw std::invalid_argument("the measure adapter needs a Boolean target");
    MeasureWeakResult out;
    out.density = density(m, a.dist());
    if (!(out.density > 0.0)) throw std::invalid_argument("zero-density measure");

    ExampleDistribution am = measure_product(a, m);
    RoundContext ctx;
    ctx.base = &a;
    WeakOutcome wk = weak.invoke(am, ctx, seed);
    if (!wk.found) {
        out.diagnostic = wk.diagnostic;
        return out;
    }
    out.found = true;
    out.g = wk.g;
    // Certify under the normalized measure: E_{D_M}[g f] = E_D[g f M] / mu.
    KahanSum acc;
    const Domain dom = a.domain();
    for (uint64_t x = 0; x < dom.size(); ++x)
        acc.add(a.dist().prob(x) * a.phi()(x) * wk.g(x) * m(x));
    out.advantage = acc.value() / (2.0 * out.density);
    return out;
}

HardcoreResult construct_hardcore_measure(const HardnessInstance& inst, double gamma,
                                          double epsilon, uint64_t seed) {
    (void)seed;  // the dense loop is fully deterministic
    const ExampleDistribution& a = inst.a;
    if (!a.boolean())
        throw std::invalid_argument("hard-core construction needs a Boolean target");
    if (!(gamma > 0.0 && gamma < 0.5))
        throw std::invalid_argument("gamma must be in (0, 1/2)");
    if (!(epsilon > 0.0 && epsilon <= 0.5))
        throw std::invalid_argument("epsilon must be in (0, 1/2]");
    if (!(inst.lambda >= 0.0 && inst.lambda <= 0.5))
        throw std::invalid_argument("lambda must be in [0, 1/2]");

    const Domain dom = a.domain();
    std::vector<double> dtab = a.dist().dense();
    std::vector<double> ftab = a.phi().table(dom);
    std::vector<double> h(dom.size(), 0.0);

    HardcoreResult out;
    out.gamma = gamma;
    out.lambda = inst.lambda;
    OptResult base_opt = exact_opt(a, inst.c);
    out.lambda_opt = base_opt.delta;
    out.lambda_warning = inst.lambda > base_opt.delta + 1e-12;

    const uint64_t balance_cap =
        2 * static_cast<uint64_t>(std::ceil(4.0 / (3.0 * epsilon * epsilon)));
    const uint64_t round_cap = 2 * static_cast<uint64_t>(std::ceil(
                                       (4.0 / epsilon + 1.0) *
                                       (1.0 / (gamma * gamma) + 1.0)));

    auto sign_table_fn = [&]() {
        std::vector<double> t(dom.size());
        for (uint64_t x = 0; x < dom.size(); ++x)
            t[x] = static_cast<double>(sign_pm1(h[x]));
        return BoundedFn::boolean_from_pm1(dom.n, t);
    };

    for (uint64_t round = 0;; ++round) {
        out.rounds = round + 1;

        while (true) {
            KahanSum acc;
            for (uint64_t x = 0; x < dom.size(); ++x)
                acc.add(dtab[x] * project_p1(ftab[x] - h[x]) *
                        -static_cast<double>(sign_pm1(h[x])));
            double adv_b = acc.value() / 2.0;
            if (adv_b < epsilon / 2.0) break;
            for (uint64_t x = 0; x < dom.size(); ++x)
                h[x] = project_p1(h[x] - adv_b * static_cast<double>(sign_pm1(h[x])));
            if (++out.balance_updates > balance_cap)
                throw std::runtime_error(
                    "balance budget exceeded in the hard-core loop");
        }

        KahanSum eacc;
        for (uint64_t x = 0; x < dom.size(); ++x)
            if (sign_pm1(h[x]) != sign_pm1(ftab[x])) eacc.add(dtab[x]);
        double err = eacc.value();
        out.achieved_error = err;

        // A strict margin below lambda refutes the hardness claim; the error
        // routinely lands exactly on lambda, which must not refute.
        if (err < inst.lambda - 1e-9) {
            out.refuted = true;
            out.refuting_sign = sign_table_fn();
            out.refuted_error = err;
            return out;
        }

        std::vector<double> mvals(dom.size());
        for (uint64_t x = 0; x < dom.size(); ++x)
            mvals[x] = std::abs(project_p1(ftab[x] - h[x]));
        Measure m(dom.n, mvals);

        BoundedFn h_fn = BoundedFn::dense(dom.n, h);
        std::optional<Reweighted> rw_opt;
        try {
            rw_opt.emplace(reweighted_dh(a, h_fn));
        } catch (const std::domain_error&) {
            // h matches f exactly and lambda is (near) zero: the claim is
            // vacuous; return the degenerate empty-measure certificate.
            out.measure = std::move(m);
            out.density = 0.0;
            out.worst_concept = "";
            out.worst_advantage = 0.0;
            return out;
        }
        Reweighted& rw = *rw_opt;

        OptResult opt = exact_opt(rw.instance, inst.c);
        if (opt.gamma < gamma) {
            out.measure = std::move(m);
            out.density = rw.mass;
            out.worst_concept = opt.name;
            out.worst_advantage = opt.gamma;
            return out;
        }

        double w = opt.gamma * rw.mass;
        for (uint64_t x = 0; x < dom.size(); ++x)
            h[x] = project_p1(h[x] + w * opt.best(x));

        if (round + 1 >= round_cap)
            throw std::runtime_error("round budget exceeded in the hard-core loop");
    }
}

SetResult measure_to_set(const Measure& m, const HardnessInstance& inst, uint64_t seed) {
    const ExampleDistribution& a = inst.a;
    if (!a.dist().is_uniform())
        throw std::invalid_argument("set rounding requires a uniform marginal");
    const Domain dom = a.domain();
    if (m.n != dom.n)
        throw std::invalid_argument("measure and instance domains differ");

    for (int attempt = 0; attempt < 8; ++attempt) {
        CounterRng rng(seed, derive_stream(seed, {0x5E7u, static_cast<uint64_t>(attempt)}));
        std::vector<uint64_t> words((dom.size() + 63) / 64, 0);
        uint64_t count = 0;
        for (uint64_t x = 0; x < dom.size(); ++x) {
            if (rng.next_unit() < m(x)) {
                words[x >> 6] |= uint64_t{1} << (x & 63);
                ++count;
            }
        }
        if (count == 0) continue;

        SetResult out;
        out.words = std::move(words);
        out.size = count;
        out.fraction = static_cast<double>(count) / static_cast<double>(dom.size());
        out.retries = attempt;

        std::vector<double> ds(dom.size(), 0.0);
        double p = 1.0 / static_cast<double>(count);
        for (uint64_t x = 0; x < dom.size(); ++x)
            if (out.contains(x)) ds[x] = p;
        ExampleDistribution on_set(BaseDistribution::explicit_table(dom.n, std::move(ds)),
                                   a.phi());
        OptResult opt = exact_opt(on_set, inst.c);
        out.worst_advantage = opt.gamma;
        out.worst_concept = opt.name;
        return out;
    }
    throw std::runtime_error("measure rounded to the empty set on every retry");
}

}  // namespace agb
