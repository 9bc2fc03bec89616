#include "agb/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "agb/wht.hpp"

namespace agb {

EstimationBudget::EstimationBudget(double tol, double conf) : tolerance(tol), confidence(conf) {
    if (!(tol > 0.0 && tol < 1.0))
        throw std::invalid_argument("estimation tolerance must be in (0,1)");
    if (!(conf > 0.0 && conf < 1.0))
        throw std::invalid_argument("estimation confidence must be in (0,1)");
}

uint64_t EstimationBudget::sample_size() const {
    double m = std::ceil(std::log(2.0 / confidence) / (2.0 * tolerance * tolerance));
    return static_cast<uint64_t>(m);
}

MembershipOracle::MembershipOracle(const ExampleDistribution& a, uint64_t seed, uint64_t stream,
                                   uint64_t budget)
    : a_(&a), rng_(seed, stream), budget_(budget) {}

int MembershipOracle::query(uint64_t x) {
    if (used_ >= budget_) throw std::runtime_error("query budget exhausted");
    ++used_;
    return a_->query(x, rng_);
}

std::vector<LabeledExample> draw_examples(const ExampleDistribution& a, uint64_t m,
                                          CounterRng& rng) {
    std::vector<LabeledExample> out;
    out.reserve(m);
    for (uint64_t i = 0; i < m; ++i) out.push_back(a.sample(rng));
    return out;
}

ExampleDistribution residual_half(const ExampleDistribution& a, const BoundedFn& h) {
    BoundedFn phi = a.phi();
    BoundedFn hh = h;
    auto fn = [phi, hh](uint64_t x) { return (phi(x) - hh(x)) / 2.0; };
    return ExampleDistribution(a.dist(), BoundedFn::view(a.n(), fn, false));
}

ExampleDistribution residual_clipped(const ExampleDistribution& a, const BoundedFn& h) {
    if (!a.boolean())
        throw std::invalid_argument(
            "clipped residual requires boolean labels; split the points first");
    BoundedFn f = a.phi();
    BoundedFn hh = h;
    auto fn = [f, hh](uint64_t x) { return project_p1(f(x) - hh(x)); };
    return ExampleDistribution(a.dist(), BoundedFn::view(a.n(), fn, false));
}

ExampleDistribution point_split(const ExampleDistribution& a) {
    int n = a.n();
    Domain wide(n + 1);  // throws if it would exceed the domain cap
    const uint64_t half = uint64_t{1} << n;
    std::vector<double> probs(wide.size(), 0.0);
    for (uint64_t x = 0; x < half; ++x) {
        double p = a.dist().prob(x);
        double v = a.phi()(x);
        double plus = p * (1.0 + v) / 2.0;
        double minus = p * (1.0 - v) / 2.0;
        probs[x] = plus < 0.0 ? 0.0 : plus;
        probs[x | half] = minus < 0.0 ? 0.0 : minus;
    }
    // Label is +1 exactly on the low copy: the character of the extra bit.
    BoundedFn label = BoundedFn::parity(n + 1, half, +1);
    return ExampleDistribution(BaseDistribution::explicit_table(n + 1, std::move(probs)),
                               std::move(label));
}

BoundedFn split_restrict(const BoundedFn& h_split, int original_n) {
    Domain dom(original_n);
    BoundedFn h = h_split;
    uint64_t mask = dom.mask();
    return BoundedFn::view(
        original_n, [h, mask](uint64_t x) { return h(x & mask); }, h_split.is_boolean());
}

Reweighted reweighted_dh(const ExampleDistribution& a, const BoundedFn& h) {
    if (!a.boolean())
        throw std::invalid_argument(
            "residual reweighting requires boolean labels; split the points first");
    const uint64_t size = a.domain().size();
    std::vector<double> w(size);
    KahanSum total;
    for (uint64_t x = 0; x < size; ++x) {
        double r = std::abs(project_p1(a.phi()(x) - h(x)));
        w[x] = a.dist().prob(x) * r;
        total.add(w[x]);
    }
    double mass = total.value();
    if (mass <= 1e-15)
        throw std::domain_error("zero residual mass: the hypothesis already matches the labels");
    double smooth = 0.0;
    for (uint64_t x = 0; x < size; ++x) {
        if (a.dist().prob(x) > 0.0) {
            double ratio = std::abs(project_p1(a.phi()(x) - h(x))) / mass;
            if (ratio > smooth) smooth = ratio;
        }
        w[x] /= mass;
    }
    Reweighted out{
        ExampleDistribution(BaseDistribution::explicit_table(a.n(), std::move(w)), a.phi()),
        mass, smooth};
    return out;
}

ExampleDistribution measure_product(const ExampleDistribution& a, const Measure& m) {
    if (!a.boolean())
        throw std::invalid_argument("measure products are defined for boolean labels");
    if (m.n != a.n()) throw std::invalid_argument("measure domain width mismatch");
    BoundedFn f = a.phi();
    Measure mm = m;
    auto fn = [f, mm](uint64_t x) { return f(x) * mm(x); };
    return ExampleDistribution(a.dist(), BoundedFn::view(a.n(), fn, false));
}

CorrelationEstimate estimate_correlation(const ExampleDistribution& a, const BoundedFn& g,
                                         const EstimationBudget& budget, CounterRng& rng) {
    if (!g.is_boolean())
        throw std::invalid_argument("correlation estimation requires a boolean hypothesis");
    uint64_t m = budget.sample_size();
    uint64_t mismatches = 0;
    for (uint64_t i = 0; i < m; ++i) {
        LabeledExample e = a.sample(rng);
        if (g.sign_at(e.x) != e.b) ++mismatches;
    }
    CorrelationEstimate out;
    out.err = static_cast<double>(mismatches) / static_cast<double>(m);
    out.corr = 1.0 - 2.0 * out.err;
    out.samples = m;
    return out;
}

OptResult exact_opt(const ExampleDistribution& a, const ConceptClass& c) {
    if (c.n() > a.n()) throw std::invalid_argument("class domain wider than instance domain");
    OptResult best;
    bool have = false;

    if (c.kind() == ConceptClass::Kind::AllParities && c.n() == a.n()) {
        std::vector<double> coefs =
            parity_correlations(a.dist(), a.phi().table(a.domain()));
        for (uint64_t mask = 0; mask < coefs.size(); ++mask) {
            double ip = coefs[mask];
            int sign = ip >= 0.0 ? +1 : -1;
            double mag = std::abs(ip);
            if (!have || mag > best.gamma * 2.0) {
                have = true;
                best.gamma = mag / 2.0;
                best.index = mask;
                best.sign = sign;
            }
        }
        best.delta = 0.5 - best.gamma;
        best.best = BoundedFn::parity(a.n(), best.index, best.sign);
        best.name = (best.sign < 0 ? "-" : "") + c.member_name(best.index);
        return best;
    }

    for (uint64_t i = 0; i < c.size(); ++i) {
        BoundedFn g = c.member(i);
        double ip = inner_product_d(a.dist(), a.phi(), g);
        int sign = +1;
        if (c.negation_closed() && -ip > ip) {
            ip = -ip;
            sign = -1;
        }
        if (!have || ip > best.gamma * 2.0) {
            have = true;
            best.gamma = ip / 2.0;
            best.index = i;
            best.sign = sign;
        }
    }
    if (!have) throw std::invalid_argument("empty concept class");
    best.delta = 0.5 - best.gamma;
    BoundedFn g = c.member(best.index);
    best.best = best.sign > 0 ? g : negate_fn(g);
    best.name = (best.sign < 0 ? "-" : "") + c.member_name(best.index);
    return best;
}

}  // namespace agb
