#include "agb/ensemble.hpp"

namespace agb {

std::vector<double> Ensemble::eval_table(const Domain& dom) const {
    if (dom.n < n) throw std::invalid_argument("domain narrower than ensemble");
    std::vector<double> h(dom.size(), 0.0);
    for (const EnsembleStep& s : steps) {
        for (uint64_t x = 0; x < dom.size(); ++x)
            h[x] = project_p1(h[x] + s.weight * s.g(x));
    }
    return h;
}

BoundedFn Ensemble::as_fn() const {
    // Small ensembles evaluate lazily; larger ones materialize once.
    if (steps.size() <= 4) {
        Ensemble copy = *this;
        return BoundedFn::view(n, [copy](uint64_t x) { return copy.eval(x); });
    }
    return BoundedFn::dense(n, eval_table(Domain(n)));
}

BoundedFn Ensemble::sign_fn() const {
    Domain dom(n);
    std::vector<double> h = eval_table(dom);
    std::vector<uint64_t> bits((dom.size() + 63) / 64, 0);
    for (uint64_t x = 0; x < dom.size(); ++x)
        if (sign_pm1(h[x]) > 0) bits[x >> 6] |= uint64_t{1} << (x & 63);
    return BoundedFn::boolean(dom.n, std::move(bits));
}

}  // namespace agb
