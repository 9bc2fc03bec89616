#include "agb/function_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace agb {

Domain::Domain(int n_bits) : n(n_bits) {
    if (n < 1 || n > kMaxDomainBits)
        throw std::invalid_argument("domain width must be in [1, " +
                                    std::to_string(kMaxDomainBits) + "], got " +
                                    std::to_string(n));
}

// ---------------------------------------------------------------------------
// BaseDistribution
// ---------------------------------------------------------------------------

BaseDistribution BaseDistribution::uniform(int n) {
    BaseDistribution d;
    d.domain_ = Domain(n);
    d.uniform_p_ = 1.0 / static_cast<double>(d.domain_.size());
    return d;
}

BaseDistribution BaseDistribution::explicit_table(int n, std::vector<double> probs) {
    BaseDistribution d;
    d.domain_ = Domain(n);
    if (probs.size() != d.domain_.size())
        throw std::invalid_argument("distribution table size mismatch: expected " +
                                    std::to_string(d.domain_.size()) + ", got " +
                                    std::to_string(probs.size()));
    KahanSum total;
    for (double p : probs) {
        if (!(p >= 0.0))
            throw std::invalid_argument("distribution has a negative or NaN mass entry");
        total.add(p);
    }
    if (std::abs(total.value() - 1.0) > kMassTol)
        throw std::invalid_argument("distribution mass sums to " + std::to_string(total.value()) +
                                    ", not 1");
    d.cdf_.resize(probs.size());
    KahanSum run;
    for (size_t i = 0; i < probs.size(); ++i) {
        run.add(probs[i]);
        d.cdf_[i] = run.value();
    }
    d.cdf_.back() = 1.0;
    d.table_ = std::move(probs);
    return d;
}

std::vector<double> BaseDistribution::dense() const {
    if (!table_.empty()) return table_;
    return std::vector<double>(domain_.size(), uniform_p_);
}

uint64_t BaseDistribution::sample(CounterRng& rng) const {
    if (table_.empty()) return rng.next_below(domain_.size());
    double u = rng.next_unit();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<uint64_t>(it - cdf_.begin());
}

// ---------------------------------------------------------------------------
// BoundedFn
// ---------------------------------------------------------------------------

struct BoundedFn::Impl {
    std::vector<double> dense;        // Kind::Dense
    std::vector<uint64_t> bits;       // Kind::Boolean, packed 64 per word
    uint64_t parity_mask = 0;         // Kind::Parity
    int parity_sign = +1;             // Kind::Parity
    double constant = 0.0;            // Kind::Constant
    std::function<double(uint64_t)> view;  // Kind::View
};

BoundedFn::BoundedFn(int n, Kind k, bool boolean, std::shared_ptr<const Impl> impl)
    : n_(n), kind_(k), boolean_(boolean), impl_(std::move(impl)) {}

BoundedFn BoundedFn::dense(int n, std::vector<double> table) {
    Domain dom(n);
    if (table.size() != dom.size())
        throw std::invalid_argument("function table size mismatch: expected " +
                                    std::to_string(dom.size()));
    bool boolean = true;
    for (double v : table) {
        if (!(std::abs(v) <= 1.0 + kRangeTol))
            throw std::invalid_argument("function value out of [-1,1]: " + std::to_string(v));
        if (std::abs(std::abs(v) - 1.0) > kRangeTol) boolean = false;
    }
    auto impl = std::make_shared<Impl>();
    impl->dense = std::move(table);
    return BoundedFn(n, Kind::Dense, boolean, std::move(impl));
}

BoundedFn BoundedFn::boolean(int n, std::vector<uint64_t> bits) {
    Domain dom(n);
    size_t words = (dom.size() + 63) / 64;
    if (bits.size() != words)
        throw std::invalid_argument("boolean word count mismatch: expected " +
                                    std::to_string(words));
    auto impl = std::make_shared<Impl>();
    impl->bits = std::move(bits);
    return BoundedFn(n, Kind::Boolean, true, std::move(impl));
}

BoundedFn BoundedFn::boolean_from_pm1(int n, const std::vector<double>& pm1) {
    Domain dom(n);
    if (pm1.size() != dom.size())
        throw std::invalid_argument("boolean table size mismatch");
    std::vector<uint64_t> bits((dom.size() + 63) / 64, 0);
    for (uint64_t x = 0; x < dom.size(); ++x) {
        double v = pm1[x];
        if (std::abs(std::abs(v) - 1.0) > kRangeTol)
            throw std::invalid_argument("non-boolean value in boolean table: " +
                                        std::to_string(v));
        if (v > 0) bits[x >> 6] |= uint64_t{1} << (x & 63);
    }
    return boolean(n, std::move(bits));
}

BoundedFn BoundedFn::parity(int n, uint64_t mask, int sign) {
    Domain dom(n);
    if (mask > dom.mask())
        throw std::invalid_argument("parity mask exceeds domain width");
    if (sign != +1 && sign != -1) throw std::invalid_argument("parity sign must be ±1");
    auto impl = std::make_shared<Impl>();
    impl->parity_mask = mask;
    impl->parity_sign = sign;
    return BoundedFn(n, Kind::Parity, true, std::move(impl));
}

BoundedFn BoundedFn::constant(int n, double value) {
    if (std::abs(value) > 1.0 + kRangeTol)
        throw std::invalid_argument("constant out of [-1,1]");
    auto impl = std::make_shared<Impl>();
    impl->constant = value;
    bool boolean = std::abs(std::abs(value) - 1.0) <= kRangeTol;
    return BoundedFn(n == 0 ? 1 : n, Kind::Constant, boolean, std::move(impl));
}

BoundedFn BoundedFn::view(int n, std::function<double(uint64_t)> f, bool boolean) {
    Domain dom(n);
    auto impl = std::make_shared<Impl>();
    impl->view = std::move(f);
    return BoundedFn(n, Kind::View, boolean, std::move(impl));
}

double BoundedFn::operator()(uint64_t x) const {
    x &= (uint64_t{1} << n_) - 1;
    switch (kind_) {
        case Kind::Dense:
            return impl_->dense[x];
        case Kind::Boolean:
            return (impl_->bits[x >> 6] >> (x & 63)) & 1 ? +1.0 : -1.0;
        case Kind::Parity:
            return std::popcount(x & impl_->parity_mask) & 1
                       ? -static_cast<double>(impl_->parity_sign)
                       : static_cast<double>(impl_->parity_sign);
        case Kind::Constant:
            return impl_->constant;
        case Kind::View:
            return impl_->view(x);
    }
    return 0.0;
}

std::vector<double> BoundedFn::table(const Domain& dom) const {
    if (dom.n < n_)
        throw std::invalid_argument("cannot materialize a function on a narrower domain");
    std::vector<double> out(dom.size());
    for (uint64_t x = 0; x < dom.size(); ++x) out[x] = (*this)(x);
    return out;
}

uint64_t BoundedFn::parity_mask() const {
    if (kind_ != Kind::Parity) throw std::logic_error("not a parity function");
    return impl_->parity_mask;
}

int BoundedFn::parity_sign() const {
    if (kind_ != Kind::Parity) throw std::logic_error("not a parity function");
    return impl_->parity_sign;
}

double BoundedFn::constant_value() const {
    if (kind_ != Kind::Constant) throw std::logic_error("not a constant function");
    return impl_->constant;
}

const std::vector<double>& BoundedFn::dense_table() const {
    if (kind_ != Kind::Dense) throw std::logic_error("not a dense function");
    return impl_->dense;
}

const std::vector<uint64_t>& BoundedFn::boolean_bits() const {
    if (kind_ != Kind::Boolean) throw std::logic_error("not a packed boolean function");
    return impl_->bits;
}

BoundedFn negate_fn(const BoundedFn& f) {
    switch (f.kind()) {
        case BoundedFn::Kind::Parity:
            return BoundedFn::parity(f.n(), f.parity_mask(), -f.parity_sign());
        case BoundedFn::Kind::Constant:
            return BoundedFn::constant(f.n(), -f.constant_value());
        case BoundedFn::Kind::Boolean: {
            std::vector<uint64_t> bits = f.boolean_bits();
            Domain dom(f.n());
            for (auto& w : bits) w = ~w;
            // Clear padding bits past the domain in the last word.
            if (dom.size() & 63) bits.back() &= (uint64_t{1} << (dom.size() & 63)) - 1;
            return BoundedFn::boolean(f.n(), std::move(bits));
        }
        case BoundedFn::Kind::Dense: {
            std::vector<double> t = f.dense_table();
            for (auto& v : t) v = -v;
            return BoundedFn::dense(f.n(), std::move(t));
        }
        case BoundedFn::Kind::View: {
            BoundedFn inner = f;
            return BoundedFn::view(
                f.n(), [inner](uint64_t x) { return -inner(x); }, f.is_boolean());
        }
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// ExampleDistribution
// ---------------------------------------------------------------------------

ExampleDistribution::ExampleDistribution(BaseDistribution d, BoundedFn phi)
    : dist_(std::move(d)), phi_(std::move(phi)) {
    if (phi_.n() > dist_.n())
        throw std::invalid_argument("label function is wider than the marginal's domain");
    boolean_ = phi_.is_boolean();
}

LabeledExample ExampleDistribution::sample(CounterRng& rng) const {
    uint64_t x = dist_.sample(rng);
    return LabeledExample{x, query(x, rng)};
}

int ExampleDistribution::query(uint64_t x, CounterRng& rng) const {
    double v = phi_(x);
    if (boolean_) return sign_pm1(v);
    return rng.next_pm1((1.0 + v) / 2.0);
}

// ---------------------------------------------------------------------------
// Measure
// ---------------------------------------------------------------------------

Measure::Measure(int n_bits, std::vector<double> values) : n(n_bits) {
    Domain dom(n_bits);
    if (values.size() != dom.size())
        throw std::invalid_argument("measure table size mismatch");
    for (double v : values)
        if (!(v >= -kRangeTol && v <= 1.0 + kRangeTol))
            throw std::invalid_argument("measure value out of [0,1]: " + std::to_string(v));
    m = std::move(values);
}

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------

double inner_product_d(const BaseDistribution& d, const BoundedFn& f, const BoundedFn& g) {
    if (f.n() > d.n() || g.n() > d.n())
        throw std::invalid_argument("function wider than distribution domain");
    KahanSum acc;
    const uint64_t size = d.domain().size();
    for (uint64_t x = 0; x < size; ++x) acc.add(d.prob(x) * f(x) * g(x));
    return acc.value();
}

DeltaGamma delta_gamma(const ExampleDistribution& a, const BoundedFn& h) {
    double ip = inner_product_d(a.dist(), a.phi(), h);
    DeltaGamma out;
    out.delta = (1.0 - ip) / 2.0;
    out.gamma = 0.5 - out.delta;
    return out;
}

double potential_energy(const BaseDistribution& d, const BoundedFn& f, const BoundedFn& h) {
    if (f.n() > d.n() || h.n() > d.n())
        throw std::invalid_argument("function wider than distribution domain");
    KahanSum acc;
    const uint64_t size = d.domain().size();
    for (uint64_t x = 0; x < size; ++x) acc.add(d.prob(x) * potential_r(f(x) - h(x)));
    return acc.value();
}

double squared_distance(const BaseDistribution& d, const BoundedFn& f, const BoundedFn& h) {
    if (f.n() > d.n() || h.n() > d.n())
        throw std::invalid_argument("function wider than distribution domain");
    KahanSum acc;
    const uint64_t size = d.domain().size();
    for (uint64_t x = 0; x < size; ++x) {
        double r = f(x) - h(x);
        acc.add(d.prob(x) * r * r);
    }
    return acc.value();
}

}  // namespace agb
