#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agb/rng.hpp"

namespace agb {

/// Hard cap on domain width; dense tables of 2^24 doubles are the design limit.
inline constexpr int kMaxDomainBits = 24;

/// Tolerance for range/normalization validation of dense inputs.
inline constexpr double kRangeTol = 1e-9;

/// Tolerance on the total mass of an explicit distribution table.
inline constexpr double kMassTol = 1e-12;

/** Hypercube domain {0,1}^n, points encoded as integers 0 .. 2^n-1 (bit k of the
 *  integer is coordinate k). */
struct Domain {
    int n = 0;

    Domain() = default;
    explicit Domain(int n_bits);

    uint64_t size() const { return uint64_t{1} << n; }
    uint64_t mask() const { return size() - 1; }
};

/// Sign with the convention sign(0) = +1; used everywhere a hypothesis is read out.
inline int sign_pm1(double v) { return v >= 0.0 ? +1 : -1; }

/** Neumaier-compensated accumulator; all exact expectations run through this. */
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

/** Probability distribution over a Domain: uniform, or an explicit table
 *  (non-negative, summing to 1 within tolerance). */
class BaseDistribution {
  public:
    static BaseDistribution uniform(int n);
    static BaseDistribution explicit_table(int n, std::vector<double> probs);

    const Domain& domain() const { return domain_; }
    int n() const { return domain_.n; }
    bool is_uniform() const { return table_.empty(); }

    double prob(uint64_t x) const {
        x &= domain_.mask();
        return table_.empty() ? uniform_p_ : table_[x];
    }

    /// Dense probability table (materialized for the uniform case).
    std::vector<double> dense() const;

    /// One draw from the distribution.
    uint64_t sample(CounterRng& rng) const;

  private:
    BaseDistribution() = default;
    Domain domain_;
    double uniform_p_ = 0.0;
    std::vector<double> table_;  // empty <=> uniform
    std::vector<double> cdf_;    // prefix sums for explicit sampling
};

/** A function X -> [-1,1] with an immutable representation. Evaluation masks the
 *  input to the function's own width, so a function on n bits extends to any wider
 *  domain by ignoring the extra high bits (the canonical lift). */
class BoundedFn {
  public:
    enum class Kind { Dense, Boolean, Parity, Constant, View };

    BoundedFn() : BoundedFn(constant(0, 0.0)) {}

    /// Real-valued table indexed by point; validated to [-1,1] within tolerance.
    static BoundedFn dense(int n, std::vector<double> table);
    /// Boolean function from packed bits (bit set => +1).
    static BoundedFn boolean(int n, std::vector<uint64_t> bits);
    /// Boolean function from a ±1 table.
    static BoundedFn boolean_from_pm1(int n, const std::vector<double>& pm1);
    /// sign * chi_mask, chi_mask(x) = (-1)^{popcount(mask & x)}.
    static BoundedFn parity(int n, uint64_t mask, int sign = +1);
    static BoundedFn constant(int n, double value);
    /// Arbitrary view; caller declares boolean-ness. Not serializable.
    static BoundedFn view(int n, std::function<double(uint64_t)> f, bool boolean = false);

    int n() const { return n_; }
    Kind kind() const { return kind_; }
    bool is_boolean() const { return boolean_; }

    double operator()(uint64_t x) const;
    int sign_at(uint64_t x) const { return sign_pm1((*this)(x)); }

    /// Materialize on a (possibly wider) domain.
    std::vector<double> table(const Domain& dom) const;

    // Representation accessors (throw on kind mismatch); used by serialization.
    uint64_t parity_mask() const;
    int parity_sign() const;
    double constant_value() const;
    const std::vector<double>& dense_table() const;
    const std::vector<uint64_t>& boolean_bits() const;

  private:
    struct Impl;
    BoundedFn(int n, Kind k, bool boolean, std::shared_ptr<const Impl> impl);

    int n_;
    Kind kind_;
    bool boolean_;
    std::shared_ptr<const Impl> impl_;
};

/** A labeled draw: point and ±1 label. */
struct LabeledExample {
    uint64_t x = 0;
    int b = +1;
};

/** An agnostic instance A = (D, phi): marginal D over the domain and conditional
 *  label expectation phi(x) = E[b | x] in [-1,1]. Provides sampling and label-query
 *  access; exact computations read dist() and phi() directly. */
class ExampleDistribution {
  public:
    ExampleDistribution(BaseDistribution d, BoundedFn phi);

    const BaseDistribution& dist() const { return dist_; }
    const BoundedFn& phi() const { return phi_; }
    int n() const { return dist_.n(); }
    const Domain& domain() const { return dist_.domain(); }
    bool boolean() const { return boolean_; }

    /// x ~ D, then b = ±1 with E[b|x] = phi(x).
    LabeledExample sample(CounterRng& rng) const;

    /// Label query at a chosen point: ±1 with mean phi(x); deterministic when
    /// the instance is boolean.
    int query(uint64_t x, CounterRng& rng) const;

  private:
    BaseDistribution dist_;
    BoundedFn phi_;
    bool boolean_;
};

/** A measure M: X -> [0,1], kept dense. */
struct Measure {
    int n = 0;
    std::vector<double> m;

    Measure() = default;
    Measure(int n_bits, std::vector<double> values);

    double operator()(uint64_t x) const { return m[x & ((uint64_t{1} << n) - 1)]; }
};

/// Pointwise negation, preserving the representation where possible.
BoundedFn negate_fn(const BoundedFn& f);

// ---------------------------------------------------------------------------
// Core functionals.
// ---------------------------------------------------------------------------

/// <f,g>_D = E_{x~D}[f(x) g(x)], compensated summation over the dense domain.
double inner_product_d(const BaseDistribution& d, const BoundedFn& f, const BoundedFn& g);

/// Disagreement and advantage of hypothesis h on instance a:
/// delta = (1 - <phi,h>_D)/2, gamma = 1/2 - delta.
struct DeltaGamma {
    double delta = 0.0;
    double gamma = 0.0;
};
DeltaGamma delta_gamma(const ExampleDistribution& a, const BoundedFn& h);

/// Clip to [-1,1].
inline double project_p1(double v) { return v > 1.0 ? 1.0 : (v < -1.0 ? -1.0 : v); }

/// Piecewise potential: v^2 inside [-1,1], 2|v|-1 outside (continuously glued;
/// derivative is 2*project_p1(v) everywhere).
inline double potential_r(double v) {
    double av = v < 0 ? -v : v;
    return av <= 1.0 ? v * v : 2.0 * av - 1.0;
}

/// E_{x~D}[ R(f(x) - h(x)) ].
double potential_energy(const BaseDistribution& d, const BoundedFn& f, const BoundedFn& h);

/// Squared distance ||f - h||_D^2 = E_D[(f-h)^2].
double squared_distance(const BaseDistribution& d, const BoundedFn& f, const BoundedFn& h);

}  // namespace agb
