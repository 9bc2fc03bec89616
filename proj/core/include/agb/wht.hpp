#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "agb/function_space.hpp"

namespace agb {

/** In-place Walsh-Hadamard butterfly (unnormalized):
 *  out[a] = sum_x in[x] * (-1)^{popcount(a & x)}.  O(n * 2^n). */
inline void wht_inplace(std::vector<double>& v) {
    const size_t len = v.size();
    if (len == 0 || (len & (len - 1)) != 0)
        throw std::invalid_argument("transform length must be a power of two");
    for (size_t half = 1; half < len; half <<= 1) {
        for (size_t block = 0; block < len; block += half << 1) {
            for (size_t i = block; i < block + half; ++i) {
                double a = v[i];
                double b = v[i + half];
                v[i] = a + b;
                v[i + half] = a - b;
            }
        }
    }
}

/** Spectrum under the uniform distribution: coef[a] = E_U[f * chi_a]. */
inline std::vector<double> fourier_uniform(const BoundedFn& f, const Domain& dom) {
    std::vector<double> v = f.table(dom);
    wht_inplace(v);
    const double inv = 1.0 / static_cast<double>(dom.size());
    for (double& c : v) c *= inv;
    return v;
}

/** Signed correlations with every parity under an arbitrary marginal:
 *  out[a] = <label, chi_a>_D = sum_x D(x) label(x) chi_a(x).
 *  (For uniform D this equals the spectrum.) */
inline std::vector<double> parity_correlations(const BaseDistribution& d,
                                               const std::vector<double>& label_table) {
    if (label_table.size() != d.domain().size())
        throw std::invalid_argument("label table does not match the distribution's domain");
    std::vector<double> v(label_table.size());
    for (uint64_t x = 0; x < v.size(); ++x) v[x] = d.prob(x) * label_table[x];
    wht_inplace(v);
    return v;
}

/** Index and value of the largest-magnitude entry. */
struct PeakCoefficient {
    uint64_t index = 0;
    double value = 0.0;
};

inline PeakCoefficient peak_abs(const std::vector<double>& coefs) {
    PeakCoefficient best;
    for (uint64_t a = 0; a < coefs.size(); ++a) {
        if (std::abs(coefs[a]) > std::abs(best.value)) {
            best.index = a;
            best.value = coefs[a];
        }
    }
    return best;
}

}  // namespace agb
