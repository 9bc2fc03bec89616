#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "agb/rng.hpp"
#include "agb/wht.hpp"

using namespace agb;

TEST_CASE("counter generator is reproducible and stream-separated") {
    CounterRng a(123, 7), b(123, 7), c(123, 8);
    bool any_diff = false;
    for (int i = 0; i < 64; ++i) {
        uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        if (va != c.next_u64()) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("derived streams separate sibling consumers deterministically") {
    uint64_t s1 = derive_stream(42, {1, 0});
    uint64_t s2 = derive_stream(42, {1, 1});
    uint64_t s3 = derive_stream(42, {2, 0});
    CHECK(s1 == derive_stream(42, {1, 0}));
    CHECK(s1 != s2);
    CHECK(s1 != s3);
    CHECK(s2 != s3);
    CHECK(derive_stream(43, {1, 0}) != s1);
}

TEST_CASE("unit draws stay in range with a plausible mean") {
    CounterRng rng(5, 0);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double u = rng.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / 20000 - 0.5) < 0.01);
}

TEST_CASE("bounded draws cover the whole range without bias artifacts") {
    CounterRng rng(9, 2);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 50000; ++i) ++counts[rng.next_below(10)];
    for (int k = 0; k < 10; ++k) {
        CHECK(counts[k] > 4500);
        CHECK(counts[k] < 5500);
    }
    CHECK(rng.next_below(1) == 0);
    CHECK(rng.next_below(0) == 0);
}

TEST_CASE("signed coin respects its probability parameter") {
    CounterRng rng(77, 0);
    int pos = 0;
    for (int i = 0; i < 30000; ++i)
        if (rng.next_pm1(0.3) == 1) ++pos;
    CHECK(std::abs(pos / 30000.0 - 0.3) < 0.01);
}

TEST_CASE("butterfly transform applied twice scales by the length") {
    CounterRng rng(31, 4);
    std::vector<double> v(64);
    for (double& x : v) x = static_cast<double>(static_cast<int>(rng.next_below(21)) - 10);
    std::vector<double> orig = v;
    wht_inplace(v);
    wht_inplace(v);
    for (size_t i = 0; i < v.size(); ++i) CHECK(v[i] == 64.0 * orig[i]);
}

TEST_CASE("transform rejects non-power-of-two lengths") {
    std::vector<double> v(3, 1.0);
    CHECK_THROWS_AS(wht_inplace(v), std::invalid_argument);
    std::vector<double> e;
    CHECK_THROWS_AS(wht_inplace(e), std::invalid_argument);
}

TEST_CASE("spectrum of a parity is its indicator") {
    Domain dom(6);
    auto coefs = fourier_uniform(BoundedFn::parity(6, 0b101001), dom);
    REQUIRE(coefs.size() == 64);
    for (uint64_t a = 0; a < 64; ++a) {
        if (a == 0b101001)
            CHECK(coefs[a] == 1.0);
        else
            CHECK(coefs[a] == 0.0);
    }
}

TEST_CASE("spectrum satisfies the energy identity for bounded tables") {
    CounterRng rng(13, 1);
    Domain dom(8);
    std::vector<double> table(dom.size());
    for (double& t : table) t = 2.0 * rng.next_unit() - 1.0;
    BoundedFn f = BoundedFn::dense(8, table);
    auto coefs = fourier_uniform(f, dom);
    double lhs = 0.0, rhs = 0.0;
    for (uint64_t x = 0; x < dom.size(); ++x) lhs += table[x] * table[x];
    lhs /= static_cast<double>(dom.size());
    for (double c : coefs) rhs += c * c;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("weighted parity correlations match the direct sum") {
    CounterRng rng(17, 6);
    int n = 6;
    Domain dom(n);
    std::vector<double> probs(dom.size());
    double mass = 0.0;
    for (double& p : probs) {
        p = rng.next_unit();
        mass += p;
    }
    for (double& p : probs) p /= mass;
    BaseDistribution d = BaseDistribution::explicit_table(n, probs);
    std::vector<double> label(dom.size());
    for (double& l : label) l = 2.0 * rng.next_unit() - 1.0;

    auto fast = parity_correlations(d, label);
    for (uint64_t a = 0; a < dom.size(); ++a) {
        double direct = 0.0;
        for (uint64_t x = 0; x < dom.size(); ++x) {
            int sgn = (__builtin_popcountll(a & x) & 1) ? -1 : 1;
            direct += probs[x] * label[x] * sgn;
        }
        CHECK(fast[a] == doctest::Approx(direct).epsilon(1e-11));
    }
    std::vector<double> bad(3, 0.0);
    CHECK_THROWS_AS(parity_correlations(d, bad), std::invalid_argument);
}

TEST_CASE("peak scan keeps the first index among equal magnitudes") {
    std::vector<double> v = {0.0, -0.5, 0.5, 0.25};
    PeakCoefficient p = peak_abs(v);
    CHECK(p.index == 1);
    CHECK(p.value == -0.5);
    std::vector<double> z(4, 0.0);
    CHECK(peak_abs(z).index == 0);
    CHECK(peak_abs(z).value == 0.0);
}
