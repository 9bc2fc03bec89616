#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "agb/function_space.hpp"

using namespace agb;

TEST_CASE("domain encodes width and size with hard bounds") {
    CHECK(Domain(1).size() == 2);
    CHECK(Domain(10).size() == 1024);
    CHECK(Domain(24).size() == (uint64_t{1} << 24));
    CHECK(Domain(3).mask() == 7);
    CHECK_THROWS_AS(Domain(0), std::invalid_argument);
    CHECK_THROWS_AS(Domain(25), std::invalid_argument);
    CHECK_THROWS_AS(Domain(-1), std::invalid_argument);
}

TEST_CASE("sign readout maps zero and negative zero to +1") {
    CHECK(sign_pm1(0.0) == +1);
    CHECK(sign_pm1(-0.0) == +1);
    CHECK(sign_pm1(1e-300) == +1);
    CHECK(sign_pm1(-1e-300) == -1);
    CHECK(sign_pm1(2.5) == +1);
    CHECK(sign_pm1(-2.5) == -1);
}

TEST_CASE("clip projection is exact at and beyond the boundary") {
    CHECK(project_p1(0.3) == 0.3);
    CHECK(project_p1(1.0) == 1.0);
    CHECK(project_p1(-1.0) == -1.0);
    CHECK(project_p1(1.5) == 1.0);
    CHECK(project_p1(-2.0) == -1.0);
    CHECK(project_p1(0.0) == 0.0);
}

TEST_CASE("clip is a non-expansive map on sampled pairs") {
    // |P(u) - P(v)| <= |u - v| for a contraction onto a convex set.
    CounterRng rng(7, 1);
    for (int i = 0; i < 2000; ++i) {
        double u = 4.0 * rng.next_unit() - 2.0;
        double v = 4.0 * rng.next_unit() - 2.0;
        CHECK(std::abs(project_p1(u) - project_p1(v)) <= std::abs(u - v) + 1e-15);
    }
}

TEST_CASE("piecewise potential matches its closed form") {
    CHECK(potential_r(0.0) == 0.0);
    CHECK(potential_r(0.5) == 0.25);
    CHECK(potential_r(-0.5) == 0.25);
    CHECK(potential_r(1.0) == 1.0);
    CHECK(potential_r(-1.0) == 1.0);
    CHECK(potential_r(1.5) == 2.0);
    CHECK(potential_r(-1.5) == 2.0);
    CHECK(potential_r(2.0) == 3.0);
}

TEST_CASE("potential derivative equals twice the clipped argument") {
    const double fd = 1e-6;
    for (double u = -1.99; u <= 1.99; u += 0.013) {
        double numeric = (potential_r(u + fd) - potential_r(u - fd)) / (2.0 * fd);
        CHECK(std::abs(numeric - 2.0 * project_p1(u)) <= 1e-5);
    }
}

TEST_CASE("three-times-clip dominates the potential on the residual range") {
    // Residuals f - h live in [-2, 2]; the bound is tight at |u| = 2.
    for (double u = -2.0; u <= 2.0; u += 0.01) {
        CHECK(3.0 * std::abs(project_p1(u)) >= potential_r(u) - 1e-12);
    }
}

TEST_CASE("compensated accumulator tracks long-double reference sums") {
    CounterRng rng(11, 3);
    KahanSum acc;
    long double ref = 0.0L;
    for (int i = 0; i < 100000; ++i) {
        double v = (rng.next_unit() - 0.5) * std::pow(10.0, static_cast<double>(i % 7));
        acc.add(v);
        ref += static_cast<long double>(v);
    }
    CHECK(std::abs(acc.value() - static_cast<double>(ref)) <= 1e-9 * (1.0 + std::abs(static_cast<double>(ref))));
}

TEST_CASE("uniform distribution exposes equal masses and a dense table") {
    BaseDistribution d = BaseDistribution::uniform(3);
    CHECK(d.is_uniform());
    CHECK(d.prob(0) == 0.125);
    CHECK(d.prob(7) == 0.125);
    auto t = d.dense();
    REQUIRE(t.size() == 8);
    for (double p : t) CHECK(p == 0.125);
}

TEST_CASE("explicit distribution validates mass and sign") {
    CHECK_NOTHROW(BaseDistribution::explicit_table(1, {0.25, 0.75}));
    CHECK_THROWS_AS(BaseDistribution::explicit_table(1, {0.25, 0.70}), std::invalid_argument);
    CHECK_THROWS_AS(BaseDistribution::explicit_table(1, {-0.1, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(BaseDistribution::explicit_table(2, {0.5, 0.5}), std::invalid_argument);
    // Mass off by just under the tolerance is accepted.
    CHECK_NOTHROW(BaseDistribution::explicit_table(1, {0.5, 0.5 + 0.5e-12}));
    CHECK_THROWS_AS(BaseDistribution::explicit_table(1, {0.5, 0.5 + 1e-11}), std::invalid_argument);
}

TEST_CASE("explicit sampling follows the table") {
    BaseDistribution d = BaseDistribution::explicit_table(2, {0.0, 0.0, 1.0, 0.0});
    CounterRng rng(3, 9);
    for (int i = 0; i < 50; ++i) CHECK(d.sample(rng) == 2);
}

TEST_CASE("dense function validates range within tolerance") {
    CHECK_NOTHROW(BoundedFn::dense(1, {1.0, -1.0}));
    CHECK_NOTHROW(BoundedFn::dense(1, {1.0 + 0.5e-9, -1.0}));
    CHECK_THROWS_AS(BoundedFn::dense(1, {1.1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(BoundedFn::dense(1, {0.0, -1.00001}), std::invalid_argument);
    CHECK_THROWS_AS(BoundedFn::dense(2, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("parity functions evaluate by popcount with an explicit sign") {
    BoundedFn chi = BoundedFn::parity(3, 0b101);
    CHECK(chi(0b000) == 1.0);
    CHECK(chi(0b001) == -1.0);
    CHECK(chi(0b100) == -1.0);
    CHECK(chi(0b101) == 1.0);
    CHECK(chi(0b111) == 1.0);
    BoundedFn neg = BoundedFn::parity(3, 0b101, -1);
    CHECK(neg(0b000) == -1.0);
    CHECK(neg(0b001) == 1.0);
    CHECK(chi.is_boolean());
    CHECK(chi.parity_mask() == 0b101);
    CHECK(neg.parity_sign() == -1);
}

TEST_CASE("evaluation masks inputs to the function's own width") {
    // A function on n bits ignores higher bits, which is exactly the canonical
    // lift to a wider domain.
    BoundedFn chi = BoundedFn::parity(2, 0b11);
    CHECK(chi(0b111) == chi(0b11));
    CHECK(chi(0b100) == chi(0b00));
    BoundedFn d = BoundedFn::dense(1, {0.25, -0.5});
    CHECK(d(2) == 0.25);
    CHECK(d(3) == -0.5);
    auto wide = chi.table(Domain(3));
    REQUIRE(wide.size() == 8);
    CHECK(wide[0b100] == 1.0);
    CHECK(wide[0b110] == -1.0);
}

TEST_CASE("boolean packed-bit functions round-trip through pm1 tables") {
    std::vector<double> pm1 = {1.0, -1.0, 1.0, 1.0};
    BoundedFn f = BoundedFn::boolean_from_pm1(2, pm1);
    CHECK(f.is_boolean());
    for (uint64_t x = 0; x < 4; ++x) CHECK(f(x) == pm1[x]);
    REQUIRE(f.boolean_bits().size() == 1);
    CHECK(f.boolean_bits()[0] == 0b1101);
    CHECK_THROWS_AS(BoundedFn::boolean_from_pm1(1, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("constants and negation preserve structure") {
    BoundedFn c = BoundedFn::constant(2, 0.5);
    CHECK(c(3) == 0.5);
    CHECK(c.constant_value() == 0.5);
    CHECK_FALSE(c.is_boolean());
    CHECK(BoundedFn::constant(2, 1.0).is_boolean());

    BoundedFn nc = negate_fn(c);
    CHECK(nc(0) == -0.5);
    CHECK(nc.kind() == BoundedFn::Kind::Constant);
    BoundedFn np = negate_fn(BoundedFn::parity(3, 5));
    CHECK(np.kind() == BoundedFn::Kind::Parity);
    CHECK(np.parity_sign() == -1);
    CHECK(np(0b001) == 1.0);
}

TEST_CASE("representation accessors reject kind mismatches") {
    BoundedFn c = BoundedFn::constant(2, 0.5);
    CHECK_THROWS_AS(c.parity_mask(), std::logic_error);
    CHECK_THROWS_AS(c.dense_table(), std::logic_error);
    CHECK_THROWS_AS(c.boolean_bits(), std::logic_error);
    BoundedFn chi = BoundedFn::parity(2, 1);
    CHECK_THROWS_AS(chi.constant_value(), std::logic_error);
}

TEST_CASE("inner products and disagreement agree with hand-computed values") {
    BaseDistribution d = BaseDistribution::uniform(2);
    BoundedFn phi = BoundedFn::dense(2, {1.0, 1.0, -1.0, 0.0});
    BoundedFn one = BoundedFn::constant(2, 1.0);
    CHECK(inner_product_d(d, phi, one) == doctest::Approx(0.25).epsilon(1e-15));

    ExampleDistribution a(d, phi);
    DeltaGamma dg = delta_gamma(a, one);
    CHECK(dg.delta == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(dg.gamma == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(dg.delta + dg.gamma == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("weighted inner product respects an explicit marginal") {
    BaseDistribution d = BaseDistribution::explicit_table(1, {0.25, 0.75});
    BoundedFn f = BoundedFn::dense(1, {1.0, -1.0});
    BoundedFn g = BoundedFn::constant(1, 1.0);
    CHECK(inner_product_d(d, f, g) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("potential energy and squared distance match direct sums") {
    BaseDistribution d = BaseDistribution::uniform(1);
    BoundedFn f = BoundedFn::dense(1, {1.0, -0.5});
    BoundedFn h = BoundedFn::dense(1, {-1.0, 0.5});
    // f-h = (2.0, -1.0): R -> (3.0, 1.0), squares -> (4.0, 1.0).
    CHECK(potential_energy(d, f, h) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(squared_distance(d, f, h) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("labeled sampling is deterministic per seed and respects booleanity") {
    ExampleDistribution a(BaseDistribution::uniform(3), BoundedFn::parity(3, 0b011));
    CHECK(a.boolean());
    CounterRng r1(42, 0), r2(42, 0);
    for (int i = 0; i < 100; ++i) {
        LabeledExample e1 = a.sample(r1);
        LabeledExample e2 = a.sample(r2);
        CHECK(e1.x == e2.x);
        CHECK(e1.b == e2.b);
        CHECK(e1.b == (BoundedFn::parity(3, 0b011)(e1.x) > 0 ? 1 : -1));
    }
    // Boolean instances answer label queries deterministically.
    CounterRng r3(1, 1);
    CHECK(a.query(0b001, r3) == -1);
    CHECK(a.query(0b000, r3) == +1);
}

TEST_CASE("noisy label queries have the advertised conditional mean") {
    ExampleDistribution a(BaseDistribution::uniform(1), BoundedFn::dense(1, {0.5, -1.0}));
    CHECK_FALSE(a.boolean());
    CounterRng rng(99, 5);
    long sum = 0;
    const int reps = 40000;
    for (int i = 0; i < reps; ++i) sum += a.query(0, rng);
    double mean = static_cast<double>(sum) / reps;
    CHECK(std::abs(mean - 0.5) < 0.02);
    for (int i = 0; i < 50; ++i) CHECK(a.query(1, rng) == -1);
}

TEST_CASE("measures validate range and mask their argument") {
    Measure m(2, {0.0, 0.5, 1.0, 0.25});
    CHECK(m(1) == 0.5);
    CHECK(m(0b101) == 0.5);
    CHECK_THROWS_AS(Measure(1, {0.5, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(Measure(1, {-0.1, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Measure(2, {0.5}), std::invalid_argument);
}
