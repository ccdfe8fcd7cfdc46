#include "sixv/asymptotics.hpp"
#include "sixv/sampler.hpp"
#include "sixv/symmetric.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sixv;

namespace {

constexpr double q = 0.5;
const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);

}  // namespace

TEST_CASE("limit constants at a reference point") {
    const LimitConstants lc = limit_constants(q, 2.0, 0.25);
    CHECK(lc.a == doctest::Approx(0.17789415).epsilon(1e-7));
    CHECK(lc.a == doctest::Approx(0.177897).epsilon(1e-4));
    CHECK(lc.b1 == doctest::Approx(1.32037).epsilon(1e-5));
    const double s = std::sqrt(2.0);
    CHECK(lc.b1 == doctest::Approx(1 / (2.0 - s) - 1 / (2.0 / q - s)).epsilon(1e-14));
    CHECK(lc.c == doctest::Approx(std::sqrt(2 * lc.a2) / lc.b1).epsilon(1e-14));
}

TEST_CASE("limit constants are positive over the valid region") {
    RngStream rng(3, 0);
    for (int i = 0; i < 100; ++i) {
        const double qq = 0.05 + 0.9 * rng.uniform();
        const double s = 1 / std::sqrt(qq);
        const double u = s + (0.02 + 0.96 * rng.uniform()) * ((s + s * s * s) / 2 - s);
        const double v = (0.02 + 0.96 * rng.uniform()) / u;
        const LimitConstants lc = limit_constants(qq, u, v);
        REQUIRE(lc.a > 0);
        REQUIRE(lc.a2 > 0);
        REQUIRE(lc.b1 > 0);
        REQUIRE(lc.c > 0);
    }
}

TEST_CASE("limit constants reject parameters outside the hypotheses") {
    CHECK_THROWS(limit_constants(q, 1.3, 0.25));   // u below s
    CHECK_THROWS(limit_constants(q, 2.2, 0.25));   // u above (s + s^3)/2
    CHECK_THROWS(limit_constants(q, 2.0, 0.6));    // uv above 1
    CHECK_THROWS(limit_constants(1.5, 2.0, 0.25));
}

TEST_CASE("steepest descent exponent near s") {
    for (const auto& [u, v] : std::vector<std::pair<double, double>>{{2.0, 0.25}, {1.5, 0.6}, {1.8, 0.1}}) {
        const LimitConstants lc = limit_constants(q, u, v);
        const double s = std::sqrt(2.0);
        CHECK(std::abs(steepest_G(s, lc, q, u, v).first) < 1e-14);
        // complex-step derivative: no cancellation error
        const double h = 1e-8;
        const double d1 = steepest_G(cplx(s, h), lc, q, u, v).first.imag() / h;
        CHECK(std::abs(d1) < 1e-10);
        // G(z) = a2 (z - s)^2 + ..., so the second difference over 2 is a2
        // Richardson-extrapolated second difference
        auto G = [&](double z) { return steepest_G(z, lc, q, u, v).first.real(); };
        auto D = [&](double e) { return (G(s + e) - 2 * G(s) + G(s - e)) / (2 * e * e); };
        CHECK(std::abs((4 * D(5e-4) - D(1e-3)) / 3 - lc.a2) < 1e-5);
        // value at the origin
        const double w = 1 / v;
        const double g0 = lc.a * std::log((u - s) / (u - s * q)) + std::log((w - s * q) / (w - s));
        CHECK(steepest_G(0.0, lc, q, u, v).first.real() == doctest::Approx(g0).epsilon(1e-13));
    }
    const LimitConstants lc = limit_constants(q, 2.0, 0.25);
    CHECK_THROWS(steepest_G(2.0, lc, q, 2.0, 0.25));
}

TEST_CASE("contour formula for one level") {
    const ModelParams p = ModelParams::make(q, {2.0}, {});
    const double s = std::sqrt(2.0);
    CHECK(cdf_contour({1}, p) == doctest::Approx((1 - q) / (q * (s * 2.0 - 1))).epsilon(1e-10));
    CHECK(cdf_contour({1}, p) == doctest::Approx(0.546918).epsilon(1e-5));
    const ModelParams p1 = ModelParams::make(q, {2.0}, {0.25});
    CHECK(cdf_contour({1}, p1) == doctest::Approx(measure_prob({{1, {1}}}, p1)).epsilon(1e-10));
    // larger m: P(Y^1_1 <= m) = P(lambda^m has a part equal to 1) at M = 0
    const ModelParams p3 = ModelParams::make(q, {2.0, 2.0, 2.0}, {0.3, 0.3});
    double prev = 0.0;
    for (int m = 1; m <= 3; ++m) {
        const double c = cdf_contour({m}, p3);
        CHECK(c >= prev - 1e-12);
        CHECK(c <= 1.0 + 1e-12);
        prev = c;
    }
}

TEST_CASE("contour formula for two levels against enumeration") {
    const ModelParams p = ModelParams::make(q, {2.0, 2.0, 2.0}, {});
    // Y^1_1 <= 2 and Y^2_2 <= 3: lambda^2 has a part <= 1 and lambda^3 has two parts <= 2
    double direct = 0.0;
    for (int a = 3; a <= 60; ++a)
        for (int x = 2; x <= a; ++x) direct += measure_prob({{2, {x, 1}}, {3, {a, 2, 1}}}, p);
    CHECK(std::abs(cdf_contour({2, 3}, p) - direct) < 1e-10);
    CHECK(cdf_contour({2, 3}, p) == doctest::Approx(0.5840812392).epsilon(1e-9));
    // monotone in each level
    CHECK(cdf_contour({2, 2}, p) <= cdf_contour({2, 3}, p) + 1e-12);
    CHECK(cdf_contour({3, 3}, p) >= cdf_contour({2, 3}, p) - 1e-12);
}

TEST_CASE("contour formula input checks") {
    const ModelParams p = ModelParams::make(q, {2.0, 2.0}, {});
    CHECK_THROWS(cdf_contour({1, 2}, p));        // k > m_1
    CHECK_THROWS(cdf_contour({3}, p));           // beyond N
    CHECK_THROWS(cdf_contour({1}, ModelParams::make(q, {2.0, 1.9}, {})));  // inhomogeneous
    CHECK_THROWS(cdf_contour({1}, p, ContourSpec{cplx(2.0, 0.0), 0.7, 64}));  // encloses s
}

TEST_CASE("Gaussian derivatives and iterated integrals") {
    CHECK(psi(0, 0.0) == doctest::Approx(0.398942).epsilon(1e-6));
    CHECK(psi(-1, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(psi(-2, 0.0) == doctest::Approx(phi0).epsilon(1e-12));
    CHECK(psi(1, 1.0) == doctest::Approx(-std::exp(-0.5) / std::sqrt(2 * std::numbers::pi)).epsilon(1e-12));
    for (int m = -6; m < 6; ++m)
        for (double y = -3.0; y <= 3.0; y += 0.5) {
            const double h = 1e-4;
            const double fd = (psi(m, y + h) - psi(m, y - h)) / (2 * h);
            REQUIRE(std::abs(fd - psi(m + 1, y)) < 1e-6);
        }
    CHECK_THROWS(psi(7, 0.0));
    CHECK_THROWS(psi(-7, 0.0));
}

TEST_CASE("GUE edge distribution") {
    CHECK(gue_edge_cdf({0.0}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(gue_edge_cdf({0.0, 0.0}) == doctest::Approx(0.25 - phi0 * phi0).epsilon(1e-12));
    CHECK(gue_edge_cdf({0.0, 0.0}) == doctest::Approx(0.090845).epsilon(1e-5));
    CHECK(gue_edge_cdf({1.0, -0.5}) == doctest::Approx(gue_edge_cdf({-0.5, 1.0})).epsilon(1e-14));
    CHECK(std::abs(gue_edge_cdf({-9.0, 1.0, 2.0})) < 1e-12);
    CHECK(gue_edge_cdf({9.0, 9.5, 10.0}) == doctest::Approx(1.0).epsilon(1e-9));
    // nondecreasing in each coordinate
    for (int k = 2; k <= 3; ++k)
        for (int j = 0; j < k; ++j) {
            double prev = 0.0;
            for (double t = -3.0; t <= 3.0; t += 0.25) {
                std::vector<double> xs(k, 0.8);
                xs[j] = t;
                const double v = gue_edge_cdf(xs);
                REQUIRE(v >= prev - 1e-12);
                prev = v;
            }
        }
    CHECK_THROWS(gue_edge_cdf({}));
    CHECK_THROWS(gue_edge_cdf(std::vector<double>(6, 0.0)));
}

TEST_CASE("GUE corners by Monte Carlo") {
    RngStream rng(77, 0);
    for (int i = 0; i < 2000; ++i) {
        const auto c = gue_corners(4, rng);
        for (int r = 1; r < 4; ++r)
            for (int t = 0; t < r; ++t) REQUIRE((c[r][t] <= c[r - 1][t] + 1e-12 && c[r - 1][t] <= c[r][t + 1] + 1e-12));
    }
    const int n = 200000;
    const auto s1 = gue_mc_oracle(1, n, rng);
    CHECK(std::abs(empirical_cdf(s1, {0.0}) - 0.5) < 3 / std::sqrt(double(n)));
    const auto s2 = gue_mc_oracle(2, n, rng);
    const double p2 = gue_edge_cdf({0.0, 0.0});
    CHECK(std::abs(empirical_cdf(s2, {0.0, 0.0}) - p2) < 4 * std::sqrt(p2 * (1 - p2) / n));
}
