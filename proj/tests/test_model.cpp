#include "sixv/model.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

using namespace sixv;

namespace {

// All path collections with N rows and parts in [0, cap].
void for_each_collection(int N, int cap, const std::function<void(const PathCollection&)>& fn) {
    PathCollection w;
    std::function<void(int)> level = [&](int k) {
        if (k > N) {
            fn(w);
            return;
        }
        Signature row(k);
        std::function<void(int)> part = [&](int i) {
            if (i == k) {
                w.rows.push_back(row);
                level(k + 1);
                w.rows.pop_back();
                return;
            }
            const Signature* below = k > 1 ? &w.rows[k - 2] : nullptr;
            // lambda^k_i in [lambda^{k-1}_i, lambda^{k-1}_{i-1}] and below the previous part
            int lo = below && i < k - 1 ? (*below)[i] : 0;
            int hi = i == 0 ? cap : row[i - 1] - 1;
            if (below && i >= 1) hi = std::min(hi, (*below)[i - 1]);
            for (int x = lo; x <= hi; ++x) {
                row[i] = x;
                part(i + 1);
            }
        };
        part(0);
    };
    level(1);
}

void for_each_increasing(int n, int cap, bool strict, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> v(n);
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            fn(v);
            return;
        }
        for (int x = i == 0 ? 0 : v[i - 1] + (strict ? 1 : 0); x <= cap; ++x) {
            v[i] = x;
            rec(i + 1);
        }
    };
    rec(0);
}

PathCollection four_level_example() {
    // Bottom parts of the top row are (3, 2, 1) with N = 6.
    return {{{3}, {4, 3}, {5, 3, 1}, {6, 3, 2, 1}, {7, 4, 3, 2, 1}, {8, 5, 4, 3, 2, 1}}};
}

}  // namespace

TEST_CASE("validate_params reports the first violated invariant") {
    CHECK_FALSE(validate_params(ModelParams::make(0.5, {2.0}, {0.25})).has_value());
    const auto bad = validate_params(ModelParams::make(0.5, {1.0}, {}));
    REQUIRE(bad.has_value());
    CHECK(bad->find("u_1") != std::string::npos);
    CHECK_FALSE(validate_params(ModelParams::make(0.7, {1.5}, {0.4})).has_value());
    CHECK(validate_params(ModelParams::make(1.2, {2.0}, {})).has_value());
    CHECK(validate_params(ModelParams::make(0.5, {2.0}, {0.6})).has_value());  // uv >= 1
    CHECK(validate_params(ModelParams::make(0.5, {2.0}, {-0.1})).has_value());
    CHECK(validate_params(ModelParams::make(0.5, {2.2}, {}, true)).has_value());  // above (s + s^3)/2
    CHECK_FALSE(validate_params(ModelParams::make(0.5, {2.0}, {}, true)).has_value());
    CHECK_THROWS_AS(require_valid(ModelParams::make(0.5, {1.0}, {})), std::invalid_argument);
}

TEST_CASE("s is derived from q") {
    const ModelParams p = ModelParams::make(0.5, {2.0}, {});
    CHECK(p.s == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("delta parameter") {
    CHECK(delta_parameter(ModelParams::make(0.5, {2.0}, {})) == doctest::Approx(1.06066).epsilon(1e-5));
    CHECK(delta_parameter(ModelParams::make(0.5, {1.6}, {0.1})) ==
          doctest::Approx(delta_parameter(ModelParams::make(0.5, {2.5}, {0.3}))));
    const double near_one = delta_parameter(ModelParams::make(0.999999, {1.5}, {}));
    CHECK(near_one > 1.0);
    CHECK(near_one < 1.0 + 1e-9);
}

TEST_CASE("signature predicates") {
    CHECK(is_strict({3, 1, 0}));
    CHECK_FALSE(is_strict({3, 3, 0}));
    CHECK(is_weakly_decreasing({3, 3, 0}));
    CHECK_FALSE(is_nonneg({2, -1}));
    CHECK(multiplicity({3, 3, 1}, 3) == 2);
}

TEST_CASE("check_paths catches broken interlacing and strictness") {
    CHECK_FALSE(check_paths({{{1}, {1, 0}}}).has_value());
    CHECK(check_paths({{{2}, {1, 0}}}).has_value());
    CHECK(check_paths({{{1}, {1, 1}}}).has_value());
    CHECK(check_paths({{{1}, {2}}}).has_value());
}

TEST_CASE("holes of a two-level configuration") {
    const PathCollection w{{{1}, {1, 0}}};
    const HoleArray y = extract_holes(w, 2);
    REQUIRE(y[0][0].has_value());
    CHECK(*y[0][0] == 1);
    CHECK(y[1][0] == 1);
    CHECK(y[1][1] == 2);
}

TEST_CASE("holes of the three-level example") {
    const HoleArray y = extract_holes(four_level_example(), 3);
    CHECK(y[0][0] == 3);
    CHECK(y[1][0] == 3);
    CHECK(y[1][1] == 4);
    CHECK(y[2][0] == 1);
    CHECK(y[2][1] == 3);
    CHECK(y[2][2] == 4);
    CHECK(holes_interlace(y));
}

TEST_CASE("missing holes are infinite") {
    // The top row has no part at or below column 2 beyond one path, so column 2 has one hole.
    const PathCollection w{{{5}, {6, 4}}};
    const HoleArray y = extract_holes(w, 2);
    CHECK_FALSE(y[0][0].has_value());
    CHECK_FALSE(y[1][1].has_value());
    CHECK_THROWS_AS(extract_holes(w, 3), std::invalid_argument);
    CHECK_THROWS_AS(extract_holes(w, 0), std::invalid_argument);
}

TEST_CASE("hole counts equal part counts at or below the column") {
    for_each_collection(4, 5, [](const PathCollection& w) {
        const HoleArray y = extract_holes(w, 4);
        for (int j = 1; j <= 4; ++j)
            for (int m = 1; m <= 4; ++m) {
                int holes = 0;
                for (const auto& e : y[j - 1]) holes += e && *e <= m;
                int parts = 0;
                for (int p : w.rows[m - 1]) parts += p <= j;
                CHECK(holes == std::min(parts, j));
            }
    });
}

TEST_CASE("holes interlace for every small configuration") {
    int count = 0;
    for_each_collection(4, 6, [&](const PathCollection& w) {
        ++count;
        CHECK(holes_interlace(extract_holes(w, 4)));
    });
    CHECK(count > 1000);
}

TEST_CASE("grid and rows round trip") {
    int count = 0;
    for (int N = 1; N <= 5; ++N)
        for_each_collection(N, 6, [&](const PathCollection& w) {
            ++count;
            const Grid g = grid_from_rows(w);
            // conservation of arrows at every vertex
            for (const auto& row : g)
                for (const ArrowConfig& a : row) REQUIRE(a.i1 + a.j1 == a.i2 + a.j2);
            REQUIRE(rows_from_grid(g) == w);
        });
    CHECK(count > 10000);
}

TEST_CASE("path text format round trip") {
    const PathCollection w = four_level_example();
    std::stringstream ss;
    write_paths(ss, w);
    CHECK(ss.str().rfind("N=6\n", 0) == 0);
    CHECK(read_paths(ss) == w);
    std::stringstream bad("N=2\n1\n");
    CHECK_THROWS(read_paths(bad));
}

TEST_CASE("height function") {
    const PathCollection w{{{1}, {2, 0}, {3, 1, 0}}};
    // Every row y carries y paths across the line above it, all at columns >= 0.
    for (int y = 1; y <= 3; ++y) CHECK(height_function(w, 0, y) == y);
    const PathCollection turns{{{1}, {2, 1}}};
    CHECK(height_function(turns, 2, 1) == 0);
    for_each_collection(3, 5, [](const PathCollection& c) {
        for (int y = 1; y <= 3; ++y)
            for (int x = 0; x <= 6; ++x) {
                const int d = height_function(c, x, y) - height_function(c, x + 1, y);
                REQUIRE((d == 0 || d == 1));
            }
    });
    CHECK_THROWS_AS(height_function(w, -1, 1), std::invalid_argument);
    CHECK_THROWS_AS(height_function(w, 0, 4), std::invalid_argument);
}

TEST_CASE("Gelfand-Tsetlin counts") {
    CHECK(gt_count({0, 1, 2}, false) == 8);
    CHECK(gt_count({3, 3, 3}, false) == 1);
    CHECK(gt_count({0, 2, 4}, true) == 1);
    CHECK(gt_count_brute({0, 1, 2}, false) == 8);
    CHECK(gt_count_brute({0, 2, 4}, true) == 1);
    CHECK_THROWS(gt_count({2, 1}, false));
    CHECK_THROWS(gt_count({1, 1}, true));
}

TEST_CASE("Gelfand-Tsetlin counts match enumeration") {
    for (int n = 1; n <= 4; ++n) {
        for_each_increasing(n, 6, false, [](const std::vector<int>& lam) { REQUIRE(gt_count(lam, false) == gt_count_brute(lam, false)); });
        for_each_increasing(n, 6, true, [](const std::vector<int>& lam) { REQUIRE(gt_count(lam, true) == gt_count_brute(lam, true)); });
    }
}

TEST_CASE("big counts stay exact") {
    std::vector<int> lam;
    for (int i = 0; i < 12; ++i) lam.push_back(10 * i);
    const BigInt c = gt_count(lam, false);
    CHECK(c > BigInt(1) << 64);
    CHECK(c % 1 == 0);
}

TEST_CASE("Gelfand-Tsetlin volume") {
    CHECK(gt_volume({0, 1, 2}) == doctest::Approx(1.0));
    CHECK(gt_volume({2.5, 2.5, 2.5}) == doctest::Approx(1.0));
    CHECK(gt_volume({0, 3}) == doctest::Approx(3.0));
    for (const auto& lam : std::vector<std::vector<double>>{{0, 0.5, 3}, {1, 1, 2, 7}, {-2, 0, 0.1}}) {
        CHECK(gt_volume(lam) > 0.0);
        std::vector<double> shifted = lam;
        for (double& x : shifted) x += 4.25;
        CHECK(gt_volume(shifted) == doctest::Approx(gt_volume(lam)).epsilon(1e-12));
    }
}

TEST_CASE("increasing and decreasing conventions") {
    CHECK(to_increasing({4, 2, 0}) == std::vector<int>{0, 2, 4});
    CHECK(from_increasing({0, 2, 4}) == Signature{4, 2, 0});
}
