#include "sixv/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sixv {

ModelParams ModelParams::make(double q, std::vector<double> u, std::vector<double> v, bool strict) {
    ModelParams p;
    p.q = q;
    p.s = 1.0 / std::sqrt(q);
    p.u = std::move(u);
    p.v = std::move(v);
    p.strict = strict;
    return p;
}

std::optional<std::string> validate_params(const ModelParams& p) {
    if (!(p.q > 0.0 && p.q < 1.0)) return fmt::format("q = {} not in (0,1)", p.q);
    if (std::abs(p.s - 1.0 / std::sqrt(p.q)) > 1e-14 * p.s) return std::string("s != q^{-1/2}");
    for (size_t i = 0; i < p.u.size(); ++i)
        if (!(p.u[i] > p.s)) return fmt::format("u_{} <= s", i + 1);
    for (size_t j = 0; j < p.v.size(); ++j)
        if (!(p.v[j] > 0.0)) return fmt::format("v_{} <= 0", j + 1);
    for (size_t i = 0; i < p.u.size(); ++i)
        for (size_t j = 0; j < p.v.size(); ++j)
            if (!(p.u[i] * p.v[j] < 1.0)) return fmt::format("u_{} v_{} >= 1", i + 1, j + 1);
    if (p.strict) {
        const double cap = (p.s + p.s * p.s * p.s) / 2.0;
        for (size_t i = 0; i < p.u.size(); ++i)
            if (!(p.u[i] < cap)) return fmt::format("u_{} >= (s + s^3)/2", i + 1);
    }
    return std::nullopt;
}

void require_valid(const ModelParams& p) {
    if (auto err = validate_params(p)) throw std::invalid_argument("invalid parameters: " + *err);
}

bool is_weakly_decreasing(const Signature& s) {
    return std::is_sorted(s.begin(), s.end(), std::greater<>());
}

bool is_strict(const Signature& s) {
    for (size_t i = 1; i < s.size(); ++i)
        if (s[i] >= s[i - 1]) return false;
    return true;
}

bool is_nonneg(const Signature& s) { return s.empty() || *std::min_element(s.begin(), s.end()) >= 0; }

int multiplicity(const Signature& s, int x) {
    return static_cast<int>(std::count(s.begin(), s.end(), x));
}

std::optional<std::string> check_paths(const PathCollection& w) {
    for (int k = 1; k <= w.N(); ++k) {
        const Signature& row = w.rows[k - 1];
        if (static_cast<int>(row.size()) != k) return fmt::format("row {} has {} parts", k, row.size());
        if (!is_strict(row)) return fmt::format("row {} is not strictly decreasing", k);
        if (!is_nonneg(row)) return fmt::format("row {} has a negative part", k);
        if (k > 1) {
            const Signature& below = w.rows[k - 2];
            for (int i = 0; i < k - 1; ++i)
                if (!(row[i] >= below[i] && below[i] >= row[i + 1]))
                    return fmt::format("rows {} and {} do not interlace", k - 1, k);
        }
    }
    return std::nullopt;
}

namespace {

// Outgoing horizontal arrow of vertex (x, y): one path enters each row from the left.
int horizontal_out(const PathCollection& w, int x, int y) {
    int out = 1;
    if (y >= 2)
        for (int p : w.rows[y - 2]) out += (p <= x);
    for (int p : w.rows[y - 1]) out -= (p <= x);
    return out;
}

}  // namespace

Grid grid_from_rows(const PathCollection& w) {
    int width = 0;
    for (const auto& row : w.rows)
        for (int p : row) width = std::max(width, p);
    Grid g(w.N(), std::vector<ArrowConfig>(width + 1));
    const Signature empty;
    for (int y = 1; y <= w.N(); ++y) {
        const Signature& below = y >= 2 ? w.rows[y - 2] : empty;
        const Signature& above = w.rows[y - 1];
        int j = 1;
        for (int x = 0; x <= width; ++x) {
            ArrowConfig& a = g[y - 1][x];
            a.i1 = multiplicity(below, x);
            a.j1 = j;
            a.i2 = multiplicity(above, x);
            a.j2 = a.i1 + a.j1 - a.i2;
            if (a.j2 < 0 || a.j2 > 1)
                throw std::invalid_argument(fmt::format("no arrow configuration at ({}, {})", x, y));
            j = a.j2;
        }
        if (j != 0) throw std::invalid_argument(fmt::format("row {} leaves a path running right", y));
    }
    return g;
}

PathCollection rows_from_grid(const Grid& g) {
    PathCollection w;
    for (const auto& line : g) {
        Signature row;
        for (int x = static_cast<int>(line.size()) - 1; x >= 0; --x)
            for (int c = 0; c < line[x].i2; ++c) row.push_back(x);
        w.rows.push_back(std::move(row));
    }
    return w;
}

HoleArray extract_holes(const PathCollection& w, int k) {
    if (k < 1 || k > w.N()) throw std::invalid_argument(fmt::format("hole depth {} outside [1, {}]", k, w.N()));
    HoleArray y(k);
    for (int j = 1; j <= k; ++j) {
        y[j - 1].assign(j, std::nullopt);
        int found = 0;
        for (int row = 1; row <= w.N() && found < j; ++row)
            if (horizontal_out(w, j, row) == 0) y[j - 1][found++] = row;
    }
    return y;
}

bool holes_interlace(const HoleArray& y) {
    // Y^{j+1}_i <= Y^j_i <= Y^{j+1}_{i+1}, checked where both entries are finite.
    auto le = [](const std::optional<int>& a, const std::optional<int>& b) { return !a || !b || *a <= *b; };
    for (size_t j = 0; j + 1 < y.size(); ++j)
        for (size_t i = 0; i < y[j].size(); ++i)
            if (!le(y[j + 1][i], y[j][i]) || !le(y[j][i], y[j + 1][i + 1])) return false;
    return true;
}

int height_function(const PathCollection& w, int x, int y) {
    if (x < 0 || y < 1 || y > w.N())
        throw std::invalid_argument(fmt::format("height at ({}, {}) outside the strip", x, y));
    int h = 0;
    for (int p : w.rows[y - 1]) h += (p >= x);
    return h;
}

double delta_parameter(const ModelParams& p) { return (p.s + 1.0 / p.s) / 2.0; }

BigInt gt_count(const std::vector<int>& lam, bool strict) {
    const int n = static_cast<int>(lam.size());
    for (int i = 1; i < n; ++i) {
        if (lam[i] < lam[i - 1]) throw std::invalid_argument("gt_count expects a weakly increasing row");
        if (strict && lam[i] == lam[i - 1]) throw std::invalid_argument("strict gt_count expects a strictly increasing row");
    }
    BigInt num = 1, den = 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            num *= strict ? (lam[j] - lam[i] - (j - i)) : (lam[j] - lam[i] + (j - i));
            den *= (j - i);
        }
    return num / den;
}

namespace {

BigInt count_below(const std::vector<int>& top, bool strict) {
    const size_t n = top.size();
    if (n <= 1) return 1;
    BigInt total = 0;
    std::vector<int> next(n - 1);
    auto rec = [&](auto&& self, size_t i) -> void {
        if (i == n - 1) {
            total += count_below(next, strict);
            return;
        }
        const int lo = strict ? top[i] + 1 : top[i];
        const int hi = strict ? top[i + 1] - 1 : top[i + 1];
        for (int x = lo; x <= hi; ++x) {
            next[i] = x;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return total;
}

}  // namespace

BigInt gt_count_brute(const std::vector<int>& lam, bool strict) { return count_below(lam, strict); }

double gt_volume(const std::vector<double>& lam) {
    double v = 1.0;
    for (size_t i = 0; i < lam.size(); ++i)
        for (size_t j = i + 1; j < lam.size(); ++j)
            if (lam[i] != lam[j]) v *= (lam[j] - lam[i]) / static_cast<double>(j - i);
    return v;
}

std::vector<int> to_increasing(const Signature& s) { return {s.rbegin(), s.rend()}; }
Signature from_increasing(const std::vector<int>& inc) { return {inc.rbegin(), inc.rend()}; }

void write_paths(std::ostream& os, const PathCollection& w) {
    os << "N=" << w.N() << '\n';
    for (const auto& row : w.rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << row[i];
        os << '\n';
    }
}

PathCollection read_paths(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("N=", 0) != 0)
        throw std::runtime_error("path record must start with N=<n>");
    const int n = std::stoi(line.substr(2));
    PathCollection w;
    for (int k = 1; k <= n; ++k) {
        if (!std::getline(is, line)) throw std::runtime_error(fmt::format("path record truncated at row {}", k));
        std::istringstream ls(line);
        Signature row;
        for (int x; ls >> x;) row.push_back(x);
        if (static_cast<int>(row.size()) != k)
            throw std::runtime_error(fmt::format("row {} has {} parts", k, row.size()));
        w.rows.push_back(std::move(row));
    }
    return w;
}

}  // namespace sixv
