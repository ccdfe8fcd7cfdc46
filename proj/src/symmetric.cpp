#include "sixv/symmetric.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sixv {

namespace {

double sq_of(double q) { return 1.0 / std::sqrt(q); }

// Transfer the horizontal flow through one row; weight(i1, j1, i2, j2) per column.
template <class W>
double row_product(const Signature& above, const Signature& below, int j_start, W&& weight) {
    int width = 0;
    for (int p : above) width = std::max(width, p);
    for (int p : below) width = std::max(width, p);
    if (!above.empty() && above.back() < 0) return 0.0;
    if (!below.empty() && below.back() < 0) return 0.0;
    std::vector<int> up(width + 1, 0), down(width + 1, 0);
    for (int p : above) ++up[p];
    for (int p : below) ++down[p];
    int j = j_start;
    double w = 1.0;
    for (int x = 0; x <= width; ++x) {
        const int j2 = down[x] + j - up[x];
        if (j2 < 0 || j2 > 1) return 0.0;
        w *= weight(down[x], j, up[x], j2);
        if (w == 0.0) return 0.0;
        j = j2;
    }
    return j == 0 ? w : 0.0;
}

void check_distinct(const std::vector<double>& u, const char* who) {
    for (size_t i = 0; i < u.size(); ++i)
        for (size_t j = i + 1; j < u.size(); ++j)
            if (std::abs(u[i] - u[j]) <= 1e-9 * std::max({std::abs(u[i]), std::abs(u[j]), 1.0}))
                throw std::invalid_argument(fmt::format(
                    "{}: variables {} and {} coincide; use the geometric specialization or perturb them",
                    who, i + 1, j + 1));
}

// Sum over permutations of prod_{a<b} (x_a - q x_b)/(x_a - x_b) * term(x_sigma).
template <class T>
double symmetrize(const std::vector<double>& x, double q, T&& term) {
    const size_t n = x.size();
    if (n > 8) throw std::invalid_argument("symmetrization limited to 8 variables");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> y(n);
    double total = 0.0;
    do {
        for (size_t i = 0; i < n; ++i) y[i] = x[perm[i]];
        double c = 1.0;
        for (size_t a = 0; a < n; ++a)
            for (size_t b = a + 1; b < n; ++b) c *= (y[a] - q * y[b]) / (y[a] - y[b]);
        total += c * term(y);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

int count_zeros(const Signature& nu) { return static_cast<int>(std::count(nu.begin(), nu.end(), 0)); }

// prod over positive parts k of (s^2;q)_{n_k}/(q;q)_{n_k}.
double multiplicity_factor(const Signature& nu, double q) {
    const double s2 = 1.0 / q;
    double f = 1.0;
    for (size_t i = 0; i < nu.size();) {
        size_t j = i;
        while (j < nu.size() && nu[j] == nu[i]) ++j;
        if (nu[i] > 0) f *= qpoch(s2, q, static_cast<int>(j - i)) / qpoch(q, q, static_cast<int>(j - i));
        i = j;
    }
    return f;
}

}  // namespace

double qpoch(double a, double q, int n) {
    double r = 1.0;
    double t = a;
    for (int i = 0; i < n; ++i) {
        r *= 1.0 - t;
        t *= q;
    }
    return r;
}

double vertex_weight(int i1, int j1, int i2, int j2, double u, double q) {
    const double s = sq_of(q);
    const double den = 1.0 - s * u;
    if (j1 == 0 && j2 == 0 && i1 == i2) return (1.0 - s * std::pow(q, i1) * u) / den;
    if (j1 == 0 && j2 == 1 && i1 == i2 + 1) return (1.0 - s * s * std::pow(q, i2)) * u / den;
    if (j1 == 1 && j2 == 1 && i1 == i2) return (u - s * std::pow(q, i1)) / den;
    if (j1 == 1 && j2 == 0 && i2 == i1 + 1) return (1.0 - std::pow(q, i1 + 1)) / den;
    return 0.0;
}

double conj_vertex_weight(int i1, int j1, int i2, int j2, double v, double q) {
    const double s = sq_of(q);
    const double den = 1.0 - s * v;
    if (j1 == 0 && j2 == 1 && i1 == i2 + 1) return (1.0 - std::pow(q, i2 + 1)) * v / den;
    if (j1 == 1 && j2 == 0 && i2 == i1 + 1) return (1.0 - s * s * std::pow(q, i1)) / den;
    return vertex_weight(i1, j1, i2, j2, v, q);
}

double skew_F_row(const Signature& lambda, const Signature& mu, double u, double q) {
    if (lambda.size() != mu.size() + 1) return 0.0;
    return row_product(lambda, mu, 1, [&](int a, int b, int c, int d) { return vertex_weight(a, b, c, d, u, q); });
}

double skew_G_row(const Signature& lambda, const Signature& mu, double v, double q) {
    if (lambda.size() != mu.size()) return 0.0;
    return row_product(lambda, mu, 0,
                       [&](int a, int b, int c, int d) { return conj_vertex_weight(a, b, c, d, v, q); });
}

std::vector<Signature> rows_above(const Signature& below, bool adds_path, int cap) {
    const size_t n = below.size() + (adds_path ? 1 : 0);
    std::vector<Signature> out;
    if (n == 0) {
        out.emplace_back();
        return out;
    }
    Signature cur(n);
    auto rec = [&](auto&& self, size_t i) -> void {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        const int lo = i < below.size() ? below[i] : 0;
        const int hi = i == 0 ? cap : below[i - 1];
        for (int x = lo; x <= hi; ++x) {
            cur[i] = x;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

namespace {

template <class RowW>
std::map<Signature, double> transfer(std::map<Signature, double> states, size_t rows, bool adds_path, int cap,
                                     RowW&& roww) {
    for (size_t r = 0; r < rows; ++r) {
        std::map<Signature, double> next;
        for (const auto& [sig, w] : states)
            for (const Signature& up : rows_above(sig, adds_path, cap)) {
                const double t = roww(up, sig, r);
                if (t != 0.0) next[up] += w * t;
            }
        states = std::move(next);
    }
    return states;
}

int box_for(const Signature& lambda, int box) {
    const int top = lambda.empty() ? 0 : lambda.front();
    if (box < 0) return top;
    if (box < top) throw std::invalid_argument(fmt::format("box {} cannot contain part {}", box, top));
    return box;
}

}  // namespace

std::map<Signature, double> skew_F_table(const Signature& mu, const std::vector<double>& u, double q, int box) {
    return transfer({{mu, 1.0}}, u.size(), true, box,
                    [&](const Signature& a, const Signature& b, size_t r) { return skew_F_row(a, b, u[r], q); });
}

double brute_force_F(const Signature& lambda, const Signature& mu, const std::vector<double>& u, double q,
                     int box) {
    if (lambda.size() != mu.size() + u.size()) return 0.0;
    if (u.empty()) return lambda == mu ? 1.0 : 0.0;
    const int cap = box_for(lambda, box);
    std::vector<double> head(u.begin(), u.end() - 1);
    double total = 0.0;
    for (const auto& [sig, w] : skew_F_table(mu, head, q, cap)) total += w * skew_F_row(lambda, sig, u.back(), q);
    return total;
}

double brute_force_G(const Signature& lambda, const Signature& mu, const std::vector<double>& v, double q,
                     int box) {
    if (lambda.size() != mu.size()) return 0.0;
    if (v.empty()) return lambda == mu ? 1.0 : 0.0;
    const int cap = box_for(lambda, box);
    auto states = transfer({{mu, 1.0}}, v.size() - 1, false, cap,
                           [&](const Signature& a, const Signature& b, size_t r) { return skew_G_row(a, b, v[r], q); });
    double total = 0.0;
    for (const auto& [sig, w] : states) total += w * skew_G_row(lambda, sig, v.back(), q);
    return total;
}

double F_sym(const Signature& lambda, const std::vector<double>& u, double q) {
    if (lambda.size() != u.size()) throw std::invalid_argument("F_sym needs one variable per part");
    check_distinct(u, "F_sym");
    const double s = sq_of(q);
    double pre = std::pow(1.0 - q, static_cast<double>(u.size()));
    for (double x : u) pre /= 1.0 - s * x;
    return pre * symmetrize(u, q, [&](const std::vector<double>& y) {
               double t = 1.0;
               for (size_t i = 0; i < y.size(); ++i) t *= std::pow((y[i] - s) / (1.0 - s * y[i]), lambda[i]);
               return t;
           });
}

double G_sym(const Signature& nu, const std::vector<double>& v, double q) {
    const int n = static_cast<int>(nu.size());
    const int n0 = count_zeros(nu);
    const int N = static_cast<int>(v.size());
    if (N < n - n0) return 0.0;
    check_distinct(v, "G_sym");
    const double s = sq_of(q);
    double pre = std::pow(1.0 - q, N) * qpoch(q, q, n) / (qpoch(q, q, N - n + n0) * qpoch(q, q, n0));
    for (double x : v) pre /= 1.0 - s * x;
    pre *= multiplicity_factor(nu, q);
    if (pre == 0.0) return 0.0;
    const int pos = n - n0;
    const double sq0 = s * std::pow(q, n0);
    return pre * symmetrize(v, q, [&](const std::vector<double>& y) {
               double t = 1.0;
               for (int i = 0; i < pos; ++i)
                   t *= y[i] / (y[i] - s) * std::pow((y[i] - s) / (1.0 - s * y[i]), nu[i]);
               for (int j = pos; j < N; ++j) t *= 1.0 - sq0 * y[j];
               return t;
           });
}

double F_geom(const Signature& mu, double u, int N, double q) {
    if (static_cast<int>(mu.size()) != N) throw std::invalid_argument("F_geom needs N parts");
    const double s = sq_of(q);
    double r = qpoch(q, q, N);
    double x = u;
    for (int i = 0; i < N; ++i, x *= q) {
        const double den = 1.0 - s * x;
        if (den == 0.0) throw std::invalid_argument("F_geom: 1 - s q^{i-1} u vanishes");
        r *= std::pow((x - s) / den, mu[i]) / den;
    }
    return r;
}

double G_geom(const Signature& nu, double u, int N, double q) {
    const int n = static_cast<int>(nu.size());
    const int n0 = count_zeros(nu);
    if (N < n - n0) return 0.0;
    const double s = sq_of(q);
    double r = multiplicity_factor(nu, q);
    if (r == 0.0) return 0.0;
    r *= qpoch(q, q, N) * qpoch(s * u, q, N + n0) * qpoch(q, q, n);
    double x = u;
    for (int i = 0; i < N; ++i, x *= q) {
        const double den = 1.0 - s * x;
        if (den == 0.0) throw std::invalid_argument("G_geom: 1 - s q^{i-1} u vanishes");
        const int part = i < n - n0 ? nu[i] : 0;
        r *= std::pow((x - s) / den, part) / den;
    }
    r /= qpoch(q, q, N - n + n0) * qpoch(s * u, q, n) * qpoch(q, q, n0) * qpoch(s / u, 1.0 / q, n - n0);
    return r;
}

double g_principal(const Signature& nu, double v, int J, double q) {
    const int N = static_cast<int>(nu.size());
    const int n0 = count_zeros(nu);
    for (int i = 1; i < N; ++i)
        if (nu[i] == nu[i - 1] && nu[i] > 0) return 0.0;
    const double s = sq_of(q);
    double r = qpoch(q, q, N) * std::pow(-q, n0 - N) / qpoch(q, q, n0);
    r *= qpoch(s * v, q, N - n0) / qpoch(s * v, q, N);
    r /= qpoch(s / v, 1.0 / q, N - n0);
    r *= qpoch(std::pow(q, J - N + n0 + 1), q, N - n0) * qpoch(s * v * std::pow(q, J), q, n0);
    double x = v;
    for (int j = 0; j < N - n0; ++j, x *= q) {
        const double den = 1.0 - s * x;
        r *= std::pow((x - s) / den, nu[j]) / den;
    }
    return r;
}

double admissibility_ratio(const std::vector<double>& u, const std::vector<double>& v, double q) {
    const double s = sq_of(q);
    double r = 0.0;
    for (double a : u)
        for (double b : v) r = std::max(r, std::abs((a - s) / (1.0 - s * a) * (b - s) / (1.0 - s * b)));
    return r;
}

double boundary_f(const Signature& lambda, const ModelParams& p) {
    const int N = static_cast<int>(lambda.size());
    if (!is_strict(lambda) || (N > 0 && lambda.back() <= 0)) return 0.0;
    const double s = p.s;
    // Initial rows: strict positive nu with nu_i <= lambda_i, weighted by (-s)^{|nu|}.
    std::map<Signature, double> start;
    Signature cur(N);
    auto rec = [&](auto&& self, int i) -> void {
        if (i == N) {
            start[cur] = std::pow(-s, std::accumulate(cur.begin(), cur.end(), 0));
            return;
        }
        const int hi = i == 0 ? lambda[0] : std::min(lambda[i], cur[i - 1] - 1);
        for (int x = N - i; x <= hi; ++x) {
            cur[i] = x;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    const int cap = N > 0 ? lambda[0] : 0;
    double total = 0.0;
    if (p.v.empty()) {
        auto it = start.find(lambda);
        total = it == start.end() ? 0.0 : it->second;
    } else {
        auto states = transfer(std::move(start), p.v.size() - 1, false, cap,
                               [&](const Signature& a, const Signature& b, size_t r) { return skew_G_row(a, b, p.v[r], p.q); });
        for (const auto& [sig, w] : states) total += w * skew_G_row(lambda, sig, p.v.back(), p.q);
    }
    return ((N % 2) ? -1.0 : 1.0) * qpoch(p.q, p.q, N) * total;
}

double partition_Z(const ModelParams& p, int n) {
    if (n < 0) n = p.N();
    double z = qpoch(p.q, p.q, n);
    for (int i = 0; i < n; ++i) {
        const double u = p.u[i];
        z *= (1.0 - u / p.s) / (1.0 - p.s * u);
        for (double v : p.v) z *= (1.0 - p.q * u * v) / (1.0 - u * v);
    }
    return z;
}

double measure_prob(const std::vector<std::pair<int, Signature>>& levels, const ModelParams& p) {
    if (levels.empty()) return 1.0;
    int prev_level = 0;
    Signature prev;
    double w = 1.0;
    for (const auto& [m, mu] : levels) {
        if (m <= prev_level || m > p.N()) throw std::invalid_argument("levels must increase within [1, N]");
        if (static_cast<int>(mu.size()) != m) return 0.0;
        if (!is_strict(mu) || !is_nonneg(mu)) return 0.0;
        std::vector<double> us(p.u.begin() + prev_level, p.u.begin() + m);
        w *= brute_force_F(mu, prev, us, p.q);
        if (w == 0.0) return 0.0;
        prev_level = m;
        prev = mu;
    }
    return w * boundary_f(prev, p) / partition_Z(p, prev_level);
}

namespace {

std::map<Signature, double> G_table(size_t n, const std::vector<double>& v, double q, int cap) {
    return transfer({{Signature(n, 0), 1.0}}, v.size(), false, cap,
                    [&](const Signature& a, const Signature& b, size_t r) { return skew_G_row(a, b, v[r], q); });
}

}  // namespace

TruncatedSum cauchy_lhs(const std::vector<double>& u, const std::vector<double>& v, double q, int L) {
    const auto F = skew_F_table({}, u, q, L);
    const auto G = G_table(u.size(), v, q, L);
    const double r = admissibility_ratio(u, v, q);
    TruncatedSum out;
    double envelope = 0.0;
    for (const auto& [sig, f] : F) {
        auto it = G.find(sig);
        if (it == G.end()) continue;
        const double t = f * it->second;
        out.value += t;
        const int size = std::accumulate(sig.begin(), sig.end(), 0);
        envelope = std::max(envelope, std::abs(t) / std::pow(r, size));
    }
    // Terms decay like r^{|nu|}; at most (n+1)^{N-1} signatures share |nu| = n.
    const int N = static_cast<int>(u.size());
    out.tail_bound = envelope * std::pow(L + 2.0, N - 1) * std::pow(r, L + 1) / std::pow(1.0 - r, N);
    return out;
}

double cauchy_rhs(const std::vector<double>& u, const std::vector<double>& v, double q) {
    const double s = sq_of(q);
    double z = qpoch(q, q, static_cast<int>(u.size()));
    for (double a : u) {
        z /= 1.0 - s * a;
        for (double b : v) z *= (1.0 - q * a * b) / (1.0 - a * b);
    }
    return z;
}

std::pair<TruncatedSum, double> skew_cauchy(const Signature& lambda, const Signature& nu, double u, double v,
                                            double q, int L) {
    if (lambda.size() != nu.size() + 1) throw std::invalid_argument("skew Cauchy needs |lambda| = |nu| + 1 parts");
    const double r = admissibility_ratio({u}, {v}, q);
    TruncatedSum lhs;
    double envelope = 0.0;
    for (const Signature& kappa : rows_above(lambda, false, L)) {
        const double t = skew_G_row(kappa, lambda, v, q) * skew_F_row(kappa, nu, u, q);
        lhs.value += t;
        if (t != 0.0) envelope = std::max(envelope, std::abs(t) / std::pow(r, kappa[0]));
    }
    lhs.tail_bound = envelope * std::pow(r, L + 1) / (1.0 - r);

    double rhs = 0.0;
    const int cap = std::max(lambda.empty() ? 0 : lambda[0], nu.empty() ? 0 : nu[0]);
    Signature mu(nu.size());
    auto rec = [&](auto&& self, size_t i) -> void {
        if (i == mu.size()) {
            rhs += skew_F_row(lambda, mu, u, q) * skew_G_row(nu, mu, v, q);
            return;
        }
        const int hi = i == 0 ? cap : mu[i - 1];
        for (int x = 0; x <= hi; ++x) {
            mu[i] = x;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return {lhs, rhs * (1.0 - q * u * v) / (1.0 - u * v)};
}

}  // namespace sixv
