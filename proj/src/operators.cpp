#include "sixv/operators.hpp"

#include "sixv/symmetric.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace sixv {

namespace {

Signature staircase(int k) {
    Signature lam(k);
    for (int i = 0; i < k; ++i) lam[i] = k - 1 - i;
    return lam;
}

template <class T>
T fk_generic(const std::vector<T>& z, double q) {
    const double s = 1.0 / std::sqrt(q);
    const size_t k = z.size();
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    T total = 0.0;
    do {
        T c = 1.0;
        for (size_t a = 0; a < k; ++a)
            for (size_t b = a + 1; b < k; ++b)
                c *= (z[perm[a]] - q * z[perm[b]]) / (z[perm[a]] - z[perm[b]]);
        for (size_t i = 0; i < k; ++i) {
            const T x = (z[perm[i]] - s) / (1.0 - s * z[perm[i]]);
            for (size_t e = 0; e < k - 1 - i; ++e) c *= x;
        }
        total += c;
    } while (std::next_permutation(perm.begin(), perm.end()));
    T pre = std::pow(1.0 - q, static_cast<double>(k));
    for (const T& x : z) pre /= 1.0 - s * x;
    return pre * total;
}

void require_regular(const std::vector<double>& u, double q) {
    const double s = 1.0 / std::sqrt(q);
    for (size_t i = 0; i < u.size(); ++i) {
        for (size_t j = i + 1; j < u.size(); ++j)
            if (u[i] == u[j]) throw std::invalid_argument(fmt::format("u_{} = u_{}: singular cross ratio", i + 1, j + 1));
        if (std::abs(u[i] - s * q) <= 1e-12 * s) throw std::invalid_argument(fmt::format("u_{} = s q: singular factor", i + 1));
    }
}

}  // namespace

double fk_eval(int k, const std::vector<double>& u, double q) {
    if (static_cast<int>(u.size()) != k) throw std::invalid_argument("fk_eval needs k variables");
    return F_sym(staircase(k), u, q);
}

double fk_S(int k, double q) {
    const double s = 1.0 / std::sqrt(q);
    return std::pow(s, k * (k - 1) / 2.0) * std::pow((1.0 - q) / (1.0 - s * s), k * (k + 1) / 2.0);
}

double F_with_s(const Signature& lambda, const std::vector<double>& u, double q) {
    const int m = static_cast<int>(u.size());
    if (static_cast<int>(lambda.size()) != m) throw std::invalid_argument("F_with_s needs one variable per part");
    if (!is_strict(lambda) || !is_nonneg(lambda)) throw std::invalid_argument("F_with_s needs a strict signature");
    const double s = 1.0 / std::sqrt(q);
    std::vector<double> head;
    for (double x : u)
        if (std::abs(x - s) > 1e-12 * s) head.push_back(x);
    const int k = m - static_cast<int>(head.size());
    if (k == 0) return F_sym(lambda, u, q);
    for (int t = 0; t < k; ++t)
        if (lambda[m - 1 - t] != t) return 0.0;
    double pre = std::pow(1.0 - q, m) / std::pow(1.0 - s * s, k) * std::pow(s * (1.0 - q) / (1.0 - s * s), k * (k - 1) / 2.0);
    for (double x : head) pre *= std::pow((x - q * s) / (1.0 - s * x), k) / (1.0 - s * x);
    if (head.empty()) return pre;
    // the remaining sum is F for the shifted parts lambda_i - k, without its own prefactor
    Signature rest(lambda.begin(), lambda.begin() + (m - k));
    for (int& x : rest) x -= k;
    double own = std::pow(1.0 - q, static_cast<double>(head.size()));
    for (double x : head) own /= 1.0 - s * x;
    return pre * F_sym(rest, head, q) / own;
}

double apply_D(int k, const MultiFn& fn, const std::vector<double>& u, double q) {
    const int m = static_cast<int>(u.size());
    if (k < 1 || k > m) throw std::invalid_argument(fmt::format("D^{}_{} needs 1 <= k <= m", k, m));
    require_regular(u, q);
    const double s = 1.0 / std::sqrt(q);
    const double fs = fk_S(k, q);
    std::vector<char> in(m, 0);
    std::fill(in.end() - k, in.end(), 1);
    double total = 0.0;
    std::vector<double> uI, shifted;
    do {
        double c = 1.0;
        uI.clear();
        shifted = u;
        for (int i = 0; i < m; ++i) {
            if (in[i]) {
                uI.push_back(u[i]);
                shifted[i] = s;
                for (int j = 0; j < m; ++j)
                    if (!in[j]) c *= (u[j] - q * u[i]) / (u[j] - u[i]);
            } else {
                c *= std::pow((u[i] - s) / (u[i] - s * q), k);
            }
        }
        if (c == 0.0) continue;
        total += c * fk_eval(k, uI, q) / fs * fn(shifted);
    } while (std::next_permutation(in.begin(), in.end()));
    return total;
}

MultiFn compose_D(int k, int m, MultiFn fn, double q) {
    return [k, m, fn = std::move(fn), q](const std::vector<double>& u) {
        if (static_cast<int>(u.size()) < m) throw std::invalid_argument("compose_D: too few variables");
        std::vector<double> head(u.begin(), u.begin() + m);
        auto inner = [&](const std::vector<double>& h) {
            std::vector<double> full = u;
            std::copy(h.begin(), h.end(), full.begin());
            return fn(full);
        };
        return apply_D(k, inner, head, q);
    };
}

double apply_D_chain(const std::vector<int>& ms, const MultiFn& fn, const std::vector<double>& u, double q) {
    const int k = static_cast<int>(ms.size());
    if (k == 0) return fn(u);
    for (int r = 0; r < k; ++r) {
        if (ms[r] < k || (r > 0 && ms[r] < ms[r - 1]) || ms[r] > static_cast<int>(u.size()))
            throw std::invalid_argument("apply_D_chain needs k <= m_1 <= ... <= m_k <= u.size()");
    }
    require_regular(u, q);
    const double s = 1.0 / std::sqrt(q);
    std::vector<int> chosen;
    std::vector<char> used(u.size(), 0);
    double total = 0.0;
    auto rec = [&](auto&& self, int r, double acc) -> void {
        if (r == k) {
            std::vector<double> shifted = u;
            for (int i : chosen) shifted[i] = s;
            total += acc * fn(shifted);
            return;
        }
        for (int i = 0; i < ms[r]; ++i) {
            if (used[i]) continue;
            used[i] = 1;
            double c = 1.0;
            for (int j = 0; j < ms[r]; ++j)
                if (!used[j]) c *= (u[j] - q * u[i]) / (u[j] - u[i]) * (u[j] - s) / (u[j] - s * q);
            const double d = 1.0 - s * u[i];
            c *= (1.0 - q) / d * std::pow((u[i] - s * q) / d, r);
            chosen.push_back(i);
            self(self, r + 1, acc * c);
            chosen.pop_back();
            used[i] = 0;
        }
    };
    rec(rec, 0, 1.0 / fk_S(k, q));
    return total;
}

double ProductFunction::operator()(const std::vector<double>& u) const {
    double f = 1.0;
    for (double x : u) f *= g(cplx(x, 0.0)).real();
    return f;
}

void check_contour(const ContourSpec& gamma, const std::vector<double>& inside, const std::vector<double>& outside,
                   double q) {
    if (!(gamma.radius > 0.0)) throw std::invalid_argument("contour radius must be positive");
    for (double x : inside)
        if (!(std::abs(cplx(x, 0.0) - gamma.center) < gamma.radius))
            throw std::invalid_argument(fmt::format("contour misses the point {}", x));
    for (double x : outside)
        if (!(std::abs(cplx(x, 0.0) - gamma.center) > gamma.radius))
            throw std::invalid_argument(fmt::format("contour encloses the excluded point {}", x));
    if (!((1.0 - q) * std::abs(gamma.center) > (1.0 + q) * gamma.radius))
        throw std::invalid_argument("contour meets its image under z -> q z");
}

namespace {

std::vector<cplx> circle_nodes(const ContourSpec& g, int n, std::vector<cplx>& weights) {
    std::vector<cplx> z(n);
    weights.resize(n);
    for (int t = 0; t < n; ++t) {
        const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * t / n);
        z[t] = g.center + g.radius * e;
        weights[t] = g.radius * e / static_cast<double>(n);  // dz / (2 pi i) per node
    }
    return z;
}

template <class Eval>
QuadratureResult refine(int k, int start, int max_nodes, double tol, Eval&& eval) {
    QuadratureResult res;
    int n = std::max(start, 4);
    res.value = eval(n);
    res.nodes = n;
    res.change = INFINITY;
    const double budget = std::pow(2.0, 27);
    while (2 * n <= max_nodes && std::pow(2.0 * n, k) <= budget) {
        n *= 2;
        const cplx v = eval(n);
        res.change = std::abs(v - res.value);
        res.value = v;
        res.nodes = n;
        if (res.change < tol) break;
    }
    return res;
}

}  // namespace

QuadratureResult circle_integral(int k, const std::function<cplx(int, cplx)>& h,
                                 const std::function<cplx(cplx, cplx)>& cross, const ContourSpec& gamma, double tol,
                                 int max_nodes) {
    auto eval = [&](int n) {
        std::vector<cplx> w;
        const auto z = circle_nodes(gamma, n, w);
        std::vector<std::vector<cplx>> H(k, std::vector<cplx>(n));
        for (int r = 0; r < k; ++r)
            for (int t = 0; t < n; ++t) H[r][t] = h(r, z[t]) * w[t];
        std::vector<cplx> X;
        if (k > 1) {
            X.resize(static_cast<size_t>(n) * n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) X[static_cast<size_t>(a) * n + b] = cross(z[a], z[b]);
        }
        std::vector<int> idx(k);
        auto rec = [&](auto&& self, int r, cplx acc) -> cplx {
            if (r == k) return acc;
            cplx sum = 0.0;
            for (int t = 0; t < n; ++t) {
                cplx c = acc * H[r][t];
                for (int p = 0; p < r; ++p) c *= X[static_cast<size_t>(idx[p]) * n + t];
                idx[r] = t;
                sum += self(self, r + 1, c);
            }
            return sum;
        };
        return rec(rec, 0, cplx(1.0, 0.0));
    };
    return refine(k, gamma.nodes, max_nodes, tol, eval);
}

cplx det_fk_product(const std::vector<cplx>& z, double q) {
    const double s = 1.0 / std::sqrt(q);
    const int k = static_cast<int>(z.size());
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    cplx sum = 0.0;
    do {
        int inversions = 0;
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) inversions += perm[a] > perm[b];
        cplx c = (inversions % 2) ? -1.0 : 1.0;
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) c *= z[perm[a]] - q * z[perm[b]];
        for (int i = 0; i < k; ++i) {
            const cplx x = (z[perm[i]] - s) / (1.0 - s * z[perm[i]]);
            for (int e = 0; e < k - 1 - i; ++e) c *= x;
        }
        sum += c;
    } while (std::next_permutation(perm.begin(), perm.end()));
    cplx pre = std::pow(q, k * (k - 1) / 2.0) * (((k * (k - 1) / 2) % 2) ? -1.0 : 1.0) * std::pow(1.0 - q, k);
    for (int i = 0; i < k; ++i) {
        pre /= 1.0 - s * z[i];
        for (int j = 0; j < k; ++j) pre /= q * z[i] - z[j];
        for (int j = i + 1; j < k; ++j) pre *= z[i] - z[j];
    }
    return pre * sum;
}

cplx det_fk_direct(const std::vector<cplx>& z, double q) {
    const int k = static_cast<int>(z.size());
    Eigen::MatrixXcd m(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = 1.0 / (q * z[i] - z[j]);
    return m.determinant() * fk_generic(z, q);
}

namespace {

std::vector<double> excluded_points(double q) {
    const double s = 1.0 / std::sqrt(q);
    return {s, 0.0, 1.0 / s};
}

}  // namespace

QuadratureResult contour_D(int k, const ProductFunction& pf, const std::vector<double>& u, double q,
                           const ContourSpec& gamma) {
    const int m = static_cast<int>(u.size());
    if (k < 1 || k > m) throw std::invalid_argument("contour_D needs 1 <= k <= m");
    check_contour(gamma, u, excluded_points(q), q);
    const double s = 1.0 / std::sqrt(q);
    const double fs = fk_S(k, q);
    auto single = [&](cplx z) {
        cplx c = std::pow((z - s * q) / (z - s), k) / pf.g(z);
        for (double x : u) c *= (q * z - x) / (z - x);
        return c;
    };
    auto eval = [&](int n) {
        std::vector<cplx> w;
        const auto z = circle_nodes(gamma, n, w);
        std::vector<cplx> h(n);
        for (int t = 0; t < n; ++t) h[t] = single(z[t]) * w[t];
        std::vector<int> idx(k, 0);
        std::vector<cplx> pt(k);
        cplx sum = 0.0;
        const long total = static_cast<long>(std::pow(n, k));
        for (long flat = 0; flat < total; ++flat) {
            long rest = flat;
            cplx c = 1.0;
            for (int r = 0; r < k; ++r) {
                idx[r] = static_cast<int>(rest % n);
                rest /= n;
                pt[r] = z[idx[r]];
                c *= h[idx[r]];
            }
            sum += c * det_fk_product(pt, q);
        }
        return sum / fs;
    };
    QuadratureResult res = refine(k, gamma.nodes, 1 << 13, 1e-11, eval);
    double pre = pf(u) * std::pow(q, -k * (k - 1) / 2.0) * std::pow(pf.g(s).real(), k);
    for (double x : u) pre *= std::pow((x - s) / (x - s * q), k);
    pre /= std::tgamma(k + 1.0);
    res.value *= pre;
    res.change *= std::abs(pre);
    return res;
}

QuadratureResult contour_D_chain(const std::vector<int>& ms, const ProductFunction& pf, const std::vector<double>& u,
                                 double q, const ContourSpec& gamma) {
    const int k = static_cast<int>(ms.size());
    for (int r = 0; r < k; ++r)
        if (ms[r] < k || (r > 0 && ms[r] < ms[r - 1]) || ms[r] > static_cast<int>(u.size()))
            throw std::invalid_argument("contour_D_chain needs k <= m_1 <= ... <= m_k <= u.size()");
    check_contour(gamma, u, excluded_points(q), q);
    const double s = 1.0 / std::sqrt(q);
    auto h = [&](int r, cplx z) {
        const cplx d = 1.0 - s * z;
        cplx c = (1.0 - q) / d * std::pow((z - s * q) / d, r);
        for (int i = 0; i < ms[r]; ++i) c *= (q * z - u[i]) / (z - u[i]);
        c *= std::pow((z - s * q) / (z - s), k - r);
        return c / (pf.g(z) * z * (q - 1.0));
    };
    auto cross = [&](cplx a, cplx b) { return (a - b) / (a - q * b); };
    QuadratureResult res = circle_integral(k, h, cross, gamma);
    double pre = pf(u) * std::pow(pf.g(s).real(), k) / fk_S(k, q);
    for (int r = 0; r < k; ++r)
        for (int i = 0; i < ms[r]; ++i) pre *= (u[i] - s) / (u[i] - s * q);
    res.value *= pre;
    res.change *= std::abs(pre);
    return res;
}

namespace {

bool in_sign_star(const Signature& lam, int r) {
    const int m = static_cast<int>(lam.size());
    if (r > m) return false;
    for (int t = 0; t < r; ++t)
        if (lam[m - 1 - t] != t) return false;
    return true;
}

}  // namespace

double observable_weight(const std::vector<int>& ms, const std::vector<double>& z, const SignatureFn& f, double q) {
    const int N = static_cast<int>(z.size());
    if (N == 0) {
        auto it = f.find(Signature{});
        return it == f.end() ? 0.0 : it->second;
    }
    int cap = 0;
    for (const auto& [sig, val] : f)
        if (!sig.empty()) cap = std::max(cap, sig.front());
    std::map<Signature, double> states{{Signature{}, 1.0}};
    for (int level = 1; level <= N; ++level) {
        std::map<Signature, double> next;
        for (const auto& [sig, w] : states)
            for (const Signature& up : rows_above(sig, true, cap)) {
                if (!is_strict(up)) continue;
                const double t = skew_F_row(up, sig, z[level - 1], q);
                if (t != 0.0) next[up] += w * t;
            }
        for (size_t i = 0; i < ms.size(); ++i)
            if (ms[i] == level)
                std::erase_if(next, [&](const auto& kv) { return !in_sign_star(kv.first, static_cast<int>(i) + 1); });
        states = std::move(next);
    }
    double total = 0.0;
    for (const auto& [sig, w] : states) {
        auto it = f.find(sig);
        if (it != f.end()) total += w * it->second;
    }
    return total;
}

RecurrenceCheck recurrence_check(const std::vector<int>& ms, const std::vector<double>& z, const SignatureFn& f,
                                 double q) {
    if (ms.empty()) throw std::invalid_argument("recurrence needs at least one level");
    const int N = static_cast<int>(z.size());
    const double s = 1.0 / std::sqrt(q);
    RecurrenceCheck out;
    out.lhs = observable_weight(ms, z, f, q);

    SignatureFn g;
    for (const auto& [lam, val] : f) {
        if (lam.empty() || lam.back() != 0) continue;
        Signature mu(lam.begin(), lam.end() - 1);
        for (int& x : mu) x -= 1;
        g[mu] += val;
    }
    std::vector<int> mhat;
    for (size_t i = 1; i < ms.size(); ++i) mhat.push_back(ms[i] - 1);
    const int m1 = ms[0];
    double outer = 1.0;
    for (int j = m1; j < N; ++j) outer *= (z[j] - s * q) / (1.0 - s * z[j]);
    double sum = 0.0;
    for (int i = 0; i < m1; ++i) {
        double c = (1.0 - q) / (1.0 - s * z[i]);
        for (int j = 0; j < m1; ++j)
            if (j != i) c *= (z[j] - q * z[i]) / (z[j] - z[i]) * (z[j] - s) / (1.0 - s * z[j]);
        std::vector<double> rest;
        for (int j = 0; j < N; ++j)
            if (j != i) rest.push_back(z[j]);
        sum += c * observable_weight(mhat, rest, g, q);
    }
    out.rhs = outer * sum;
    out.diff = std::abs(out.lhs - out.rhs);
    return out;
}

SignatureFn staircase_boundary(int N) { return {{staircase(N), 1.0}}; }

}  // namespace sixv
