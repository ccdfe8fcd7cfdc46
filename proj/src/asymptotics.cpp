#include "sixv/asymptotics.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/hermite.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace sixv {

LimitConstants limit_constants(double q, double u, double v) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("limit constants need 0 < q < 1");
    const double s = 1.0 / std::sqrt(q);
    if (!(u > s && u < (s + s * s * s) / 2.0))
        throw std::invalid_argument(fmt::format("limit constants need s < u < (s + s^3)/2, got u = {}", u));
    if (!(v > 0.0 && v * u < 1.0)) throw std::invalid_argument("limit constants need 0 < v < 1/u");
    const double w = 1.0 / v, sq = s * q;
    LimitConstants lc;
    lc.a = w * (u - sq) * (u - s) / (u * (w - sq) * (w - s));
    lc.b1 = 1.0 / (u - s) - 1.0 / (u / q - s);
    // a2 is the Taylor coefficient of G at s: G(z) = a2 (z - s)^2 + O((z - s)^3), i.e. G''(s)/2
    lc.a2 = 0.5 * (1.0 - q) * w / ((w - s) * (w - sq)) *
            ((2.0 * q * s - (q + 1.0) * w) / ((w - s) * (w - sq)) - (2.0 * q * s - (q + 1.0) * u) / ((u - s) * (u - sq)));
    if (!(lc.a > 0.0 && lc.a2 > 0.0 && lc.b1 > 0.0))
        throw std::runtime_error(fmt::format("limit constants out of range: a = {}, a2 = {}, b1 = {}", lc.a, lc.a2, lc.b1));
    lc.c = std::sqrt(2.0 * lc.a2) / lc.b1;
    return lc;
}

ContourSpec default_contour(double q, double u, double v) {
    const double s = 1.0 / std::sqrt(q);
    double r = std::min(0.2 * (u - s), 0.4 * u * (1.0 - q) / (1.0 + q));
    if (v > 0.0) r = std::min(r, 0.2 * (1.0 / (q * v) - u));
    return {cplx(u, 0.0), r, 64};
}

double cdf_contour(const std::vector<int>& ms, const ModelParams& p, const ContourSpec& gamma) {
    require_valid(p);
    const int k = static_cast<int>(ms.size());
    const int N = static_cast<int>(p.u.size()), M = static_cast<int>(p.v.size());
    if (k < 1) throw std::invalid_argument("cdf_contour needs at least one level");
    for (int r = 0; r < k; ++r)
        if (ms[r] < k || (r > 0 && ms[r] < ms[r - 1]) || ms[r] > N)
            throw std::invalid_argument("cdf_contour needs k <= m_1 <= ... <= m_k <= N");
    for (double x : p.u)
        if (x != p.u[0]) throw std::invalid_argument("cdf_contour needs homogeneous u");
    for (double x : p.v)
        if (x != p.v[0]) throw std::invalid_argument("cdf_contour needs homogeneous v");
    const double q = p.q, s = p.s, u = p.u[0], v = M > 0 ? p.v[0] : 0.0;
    std::vector<double> outside = {s, 0.0, 1.0 / s};
    if (M > 0) outside.push_back(1.0 / (q * v));
    check_contour(gamma, {u}, outside, q);

    const double ucst = (u - s) / (u - s * q);
    const double vcst = M > 0 ? (1.0 - q * s * v) / (1.0 - s * v) : 1.0;
    auto h = [&](int r, cplx z) {
        cplx c = std::pow((q * z - u) / (z - u) * ucst, ms[r]) * std::pow((z - s * q) / (z - s), k - r);
        if (M > 0) c *= std::pow((1.0 - z * v) / (1.0 - q * z * v) * vcst, M);
        return c / (z * (1.0 - s * z) * q);
    };
    auto cross = [&](cplx a, cplx b) { return (a - b) / (a - q * b); };
    const QuadratureResult res = circle_integral(k, h, cross, gamma);
    if (res.change > 1e-8)
        throw std::runtime_error(fmt::format("contour quadrature did not settle (change {:.3g})", res.change));
    if (std::abs(res.value.imag()) > 1e-9 * (1.0 + std::abs(res.value)))
        throw std::runtime_error(fmt::format("contour value has imaginary part {:.3g}", res.value.imag()));
    return res.value.real();
}

double cdf_contour(const std::vector<int>& ms, const ModelParams& p) {
    if (p.u.empty()) throw std::invalid_argument("cdf_contour needs at least one u");
    return cdf_contour(ms, p, default_contour(p.q, p.u[0], p.v.empty() ? 0.0 : p.v[0]));
}

double psi(int m, double y) {
    if (m < -6 || m > 6) throw std::invalid_argument(fmt::format("psi order {} outside [-6, 6]", m));
    const double phi = std::exp(-y * y / 2.0) / std::sqrt(2.0 * std::numbers::pi);
    if (m >= 0) {
        // probabilists' Hermite He_m(y) = 2^{-m/2} H_m(y / sqrt 2)
        const double he = std::pow(2.0, -m / 2.0) * boost::math::hermite(static_cast<unsigned>(m), y / std::numbers::sqrt2);
        return (m % 2 ? -1.0 : 1.0) * he * phi;
    }
    const int n = -m;
    if (n == 1) return 0.5 * std::erfc(-y / std::numbers::sqrt2);
    // iterated integral: int_{-inf}^y (y-t)^{n-1}/(n-1)! phi(t) dt; the cut at min(y,0)-12 drops < 1e-30
    const double fact = std::tgamma(static_cast<double>(n));
    auto f = [&](double t) {
        return std::pow(y - t, n - 1) / fact * std::exp(-t * t / 2.0) / std::sqrt(2.0 * std::numbers::pi);
    };
    const double lo = std::min(y, 0.0) - 12.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, y, 15, 1e-14);
}

double gue_edge_cdf(std::vector<double> xs) {
    const int k = static_cast<int>(xs.size());
    if (k < 1 || k > 5) throw std::invalid_argument(fmt::format("gue_edge_cdf supports 1..5 levels, got {}", k));
    std::sort(xs.begin(), xs.end());
    Eigen::MatrixXd m(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = psi(j - i - 1, xs[j]);
    return m.determinant();
}

std::vector<std::vector<double>> gue_corners(int k, RngStream& rng) {
    if (k < 1 || k > 5) throw std::invalid_argument("gue_corners supports 1..5 levels");
    std::normal_distribution<double> diag(0.0, 1.0), off(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd h(k, k);
    for (int i = 0; i < k; ++i) {
        h(i, i) = diag(rng);
        for (int j = i + 1; j < k; ++j) {
            const double re = off(rng), im = off(rng);
            h(i, j) = cplx(re, im);
            h(j, i) = cplx(re, -im);
        }
    }
    std::vector<std::vector<double>> out(k);
    for (int r = 1; r <= k; ++r) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.topLeftCorner(r, r), Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        out[r - 1].assign(ev.data(), ev.data() + r);
    }
    return out;
}

std::vector<std::vector<double>> gue_mc_oracle(int k, int n_samples, RngStream& rng) {
    std::vector<std::vector<double>> samples;
    samples.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const auto corners = gue_corners(k, rng);
        std::vector<double> edge(k);
        for (int r = 0; r < k; ++r) edge[r] = corners[r].back();
        samples.push_back(std::move(edge));
    }
    return samples;
}

double empirical_cdf(const std::vector<std::vector<double>>& samples, const std::vector<double>& xs) {
    if (samples.empty()) throw std::invalid_argument("empirical_cdf needs samples");
    size_t hits = 0;
    for (const auto& smp : samples) {
        if (smp.size() != xs.size()) throw std::invalid_argument("sample and point dimensions differ");
        bool all = true;
        for (size_t i = 0; i < xs.size() && all; ++i) all = smp[i] <= xs[i];
        hits += all;
    }
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

std::pair<std::complex<double>, std::complex<double>> steepest_G(std::complex<double> z, const LimitConstants& lc,
                                                                 double q, double u, double v) {
    const double s = 1.0 / std::sqrt(q), w = 1.0 / v;
    if (std::abs(z - u) < 1e-14 || std::abs(z - w / q) < 1e-14 || std::abs(q * z - u) < 1e-14 ||
        std::abs(z - w) < 1e-14)
        throw std::invalid_argument("steepest_G evaluated at a singular point");
    const std::complex<double> g = std::log((q * z - u) / (z - u) * ((u - s) / (u - s * q)));
    const std::complex<double> rest = std::log((w - z) / (w - q * z) * ((w - s * q) / (w - s)));
    return {lc.a * g + rest, g};
}

}  // namespace sixv
