#pragma once

#include "sixv/model.hpp"
#include "sixv/operators.hpp"
#include "sixv/random.hpp"

#include <complex>
#include <utility>
#include <vector>

namespace sixv {

struct LimitConstants {
    double a = 0.0;   // law of large numbers: Y^1_1 ~ a M
    double a2 = 0.0;  // G(z) = a2 (z - s)^2 + ... near s
    double b1 = 0.0;
    double c = 0.0;   // fluctuation scale: (Y - a M) / (c sqrt(M))
};

// Requires q in (0,1), s < u < (s + s^3)/2 and 0 < v < 1/u.
LimitConstants limit_constants(double q, double u, double v);

// Circle around u that encloses u and excludes s, 0, 1/s and 1/(qv).
ContourSpec default_contour(double q, double u, double v);

// P(Y^1_1 <= m_1, ..., Y^k_k <= m_k) for homogeneous u = p.u[0], v = p.v[0] (M = p.v.size()).
double cdf_contour(const std::vector<int>& ms, const ModelParams& p, const ContourSpec& gamma);
double cdf_contour(const std::vector<int>& ms, const ModelParams& p);

// Psi^m(y): the m-th derivative of the Gaussian density for m >= 0, and the |m|-fold
// iterated integral of it for m < 0. m is limited to [-6, 6].
double psi(int m, double y);

// det[Psi^{j-i-1}(x_j)] = P(lambda^1_1 <= x_1, ..., lambda^k_k <= x_k) for GUE corners, k <= 5.
double gue_edge_cdf(std::vector<double> xs);

// Eigenvalues (ascending) of the top-left r x r corners, r = 1..k, of one GUE matrix.
std::vector<std::vector<double>> gue_corners(int k, RngStream& rng);

// n samples of the corner edges (lambda^1_1, ..., lambda^k_k).
std::vector<std::vector<double>> gue_mc_oracle(int k, int n_samples, RngStream& rng);

// Fraction of samples with every coordinate at or below xs.
double empirical_cdf(const std::vector<std::vector<double>>& samples, const std::vector<double>& xs);

// (G(z), g(z)): the steepest-descent exponent and its u-part.
std::pair<std::complex<double>, std::complex<double>> steepest_G(std::complex<double> z, const LimitConstants& lc,
                                                                 double q, double u, double v);

}  // namespace sixv
