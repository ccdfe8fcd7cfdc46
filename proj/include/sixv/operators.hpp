#pragma once

#include "sixv/model.hpp"

#include <complex>
#include <functional>
#include <map>
#include <vector>

namespace sixv {

using cplx = std::complex<double>;
using MultiFn = std::function<double(const std::vector<double>&)>;

// F_k(u) = F_lambda(u) with lambda = (k-1, ..., 0), and its value with every variable at s.
double fk_eval(int k, const std::vector<double>& u, double q);
double fk_S(int k, double q);

// F_lambda(u) for strict lambda where some u_i equal s exactly (those are substituted in closed form);
// the remaining variables must be pairwise distinct.
double F_with_s(const Signature& lambda, const std::vector<double>& u, double q);

// D^k_m acting on the first m = u.size() variables by the subset sum.
double apply_D(int k, const MultiFn& fn, const std::vector<double>& u, double q);

// F_lambda(u) for strict lambda where some u_i equal s exactly (those are substituted in closed form);
// the remaining variables must be pairwise distinct.
double F_with_s(const Signature& lambda, const std::vector<double>& u, double q);

// D^k_m acting on the first m coordinates of a longer vector, returned as a new function.
MultiFn compose_D(int k, int m, MultiFn fn, double q);

// D^1_{m_1} ... D^k_{m_k} by the nested index sum.
double apply_D_chain(const std::vector<int>& ms, const MultiFn& fn, const std::vector<double>& u, double q);

// F(z_1..z_m) = prod g(z_i) with g holomorphic and nonvanishing near [s, max u].
struct ProductFunction {
    std::function<cplx(cplx)> g;
    double operator()(const std::vector<double>& u) const;
};

struct ContourSpec {
    cplx center;
    double radius = 0.0;
    int nodes = 64;  // starting node count; doubled until converged
};

struct QuadratureResult {
    cplx value;
    int nodes = 0;        // per dimension at the final level
    double change = 0.0;  // |last - previous|
};

// Throws when the circle misses a u_i, encloses an excluded point, or meets its image under z -> qz.
void check_contour(const ContourSpec& gamma, const std::vector<double>& inside,
                   const std::vector<double>& outside, double q);

// k-fold trapezoid sum of prod_r h_r(z_r) * prod_{i<j} cross(z_i, z_j) over the circle,
// times (2 pi i)^{-k}; nodes doubled until the change is below tol.
QuadratureResult circle_integral(int k, const std::function<cplx(int, cplx)>& h,
                                 const std::function<cplx(cplx, cplx)>& cross, const ContourSpec& gamma,
                                 double tol = 1e-11, int max_nodes = 1 << 15);

// Determinant-times-F_k part of the single-operator integrand in product form (safe at
// coincident nodes) and the direct determinant version used to test it.
cplx det_fk_product(const std::vector<cplx>& z, double q);
cplx det_fk_direct(const std::vector<cplx>& z, double q);

QuadratureResult contour_D(int k, const ProductFunction& pf, const std::vector<double>& u, double q,
                           const ContourSpec& gamma);
QuadratureResult contour_D_chain(const std::vector<int>& ms, const ProductFunction& pf,
                                 const std::vector<double>& u, double q, const ContourSpec& gamma);

using SignatureFn = std::map<Signature, double>;

// Sum of path weights over strict interlacing rows whose top row lies in the support of f,
// restricted to lambda^{m_i} having bottom parts 0, 1, ..., i-1.
double observable_weight(const std::vector<int>& ms, const std::vector<double>& z, const SignatureFn& f, double q);

struct RecurrenceCheck {
    double lhs = 0.0, rhs = 0.0, diff = 0.0;
};

RecurrenceCheck recurrence_check(const std::vector<int>& ms, const std::vector<double>& z, const SignatureFn& f,
                                 double q);

// f = indicator of the staircase (N-1, ..., 1, 0).
SignatureFn staircase_boundary(int N);

}  // namespace sixv
