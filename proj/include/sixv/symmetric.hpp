#pragma once

#include "sixv/model.hpp"

#include <map>
#include <utility>
#include <vector>

namespace sixv {

// Vertex weights for vertical multiplicity g in {0,1,...} and horizontal multiplicity in {0,1}.
// Configurations outside the four admissible patterns get weight 0.
double vertex_weight(int i1, int j1, int i2, int j2, double u, double q);
double conj_vertex_weight(int i1, int j1, int i2, int j2, double v, double q);

// One-row skew functions. F adds one path from the left (|lambda| = |mu| + 1 parts),
// G transports the paths of mu upward (same number of parts).
double skew_F_row(const Signature& lambda, const Signature& mu, double u, double q);
double skew_G_row(const Signature& lambda, const Signature& mu, double v, double q);

// Signatures reachable from `below` in one row, parts capped at `cap`.
std::vector<Signature> rows_above(const Signature& below, bool adds_path, int cap);

// Path-enumeration sums over all intermediate rows; parts are capped at `box`
// (at least the largest part of lambda, since paths only move up and right).
double brute_force_F(const Signature& lambda, const Signature& mu, const std::vector<double>& u,
                     double q, int box = -1);
double brute_force_G(const Signature& lambda, const Signature& mu, const std::vector<double>& v,
                     double q, int box = -1);

// Symmetrized sums; u must be pairwise distinct (relative gap above 1e-9).
double F_sym(const Signature& lambda, const std::vector<double>& u, double q);
double G_sym(const Signature& nu, const std::vector<double>& v, double q);

// Values on the geometric set (u, qu, ..., q^{N-1}u).
double F_geom(const Signature& mu, double u, int N, double q);
double G_geom(const Signature& nu, double u, int N, double q);
// Principal specialization in the closed form with the repeated-part vanishing rule.
double g_principal(const Signature& nu, double v, int J, double q);

double qpoch(double a, double q, int n);

struct TruncationPolicy {
    int max_part = 60;
    double tail_ratio = 0.0;  // filled by admissibility_ratio when left at 0
};

double admissibility_ratio(const std::vector<double>& u, const std::vector<double>& v, double q);

// f(lambda; v) of the boundary construction, M = p.v.size(), N = lambda.size().
double boundary_f(const Signature& lambda, const ModelParams& p);

// Closed-form partition function Z^f over the first n spectral parameters (all when n < 0).
double partition_Z(const ModelParams& p, int n = -1);

// Multi-row skew F by iterated one-row transfers: returns all reachable tops with their weights.
std::map<Signature, double> skew_F_table(const Signature& mu, const std::vector<double>& u, double q,
                                         int box);

// Probability that lambda^{m_i} = mu_i for the listed levels.
double measure_prob(const std::vector<std::pair<int, Signature>>& levels, const ModelParams& p);

struct TruncatedSum {
    double value = 0.0;
    double tail_bound = 0.0;
};

// Sum over nu in Sign^+_N with nu_1 <= L of F_nu(u) G^c_nu(v), with a geometric tail estimate.
TruncatedSum cauchy_lhs(const std::vector<double>& u, const std::vector<double>& v, double q, int L);
double cauchy_rhs(const std::vector<double>& u, const std::vector<double>& v, double q);

// Both sides of the skew Cauchy identity for one u and one v; lambda has one more part than nu.
std::pair<TruncatedSum, double> skew_cauchy(const Signature& lambda, const Signature& nu, double u,
                                            double v, double q, int L);

}  // namespace sixv
