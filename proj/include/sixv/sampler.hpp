#pragma once

#include "sixv/model.hpp"
#include "sixv/random.hpp"

#include <climits>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace sixv {

inline constexpr int kInfPart = INT_MAX;  // b_1 = +infinity

// Returns (b1, b2): probabilities of (1,0;1,0) and (0,1;0,1) in the v = 0 model.
std::pair<double, double> step_probs(double u, double q);

// Sample of the model with all v = 0, built vertex by vertex along anti-diagonals.
// Columns are labelled from 1, so every part is at least 1.
PathCollection zero_sampler(int N, const ModelParams& p, RngStream& rng);

// Vertex weight constants for one (u, v) pair. F uses w_u, G uses w^c_v.
struct RowWeights {
    RowWeights(double u, double v, double q);
    double u, v, q;
    double F[2][2][2][2];  // [i1][j1][i2][j2]
    double G[2][2][2][2];
    double p;  // both (0,1;0,1)
    double r;  // both (0,1;1,0)
    double A;  // both (1,0;0,1): the double-counted factor at a shared column
    double log_p;
    std::vector<double> powers;  // p^0, p^1, ...
    double p_pow(int n) const { return n < static_cast<int>(powers.size()) ? powers[n] : std::pow(p, n); }
};

// bLL: c = lambda_l, bRL: d = lambda_{l-1}, bLM: c = mu_l, bRM: d = mu_{l-1}.
struct PartFlags {
    bool LL = false, RL = false, LM = false, RM = false;
};

// Unnormalized single-part weights: at c, at c+1 (the middle run then decays by p), at d.
// For d = c only at_c is used; for d = kInfPart there is no at_d.
struct ArrowCase {
    double at_c = 0.0;
    double first_mid = 0.0;
    double ratio = 0.0;
    double at_d = 0.0;
};

ArrowCase arrow_case(const RowWeights& w, int c, int d, PartFlags f);

// Single-part weight from raw vertex products, column by column (oracle for arrow_case).
double part_weight_by_columns(const RowWeights& w, int c, int d, PartFlags f, int t);

// Sum over the part position with the wL/wR reweighting: wL2 at c, wR2 at d, wL1/wR1 elsewhere.
double base_weight(const RowWeights& w, int c, int d, PartFlags f, double wL1, double wL2, double wR1,
                   double wR2);
// Flags bLL = bRM = 1: lambda sets the left end and mu the right end.
double base_weight(double u, double v, double q, int c, int d, double wL1, double wL2, double wR1, double wR2);

// Per-part ranges c_i..d_i, 1-based storage (index 0 unused).
struct IntervalBounds {
    std::vector<int> c, d;
    int k() const { return static_cast<int>(c.size()) - 1; }
};

IntervalBounds initial_bounds(const Signature& lambda, const Signature& mu);
PartFlags part_flags(const IntervalBounds& b, int i, const Signature& lambda, const Signature& mu);

// Weight of parts x..y (sum over placements of column-product weights), by midpoint recursion.
double interval_weight(const RowWeights& w, const IntervalBounds& b, int x, int y, const Signature& lambda,
                       const Signature& mu);
// Same quantity by exhaustive placement; d = kInfPart is replaced by `box`.
double interval_weight_brute(const RowWeights& w, const IntervalBounds& b, int x, int y, const Signature& lambda,
                             const Signature& mu, int box = 64);

// Draws the part position from base_weight's terms. Throws when the total vanishes or a
// normalized probability leaves [-1e-12, 1 + 1e-12].
int arrow_sampler(const RowWeights& w, int c, int d, PartFlags f, double wL1, double wL2, double wR1, double wR2,
                  RngStream& rng);

// Sample of nu with P(nu) proportional to F_{nu/mu}(u) G^c_{nu/lambda}(v).
// Conditions parts top-down on exact lower-block weights (linear in k).
Signature row_sampler(int k, double u, double v, double q, const Signature& lambda, const Signature& mu,
                      RngStream& rng);
Signature row_sampler(const RowWeights& w, const Signature& lambda, const Signature& mu, RngStream& rng);
// The same law by midpoint splitting with interval_weight.
Signature row_sampler_midpoint(const RowWeights& w, const Signature& lambda, const Signature& mu, RngStream& rng);

struct RowTable {
    std::map<Signature, double> prob;  // nu with nu_1 <= box
    double tail = 0.0;                 // exact mass of nu_1 > box
};

RowTable exact_row_oracle(int k, double u, double v, double q, const Signature& lambda, const Signature& mu, int box,
                          double max_tail = 1e-6);

// Zero sampler followed by one sweep of row updates per v_j.
PathCollection chain_sampler(const ModelParams& p, uint64_t seed, uint64_t sample);

}  // namespace sixv
