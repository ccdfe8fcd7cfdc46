#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sixv {

// Row state: weakly decreasing parts, largest first.
using Signature = std::vector<int>;

struct ModelParams {
    double q = 0.5;
    double s = 0.0;  // always q^{-1/2}; set only through make()
    std::vector<double> u;
    std::vector<double> v;
    bool strict = false;  // also require u_i < (s + s^3)/2

    static ModelParams make(double q, std::vector<double> u, std::vector<double> v,
                            bool strict = false);
    int N() const { return static_cast<int>(u.size()); }
    int M() const { return static_cast<int>(v.size()); }
};

// Returns the first violated invariant, or nullopt when the parameters are admissible.
std::optional<std::string> validate_params(const ModelParams& p);

// Throws std::invalid_argument with the violation message.
void require_valid(const ModelParams& p);

struct ArrowConfig {
    int i1 = 0, j1 = 0, i2 = 0, j2 = 0;
    bool operator==(const ArrowConfig&) const = default;
};

bool is_weakly_decreasing(const Signature& s);
bool is_strict(const Signature& s);
bool is_nonneg(const Signature& s);
int multiplicity(const Signature& s, int x);

// N interlacing rows; rows[k-1] is lambda^k and has k parts.
struct PathCollection {
    std::vector<Signature> rows;
    int N() const { return static_cast<int>(rows.size()); }
    bool operator==(const PathCollection&) const = default;
};

// Checks strictness, nonnegativity and interlacing; returns a description of the first problem.
std::optional<std::string> check_paths(const PathCollection& w);

// Arrow configurations on [0, max part] x [1, N]; grid[y-1][x].
using Grid = std::vector<std::vector<ArrowConfig>>;

Grid grid_from_rows(const PathCollection& w);
PathCollection rows_from_grid(const Grid& g);

// Y[j-1][i-1] = i-th smallest row of column j with an empty outgoing horizontal edge.
using HoleArray = std::vector<std::vector<std::optional<int>>>;

HoleArray extract_holes(const PathCollection& w, int k);
bool holes_interlace(const HoleArray& y);

// Number of paths crossing the line above row y at columns >= x.
int height_function(const PathCollection& w, int x, int y);

double delta_parameter(const ModelParams& p);

using BigInt = boost::multiprecision::cpp_int;

// Weakly increasing input (the counting convention); strict requires strictly increasing.
BigInt gt_count(const std::vector<int>& increasing, bool strict);
BigInt gt_count_brute(const std::vector<int>& increasing, bool strict);
double gt_volume(const std::vector<double>& increasing);

// Adapter between the decreasing row convention and the increasing counting convention.
std::vector<int> to_increasing(const Signature& s);
Signature from_increasing(const std::vector<int>& inc);

// Text format: header "N=<n>" then one row per line.
void write_paths(std::ostream& os, const PathCollection& w);
PathCollection read_paths(std::istream& is);

}  // namespace sixv
