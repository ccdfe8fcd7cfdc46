#pragma once

#include "sixv/asymptotics.hpp"
#include "sixv/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace sixv {

// Campaign settings, read from a flat key=value file with command-line overrides.
struct CampaignConfig {
    double q = 0.5;
    double u = 1.5;
    double v = 0.6;
    int N = 10;
    int M = 10;
    int samples = 1;
    uint64_t seed = 1;
    int threads = 1;
    std::set<std::string> outputs = {"raw"};
    std::string out = ".";

    ModelParams params() const;
};

// Known keys: q u v N M samples seed threads outputs out. Throws on unknown keys or bad values.
void apply_setting(CampaignConfig& cfg, const std::string& key, const std::string& value);
// Reads "key = value" lines; '#' starts a comment.
CampaignConfig parse_config(std::istream& is);
// Applies "key=value" strings in order.
void apply_overrides(CampaignConfig& cfg, const std::vector<std::string>& overrides);
void validate_config(const CampaignConfig& cfg);
// Canonical key=value form, parseable by parse_config.
void write_config(std::ostream& os, const CampaignConfig& cfg);

// Thread count: SIXV_THREADS when set, otherwise the configured value.
int effective_threads(const CampaignConfig& cfg);

struct RawSample {
    uint64_t seed = 0;
    int sweeps = 0;
    int N = 0, M = 0;
    PathCollection paths;
};

// Records are "seed sweeps N M" followed by the path text format, in sample order.
void write_raw(std::ostream& os, const std::vector<RawSample>& records);
std::vector<RawSample> read_raw(std::istream& is);

// Draws all samples on `threads` workers; the result is ordered by sample index and does not
// depend on the thread count. Throws with the sample index if a sample breaks an invariant.
std::vector<RawSample> run_campaign(const CampaignConfig& cfg, int threads);

struct CampaignSummary {
    int samples = 0;
    double seconds = 0.0;
    std::vector<std::string> files;
};

// Runs the campaign and writes the requested outputs under cfg.out.
CampaignSummary cmd_sample(const CampaignConfig& cfg);

// ---- statistics ----

struct EdgeStats {
    std::vector<double> xi1;  // (Y^1_1 - aM)/(c sqrt M); +inf when the hole is missing
    std::vector<double> xi2;  // same for Y^2_2 (empty when N < 2)
    double ks = 0.0;          // sup distance of the xi1 empirical CDF to the standard normal
    double joint = 0.0;       // fraction with xi1 <= 0 and xi2 <= 0
    double gue = 0.0;         // gue_edge_cdf(0, 0)
    LimitConstants lc;
};

EdgeStats edge_stats(const std::vector<RawSample>& records, double q, double u, double v);
double ks_normal(std::vector<double> xs);

void write_edge_csv(std::ostream& os, const EdgeStats& st);
// Long format: one row per (y, x) with x = 1..max part over all samples.
void write_height_variance_csv(std::ostream& os, const std::vector<RawSample>& records);
void write_holes_csv(std::ostream& os, const std::vector<RawSample>& records, int depth);

// Versioned CSV: first line "# sixv-<kind> v<version>", further '#' lines are metadata,
// then a column header and data rows.
struct CsvTable {
    std::string kind;
    int version = 0;
    std::vector<std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& is);

// ---- verification ----

struct CheckRow {
    std::string name;
    double lhs = 0.0, rhs = 0.0, diff = 0.0, bound = 0.0;
    bool pass = false;
};

const std::vector<std::string>& verify_suites();
// Throws std::invalid_argument for an unknown suite name.
std::vector<CheckRow> run_suite(const std::string& suite);
void write_checks_csv(std::ostream& os, const std::vector<CheckRow>& rows);

// ---- rendering ----

struct RenderOptions {
    bool holes = false;
    int hole_depth = 5;
    int cell = 16;
};

// Up-right polylines, one per path, on the lattice box [0, max part] x [1, N].
std::string render_svg(const PathCollection& w, const RenderOptions& opt = {});

// Entry point shared by the executable and tests. Returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sixv
