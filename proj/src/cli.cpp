#include "sixv/cli.hpp"

#include "sixv/operators.hpp"
#include "sixv/sampler.hpp"
#include "sixv/symmetric.hpp"

#include <CLI11.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sixv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream is(value);
    T x;
    if (!(is >> x) || !(is >> std::ws).eof())
        throw std::invalid_argument(fmt::format("bad value '{}' for {}", value, key));
    return x;
}

const std::set<std::string> kOutputKinds = {"raw", "holes", "height-variance", "edge-cdf"};

// Shortest round-trip representation, so configs and CSVs reproduce exactly.
std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{}", x);
}

}  // namespace

ModelParams CampaignConfig::params() const {
    return ModelParams::make(q, std::vector<double>(N, u), std::vector<double>(M, v));
}

void apply_setting(CampaignConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "q") cfg.q = parse_number<double>(key, value);
    else if (key == "u") cfg.u = parse_number<double>(key, value);
    else if (key == "v") cfg.v = parse_number<double>(key, value);
    else if (key == "N") cfg.N = parse_number<int>(key, value);
    else if (key == "M") cfg.M = parse_number<int>(key, value);
    else if (key == "samples") cfg.samples = parse_number<int>(key, value);
    else if (key == "seed") cfg.seed = parse_number<uint64_t>(key, value);
    else if (key == "threads") cfg.threads = parse_number<int>(key, value);
    else if (key == "out") cfg.out = value;
    else if (key == "outputs") {
        cfg.outputs.clear();
        std::istringstream is(value);
        for (std::string item; std::getline(is, item, ',');) {
            item = trim(item);
            if (item.empty()) continue;
            if (!kOutputKinds.count(item)) throw std::invalid_argument(fmt::format("unknown output kind '{}'", item));
            cfg.outputs.insert(item);
        }
    } else {
        throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
    }
}

CampaignConfig parse_config(std::istream& is) {
    CampaignConfig cfg;
    std::string line;
    for (int lineno = 1; std::getline(is, line); ++lineno) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(fmt::format("config line {}: expected key=value", lineno));
        apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void apply_overrides(CampaignConfig& cfg, const std::vector<std::string>& overrides) {
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(fmt::format("override '{}' is not key=value", kv));
        apply_setting(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
}

void validate_config(const CampaignConfig& cfg) {
    if (cfg.samples < 1) throw std::invalid_argument("samples must be at least 1");
    if (cfg.N < 1) throw std::invalid_argument("N must be at least 1");
    if (cfg.M < 0) throw std::invalid_argument("M must be nonnegative");
    if (cfg.threads < 1) throw std::invalid_argument("threads must be at least 1");
    if (cfg.samples >= (1 << 24) || cfg.M >= (1 << 20) || cfg.N >= (1 << 20))
        throw std::invalid_argument("campaign too large for the stream id layout");
    require_valid(cfg.params());
    if (cfg.outputs.count("edge-cdf")) limit_constants(cfg.q, cfg.u, cfg.v);
}

void write_config(std::ostream& os, const CampaignConfig& cfg) {
    std::string outs;
    for (const auto& o : cfg.outputs) outs += (outs.empty() ? "" : ",") + o;
    os << "q = " << num(cfg.q) << '\n'
       << "u = " << num(cfg.u) << '\n'
       << "v = " << num(cfg.v) << '\n'
       << "N = " << cfg.N << '\n'
       << "M = " << cfg.M << '\n'
       << "samples = " << cfg.samples << '\n'
       << "seed = " << cfg.seed << '\n'
       << "threads = " << cfg.threads << '\n'
       << "outputs = " << outs << '\n'
       << "out = " << cfg.out << '\n';
}

int effective_threads(const CampaignConfig& cfg) {
    if (const char* env = std::getenv("SIXV_THREADS")) {
        const int t = parse_number<int>("SIXV_THREADS", env);
        if (t < 1) throw std::invalid_argument("SIXV_THREADS must be at least 1");
        return t;
    }
    return cfg.threads;
}

void write_raw(std::ostream& os, const std::vector<RawSample>& records) {
    for (const auto& r : records) {
        os << r.seed << ' ' << r.sweeps << ' ' << r.N << ' ' << r.M << '\n';
        write_paths(os, r.paths);
    }
}

std::vector<RawSample> read_raw(std::istream& is) {
    std::vector<RawSample> out;
    std::string line;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        RawSample r;
        std::istringstream hs(line);
        if (!(hs >> r.seed >> r.sweeps >> r.N >> r.M))
            throw std::runtime_error(fmt::format("record {}: malformed header '{}'", out.size(), line));
        try {
            r.paths = read_paths(is);
        } catch (const std::exception& e) {
            throw std::runtime_error(fmt::format("record {}: {}", out.size(), e.what()));
        }
        if (r.paths.N() != r.N) throw std::runtime_error(fmt::format("record {}: header N differs from rows", out.size()));
        if (auto bad = check_paths(r.paths)) throw std::runtime_error(fmt::format("record {}: {}", out.size(), *bad));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RawSample> run_campaign(const CampaignConfig& cfg, int threads) {
    validate_config(cfg);
    const ModelParams p = cfg.params();
    std::vector<RawSample> out(cfg.samples);
    std::atomic<int> next{0};
    std::mutex err_mu;
    std::string first_error;
    int first_error_index = std::numeric_limits<int>::max();

    auto worker = [&] {
        for (int i; (i = next.fetch_add(1)) < cfg.samples;) {
            try {
                RawSample r{cfg.seed, cfg.M, cfg.N, cfg.M, chain_sampler(p, cfg.seed, static_cast<uint64_t>(i))};
                if (auto bad = check_paths(r.paths)) throw std::runtime_error(*bad);
                out[i] = std::move(r);
            } catch (const std::exception& e) {
                std::lock_guard lock(err_mu);
                if (i < first_error_index) first_error_index = i, first_error = e.what();
            }
        }
    };
    const int nt = std::max(1, std::min(threads, cfg.samples));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (!first_error.empty())
        throw std::runtime_error(fmt::format("sample {}: {}", first_error_index, first_error));
    return out;
}

CampaignSummary cmd_sample(const CampaignConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto records = run_campaign(cfg, effective_threads(cfg));
    CampaignSummary sum;
    sum.samples = static_cast<int>(records.size());

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out);
    auto open = [&](const std::string& name) {
        const fs::path path = fs::path(cfg.out) / name;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
        sum.files.push_back(path.string());
        return os;
    };
    {
        auto os = open("campaign.cfg");
        write_config(os, cfg);
    }
    if (cfg.outputs.count("raw")) {
        auto os = open("raw.txt");
        write_raw(os, records);
    }
    if (cfg.outputs.count("holes")) {
        auto os = open("holes.csv");
        write_holes_csv(os, records, std::min(cfg.N, 5));
    }
    if (cfg.outputs.count("height-variance")) {
        auto os = open("height_variance.csv");
        write_height_variance_csv(os, records);
    }
    if (cfg.outputs.count("edge-cdf")) {
        auto os = open("edge_cdf.csv");
        write_edge_csv(os, edge_stats(records, cfg.q, cfg.u, cfg.v));
    }
    sum.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sum;
}

// ---- statistics ----

double ks_normal(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("KS distance of an empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double f = 0.5 * std::erfc(-xs[i] / std::numbers::sqrt2);
        d = std::max({d, std::abs((i + 1) / n - f), std::abs(f - i / n)});
    }
    return d;
}

EdgeStats edge_stats(const std::vector<RawSample>& records, double q, double u, double v) {
    if (records.empty()) throw std::invalid_argument("edge statistics need at least one sample");
    EdgeStats st;
    st.lc = limit_constants(q, u, v);
    const int M = records.front().M;
    if (M < 1) throw std::invalid_argument("edge statistics need M >= 1");
    const double scale = st.lc.c * std::sqrt(static_cast<double>(M));
    const double inf = std::numeric_limits<double>::infinity();
    const bool two = records.front().N >= 2;
    int joint = 0;
    for (const auto& r : records) {
        if (r.M != M) throw std::runtime_error("edge statistics need a common M across records");
        const HoleArray y = extract_holes(r.paths, two ? 2 : 1);
        const double x1 = y[0][0] ? (*y[0][0] - st.lc.a * M) / scale : inf;
        st.xi1.push_back(x1);
        if (two) {
            const double x2 = y[1][1] ? (*y[1][1] - st.lc.a * M) / scale : inf;
            st.xi2.push_back(x2);
            joint += (x1 <= 0.0 && x2 <= 0.0);
        }
    }
    st.ks = ks_normal(st.xi1);
    st.joint = two ? static_cast<double>(joint) / records.size() : 0.0;
    st.gue = gue_edge_cdf({0.0, 0.0});
    return st;
}

void write_edge_csv(std::ostream& os, const EdgeStats& st) {
    os << "# sixv-edge v1\n";
    os << "# a=" << num(st.lc.a) << " c=" << num(st.lc.c) << '\n';
    os << "# ks=" << num(st.ks) << '\n';
    os << "# joint=" << num(st.joint) << " gue=" << num(st.gue) << '\n';
    os << "index,xi1,xi2,ecdf,normal_cdf\n";
    std::vector<size_t> order(st.xi1.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return st.xi1[a] < st.xi1[b]; });
    const double n = static_cast<double>(order.size());
    for (size_t rank = 0; rank < order.size(); ++rank) {
        const size_t i = order[rank];
        const double x = st.xi1[i];
        os << i << ',' << num(x) << ',' << (st.xi2.empty() ? std::string("") : num(st.xi2[i])) << ','
           << num((rank + 1) / n) << ',' << num(0.5 * std::erfc(-x / std::numbers::sqrt2)) << '\n';
    }
}

void write_height_variance_csv(std::ostream& os, const std::vector<RawSample>& records) {
    if (records.empty()) throw std::invalid_argument("height variance needs at least one sample");
    const int N = records.front().N;
    int xmax = 0;
    for (const auto& r : records) {
        if (r.N != N) throw std::runtime_error("height variance needs a common N across records");
        for (const auto& row : r.paths.rows)
            if (!row.empty()) xmax = std::max(xmax, row.front());
    }
    os << "# sixv-height-variance v1\n";
    os << "# rows=" << N << " columns=" << xmax << " samples=" << records.size() << '\n';
    os << "y,x,mean,variance\n";
    const double n = static_cast<double>(records.size());
    for (int y = 1; y <= N; ++y)
        for (int x = 1; x <= xmax; ++x) {
            double s1 = 0.0, s2 = 0.0;
            for (const auto& r : records) {
                const double h = height_function(r.paths, x, y);
                s1 += h;
                s2 += h * h;
            }
            const double mean = s1 / n;
            const double var = n > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1)) : 0.0;
            os << y << ',' << x << ',' << num(mean) << ',' << num(var) << '\n';
        }
}

void write_holes_csv(std::ostream& os, const std::vector<RawSample>& records, int depth) {
    os << "# sixv-holes v1\n";
    os << "# depth=" << depth << '\n';
    os << "index,j,i,y\n";
    for (size_t idx = 0; idx < records.size(); ++idx) {
        const HoleArray y = extract_holes(records[idx].paths, std::min(depth, records[idx].N));
        for (size_t j = 0; j < y.size(); ++j)
            for (size_t i = 0; i < y[j].size(); ++i)
                os << idx << ',' << j + 1 << ',' << i + 1 << ',' << (y[j][i] ? std::to_string(*y[j][i]) : "inf") << '\n';
    }
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# sixv-", 0) != 0)
        throw std::runtime_error("CSV must start with a '# sixv-<kind> v<n>' line");
    {
        std::istringstream hs(line.substr(7));
        std::string ver;
        if (!(hs >> t.kind >> ver) || ver.size() < 2 || ver[0] != 'v')
            throw std::runtime_error(fmt::format("bad CSV version line '{}'", line));
        t.version = parse_number<int>("version", ver.substr(1));
    }
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    while (std::getline(is, line)) {
        if (line.rfind('#', 0) == 0) {
            t.meta.push_back(trim(line.substr(1)));
            continue;
        }
        t.columns = split(line);
        break;
    }
    if (t.columns.empty()) throw std::runtime_error("CSV has no column header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != t.columns.size())
            throw std::runtime_error(fmt::format("CSV row {} has {} cells, expected {}", t.rows.size(), cells.size(),
                                                 t.columns.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

// ---- verification ----

namespace {

CheckRow check(std::string name, double lhs, double rhs, double bound) {
    const double diff = std::abs(lhs - rhs);
    return {std::move(name), lhs, rhs, diff, bound, diff <= bound};
}

std::string sig_name(const Signature& s) {
    std::string out = "(";
    for (size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + std::to_string(s[i]);
    return out + ")";
}

std::vector<CheckRow> identities_suite() {
    const double q = 0.5, s = 1.0 / std::sqrt(q);
    std::vector<CheckRow> rows;
    {
        const TruncatedSum l = cauchy_lhs({2.0}, {0.25}, q, 60);
        rows.push_back(check("cauchy N=K=1", l.value, cauchy_rhs({2.0}, {0.25}, q), l.tail_bound + 1e-12));
    }
    {
        const std::vector<double> u = {2.0, 2.3}, v = {0.25, 0.2};
        const TruncatedSum l = cauchy_lhs(u, v, q, 60);
        rows.push_back(check("cauchy N=K=2", l.value, cauchy_rhs(u, v, q), l.tail_bound + 1e-12));
    }
    for (const auto& [lam, nu] : std::vector<std::pair<Signature, Signature>>{{{1}, {}}, {{2, 0}, {1}}, {{3, 1}, {2}}}) {
        const auto [l, r] = skew_cauchy(lam, nu, 2.0, 0.25, q, 60);
        rows.push_back(check("skew cauchy " + sig_name(lam) + "/" + sig_name(nu), l.value, r, l.tail_bound + 1e-12));
    }
    for (const Signature& lam : std::vector<Signature>{{2, 0}, {3, 1}, {4, 2}}) {
        const double u1 = 1.6, u2 = 2.7;
        double lhs = 0.0;
        for (int k = 0; k <= lam[0]; ++k) lhs += skew_F_row(lam, {k}, u2, q) * F_sym({k}, {u1}, q);
        rows.push_back(check("branching " + sig_name(lam), lhs, brute_force_F(lam, {}, {u1, u2}, q), 1e-12));
    }
    {
        const double u = 2.0;
        rows.push_back(check("shift (4 2)/(3)", skew_F_row({4, 2}, {3}, u, q),
                             (u - s) / (1.0 - s * u) * skew_F_row({3, 1}, {2}, u, q), 1e-12));
    }
    for (const Signature& lam : std::vector<Signature>{{1, 0}, {3, 1}, {4, 2}}) {
        rows.push_back(check("F_sym " + sig_name(lam), F_sym(lam, {2.0, 2.7}, q), brute_force_F(lam, {}, {2.0, 2.7}, q),
                             1e-10));
        rows.push_back(check("G_sym " + sig_name(lam), G_sym(lam, {0.2, 0.3}, q),
                             brute_force_G(lam, Signature(lam.size(), 0), {0.2, 0.3}, q), 1e-10));
    }
    {
        // Probabilities of lambda^1 = (m) for one row with one v sum to one.
        const ModelParams p = ModelParams::make(q, {2.0}, {0.25});
        double total = 0.0;
        for (int m = 0; m <= 80; ++m) total += measure_prob({{1, {m}}}, p);
        rows.push_back(check("normalization N=1 M=1", total, 1.0, 1e-10));
    }
    return rows;
}

std::vector<CheckRow> operators_suite() {
    const double q = 0.5;
    std::vector<CheckRow> rows;
    const std::vector<double> base = {1.7, 2.0, 2.4, 2.9};
    for (const Signature& lam : std::vector<Signature>{{0}, {2}, {1, 0}, {2, 1}, {2, 1, 0}, {4, 2, 0}, {3, 2, 1, 0}}) {
        const int m = static_cast<int>(lam.size());
        const std::vector<double> u(base.begin(), base.begin() + m);
        const MultiFn fn = [&](const std::vector<double>& x) { return F_with_s(lam, x, q); };
        for (int k = 1; k <= m; ++k) {
            bool ind = true;
            for (int t = 0; t < k; ++t) ind = ind && lam[m - 1 - t] == t;
            rows.push_back(check(fmt::format("eigenrelation k={} {}", k, sig_name(lam)), apply_D(k, fn, u, q),
                                 ind ? F_sym(lam, u, q) : 0.0, 1e-9));
        }
    }
    const double v = 0.25;
    const ProductFunction pf{[&](cplx z) { return (1.0 - q * z * v) / (1.0 - z * v); }};
    const std::vector<double> u = {2.0, 2.01, 2.02};
    const ContourSpec gamma{cplx(2.01, 0.0), 0.05, 64};
    for (int k = 1; k <= 3; ++k)
        rows.push_back(check(fmt::format("contour k={} m=3", k), contour_D(k, pf, u, q, gamma).value.real(),
                             apply_D(k, pf, u, q), 1e-8));
    for (const std::vector<int>& ms : std::vector<std::vector<int>>{{2}, {2, 3}, {3, 3}}) {
        std::string name = "contour chain";
        for (int m : ms) name += " " + std::to_string(m);
        rows.push_back(check(name, contour_D_chain(ms, pf, u, q, gamma).value.real(), apply_D_chain(ms, pf, u, q), 1e-8));
    }
    for (const auto& [ms, z] : std::vector<std::pair<std::vector<int>, std::vector<double>>>{
             {{1}, {1.7, 2.3}}, {{1, 2}, {1.7, 2.3, 2.9}}, {{2, 3}, {1.7, 2.3, 2.9}}}) {
        const RecurrenceCheck rc = recurrence_check(ms, z, staircase_boundary(static_cast<int>(z.size())), q);
        std::string name = fmt::format("recurrence N={} m=", z.size());
        for (size_t i = 0; i < ms.size(); ++i) name += (i ? " " : "") + std::to_string(ms[i]);
        rows.push_back(check(name, rc.lhs, rc.rhs, 1e-8));
    }
    {
        const MultiFn f = [&](const std::vector<double>& x) { return F_with_s({2, 1, 0}, x, q); };
        const MultiFn g = [&](const std::vector<double>& x) { return F_with_s({3, 1, 0}, x, q); };
        const MultiFn h = [&](const std::vector<double>& x) { return 2.5 * f(x) - 0.75 * g(x); };
        const std::vector<double> w = {1.7, 2.0, 2.4};
        const double lhs = apply_D(2, h, w, q);
        const double rhs = 2.5 * apply_D(2, f, w, q) - 0.75 * apply_D(2, g, w, q);
        rows.push_back(check("linearity k=2 m=3", lhs, rhs, 1e-12 * (1.0 + std::abs(rhs))));
    }
    return rows;
}

// Chi-square of row_sampler draws against the exact table; cells with expectation below 5 are pooled.
CheckRow row_chi_square(const std::string& name, double u, double v, double q, const Signature& lambda,
                        const Signature& mu, int box, int draws, uint64_t seed) {
    const int k = static_cast<int>(lambda.size());
    const RowTable table = exact_row_oracle(k, u, v, q, lambda, mu, box);
    std::map<Signature, int> counts;
    RngStream rng(seed, 0);
    for (int i = 0; i < draws; ++i) ++counts[row_sampler(k, u, v, q, lambda, mu, rng)];
    double chi2 = 0.0, pooled_e = table.tail * draws, pooled_o = 0.0;
    int cells = 0;
    for (const auto& [sig, pr] : table.prob) {
        const double e = pr * draws;
        const auto it = counts.find(sig);
        const double o = it == counts.end() ? 0.0 : it->second;
        if (it != counts.end()) counts.erase(it);
        if (e < 5.0) {
            pooled_e += e;
            pooled_o += o;
            continue;
        }
        chi2 += (o - e) * (o - e) / e;
        ++cells;
    }
    for (const auto& [sig, c] : counts) pooled_o += c;  // outside the box
    if (pooled_e > 0.0) {
        chi2 += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
        ++cells;
    }
    const double dof = std::max(1, cells - 1);
    const double crit = boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), 0.001));
    CheckRow row{name, chi2, dof, std::abs(chi2 - dof), crit - dof, chi2 <= crit};
    return row;
}

std::vector<CheckRow> sampler_exact_suite() {
    const double q = 0.5;
    std::vector<CheckRow> rows;
    rows.push_back(row_chi_square("row k=1 (2)/()", 2.0, 0.25, q, {2}, {}, 40, 50000, 11));
    rows.push_back(row_chi_square("row k=2 (3 1)/(2)", 2.0, 0.25, q, {3, 1}, {2}, 40, 50000, 12));
    rows.push_back(row_chi_square("row k=3 (5 3 1)/(4 3)", 1.6, 0.4, q, {5, 3, 1}, {4, 3}, 40, 50000, 13));
    {
        // N = 1 marginal of the v = 0 sampler: geometric with ratio b2.
        const ModelParams p = ModelParams::make(q, {2.0}, {});
        const double b2 = step_probs(2.0, q).second;
        int ones = 0;
        const int n = 50000;
        for (int i = 0; i < n; ++i) {
            RngStream rng(21, stream_id(i, 0, 0));
            ones += zero_sampler(1, p, rng).rows[0][0] == 1;
        }
        const double pr = 1.0 - b2;
        rows.push_back(check("zero sampler P(part=1)", static_cast<double>(ones) / n, pr,
                             4.0 * std::sqrt(pr * (1.0 - pr) / n)));
    }
    return rows;
}

std::vector<CheckRow> asymptotics_suite() {
    const double q = 0.5;
    std::vector<CheckRow> rows;
    {
        const ModelParams p = ModelParams::make(q, {2.0}, {});
        const double s = p.s;
        rows.push_back(check("cdf k=1 M=0 m=1 residue", cdf_contour({1}, p), (1.0 - q) / (q * (s * 2.0 - 1.0)), 1e-10));
    }
    {
        const ModelParams p = ModelParams::make(q, {2.0}, {0.25});
        rows.push_back(check("cdf k=1 M=1 m=1 vs measure", cdf_contour({1}, p), measure_prob({{1, {1}}}, p), 1e-10));
    }
    {
        // P(Y^1_1 <= 2, Y^2_2 <= 3) at N = 3, M = 0. Y^j_i <= m holds exactly when lambda^m has at
        // least i parts <= j, so the event is a condition on (lambda^2, lambda^3).
        const ModelParams p = ModelParams::make(q, {2.0, 2.0, 2.0}, {});
        const int cap = 60;
        double direct = 0.0;
        for (int a = 2; a <= cap; ++a)
            for (int b = 1; b <= 2 && b < a; ++b)
                for (int c = 1; c < b; ++c) {
                    const Signature l3 = {a, b, c};
                    for (int x = b; x <= a; ++x)
                        for (int y = c; y <= std::min(b, x - 1); ++y) {
                            if (y > 1) continue;
                            direct += measure_prob({{2, {x, y}}, {3, l3}}, p);
                        }
                }
        // the neglected mass beyond the cap is far below the bound at cap 60
        rows.push_back(check("cdf k=2 m=(2 3) vs measure", cdf_contour({2, 3}, p), direct, 1e-10));
    }
    rows.push_back(check("psi(0,0)", psi(0, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-12));
    rows.push_back(check("psi(-1,0)", psi(-1, 0.0), 0.5, 1e-12));
    {
        const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
        rows.push_back(check("gue edge (0,0)", gue_edge_cdf({0.0, 0.0}), 0.25 - phi0 * phi0, 1e-10));
    }
    {
        const LimitConstants lc = limit_constants(q, 2.0, 0.25);
        const double s = 1.0 / std::sqrt(q);
        rows.push_back(check("G(s)", std::abs(steepest_G(s, lc, q, 2.0, 0.25).first), 0.0, 1e-12));
        const double h = 1e-4;
        const auto G = [&](double z) { return steepest_G(z, lc, q, 2.0, 0.25).first.real(); };
        rows.push_back(check("G''(s)/2 = a2", (G(s + h) - 2.0 * G(s) + G(s - h)) / (2.0 * h * h), lc.a2, 1e-5));
        rows.push_back(check("b1 closed form", lc.b1, 1.0 / (2.0 - s) - 1.0 / (2.0 / q - s), 1e-12));
    }
    return rows;
}

}  // namespace

const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names = {"identities", "operators", "sampler-exact", "asymptotics"};
    return names;
}

std::vector<CheckRow> run_suite(const std::string& suite) {
    if (suite == "identities") return identities_suite();
    if (suite == "operators") return operators_suite();
    if (suite == "sampler-exact") return sampler_exact_suite();
    if (suite == "asymptotics") return asymptotics_suite();
    throw std::invalid_argument(fmt::format("unknown verify suite '{}'", suite));
}

void write_checks_csv(std::ostream& os, const std::vector<CheckRow>& rows) {
    os << "# sixv-verify v1\n";
    os << "name,lhs,rhs,diff,bound,pass\n";
    for (const auto& r : rows)
        os << r.name << ',' << num(r.lhs) << ',' << num(r.rhs) << ',' << num(r.diff) << ',' << num(r.bound) << ','
           << (r.pass ? "true" : "false") << '\n';
}

// ---- rendering ----

std::string render_svg(const PathCollection& w, const RenderOptions& opt) {
    if (auto bad = check_paths(w)) throw std::invalid_argument(fmt::format("cannot render: {}", *bad));
    const int N = w.N();
    int xmax = 0;
    for (const auto& row : w.rows)
        if (!row.empty()) xmax = std::max(xmax, row.front());
    const int cell = opt.cell, margin = cell;
    // Lattice column x sits at px(x); row y at py(y), rows increasing upward.
    auto px = [&](double x) { return margin + (x + 1.0) * cell; };
    auto py = [&](double y) { return margin + (N + 1.0 - y) * cell; };
    const int width = static_cast<int>(px(xmax + 1.0)) + margin / 2;
    const int height = static_cast<int>(py(0.0)) + margin / 2;

    std::string svg;
    svg += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
                       width, height, width, height);
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (int x = 0; x <= xmax; ++x)
        svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", px(x), py(0.5), px(x), py(N + 0.5));
    for (int y = 1; y <= N; ++y)
        svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", px(-0.5), py(y), px(xmax), py(y));
    svg += "</g>\n<g fill=\"none\" stroke=\"black\" stroke-width=\"2\">\n";
    // Path r enters row r from the left; after row y it sits at column lambda^y_r.
    for (int r = 1; r <= N; ++r) {
        std::string pts = fmt::format("{},{}", px(-1.0), py(r));
        int col = 0;
        for (int y = r; y <= N; ++y) {
            const int next = w.rows[y - 1][r - 1];
            if (y > r) pts += fmt::format(" {},{}", px(col), py(y));
            pts += fmt::format(" {},{}", px(next), py(y));
            col = next;
        }
        pts += fmt::format(" {},{}", px(col), py(N + 0.5));
        svg += fmt::format("<polyline points=\"{}\"/>\n", pts);
    }
    svg += "</g>\n";
    if (opt.holes) {
        const HoleArray y = extract_holes(w, std::min(opt.hole_depth, N));
        svg += "<g fill=\"white\" stroke=\"#c0392b\" stroke-width=\"1.5\">\n";
        for (size_t j = 0; j < y.size(); ++j)
            for (const auto& row : y[j])
                if (row) svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>\n", px(j + 1.0), py(*row), cell / 4.0);
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

// ---- command line ----

namespace {

std::vector<RawSample> load_raw(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error(fmt::format("cannot read {}", path));
    return read_raw(is);
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sampling and verification tools for the stochastic six-vertex model with a free boundary"};
    app.require_subcommand(1);

    auto* sample = app.add_subcommand("sample", "Draw a sampling campaign");
    std::string config_path;
    std::vector<std::string> overrides;
    sample->add_option("config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
    sample->add_option("--set", overrides, "key=value override, applied after the file");

    auto* stats = app.add_subcommand("stats", "Statistics of a raw sample file");
    std::string raw_path, mode = "edge", stats_config;
    int depth = 5;
    stats->add_option("raw", raw_path, "raw sample file")->required()->check(CLI::ExistingFile);
    stats->add_option("--mode", mode, "edge | height-variance | holes")
        ->check(CLI::IsMember({"edge", "height-variance", "holes"}));
    stats->add_option("--config", stats_config, "campaign config holding q, u, v (default: campaign.cfg beside raw)");
    stats->add_option("--depth", depth, "hole array depth for --mode holes");

    auto* verify = app.add_subcommand("verify", "Run an identity suite and print a CSV report");
    std::string suite;
    verify->add_option("suite", suite, "identities | operators | sampler-exact | asymptotics")->required();

    auto* render = app.add_subcommand("render", "Render one sample as SVG");
    std::string render_raw;
    int index = 0;
    bool holes = false;
    render->add_option("raw", render_raw, "raw sample file")->required()->check(CLI::ExistingFile);
    render->add_option("--index", index, "sample index")->required();
    render->add_flag("--holes", holes, "mark holes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (sample->parsed()) {
            CampaignConfig cfg;
            if (!config_path.empty()) {
                std::ifstream is(config_path);
                cfg = parse_config(is);
            }
            apply_overrides(cfg, overrides);
            const CampaignSummary sum = cmd_sample(cfg);
            out << fmt::format("sampled {} of N={} M={} q={} u={} v={} seed={} in {:.2f} s; invariants ok\n",
                               sum.samples, cfg.N, cfg.M, cfg.q, cfg.u, cfg.v, cfg.seed, sum.seconds);
            for (const auto& f : sum.files) out << "wrote " << f << '\n';
        } else if (stats->parsed()) {
            const auto records = load_raw(raw_path);
            if (mode == "edge") {
                if (stats_config.empty())
                    stats_config = (std::filesystem::path(raw_path).parent_path() / "campaign.cfg").string();
                std::ifstream is(stats_config);
                if (!is) throw std::runtime_error(fmt::format("cannot read {}", stats_config));
                const CampaignConfig cfg = parse_config(is);
                write_edge_csv(out, edge_stats(records, cfg.q, cfg.u, cfg.v));
            } else if (mode == "height-variance") {
                write_height_variance_csv(out, records);
            } else {
                write_holes_csv(out, records, depth);
            }
        } else if (verify->parsed()) {
            if (std::find(verify_suites().begin(), verify_suites().end(), suite) == verify_suites().end()) {
                err << fmt::format("unknown suite '{}'; expected one of identities, operators, sampler-exact, asymptotics\n",
                                   suite);
                return 2;
            }
            const auto rows = run_suite(suite);
            write_checks_csv(out, rows);
            return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; }) ? 0 : 1;
        } else if (render->parsed()) {
            const auto records = load_raw(render_raw);
            if (index < 0 || index >= static_cast<int>(records.size()))
                throw std::out_of_range(fmt::format("index {} outside [0, {})", index, records.size()));
            RenderOptions opt;
            opt.holes = holes;
            out << render_svg(records[index].paths, opt);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace sixv
