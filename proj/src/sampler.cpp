#include "sixv/sampler.hpp"

#include "sixv/symmetric.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sixv {

std::pair<double, double> step_probs(double u, double q) {
    const double s = 1.0 / std::sqrt(q);
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("step_probs needs 0 < q < 1");
    if (!(u > s)) throw std::invalid_argument(fmt::format("step_probs needs u > q^(-1/2), got u = {}", u));
    const double den = 1.0 - u * s;
    return {(1.0 - u * std::sqrt(q)) / den, (1.0 / q - u * s) / den};
}

PathCollection zero_sampler(int N, const ModelParams& p, RngStream& rng) {
    if (N < 0 || N > static_cast<int>(p.u.size()))
        throw std::invalid_argument(fmt::format("zero_sampler needs N <= {} spectral parameters", p.u.size()));
    require_valid(ModelParams::make(p.q, {p.u.begin(), p.u.begin() + N}, {}));
    std::vector<double> b1(N + 1), b2(N + 1);
    for (int y = 1; y <= N; ++y) std::tie(b1[y], b2[y]) = step_probs(p.u[y - 1], p.q);

    // I2 and J2 of the vertex (x, y), stored per row for x = 1, 2, ...
    std::vector<std::vector<char>> i2(N + 1), j2(N + 1);
    PathCollection w;
    w.rows.resize(N);
    int done = 0;
    for (int diag = 2; done < N; ++diag) {
        for (int x = std::max(1, diag - N); x < diag; ++x) {
            const int y = diag - x;
            const int up_in = y > 1 ? i2[y - 1][x - 1] : 0;
            const int left_in = x > 1 ? j2[y][x - 2] : 1;
            int a, b;
            if (up_in == 0 && left_in == 0) {
                a = 0, b = 0;
            } else if (up_in == 1 && left_in == 1) {
                a = 1, b = 1;
            } else if (left_in == 1) {
                if (rng.bernoulli(b2[y])) a = 0, b = 1;
                else a = 1, b = 0;
            } else {
                if (rng.bernoulli(b1[y])) a = 1, b = 0;
                else a = 0, b = 1;
            }
            i2[y].push_back(static_cast<char>(a));
            j2[y].push_back(static_cast<char>(b));
            if (a == 1) w.rows[y - 1].push_back(x);
            if (y == N && a == 1) ++done;
        }
    }
    for (auto& row : w.rows) std::reverse(row.begin(), row.end());
    return w;
}

RowWeights::RowWeights(double u_, double v_, double q_) : u(u_), v(v_), q(q_) {
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    F[a][b][c][d] = vertex_weight(a, b, c, d, u, q);
                    G[a][b][c][d] = conj_vertex_weight(a, b, c, d, v, q);
                }
    p = F[0][1][0][1] * G[0][1][0][1];
    r = F[0][1][1][0] * G[0][1][1][0];
    A = F[1][0][0][1] * G[1][0][0][1];
    log_p = std::log(p);
    powers.resize(4096);
    powers[0] = 1.0;
    for (size_t n = 1; n < powers.size(); ++n) powers[n] = powers[n - 1] * p;
}

double part_weight_by_columns(const RowWeights& w, int c, int d, PartFlags f, int t) {
    if (t < c || t > d) return 0.0;
    const int last = d == kInfPart ? t : d;
    int jF = f.LM ? 0 : 1, jG = f.LL ? 0 : 1;
    double weight = 1.0;
    for (int x = c; x <= last; ++x) {
        const int iF = (x == c && f.LM) + (x == d && f.RM);
        const int iG = (x == c && f.LL) + (x == d && f.RL);
        const int i2 = x == t;
        const int jF2 = iF + jF - i2, jG2 = iG + jG - i2;
        if (iF > 1 || iG > 1 || jF2 < 0 || jF2 > 1 || jG2 < 0 || jG2 > 1) return 0.0;
        weight *= w.F[iF][jF][i2][jF2] * w.G[iG][jG][i2][jG2];
        jF = jF2;
        jG = jG2;
    }
    return weight;
}

ArrowCase arrow_case(const RowWeights& w, int c, int d, PartFlags f) {
    if (d < c) throw std::invalid_argument("arrow_case needs c <= d");
    ArrowCase out;
    out.ratio = w.p;
    if (c == d) {
        out.at_c = part_weight_by_columns(w, c, d, f, c);
        return out;
    }
    const double pass = (f.LM ? w.F[1][0][0][1] : w.F[0][1][0][1]) * (f.LL ? w.G[1][0][0][1] : w.G[0][1][0][1]);
    const double place = (f.LM ? w.F[1][0][1][0] : w.F[0][1][1][0]) * (f.LL ? w.G[1][0][1][0] : w.G[0][1][1][0]);
    const double after = (f.RM ? w.F[1][0][0][1] : 1.0) * (f.RL ? w.G[1][0][0][1] : 1.0);
    const double end = (f.RM ? w.F[1][1][1][1] : w.F[0][1][1][0]) * (f.RL ? w.G[1][1][1][1] : w.G[0][1][1][0]);
    if (d == kInfPart) {
        out.at_c = place;
        out.first_mid = pass * w.r;
        return out;
    }
    out.at_c = place * after;
    if (d - c >= 2) out.first_mid = pass * w.r * after;
    out.at_d = pass * std::pow(w.p, d - c - 1) * end;
    return out;
}

namespace {

struct Masses {
    double at_c = 0.0, mid = 0.0, at_d = 0.0;
    double pw = 0.0;  // p^{d-c-1}, reused by the middle-run draw
};

Masses weighted_masses(const RowWeights& w, int c, int d, PartFlags f, double wL1, double wL2, double wR1,
                       double wR2) {
    Masses m;
    if (c == d) {
        m.at_c = part_weight_by_columns(w, c, d, f, c) * wL2 * wR2;
        return m;
    }
    const double pass = (f.LM ? w.F[1][0][0][1] : w.F[0][1][0][1]) * (f.LL ? w.G[1][0][0][1] : w.G[0][1][0][1]);
    const double place = (f.LM ? w.F[1][0][1][0] : w.F[0][1][1][0]) * (f.LL ? w.G[1][0][1][0] : w.G[0][1][1][0]);
    if (d == kInfPart) {
        m.at_c = place * wL2 * wR1;
        m.mid = pass * w.r / (1.0 - w.p) * wL1 * wR1;
        return m;
    }
    const double after = (f.RM ? w.F[1][0][0][1] : 1.0) * (f.RL ? w.G[1][0][0][1] : 1.0);
    const double end = (f.RM ? w.F[1][1][1][1] : w.F[0][1][1][0]) * (f.RL ? w.G[1][1][1][1] : w.G[0][1][1][0]);
    m.pw = w.p_pow(d - c - 1);
    m.at_c = place * after * wL2 * wR1;
    if (d - c >= 2) m.mid = pass * w.r * after * (1.0 - m.pw) / (1.0 - w.p) * wL1 * wR1;
    m.at_d = pass * m.pw * end * wL1 * wR2;
    return m;
}

int draw_part(const RowWeights& w, int c, int d, const Masses& m, RngStream& rng) {
    if (c == d) return c;
    const double total = m.at_c + m.mid + m.at_d;
    if (total == 0.0 || !std::isfinite(total))
        throw std::runtime_error(fmt::format("part range [{}, {}] has no admissible weight", c, d));
    double pc = m.at_c / total, pm = m.mid / total;
    const double pd = m.at_d / total;
    for (double pr : {pc, pm, pd})
        if (pr < -1e-12 || pr > 1.0 + 1e-12)
            throw std::runtime_error(fmt::format("negative probability {} in part range [{}, {}]", pr, c, d));
    pc = std::max(pc, 0.0);
    pm = std::max(pm, 0.0);
    const double U = rng.uniform();
    if (U < pc) return c;
    if (U >= pc + pm && d != kInfPart) return d;
    // middle run: P(c + i) proportional to p^{i-1}, i = 1..n-1
    const double V = rng.uniform();
    const bool bounded = d != kInfPart;
    const double mass = bounded ? 1.0 - m.pw : 1.0;
    double i = 1.0 + std::floor(std::log1p(-V * mass) / w.log_p);
    if (bounded) i = std::min(i, static_cast<double>(d - c - 1));
    i = std::max(i, 1.0);
    if (c + i > static_cast<double>(INT_MAX - 1)) throw std::runtime_error("part position overflow");
    return c + static_cast<int>(i);
}

PartFlags flags_for(int c, int d, int i, const Signature& lambda, const Signature& mu) {
    const int k = static_cast<int>(lambda.size());
    PartFlags f;
    f.LL = c == lambda[i - 1];
    f.LM = i <= k - 1 && c == mu[i - 1];
    f.RL = i >= 2 && d == lambda[i - 2];
    f.RM = i >= 2 && d == mu[i - 2];
    return f;
}

// Column-product sum over parts x..y in which a column shared by two neighbouring ranges
// carries an extra factor A (each side counts its own copy of the (1,0;0,1) pair).
double raw_weight(const RowWeights& w, const std::vector<int>& c, const std::vector<int>& d, int x, int y,
                  const Signature& lambda, const Signature& mu) {
    if (x > y) return 1.0;
    for (int i = x; i <= y; ++i)
        if (c[i] > d[i]) return 0.0;
    const int s = (x + y) / 2;
    double wR1 = raw_weight(w, c, d, x, s - 1, lambda, mu), wR2 = wR1;
    if (s - 1 >= x && d[s] == c[s - 1]) {
        std::vector<int> c2 = c;
        ++c2[s - 1];
        wR2 = w.A * raw_weight(w, c2, d, x, s - 1, lambda, mu);
    }
    double wL1 = raw_weight(w, c, d, s + 1, y, lambda, mu), wL2 = wL1;
    if (s + 1 <= y && c[s] == d[s + 1]) {
        std::vector<int> d2 = d;
        --d2[s + 1];
        wL2 = w.A * raw_weight(w, c, d2, s + 1, y, lambda, mu);
    }
    return base_weight(w, c[s], d[s], flags_for(c[s], d[s], s, lambda, mu), wL1, wL2, wR1, wR2);
}

int touching_pairs(const IntervalBounds& b, int x, int y) {
    int n = 0;
    for (int i = x; i < y; ++i) n += b.c[i] == b.d[i + 1];
    return n;
}

void check_rows(const Signature& lambda, const Signature& mu) {
    if (lambda.empty() || mu.size() + 1 != lambda.size())
        throw std::invalid_argument("row update needs lambda with k parts and mu with k-1 parts");
    if (!is_strict(lambda) || !is_strict(mu) || !is_nonneg(lambda) || !is_nonneg(mu))
        throw std::invalid_argument("row update needs strict nonnegative signatures");
}

}  // namespace

double base_weight(const RowWeights& w, int c, int d, PartFlags f, double wL1, double wL2, double wR1,
                   double wR2) {
    const Masses m = weighted_masses(w, c, d, f, wL1, wL2, wR1, wR2);
    return m.at_c + m.mid + m.at_d;
}

double base_weight(double u, double v, double q, int c, int d, double wL1, double wL2, double wR1, double wR2) {
    PartFlags f;
    f.LL = true;
    f.RM = true;
    return base_weight(RowWeights(u, v, q), c, d, f, wL1, wL2, wR1, wR2);
}

IntervalBounds initial_bounds(const Signature& lambda, const Signature& mu) {
    check_rows(lambda, mu);
    const int k = static_cast<int>(lambda.size());
    IntervalBounds b;
    b.c.assign(k + 1, 0);
    b.d.assign(k + 1, 0);
    for (int i = 1; i <= k; ++i) {
        b.c[i] = std::max({i <= k - 1 ? mu[i - 1] : 0, lambda[i - 1], 0});
        b.d[i] = i == 1 ? kInfPart : std::min(mu[i - 2], lambda[i - 2]);
    }
    return b;
}

PartFlags part_flags(const IntervalBounds& b, int i, const Signature& lambda, const Signature& mu) {
    return flags_for(b.c[i], b.d[i], i, lambda, mu);
}

double interval_weight(const RowWeights& w, const IntervalBounds& b, int x, int y, const Signature& lambda,
                       const Signature& mu) {
    const double raw = raw_weight(w, b.c, b.d, x, y, lambda, mu);
    return raw / std::pow(w.A, touching_pairs(b, x, y));
}

double interval_weight_brute(const RowWeights& w, const IntervalBounds& b, int x, int y, const Signature& lambda,
                             const Signature& mu, int box) {
    if (x > y) return 1.0;
    const int k = static_cast<int>(lambda.size());
    std::vector<int> hi(k + 1);
    for (int i = x; i <= y; ++i) hi[i] = std::min(b.d[i], box);
    std::vector<int> cols;
    for (int i = x; i <= y; ++i)
        for (int col = b.c[i]; col <= hi[i]; ++col) cols.push_back(col);
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

    auto count_below = [](const Signature& sig, int col) {
        return static_cast<int>(std::count_if(sig.begin(), sig.end(), [col](int v) { return v < col; }));
    };
    std::vector<int> nu(k + 1);
    double total = 0.0;
    auto rec = [&](auto&& self, int i) -> void {
        if (i > y) {
            double weight = 1.0;
            for (int col : cols) {
                int placed = 0, below = 0;
                for (int j = x; j <= y; ++j) {
                    placed += nu[j] == col;
                    below += nu[j] < col;
                }
                const int iF = multiplicity(mu, col), iG = multiplicity(lambda, col);
                const int jF = 1 + count_below(mu, col) - (k - y) - below;
                const int jG = count_below(lambda, col) - (k - y) - below;
                const int jF2 = iF + jF - placed, jG2 = iG + jG - placed;
                for (int val : {iF, iG, placed, jF, jG, jF2, jG2})
                    if (val < 0 || val > 1) return;
                weight *= w.F[iF][jF][placed][jF2] * w.G[iG][jG][placed][jG2];
            }
            total += weight;
            return;
        }
        const int top = i == x ? hi[i] : std::min(hi[i], nu[i - 1] - 1);
        for (int t = b.c[i]; t <= top; ++t) {
            nu[i] = t;
            self(self, i + 1);
        }
    };
    rec(rec, x);
    return total;
}

int arrow_sampler(const RowWeights& w, int c, int d, PartFlags f, double wL1, double wL2, double wR1, double wR2,
                  RngStream& rng) {
    if (d < c) throw std::invalid_argument(fmt::format("empty part range [{}, {}]", c, d));
    return draw_part(w, c, d, weighted_masses(w, c, d, f, wL1, wL2, wR1, wR2), rng);
}

namespace {

struct RowWorkspace {
    std::vector<int> c, d;
    std::vector<double> full, red;
    std::vector<Masses> masses;
};

void row_sample_into(const RowWeights& w, const Signature& lambda, const Signature& mu, RngStream& rng,
                     Signature& out, RowWorkspace& ws) {
    const int k = static_cast<int>(lambda.size());
    auto& c = ws.c;
    auto& d = ws.d;
    c.assign(k + 2, 0);
    d.assign(k + 2, 0);
    for (int i = 1; i <= k; ++i) {
        c[i] = std::max({i <= k - 1 ? mu[i - 1] : 0, lambda[i - 1], 0});
        d[i] = i == 1 ? kInfPart : std::min(mu[i - 2], lambda[i - 2]);
        if (c[i] > d[i]) throw std::runtime_error(fmt::format("no admissible row: part {} range is empty", i));
    }
    auto& full = ws.full;
    auto& red = ws.red;
    full.assign(k + 2, 0.0);
    red.assign(k + 2, 0.0);
    ws.masses.resize(k + 2);
    full[k + 1] = 1.0;
    for (int i = k; i >= 1; --i) {
        const bool touch_below = i < k && c[i] == d[i + 1];
        const double low_placed = touch_below ? red[i + 1] : full[i + 1];
        ws.masses[i] = weighted_masses(w, c[i], d[i], flags_for(c[i], d[i], i, lambda, mu), full[i + 1], low_placed,
                                       1.0, 1.0);
        const Masses& m = ws.masses[i];
        full[i] = m.at_c + m.mid + m.at_d;
        if (i >= 2 && d[i] == c[i - 1] && d[i] - 1 >= c[i])
            red[i] = w.A * base_weight(w, c[i], d[i] - 1, flags_for(c[i], d[i] - 1, i, lambda, mu), full[i + 1],
                                       low_placed, 1.0, 1.0);
        const double scale = std::abs(full[i]);
        if (scale == 0.0 || !std::isfinite(scale))
            throw std::runtime_error(fmt::format("no admissible row: parts {}..{} carry zero weight", i, k));
        full[i] /= scale;
        red[i] /= scale;
    }
    out.resize(k);
    for (int i = 1; i <= k; ++i) {
        int top = d[i];
        if (i >= 2 && out[i - 2] == d[i]) --top;
        if (top == d[i]) {
            out[i - 1] = draw_part(w, c[i], top, ws.masses[i], rng);
        } else {
            const bool touch_below = i < k && c[i] == d[i + 1];
            out[i - 1] = arrow_sampler(w, c[i], top, flags_for(c[i], top, i, lambda, mu), full[i + 1],
                                       touch_below ? red[i + 1] : full[i + 1], 1.0, 1.0, rng);
        }
    }
}

void midpoint_sample(const RowWeights& w, std::vector<int> c, std::vector<int> d, int x, int y,
                     const Signature& lambda, const Signature& mu, RngStream& rng, Signature& nu) {
    if (x > y) return;
    const int s = (x + y) / 2;
    double wR1 = raw_weight(w, c, d, x, s - 1, lambda, mu), wR2 = wR1;
    if (s - 1 >= x && d[s] == c[s - 1]) {
        std::vector<int> c2 = c;
        ++c2[s - 1];
        wR2 = w.A * raw_weight(w, c2, d, x, s - 1, lambda, mu);
    }
    double wL1 = raw_weight(w, c, d, s + 1, y, lambda, mu), wL2 = wL1;
    if (s + 1 <= y && c[s] == d[s + 1]) {
        std::vector<int> d2 = d;
        --d2[s + 1];
        wL2 = w.A * raw_weight(w, c, d2, s + 1, y, lambda, mu);
    }
    const int t = arrow_sampler(w, c[s], d[s], flags_for(c[s], d[s], s, lambda, mu), wL1, wL2, wR1, wR2, rng);
    nu[s - 1] = t;
    if (s + 1 <= y && t == d[s + 1]) --d[s + 1];
    if (s - 1 >= x && t == c[s - 1]) ++c[s - 1];
    midpoint_sample(w, c, d, x, s - 1, lambda, mu, rng, nu);
    midpoint_sample(w, c, d, s + 1, y, lambda, mu, rng, nu);
}

}  // namespace

Signature row_sampler(const RowWeights& w, const Signature& lambda, const Signature& mu, RngStream& rng) {
    check_rows(lambda, mu);
    RowWorkspace ws;
    Signature out;
    row_sample_into(w, lambda, mu, rng, out, ws);
    return out;
}

Signature row_sampler(int k, double u, double v, double q, const Signature& lambda, const Signature& mu,
                      RngStream& rng) {
    if (static_cast<int>(lambda.size()) != k) throw std::invalid_argument("lambda must have k parts");
    require_valid(ModelParams::make(q, {u}, {v}));
    return row_sampler(RowWeights(u, v, q), lambda, mu, rng);
}

Signature row_sampler_midpoint(const RowWeights& w, const Signature& lambda, const Signature& mu, RngStream& rng) {
    const IntervalBounds b = initial_bounds(lambda, mu);
    for (int i = 1; i <= b.k(); ++i)
        if (b.c[i] > b.d[i]) throw std::runtime_error(fmt::format("no admissible row: part {} range is empty", i));
    Signature nu(b.k());
    midpoint_sample(w, b.c, b.d, 1, b.k(), lambda, mu, rng, nu);
    return nu;
}

RowTable exact_row_oracle(int k, double u, double v, double q, const Signature& lambda, const Signature& mu, int box,
                          double max_tail) {
    if (static_cast<int>(lambda.size()) != k) throw std::invalid_argument("lambda must have k parts");
    const IntervalBounds b = initial_bounds(lambda, mu);
    if (box < b.c[1] + 1) throw std::invalid_argument(fmt::format("box must be at least {}", b.c[1] + 1));
    const RowWeights w(u, v, q);
    RowTable table;
    double total = 0.0, edge = 0.0;
    Signature nu(k);
    auto rec = [&](auto&& self, int i) -> void {
        if (i > k) {
            const double weight = skew_F_row(nu, mu, u, q) * skew_G_row(nu, lambda, v, q);
            if (weight == 0.0) return;
            table.prob[nu] = weight;
            total += weight;
            if (nu[0] == box) edge += weight;
            return;
        }
        const int top = i == 1 ? box : std::min(b.d[i], nu[i - 2] - 1);
        for (int t = b.c[i]; t <= top; ++t) {
            nu[i - 1] = t;
            self(self, i + 1);
        }
    };
    rec(rec, 1);
    const double tail = edge * w.p / (1.0 - w.p);
    total += tail;
    if (total == 0.0 || !std::isfinite(total)) throw std::runtime_error("row oracle has no admissible mass");
    for (auto& [sig, pr] : table.prob) {
        pr /= total;
        if (pr < -1e-12 || pr > 1.0 + 1e-12) throw std::runtime_error(fmt::format("negative probability {}", pr));
    }
    table.tail = tail / total;
    if (table.tail > max_tail)
        throw std::runtime_error(fmt::format("tail mass {:.3g} above {:.3g}; use a larger box", table.tail, max_tail));
    return table;
}

PathCollection chain_sampler(const ModelParams& p, uint64_t seed, uint64_t sample) {
    require_valid(p);
    const int N = static_cast<int>(p.u.size()), M = static_cast<int>(p.v.size());
    RngStream zr(seed, stream_id(sample, 0, 0));
    PathCollection w = zero_sampler(N, p, zr);

    // Vertex constants per distinct (u, v) pair; homogeneous runs need one.
    std::vector<std::pair<std::pair<double, double>, RowWeights>> cache;
    auto weights_for = [&](double u, double v) -> const RowWeights& {
        for (const auto& [key, rw] : cache)
            if (key.first == u && key.second == v) return rw;
        cache.emplace_back(std::make_pair(u, v), RowWeights(u, v, p.q));
        return cache.back().second;
    };
    RowWorkspace ws;
    Signature next;
    const Signature empty;
    for (int j = 1; j <= M; ++j) {
        for (int k = 1; k <= N; ++k) {
            const RowWeights& rw = weights_for(p.u[k - 1], p.v[j - 1]);
            RngStream rng(seed, stream_id(sample, j, k));
            row_sample_into(rw, w.rows[k - 1], k >= 2 ? w.rows[k - 2] : empty, rng, next, ws);
            w.rows[k - 1].swap(next);
        }
    }
    return w;
}

}  // namespace sixv
