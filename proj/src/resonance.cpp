#include "vpatch/resonance.hpp"
#include "vpatch/geometry.hpp"
#include "vpatch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

namespace vpatch {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// All ell in Z^d with |ell|_1 <= L.
std::vector<std::vector<int>> ell_box(int d, int L)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur(d, 0);
    auto rec = [&](auto&& self, int i, int budget) -> void {
        if (i == d) {
            out.push_back(cur);
            return;
        }
        for (int v = -budget; v <= budget; ++v) {
            cur[i] = v;
            self(self, i + 1, budget - std::abs(v));
        }
        cur[i] = 0;
    };
    rec(rec, 0, L);
    return out;
}

const std::vector<std::vector<int>>& cached_ell_box(int d, int L)
{
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(d, L);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, ell_box(d, L)).first;
    return it->second;
}

int l1(const std::vector<int>& ell)
{
    int s = 0;
    for (int v : ell) s += std::abs(v);
    return s;
}

double bracket(const std::vector<int>& ell) { return std::max(1, l1(ell)); }

bool excluded_mode(int n, const ResonanceConfig& cfg)
{
    if (n >= 2 && n <= cfg.n_bar) return true;
    return std::find(cfg.sites.begin(), cfg.sites.end(), n) != cfg.sites.end();
}

std::vector<int> admissible_modes(const ResonanceConfig& cfg)
{
    std::vector<int> a;
    for (int n = 1; n <= cfg.n_max; ++n)
        if (!excluded_mode(n, cfg)) a.push_back(n);
    return a;
}

double critical_or_one(int n) { return n <= 2 ? 1.0 : critical_gamma(n); }

struct Sorted {
    std::vector<double> value;
    std::vector<int> mode;
};

Sorted sort_by_value(const std::vector<int>& modes, const std::vector<double>& om)
{
    std::vector<std::pair<double, int>> v;
    for (int n : modes) v.emplace_back(om[n], n);
    std::sort(v.begin(), v.end());
    Sorted s;
    for (auto& [x, n] : v) {
        s.value.push_back(x);
        s.mode.push_back(n);
    }
    return s;
}

// Indices of sorted values in [lo, hi]
std::pair<size_t, size_t> window(const Sorted& s, double lo, double hi)
{
    const auto b = std::lower_bound(s.value.begin(), s.value.end(), lo);
    const auto e = std::upper_bound(s.value.begin(), s.value.end(), hi);
    return {static_cast<size_t>(b - s.value.begin()), static_cast<size_t>(e - s.value.begin())};
}

void offer(FamilyMargin& f, double m, const std::vector<int>& ell, int a, int b)
{
    if (m < f.margin) {
        f.margin = m;
        f.ell = ell;
        f.a = a;
        f.b = b;
        f.capped = false;
    }
}

} // namespace

std::string to_string(Family f)
{
    switch (f) {
    case Family::zeroth: return "zeroth";
    case Family::transport: return "transport";
    case Family::first: return "first";
    case Family::second_diff: return "second_diff";
    case Family::second_sum: return "second_sum";
    }
    return "?";
}

void validate(const ResonanceConfig& cfg)
{
    if (cfg.sites.empty()) throw DomainError("tangential site set must be non-empty");
    if (cfg.n_bar < 2) throw DomainError("n_bar must be >= 2");
    std::set<int> uniq(cfg.sites.begin(), cfg.sites.end());
    if (uniq.size() != cfg.sites.size()) throw DomainError("tangential sites must be distinct");
    for (int s : cfg.sites) {
        if (s <= cfg.n_bar) throw DomainError("tangential sites must exceed n_bar");
        if (s > cfg.n_max) throw DomainError("tangential sites must not exceed n_max");
    }
    if (!(cfg.upsilon > 0)) throw DomainError("upsilon must be positive");
    for (double u : cfg.upsilon_sequence)
        if (!(u > 0)) throw DomainError("upsilon sequence entries must be positive");
    if (!(cfg.tau >= 1)) throw DomainError("tau must be >= 1");
    if (cfg.l_max < 1) throw DomainError("l_max must be >= 1");
    if (!(cfg.gamma_lo < cfg.gamma_hi)) throw DomainError("gamma range must be increasing");
    if (!(cfg.dgamma > 0) || cfg.dgamma > cfg.gamma_hi - cfg.gamma_lo)
        throw DomainError("dgamma must be positive and at most the interval length");
    const double lo = critical_or_one(cfg.n_bar), hi = critical_or_one(cfg.n_bar + 1);
    if (!(cfg.gamma_lo > lo && cfg.gamma_hi < hi))
        throw DomainError("gamma range must lie inside the open interval between the critical aspect "
                          "ratios of n_bar and n_bar + 1");
}

double MelnikovMargins::min() const
{
    double m = inf;
    for (const auto& f : family) m = std::min(m, f.margin);
    return m;
}

double shifted_frequency(int n, double gamma, double shift)
{
    return linear_frequency(n, gamma) + n * shift;
}

MelnikovMargins melnikov_margins(double gamma, const ResonanceConfig& cfg, double cap)
{
    const int d = static_cast<int>(cfg.sites.size());
    const auto& ells = cached_ell_box(d, cfg.l_max);
    const std::vector<int> modes = admissible_modes(cfg);
    std::vector<double> om(cfg.n_max + 1, 0.0);
    for (int n = 1; n <= cfg.n_max; ++n) om[n] = shifted_frequency(n, gamma, cfg.freq_shift);
    std::vector<double> w(d);
    for (int s = 0; s < d; ++s) w[s] = om[cfg.sites[s]];
    const double om1 = om[1];
    const Sorted sorted = sort_by_value(modes, om);
    const double wcap = cfg.index_restriction ? cap : inf;

    MelnikovMargins out;
    auto& zf = out.family[static_cast<int>(Family::zeroth)];
    auto& tf = out.family[static_cast<int>(Family::transport)];
    auto& ff = out.family[static_cast<int>(Family::first)];
    auto& df = out.family[static_cast<int>(Family::second_diff)];
    auto& sf = out.family[static_cast<int>(Family::second_sum)];
    if (std::isfinite(wcap))
        for (auto& f : out.family) f.margin = wcap;

    for (const auto& ell : ells) {
        double T = 0;
        for (int s = 0; s < d; ++s) T += ell[s] * w[s];
        const bool zero = l1(ell) == 0;
        const double scale = std::pow(bracket(ell), cfg.tau);

        if (!zero) offer(zf, std::abs(T) * scale / 8, ell, 0, 0);

        // transport: |T + Omega_1 j|, weight 8<j>
        {
            const double e = 8 * wcap / scale;
            auto try_j = [&](int j) {
                if (zero && j == 0) return;
                offer(tf, std::abs(T + om1 * j) * scale / (8 * std::max(1, std::abs(j))), ell, j, 0);
            };
            if (std::isfinite(e) && om1 > e) {
                const double js = -T / om1;
                const int j0 = static_cast<int>(std::lround(js));
                for (int j = j0; j <= cfg.n_max && om1 * std::abs(j - js) < e * (1 + std::abs(j)); ++j)
                    if (j >= -cfg.n_max) try_j(j);
                for (int j = j0 - 1; j >= -cfg.n_max && om1 * std::abs(j - js) < e * (1 + std::abs(j)); --j)
                    if (j <= cfg.n_max) try_j(j);
            } else {
                for (int j = -cfg.n_max; j <= cfg.n_max; ++j) try_j(j);
            }
        }

        for (int n : modes) offer(ff, std::abs(T + om[n]) * scale / (4.0 * n), ell, n, 0);

        for (int n : modes) {
            const double y = T + om[n];
            const double W = 4 * wcap * cfg.n_max / scale;
            auto [b, e] = std::isfinite(W) ? window(sorted, y - W, y + W)
                                           : std::make_pair(size_t{0}, sorted.value.size());
            for (size_t k = b; k < e; ++k) {
                const int n2 = sorted.mode[k];
                if (zero && n2 == n) continue;
                offer(df, std::abs(y - om[n2]) * scale / (4.0 * std::max(1, std::abs(n - n2))), ell, n, n2);
            }
        }

        for (int n : modes) {
            const double y = -T - om[n];
            const double W = 4 * wcap * (n + cfg.n_max) / scale;
            auto [b, e] = std::isfinite(W) ? window(sorted, y - W, y + W)
                                           : std::make_pair(size_t{0}, sorted.value.size());
            for (size_t k = b; k < e; ++k) {
                const int n2 = sorted.mode[k];
                offer(sf, std::abs(om[n2] - y) * scale / (4.0 * (n + n2)), ell, n, n2);
            }
        }
    }
    return out;
}

double second_difference_direct(double gamma, const std::vector<int>& sites, const std::vector<int>& ell,
                                int n, int n2)
{
    double T = 0;
    for (size_t s = 0; s < sites.size(); ++s) T += ell[s] * linear_frequency(sites[s], gamma);
    return T + linear_frequency(n, gamma) - linear_frequency(n2, gamma);
}

double second_difference_asymptotic(double gamma, const std::vector<int>& sites,
                                    const std::vector<int>& ell, int n, int n2)
{
    const EllipseParams p = ellipse_params(gamma);
    double T = 0;
    for (size_t s = 0; s < sites.size(); ++s) T += ell[s] * linear_frequency(sites[s], gamma);
    return T + (n - n2) * p.omega_gamma + asymptotic_remainder(n, p) - asymptotic_remainder(n2, p);
}

namespace {

using Triple = std::array<double, 3>;

Triple derivatives(int n, double gamma, double shift)
{
    auto f = [&](double g) { return shifted_frequency(n, g, shift); };
    return {f(gamma), richardson_derivative(f, gamma, 1), richardson_derivative(f, gamma, 2)};
}

Triple remainder_derivatives(int n, double gamma)
{
    auto f = [&](double g) { return asymptotic_remainder(n, ellipse_params(g)); };
    return {f(gamma), richardson_derivative(f, gamma, 1), richardson_derivative(f, gamma, 2)};
}

struct Best {
    double value = inf;
    Family family = Family::zeroth;
    std::vector<int> ell;
    int a = 0, b = 0;

    void offer(double v, Family f, const std::vector<int>& l, int x, int y)
    {
        if (v < value) {
            value = v;
            family = f;
            ell = l;
            a = x;
            b = y;
        }
    }
};

} // namespace

TransversalityResult transversality_margins(double gamma, const ResonanceConfig& cfg, int k_max)
{
    if (k_max < 0 || k_max > 2) throw DomainError("k_max must be in [0, 2]");
    const int d = static_cast<int>(cfg.sites.size());
    const auto& ells = cached_ell_box(d, cfg.l_max);
    const std::vector<int> modes = admissible_modes(cfg);
    const double sh = cfg.freq_shift;

    std::vector<Triple> D(cfg.n_max + 1);
    std::vector<double> om0(cfg.n_max + 1, 0.0);
    for (int n = 1; n <= cfg.n_max; ++n) {
        D[n] = derivatives(n, gamma, sh);
        om0[n] = D[n][0];
    }
    const Triple O1 = D[1];
    const Sorted sorted = sort_by_value(modes, om0);
    // sup over the tail of |d^k r_n|, attained at the first tail index (r decays geometrically)
    Triple R = remainder_derivatives(cfg.n_max + 1, gamma);
    for (double& v : R) v = std::abs(v);

    auto metric = [&](const Triple& c, double br, const Triple& slack) {
        double m = 0;
        for (int k = 0; k <= k_max; ++k) m = std::max(m, std::abs(c[k]) - slack[k]);
        return std::max(m, 0.0) / br;
    };
    const Triple none{0, 0, 0};
    const Triple twoR{2 * R[0], 2 * R[1], 2 * R[2]};
    std::vector<Triple> tail_cache;
    std::vector<char> tail_known;
    auto tail = [&](int n) -> Triple {
        if (n <= cfg.n_max) return D[n];
        const size_t k = static_cast<size_t>(n - cfg.n_max - 1);
        if (k >= tail_cache.size()) {
            tail_cache.resize(k + 1);
            tail_known.resize(k + 1, 0);
        }
        if (!tail_known[k]) {
            tail_cache[k] = derivatives(n, gamma, sh);
            tail_known[k] = 1;
        }
        return tail_cache[k];
    };

    Best trunc, tl;
    // cheap pass to seed the bound
    for (const auto& ell : ells) {
        Triple T{0, 0, 0};
        for (int s = 0; s < d; ++s)
            for (int k = 0; k < 3; ++k) T[k] += ell[s] * D[cfg.sites[s]][k];
        const double br = bracket(ell);
        for (int n : modes) {
            Triple c;
            for (int k = 0; k < 3; ++k) c[k] = T[k] + D[n][k];
            trunc.offer(metric(c, br, none), Family::first, ell, n, 0);
        }
    }

    for (const auto& ell : ells) {
        Triple T{0, 0, 0};
        for (int s = 0; s < d; ++s)
            for (int k = 0; k < 3; ++k) T[k] += ell[s] * D[cfg.sites[s]][k];
        const double br = bracket(ell);
        const bool zero = l1(ell) == 0;
        auto bound = [&] { return std::min(trunc.value, tl.value) * br; };

        if (!zero) trunc.offer(metric(T, br, none), Family::zeroth, ell, 0, 0);

        // transport, j unbounded
        {
            const double js = -T[0] / O1[0];
            const int j0 = static_cast<int>(std::lround(js));
            auto eval = [&](int j) {
                if (zero && j == 0) return;
                Triple c;
                for (int k = 0; k < 3; ++k) c[k] = T[k] + j * O1[k];
                trunc.offer(metric(c, br, none), Family::transport, ell, j, 0);
                // both indices of a second-difference pair in the tail: n - n' = j
                tl.offer(metric(c, br, twoR), Family::second_diff, ell, j, 0);
            };
            for (int j = j0; O1[0] * std::abs(j - js) <= bound() + O1[0]; ++j) eval(j);
            for (int j = j0 - 1; O1[0] * std::abs(j - js) <= bound() + O1[0]; --j) eval(j);
        }

        for (int n : modes) {
            // second difference, both indices truncated
            const double y = T[0] + om0[n];
            auto [b, e] = window(sorted, y - bound(), y + bound());
            for (size_t k = b; k < e; ++k) {
                const int n2 = sorted.mode[k];
                if (zero && n2 == n) continue;
                Triple c;
                for (int q = 0; q < 3; ++q) c[q] = T[q] + D[n][q] - D[n2][q];
                trunc.offer(metric(c, br, none), Family::second_diff, ell, n, n2);
            }
            // second sum, both truncated
            const double z = -T[0] - om0[n];
            auto [b2, e2] = window(sorted, z - bound(), z + bound());
            for (size_t k = b2; k < e2; ++k) {
                const int n2 = sorted.mode[k];
                Triple c;
                for (int q = 0; q < 3; ++q) c[q] = T[q] + D[n][q] + D[n2][q];
                trunc.offer(metric(c, br, none), Family::second_sum, ell, n, n2);
            }
        }

        // tail indices above n_max, where Omega_n = n Omega_1 - 1/2 + r_n is affine up to r_n
        auto scan_tail = [&](double target, auto&& eval) {
            // indices m > n_max with |Omega_m - target| possibly below the bound
            const double ms = (target + 0.5) / O1[0];
            const int m0 = std::max(cfg.n_max + 1, static_cast<int>(std::lround(ms)));
            for (int m = m0; O1[0] * (m - ms) <= bound() + 2 * O1[0]; ++m) eval(m);
            for (int m = m0 - 1; m > cfg.n_max && O1[0] * (ms - m) <= bound() + 2 * O1[0]; --m) eval(m);
        };
        scan_tail(-T[0], [&](int m) {
            const Triple Dm = tail(m);
            Triple c;
            for (int q = 0; q < 3; ++q) c[q] = T[q] + Dm[q];
            tl.offer(metric(c, br, none), Family::first, ell, m, 0);
        });
        for (int n : modes) {
            scan_tail(T[0] + om0[n], [&](int m) {
                const Triple Dm = tail(m);
                Triple c;
                for (int q = 0; q < 3; ++q) c[q] = T[q] + D[n][q] - Dm[q];
                tl.offer(metric(c, br, none), Family::second_diff, ell, n, m);
            });
            scan_tail(-T[0] - om0[n], [&](int m) {
                const Triple Dm = tail(m);
                Triple c;
                for (int q = 0; q < 3; ++q) c[q] = T[q] + D[n][q] + Dm[q];
                tl.offer(metric(c, br, none), Family::second_sum, ell, n, m);
            });
        }
        // second sum with both indices in the tail: T + s Omega_1 - 1 + r_n + r_n', s = n + n'
        {
            const double ss = (1 - T[0]) / O1[0];
            const int s0 = std::max(2 * cfg.n_max + 2, static_cast<int>(std::lround(ss)));
            auto eval = [&](int s) {
                Triple c;
                for (int q = 0; q < 3; ++q) c[q] = T[q] + s * O1[q];
                c[0] -= 1;
                tl.offer(metric(c, br, twoR), Family::second_sum, ell, s, 0);
            };
            for (int s = s0; O1[0] * (s - ss) <= bound() + 2 * O1[0]; ++s) eval(s);
        }
    }

    TransversalityResult r;
    r.truncated_margin = trunc.value;
    r.tail_margin = tl.value;
    const Best& b = trunc.value <= tl.value ? trunc : tl;
    r.margin = b.value;
    r.family = b.family;
    r.ell = b.ell;
    r.a = b.a;
    r.b = b.b;
    return r;
}

namespace {

Vec cell_midpoints(const ResonanceConfig& cfg, double& cell)
{
    const double len = cfg.gamma_hi - cfg.gamma_lo;
    const long n = std::max(1L, std::lround(len / cfg.dgamma));
    cell = len / n;
    Vec g(n);
    for (long i = 0; i < n; ++i) g[i] = cfg.gamma_lo + (i + 0.5) * cell;
    return g;
}

UpsilonSummary summarize(const ResonanceReport& rep, const ResonanceConfig& cfg, double ups)
{
    UpsilonSummary s;
    s.upsilon = ups;
    const size_t n = rep.gammas.size();
    bool open = false;
    double start = 0;
    long count = 0;
    for (size_t i = 0; i < n; ++i) {
        bool ex = false;
        for (int f = 0; f < kFamilies; ++f)
            if (rep.margins[i][f] < ups) {
                ex = true;
                ++s.failures[f];
            }
        const double a = cfg.gamma_lo + i * rep.cell;
        if (ex) {
            ++count;
            if (!open) {
                open = true;
                start = a;
            }
        } else if (open) {
            s.excluded_intervals.emplace_back(start, a);
            open = false;
        }
    }
    if (open) s.excluded_intervals.emplace_back(start, cfg.gamma_hi);
    s.excluded_measure = count * rep.cell;
    s.good_measure = (static_cast<double>(n) - count) * rep.cell;
    return s;
}

} // namespace

ResonanceReport measure_estimate(const ResonanceConfig& cfg, Exec exec)
{
    validate(cfg);
    ResonanceReport rep;
    rep.gammas = cell_midpoints(cfg, rep.cell);
    double cap = cfg.upsilon;
    for (double u : cfg.upsilon_sequence) cap = std::max(cap, u);
    const long n = static_cast<long>(rep.gammas.size());
    rep.margins.resize(n);
    // warm shared caches before fanning out
    (void)cached_ell_box(static_cast<int>(cfg.sites.size()), cfg.l_max);
    auto body = [&](long i) {
        const MelnikovMargins m = melnikov_margins(rep.gammas[i], cfg, cap);
        for (int f = 0; f < kFamilies; ++f) rep.margins[i][f] = m.family[f].margin;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long i = 0; i < n; ++i) body(i);
    } else {
        for (long i = 0; i < n; ++i) body(i);
    }
    for (double u : cfg.upsilon_sequence) rep.trend.push_back(summarize(rep, cfg, u));
    rep.primary = summarize(rep, cfg, cfg.upsilon);
    Vec mins(n);
    for (long i = 0; i < n; ++i) mins[i] = *std::min_element(rep.margins[i].begin(), rep.margins[i].end());
    std::sort(mins.begin(), mins.end());
    rep.min_margin = mins.front();
    rep.median_margin = mins[n / 2];
    return rep;
}

TransversalitySweep transversality_sweep(const ResonanceConfig& cfg, int k_max, Exec exec)
{
    validate(cfg);
    TransversalitySweep sw;
    double cell;
    sw.gammas = cell_midpoints(cfg, cell);
    const long n = static_cast<long>(sw.gammas.size());
    sw.margins.resize(n);
    (void)cached_ell_box(static_cast<int>(cfg.sites.size()), cfg.l_max);
    auto body = [&](long i) { sw.margins[i] = transversality_margins(sw.gammas[i], cfg, k_max).margin; };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long i = 0; i < n; ++i) body(i);
    } else {
        for (long i = 0; i < n; ++i) body(i);
    }
    sw.min_margin = *std::min_element(sw.margins.begin(), sw.margins.end());
    return sw;
}

} // namespace vpatch
