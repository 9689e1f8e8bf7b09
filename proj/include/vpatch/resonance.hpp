#pragma once

#include "vpatch/grid.hpp"

#include <array>
#include <limits>
#include <string>
#include <vector>

namespace vpatch {

struct ResonanceConfig {
    std::vector<int> sites{4, 5};
    int n_bar = 2;
    double upsilon = 1e-3;
    double tau = 3;
    int l_max = 20;
    int n_max = 64;
    double gamma_lo = 1.5;
    double gamma_hi = 2.5;
    double dgamma = 1e-4;
    double freq_shift = 0; // Omega_n -> Omega_n + n * shift
    bool index_restriction = true;
    std::vector<double> upsilon_sequence{1e-2, 1e-3, 1e-4};
};

// Throws DomainError naming the violated precondition.
void validate(const ResonanceConfig& cfg);

enum class Family { zeroth, transport, first, second_diff, second_sum };
inline constexpr int kFamilies = 5;
std::string to_string(Family f);

struct FamilyMargin {
    // |combination| <ell>^tau / (weight), weight = 8, 8<j>, 4n, 4<n-n'>, 4(n+n'); a grid
    // point is excluded at upsilon when the margin is < upsilon.
    double margin = std::numeric_limits<double>::infinity();
    std::vector<int> ell;
    int a = 0, b = 0; // j, or (n), or (n, n')
    bool capped = true; // no index found below the cap
};

struct MelnikovMargins {
    std::array<FamilyMargin, kFamilies> family;
    double min() const;
};

// Frequencies Omega_n(gamma) + n * shift
double shifted_frequency(int n, double gamma, double shift);

// cap bounds the margins that must be resolved exactly; with index_restriction the
// search skips indices that provably cannot fall below it.
MelnikovMargins melnikov_margins(double gamma, const ResonanceConfig& cfg,
                                 double cap = std::numeric_limits<double>::infinity());

// omega.ell + (n - n') Omega_1 + r_n - r_n' for the second-difference family
double second_difference_asymptotic(double gamma, const std::vector<int>& sites,
                                    const std::vector<int>& ell, int n, int n2);
double second_difference_direct(double gamma, const std::vector<int>& sites,
                                const std::vector<int>& ell, int n, int n2);

struct TransversalityResult {
    double margin = std::numeric_limits<double>::infinity();
    double truncated_margin = std::numeric_limits<double>::infinity();
    double tail_margin = std::numeric_limits<double>::infinity();
    Family family = Family::zeroth;
    std::vector<int> ell;
    int a = 0, b = 0;
};

TransversalityResult transversality_margins(double gamma, const ResonanceConfig& cfg, int k_max = 2);

// k-th gamma-derivative (k <= 2) by Richardson-extrapolated central differences
template <class F>
double richardson_derivative(F&& f, double x, int k, double h = 1e-3)
{
    if (k == 0) return f(x);
    auto d = [&](double s) {
        if (k == 1) return (f(x + s) - f(x - s)) / (2 * s);
        return (f(x + s) - 2 * f(x) + f(x - s)) / (s * s);
    };
    return (4 * d(h / 2) - d(h)) / 3;
}

struct UpsilonSummary {
    double upsilon = 0;
    double excluded_measure = 0;
    double good_measure = 0;
    std::vector<std::pair<double, double>> excluded_intervals;
    std::array<long, kFamilies> failures{};
};

struct ResonanceReport {
    Vec gammas;                                    // cell midpoints
    double cell = 0;                               // cell width
    std::vector<std::array<double, kFamilies>> margins; // per gamma
    std::vector<UpsilonSummary> trend;             // one per upsilon in the sequence
    UpsilonSummary primary;                        // at cfg.upsilon
    double min_margin = 0, median_margin = 0;
};

ResonanceReport measure_estimate(const ResonanceConfig& cfg, Exec exec = Exec::parallel);

struct TransversalitySweep {
    Vec gammas;
    Vec margins;
    double min_margin = 0;
};

TransversalitySweep transversality_sweep(const ResonanceConfig& cfg, int k_max = 2,
                                         Exec exec = Exec::parallel);

} // namespace vpatch
