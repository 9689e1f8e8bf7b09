#pragma once

#include "vpatch/geometry.hpp"

#include <map>
#include <string>

namespace vpatch {

enum class StabilityClass { elliptic, hyperbolic, degenerate };

std::string to_string(StabilityClass c);

struct ModeData {
    int n = 0;
    double mu_plus = 0;
    double mu_minus = 0;
    double omega_n = 0;
    double m_n = 1; // +inf when mu_minus = 0
    StabilityClass cls = StabilityClass::elliptic;
};

double mu_plus(int n, double gamma);
double mu_minus(int n, double gamma);
double dmu_minus_dgamma(int n, double gamma);
double linear_frequency(int n, double gamma); // |mu+ mu-|^{1/2}

ModeData mode_data(int n, const EllipseParams& p);

// Real mode coordinates; alpha[n], beta[n] for n = 1..n_max, index 0 unused.
struct FourierModes {
    Vec alpha, beta;

    explicit FourierModes(int n_max = 0) : alpha(n_max + 1, 0.0), beta(n_max + 1, 0.0) {}
    int n_max() const { return static_cast<int>(alpha.size()) - 1; }
};

// cos(n theta)/sqrt(pi), sin(n theta)/sqrt(pi), times sqrt(2) at n = 2
Vec basis_c(int n, const Grid& grid);
Vec basis_s(int n, const Grid& grid);

// alpha_n = (q, c_n), with alpha_2 = (q, c_2)/2; same for beta. Modes n < N/2.
FourierModes to_modes(const Vec& q, int n_max = -1);
Vec from_modes(const FourierModes& m, const Grid& grid);

FourierModes w0_apply(const FourierModes& q, const EllipseParams& p);

double critical_gamma(int n);

// sum_n a_n (M_n cos(Omega_n t) cos(n theta) + M_n^{-1} sin(Omega_n t) sin(n theta))
Vec linear_solution(double t, const std::map<int, double>& amplitudes, const EllipseParams& p,
                    const Grid& grid, int n_bar);

// r(n, gamma) with Omega_n = n Omega_1 - 1/2 + r
double asymptotic_remainder(int n, const EllipseParams& p);

} // namespace vpatch
