#include "vpatch/spectral.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace vpatch {

namespace {

constexpr double pi = std::numbers::pi;

double kappa_g(int n, double gamma)
{
    if (gamma == 1) return 0;
    return std::exp(n * std::log((gamma - 1) / (gamma + 1)));
}

double omega_g(double gamma) { return gamma / ((1 + gamma) * (1 + gamma)); }

} // namespace

std::string to_string(StabilityClass c)
{
    switch (c) {
    case StabilityClass::elliptic: return "elliptic";
    case StabilityClass::hyperbolic: return "hyperbolic";
    case StabilityClass::degenerate: return "degenerate";
    }
    return "?";
}

double mu_plus(int n, double gamma) { return n * omega_g(gamma) - 0.5 + 0.5 * kappa_g(n, gamma); }

double mu_minus(int n, double gamma) { return n * omega_g(gamma) - 0.5 - 0.5 * kappa_g(n, gamma); }

double dmu_minus_dgamma(int n, double gamma)
{
    const double s = 1 + gamma;
    const double km1 = gamma == 1 ? (n == 1 ? 1.0 : 0.0) : kappa_g(n - 1, gamma);
    return -n * (gamma - 1) / (s * s * s) - n * km1 / (s * s);
}

double linear_frequency(int n, double gamma)
{
    // mu_2^+ vanishes identically; the square root would amplify its rounding error to ~1e-9
    if (n == 2) return 0;
    return std::sqrt(std::abs(mu_plus(n, gamma) * mu_minus(n, gamma)));
}

ModeData mode_data(int n, const EllipseParams& p)
{
    if (n < 1) throw DomainError("mode index must be >= 1");
    ModeData m;
    m.n = n;
    m.mu_plus = mu_plus(n, p.gamma);
    m.mu_minus = mu_minus(n, p.gamma);
    m.omega_n = linear_frequency(n, p.gamma);
    if (n == 2) {
        m.m_n = 1;
        m.cls = StabilityClass::degenerate;
        return m;
    }
    // mu_n^- within rounding of zero is the marginal case gamma = critical_gamma(n)
    const double tol = 16 * std::numeric_limits<double>::epsilon() * (1 + n * p.omega_gamma);
    if (std::abs(m.mu_minus) <= tol) {
        m.mu_minus = 0;
        m.omega_n = 0;
    }
    m.m_n = m.mu_minus == 0 ? std::numeric_limits<double>::infinity()
                            : std::pow(std::abs(m.mu_plus) / std::abs(m.mu_minus), 0.25);
    m.cls = m.mu_plus * m.mu_minus < 0 ? StabilityClass::hyperbolic : StabilityClass::elliptic;
    return m;
}

Vec basis_c(int n, const Grid& grid)
{
    const double s = (n == 2 ? std::sqrt(2.0) : 1.0) / std::sqrt(pi);
    return sample(grid, [&](double t) { return s * std::cos(n * t); });
}

Vec basis_s(int n, const Grid& grid)
{
    const double s = (n == 2 ? std::sqrt(2.0) : 1.0) / std::sqrt(pi);
    return sample(grid, [&](double t) { return s * std::sin(n * t); });
}

FourierModes to_modes(const Vec& q, int n_max)
{
    const int N = static_cast<int>(q.size());
    if (n_max < 0) n_max = N / 2 - 1;
    if (n_max >= N / 2) throw DomainError("mode index at or above Nyquist");
    const auto c = forward_fft(q);
    FourierModes m(n_max);
    // q = a_n cos + b_n sin with a_n = 2 Re c_n, b_n = -2 Im c_n; (q, cos/sqrt(pi)) = sqrt(pi) a_n
    const double sp = std::sqrt(pi);
    for (int n = 1; n <= n_max; ++n) {
        double a = 2 * c[n].real() * sp, b = -2 * c[n].imag() * sp;
        if (n == 2) {
            a /= std::sqrt(2.0);
            b /= std::sqrt(2.0);
        }
        m.alpha[n] = a;
        m.beta[n] = b;
    }
    return m;
}

Vec from_modes(const FourierModes& m, const Grid& grid)
{
    const int N = grid.n_points;
    if (m.n_max() >= N / 2) throw DomainError("mode index at or above Nyquist");
    std::vector<std::complex<double>> c(N / 2 + 1, 0.0);
    const double sp = std::sqrt(pi);
    for (int n = 1; n <= m.n_max(); ++n) {
        const double s = n == 2 ? std::sqrt(2.0) : 1.0;
        c[n] = std::complex<double>(m.alpha[n], -m.beta[n]) * (s / (2 * sp));
    }
    return inverse_fft(c, N);
}

FourierModes w0_apply(const FourierModes& q, const EllipseParams& p)
{
    FourierModes out(q.n_max());
    for (int n = 1; n <= q.n_max(); ++n) {
        const double k = kappa(p, n);
        out.alpha[n] = -(1 + k) / (2.0 * n) * q.alpha[n];
        out.beta[n] = -(1 - k) / (2.0 * n) * q.beta[n];
    }
    return out;
}

double critical_gamma(int n)
{
    if (n < 3) throw DomainError("critical aspect ratios exist for n >= 3");
    double lo = 3, hi = 6;
    while (mu_minus(n, hi) >= 0) hi *= 2;
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (mu_minus(n, mid) >= 0) lo = mid;
        else hi = mid;
    }
    return std::abs(mu_minus(n, lo)) <= std::abs(mu_minus(n, hi)) ? lo : hi;
}

Vec linear_solution(double t, const std::map<int, double>& amplitudes, const EllipseParams& p,
                    const Grid& grid, int n_bar)
{
    Vec q(grid.n_points, 0.0);
    for (const auto& [n, a] : amplitudes) {
        const ModeData m = mode_data(n, p);
        if (n <= n_bar || n < 3)
            throw DomainError("mode " + std::to_string(n) + " is below the elliptic threshold");
        if (m.cls != StabilityClass::elliptic || !(m.mu_plus > 0 && m.mu_minus > 0))
            throw DomainError("mode " + std::to_string(n) + " is not elliptic at this gamma");
        const double c = a * m.m_n * std::cos(m.omega_n * t);
        const double s = a / m.m_n * std::sin(m.omega_n * t);
        for (int j = 0; j < grid.n_points; ++j) {
            const double th = grid.node(j);
            q[j] += c * std::cos(n * th) + s * std::sin(n * th);
        }
    }
    return q;
}

double asymptotic_remainder(int n, const EllipseParams& p)
{
    const double k = kappa(p, n);
    const double d = n * p.omega_gamma - 0.5;
    const double k2 = k * k;
    return -k2 / (4 * d) / (std::sqrt(1 - k2 / (4 * d * d)) + 1);
}

} // namespace vpatch
