#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vpatch/geometry.hpp"

#include <cmath>
#include <numbers>

using namespace vpatch;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("grid preconditions")
{
    CHECK_THROWS_AS(Grid(7), DomainError);
    CHECK_THROWS_AS(Grid(6), DomainError);
    CHECK_THROWS_AS(Grid(0), DomainError);
    const Grid g(8);
    CHECK(g.h() == doctest::Approx(pi / 4).epsilon(1e-15));
    CHECK(g.node(2) == doctest::Approx(pi / 2).epsilon(1e-15));
}

TEST_CASE("spectral derivative and interpolation")
{
    const Grid g(32);
    const Vec f = sample(g, [](double t) { return std::sin(3 * t) + 0.5 * std::cos(5 * t); });
    const Vec df = spectral_derivative(f);
    for (int j = 0; j < g.n_points; ++j) {
        const double t = g.node(j);
        CHECK(std::abs(df[j] - (3 * std::cos(3 * t) - 2.5 * std::sin(5 * t))) < 1e-13);
    }
    const Vec x{0.1, 1.3, 2.7, 5.9};
    const Vec fs = trig_interpolate(f, x, Exec::serial);
    const Vec fp = trig_interpolate(f, x, Exec::parallel);
    for (size_t k = 0; k < x.size(); ++k) {
        CHECK(std::abs(fs[k] - (std::sin(3 * x[k]) + 0.5 * std::cos(5 * x[k]))) < 1e-14);
        CHECK(fs[k] == fp[k]);
    }
    // Nyquist mode is read as cos(N/2 x)
    const Vec ny = sample(g, [](double t) { return std::cos(16 * t); });
    CHECK(std::abs(trig_interpolate(ny, {0.05})[0] - std::cos(16 * 0.05)) < 1e-13);
}

TEST_CASE("ellipse constants")
{
    const EllipseParams p = ellipse_params(2);
    CHECK(p.omega_gamma == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
    CHECK(std::abs(p.require_aleph() - 0.53192304053524357) < 1e-15);
    CHECK(std::abs(p.require_alpha() - 5 * std::sqrt(2 / pi) / 3) < 1e-15);
    const EllipseParams d = ellipse_params(1);
    CHECK(d.omega_gamma == 0.25);
    CHECK_FALSE(d.aleph.has_value());
    CHECK_THROWS_AS(d.require_aleph(), DomainError);
    CHECK_THROWS_AS(d.require_alpha(), DomainError);
    CHECK_THROWS_AS(ellipse_params(0.5), DomainError);
    CHECK(kappa(d, 3) == 0);
    CHECK(std::abs(kappa(p, 2) - 1.0 / 9.0) < 1e-16);
    // no underflow artefacts for large n
    CHECK(kappa(ellipse_params(3), 2000) >= 0);
}

TEST_CASE("straightening diffeomorphism")
{
    const EllipseParams p = ellipse_params(2);
    CHECK(std::abs(beta_fn(p, pi / 4) + 0.32175055439664219) < 1e-15);
    for (double t = -3.1; t < 3.1; t += 0.37) {
        const double y = t + beta_fn(p, t);
        CHECK(std::abs(y + beta_inv_fn(p, y) - t) < 1e-13);
        // (1 + beta') g = 1
        const double h = 1e-5;
        const double db = (beta_fn(p, t + h) - beta_fn(p, t - h)) / (2 * h);
        CHECK(std::abs((1 + db) * g_gamma(p, t) - 1) < 1e-9);
    }
    const DiffeoPair d = straightening_diffeo(p, Grid(16));
    CHECK(d.beta[0] == 0);
    CHECK(std::abs(d.one_plus_dbeta[4] - 2) < 1e-15);
}

TEST_CASE("kernel M at the ellipse")
{
    const EllipseParams p = ellipse_params(2);
    const Grid g(16);
    const int n = g.n_points;
    const Vec M = kernel_M(RadialDeformation::zero(g), p);
    CHECK(std::abs(M[0 * n + 8] - 8) < 1e-14);
    double worst = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double s = 0.5 * (g.node(i) + g.node(j)), d = 0.5 * (g.node(i) - g.node(j));
            const double f = 4 * std::sin(d) * std::sin(d) *
                             (p.gamma * std::sin(s) * std::sin(s) + std::cos(s) * std::cos(s) / p.gamma);
            worst = std::max(worst, std::abs(M[i * n + j] - f));
            CHECK(M[i * n + j] == M[j * n + i]);
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("kernel M symmetry under reversal")
{
    const EllipseParams p = ellipse_params(1.7);
    const Grid g(32);
    const int n = g.n_points;
    const Vec xi = sample(g, [](double t) { return 0.05 * std::cos(3 * t) + 0.02 * std::sin(2 * t); });
    Vec rev(n);
    for (int j = 0; j < n; ++j) rev[j] = xi[(n - j) % n];
    const Vec a = kernel_M({g, xi}, p), b = kernel_M({g, rev}, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            CHECK(std::abs(a[i * n + j] - b[((n - i) % n) * n + (n - j) % n]) < 1e-14);
}

TEST_CASE("particular solution and admissibility")
{
    const EllipseParams p = ellipse_params(2);
    const RadialDeformation xp = xi_particular(p, Grid(64));
    CHECK(std::abs(xp.values[0] + 0.25) < 1e-15);
    CHECK(std::abs(mean(xp.values)) < 1e-14);
    CHECK(xp.admissible());
    const Grid g(8);
    CHECK_FALSE(RadialDeformation(g, Vec(8, -0.5)).admissible());
    CHECK_THROWS_AS(RadialDeformation(g, Vec(9, 0.0)), DomainError);
    CHECK_THROWS_AS(boundary_data(RadialDeformation(g, Vec(8, -0.6)), p), DomainError);
}

TEST_CASE("boundary tangent matches spectral derivative of the boundary")
{
    const EllipseParams p = ellipse_params(2.3);
    const Grid g(128);
    const Vec xi = sample(g, [](double t) { return 0.1 * std::cos(2 * t) - 0.03 * std::sin(5 * t); });
    const BoundaryData b = boundary_data({g, xi}, p);
    const Vec dx = spectral_derivative(b.x), dy = spectral_derivative(b.y);
    CHECK(max_abs(Vec{dx[3] - b.dx[3], dy[17] - b.dy[17], dx[40] - b.dx[40]}) < 1e-10);
}
