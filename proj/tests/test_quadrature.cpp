#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vpatch/quadrature.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace vpatch;

namespace {

constexpr double pi = std::numbers::pi;

double worst_diff(const Vec& a, const Vec& b)
{
    double w = 0;
    for (size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
    return w;
}

// Boundary point for xi(theta) = a cos(3 theta), evaluated off-grid.
std::complex<double> boundary(double gamma, double a, double t)
{
    const double r = std::sqrt(1 + 2 * a * std::cos(3 * t));
    return {std::sqrt(gamma) * r * std::cos(t), r * std::sin(t) / std::sqrt(gamma)};
}

// int ln M q dtheta' with q(t) = cos(2t) + sin(t): the ln(4 sin^2) part from the Fourier
// multiplier -2pi/k, the smooth remainder by a midpoint rule on K nodes (never on the diagonal).
double reference_W_integral(double gamma, double a, double theta, int K)
{
    const double sing = -(2 * pi / 2) * std::cos(2 * theta) - 2 * pi * std::sin(theta);
    double s = 0;
    for (int k = 0; k < K; ++k) {
        const double t = theta + 2 * pi * (k + 0.5) / K;
        const double m = std::norm(boundary(gamma, a, theta) - boundary(gamma, a, t));
        const double d = std::sin(0.5 * (theta - t));
        s += std::log(m / (4 * d * d)) * (std::cos(2 * t) + std::sin(t));
    }
    return sing + s * 2 * pi / K;
}

} // namespace

TEST_CASE("log-kernel weights reproduce the Fourier multiplier")
{
    const Grid g(64);
    const LogKernelRule& r = log_rule(g);
    CHECK(&r == &log_rule(Grid(64)));
    const Vec c3 = sample(g, [](double t) { return std::cos(3 * t); });
    const Vec s5 = sample(g, [](double t) { return std::sin(5 * t); });
    Vec e3 = c3, e5 = s5;
    for (double& v : e3) v *= -2 * pi / 3;
    for (double& v : e5) v *= -2 * pi / 5;
    CHECK(worst_diff(apply_log_rule(r, c3), e3) < 1e-10);
    CHECK(worst_diff(apply_log_rule(r, s5), e5) < 1e-10);
    CHECK(max_abs(apply_log_rule(r, Vec(64, 1.0))) < 1e-12);
}

TEST_CASE("log_M_convolve matches the closed form at the ellipse")
{
    const Grid g(64);
    const int n = g.n_points;
    Vec f(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f[i * n + j] = std::sin(g.node(j) - g.node(i)) / (4 * pi);
    const Vec I = log_M_convolve(RadialDeformation::zero(g), ellipse_params(2), f);
    // theta = pi/4 is node 8
    CHECK(std::abs(I[8] - 1.0 / 6.0) < 1e-12);
    CHECK(max_abs(log_M_convolve(RadialDeformation::zero(g), ellipse_params(1), f)) < 1e-13);

    Vec one(n * n, 1.0);
    const Vec J = log_M_convolve(RadialDeformation::zero(g), ellipse_params(2), one);
    for (double v : J) CHECK(std::abs(v - J[0]) < 1e-10);
    CHECK_THROWS_AS(log_M_convolve(RadialDeformation::zero(g), ellipse_params(2), Vec(n)), DomainError);
}

TEST_CASE("W at the ellipse is diagonal in cos and sin")
{
    const Grid g(128);
    for (double gamma : {1.0, 1.5, 3.0})
        for (int j : {1, 2, 5, 11}) {
            const EllipseParams p = ellipse_params(gamma);
            const double k = kappa(p, j);
            const Vec c = sample(g, [&](double t) { return std::cos(j * t); });
            const Vec s = sample(g, [&](double t) { return std::sin(j * t); });
            Vec ec = c, es = s;
            for (double& v : ec) v *= -(1 + k) / (2 * j);
            for (double& v : es) v *= -(1 - k) / (2 * j);
            const RadialDeformation z = RadialDeformation::zero(g);
            CHECK(worst_diff(w_operator_apply(z, p, c), ec) < 1e-12);
            CHECK(worst_diff(w_operator_apply(z, p, s), es) < 1e-12);
        }
}

TEST_CASE("W is self-adjoint and parallel matches serial")
{
    const Grid g(64);
    const EllipseParams p = ellipse_params(2);
    const RadialDeformation xi(g, sample(g, [](double t) { return 0.04 * std::cos(3 * t) - 0.02 * std::sin(t); }));
    const Vec a = sample(g, [](double t) { return std::cos(t) + 0.3 * std::sin(4 * t); });
    const Vec b = sample(g, [](double t) { return std::sin(2 * t) - 0.5 * std::cos(7 * t); });
    const SplitKernel k(xi, p);
    const double l = dot(g, w_operator_apply(k, a), b), r = dot(g, a, w_operator_apply(k, b));
    CHECK(std::abs(l - r) < 1e-13);
    const Vec ws = w_operator_apply(k, a, Exec::serial), wp = w_operator_apply(k, a, Exec::parallel);
    CHECK(worst_diff(ws, wp) < 1e-15);
    CHECK(k.smooth(3, 5) == doctest::Approx(k.smooth(5, 3)).epsilon(1e-14));
}

TEST_CASE("W converges spectrally under resolution doubling")
{
    const EllipseParams p = ellipse_params(2);
    const double a = 0.05;
    auto at = [&](int N) {
        const Grid g(N);
        const RadialDeformation xi(g, sample(g, [&](double t) { return a * std::cos(3 * t); }));
        const Vec q = sample(g, [](double t) { return std::cos(2 * t) + std::sin(t); });
        return w_operator_apply(xi, p, q);
    };
    const Vec w32 = at(32), w64 = at(64), w128 = at(128);
    double e1 = 0, e2 = 0;
    for (int i = 0; i < 32; ++i) {
        e1 = std::max(e1, std::abs(w32[i] - w128[4 * i]));
        e2 = std::max(e2, std::abs(w64[2 * i] - w128[4 * i]));
    }
    CHECK(e2 < 1e-12);
    CHECK(e1 < 1e-5);

    // independent reference with singularity subtraction at high resolution
    const Grid g(128);
    for (int i : {0, 17, 50, 99}) {
        const double ref = reference_W_integral(p.gamma, a, g.node(i), 512) / (4 * pi);
        CHECK(std::abs(w128[i] - ref) < 1e-12);
    }
}

TEST_CASE("degenerate boundary is rejected")
{
    const Grid g(16);
    // rho = 0 at two nodes collapses them onto the centre
    Vec xi(16, 0.0);
    xi[0] = -0.5;
    xi[8] = -0.5;
    CHECK_THROWS_AS(SplitKernel(RadialDeformation(g, xi), ellipse_params(2)), DomainError);
}
