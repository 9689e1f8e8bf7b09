#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vpatch/checks.hpp"
#include "vpatch/dynamics.hpp"
#include "vpatch/rectification.hpp"
#include "vpatch/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace vpatch;

namespace {

double worst_diff(const Vec& a, const Vec& b)
{
    double w = 0;
    for (size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
    return w;
}

Vec reversed(const Vec& x)
{
    const int n = static_cast<int>(x.size());
    Vec r(n);
    for (int j = 0; j < n; ++j) r[j] = x[(n - j) % n];
    return r;
}

Vec test_state(const Grid& g, double a)
{
    return sample(g, [&](double t) {
        return a * (0.5 * std::cos(2 * t) + 0.8 * std::sin(2 * t) + std::cos(3 * t) - 0.4 * std::sin(5 * t));
    });
}

} // namespace

TEST_CASE("psi")
{
    CHECK(std::abs(psi(0.06) - 0.056776436283002192) < 1e-16);
    CHECK(psi(0) == 0);
    CHECK(std::abs((psi(1e-7) - psi(-1e-7)) / 2e-7 - 1) < 1e-6);
    for (double y : {-0.4, -0.1, 0.3, 0.45}) CHECK(std::abs(psi(y + y * y) - y) < 1e-15);
    CHECK_THROWS_AS(psi(-0.3), DomainError);
    CHECK_THROWS_AS(psi(0.8), DomainError);
}

TEST_CASE("straightened flow is a one-parameter group")
{
    const Grid g(128);
    const Rectifier R(ellipse_params(2), g);
    const Vec xi = test_state(g, 1e-2);
    CHECK(worst_diff(R.flow_J2(0, xi), xi) < 1e-15);
    const Vec a = R.flow_J2(0.3, R.flow_J2(-0.7, xi));
    // composition of warped interpolants is exact only to the resolution
    CHECK(worst_diff(a, R.flow_J2(-0.4, xi)) < 1e-9);
    CHECK(worst_diff(R.flow_J2(-0.25, R.flow_J2(0.25, xi)), xi) < 1e-9);

    const Vec xp = xi_particular(ellipse_params(2), g).values;
    CHECK(worst_diff(R.flow_J(0.8, xp), xp) < 1e-15);

    // adjoint
    const Vec v = test_state(g, 1.0);
    const Vec w = sample(g, [](double t) { return std::sin(t) + std::cos(4 * t); });
    CHECK(std::abs(dot(g, R.flow_J2(0.4, v), w) - dot(g, v, R.flow_J2_adjoint(0.4, w))) < 1e-12);
}

TEST_CASE("J-flow is generated by its vector field and conserves J")
{
    const Grid g(128);
    const EllipseParams p = ellipse_params(2);
    const Rectifier R(p, g);
    const Vec xi = test_state(g, 1e-2);
    const double h = 1e-5;
    Vec fd(g.n_points);
    const Vec a = R.flow_J(h, xi), b = R.flow_J(-h, xi);
    for (int j = 0; j < g.n_points; ++j) fd[j] = (a[j] - b[j]) / (2 * h);
    CHECK(worst_diff(fd, R.vector_field_J(xi)) < 1e-8);

    const Vec s2 = basis_s(2, g);
    const Vec z(g.n_points, 0.0);
    const double d = 0.5 * (dot(g, R.flow_J(h, z), s2) - dot(g, R.flow_J(-h, z), s2)) / (2 * h);
    CHECK(std::abs(d + 1) < 1e-9);

    const double J0 = rectified_momentum({g, xi}, p);
    for (double t : {-0.5, 0.2, 1.0}) CHECK(std::abs(rectified_momentum({g, R.flow_J(t, xi)}, p) - J0) < 1e-13);
}

TEST_CASE("time of impact")
{
    const Grid g(64);
    const EllipseParams p = ellipse_params(2);
    const Rectifier R(p, g);
    const Vec s2 = basis_s(2, g);
    for (double eps : {1e-3, 1e-4}) {
        Vec xi = s2;
        for (double& v : xi) v *= eps;
        CHECK(std::abs(R.time_of_impact(xi) - eps) < 10 * eps * eps);
    }
    const Vec xi = test_state(g, 1e-2);
    const double tb = R.time_of_impact(xi);
    CHECK(std::abs(0.5 * dot(g, R.flow_J(tb, xi), s2)) < 1e-15);
    CHECK(std::abs(R.time_of_impact(reversed(xi)) + tb) < 1e-14);
    CHECK(R.time_of_impact(Vec(64, 0.0)) == 0);

    // gradient formula against central differences
    const Vec grad = R.grad_time_of_impact(xi);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 4; ++k) {
        const Vec e = random_field(g, 10, 1.0, rng);
        const double h = 1e-6;
        Vec a = xi, b = xi;
        for (int j = 0; j < g.n_points; ++j) {
            a[j] += h * e[j];
            b[j] -= h * e[j];
        }
        const double fd = (R.time_of_impact(a) - R.time_of_impact(b)) / (2 * h);
        CHECK(std::abs(fd - dot(g, grad, e)) < 1e-6);
    }
}

TEST_CASE("rectification map")
{
    const Grid g(64);
    const EllipseParams p = ellipse_params(2);
    const Rectifier R(p, g);
    const RectifiedState z = R.rectify(Vec(64, 0.0));
    CHECK(z.j_coord == 0);
    CHECK(z.t_coord == 0);
    CHECK(max_abs(z.u_perp.values) < 1e-14);

    const Vec c2 = basis_c(2, g), s2 = basis_s(2, g);
    const Vec xi = test_state(g, 1e-2);
    const RectifiedState r = R.rectify(xi);
    CHECK(std::abs(dot(g, r.u_perp.values, c2)) < 1e-12);
    CHECK(std::abs(dot(g, r.u_perp.values, s2)) < 1e-12);
    CHECK(worst_diff(R.rectify_inverse(r.j_coord, r.t_coord, r.u_perp.values), xi) < 1e-13);

    // the differential at 0 is the identity in (alpha_2, beta_2, perp) coordinates
    const double eps = 1e-7;
    Vec h = test_state(g, 1.0), x = h;
    for (double& v : x) v *= eps;
    const RectifiedState d = R.rectify(x);
    const double a2 = 0.5 * dot(g, h, c2), b2 = 0.5 * dot(g, h, s2);
    CHECK(std::abs(d.j_coord / eps - a2) < 1e-6);
    CHECK(std::abs(d.t_coord / eps - b2) < 1e-6);
    double w = 0;
    for (int j = 0; j < g.n_points; ++j)
        w = std::max(w, std::abs(d.u_perp.values[j] / eps - (h[j] - a2 * c2[j] - b2 * s2[j])));
    CHECK(w < 1e-6);
}

TEST_CASE("canonical brackets")
{
    const Grid g(64);
    const Rectifier R(ellipse_params(2), g);
    std::mt19937_64 rng(17);
    for (double a : {0.0, 1e-3, 1e-2}) {
        const Vec xi = a > 0 ? random_field(g, 8, a, rng) : Vec(64, 0.0);
        const BracketTable t = poisson_brackets(R, xi, 6);
        CHECK(t.labels.size() == 12);
        CHECK(t.max_deviation < 1e-6);
    }
    CHECK_THROWS_AS(poisson_brackets(R, Vec(64, 0.0), 32), DomainError);
}

TEST_CASE("domain errors")
{
    const Grid g(32);
    CHECK_THROWS_AS(Rectifier(ellipse_params(1), g), DomainError);
    const Rectifier R(ellipse_params(2), g);
    CHECK_THROWS_AS(R.time_of_impact(Vec(32, 0.06)), DomainError);
    Rectifier loose(ellipse_params(2), g);
    loose.smallness_radius = 10;
    loose.max_newton = 1;
    CHECK_THROWS_AS(loose.time_of_impact(test_state(g, 0.3)), NumericalAbort);
    CHECK_THROWS_AS(rectify_inverse(5.0, 0, RadialDeformation::zero(g), ellipse_params(2)), DomainError);
}

TEST_CASE("free-function wrappers agree with the class")
{
    const Grid g(32);
    const EllipseParams p = ellipse_params(1.6);
    const RadialDeformation xi(g, test_state(g, 5e-3));
    const Rectifier R(p, g);
    CHECK(worst_diff(flow_J(0.3, xi, p).values, R.flow_J(0.3, xi.values)) == 0);
    CHECK(worst_diff(flow_J2(0.3, xi, p).values, R.flow_J2(0.3, xi.values)) == 0);
    CHECK(time_of_impact(xi, p) == R.time_of_impact(xi.values));
    const RectifiedState r = rectify(xi, p);
    CHECK(worst_diff(rectify_inverse(r.j_coord, r.t_coord, r.u_perp, p).values, xi.values) < 1e-14);
}
