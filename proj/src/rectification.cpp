#include "vpatch/rectification.hpp"
#include "vpatch/dynamics.hpp"
#include "vpatch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vpatch {

namespace {

constexpr double pi = std::numbers::pi;

} // namespace

double psi(double z)
{
    if (!(z > -0.25 && z < 0.75)) throw DomainError("psi argument outside (-1/4, 3/4)");
    // (-1 + sqrt(1+4z))/2 without cancellation near 0
    return 2 * z / (1 + std::sqrt(1 + 4 * z));
}

Rectifier::Rectifier(const EllipseParams& p, const Grid& grid, Exec exec)
    : p_(p), grid_(grid), exec_(exec), aleph_(p.require_aleph())
{
    g_ = sample(grid, [&](double t) { return g_gamma(p, t); });
    inv_g_.resize(g_.size());
    for (size_t j = 0; j < g_.size(); ++j) inv_g_[j] = 1 / g_[j];
    // y = theta + beta(theta), continuous in theta
    straight_ = sample(grid, [&](double t) { return t + beta_fn(p, t); });
    c2_ = basis_c(2, grid);
    s2_ = basis_s(2, grid);
    c4_ = basis_c(4, grid);
    xi_p_ = xi_particular(p, grid).values;
}

// Phi(t) xi = (1/g) B T_{2 aleph t} B^{-1} (g xi). The two warps compose to
// theta -> theta(y) at y = theta + beta(theta) + shift, with theta(y) = y + beta_inv(y),
// so a single interpolation of g xi is needed.
Vec Rectifier::flow_J2(double t, const Vec& xi) const
{
    const int n = grid_.n_points;
    const double shift = 2 * aleph_ * t;
    Vec u(n), at(n);
    for (int j = 0; j < n; ++j) {
        u[j] = g_[j] * xi[j];
        const double y = straight_[j] + shift;
        at[j] = y + beta_inv_fn(p_, y);
    }
    Vec out = trig_interpolate(u, at, exec_);
    for (int j = 0; j < n; ++j) out[j] *= inv_g_[j];
    return out;
}

// Adjoint in L^2: B T_{-2 aleph t} B^{-1}
Vec Rectifier::flow_J2_adjoint(double t, const Vec& v) const
{
    const int n = grid_.n_points;
    const double shift = -2 * aleph_ * t;
    Vec at(n);
    for (int j = 0; j < n; ++j) {
        const double y = straight_[j] + shift;
        at[j] = y + beta_inv_fn(p_, y);
    }
    return trig_interpolate(v, at, exec_);
}

Vec Rectifier::flow_J(double t, const Vec& xi) const
{
    const int n = grid_.n_points;
    Vec d(n);
    for (int j = 0; j < n; ++j) d[j] = xi[j] - xi_p_[j];
    Vec out = flow_J2(t, d);
    for (int j = 0; j < n; ++j) out[j] += xi_p_[j];
    return out;
}

Vec Rectifier::vector_field_J(const Vec& xi) const
{
    const int n = grid_.n_points;
    Vec u(n);
    for (int j = 0; j < n; ++j) u[j] = g_[j] * xi[j];
    Vec du = spectral_derivative(u);
    for (int j = 0; j < n; ++j) du[j] = -s2_[j] + 2 * aleph_ * du[j];
    return du;
}

double Rectifier::time_of_impact(const Vec& xi) const
{
    if (max_abs(xi) > smallness_radius)
        throw DomainError("state exceeds the rectification smallness radius");
    double t = 0.5 * dot(grid_, xi, s2_);
    for (int it = 0; it < max_newton; ++it) {
        const Vec x = flow_J(t, xi);
        const double f = dot(grid_, s2_, x);
        if (std::abs(f) <= 1e-15) return t;
        const double df = dot(grid_, s2_, vector_field_J(x));
        if (!(std::abs(df) > 0)) break;
        const double step = f / df;
        t -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(t))) return t;
    }
    throw NumericalAbort("time of impact: outside rectification neighborhood");
}

Vec Rectifier::grad_time_of_impact(const Vec& xi) const
{
    const double tb = time_of_impact(xi);
    const double df = dot(grid_, s2_, vector_field_J(flow_J(tb, xi)));
    Vec gr = flow_J2_adjoint(tb, s2_);
    for (double& v : gr) v = -v / df;
    return gr;
}

RectifiedState Rectifier::rectify(const Vec& xi) const
{
    RectifiedState r;
    r.j_coord = rectified_momentum({grid_, xi}, p_);
    r.t_coord = time_of_impact(xi);
    Vec u = flow_J(r.t_coord, xi);
    // alpha_2 = (u, c2)/2 and (c2, c2) = 2
    const double a2 = 0.5 * dot(grid_, u, c2_), b2 = 0.5 * dot(grid_, u, s2_);
    for (int j = 0; j < grid_.n_points; ++j) u[j] -= a2 * c2_[j] + b2 * s2_[j];
    r.u_perp = {grid_, u};
    return r;
}

Vec Rectifier::rectify_inverse(double eta_c, double eta_s, const Vec& eta_perp) const
{
    const int n = grid_.n_points;
    const double alpha = p_.require_alpha();
    const double m = 1 + dot(grid_, c4_, eta_perp) / std::sqrt(pi);
    double quad = 0;
    for (int j = 0; j < n; ++j) quad += eta_perp[j] * eta_perp[j] * g_[j];
    quad *= grid_.h();
    const double vc = m / alpha * psi(alpha * (eta_c - aleph_ * quad) / (m * m));
    Vec x(n);
    for (int j = 0; j < n; ++j) x[j] = vc * c2_[j] + eta_perp[j];
    return flow_J(-eta_s, x);
}

BracketTable poisson_brackets(const Rectifier& r, const Vec& xi, int n_test, double eps)
{
    const Grid& grid = r.grid();
    const int n = grid.n_points;
    if (n_test < 1 || n_test >= n / 2) throw DomainError("n_test must lie in [1, N/2)");
    std::vector<int> modes;
    for (int k = 1; k <= n_test; ++k)
        if (k != 2) modes.push_back(k);
    const int m = 2 + 2 * static_cast<int>(modes.size());

    BracketTable out;
    out.labels = {"J", "t"};
    for (int k : modes) {
        out.labels.push_back("alpha" + std::to_string(k));
        out.labels.push_back("beta" + std::to_string(k));
    }
    std::vector<Vec> cs, ss;
    for (int k : modes) {
        cs.push_back(basis_c(k, grid));
        ss.push_back(basis_s(k, grid));
    }
    auto coords = [&](const Vec& x) {
        const RectifiedState s = r.rectify(x);
        Vec c(m);
        c[0] = s.j_coord;
        c[1] = s.t_coord;
        for (size_t i = 0; i < modes.size(); ++i) {
            c[2 + 2 * i] = dot(grid, s.u_perp.values, cs[i]);
            c[3 + 2 * i] = dot(grid, s.u_perp.values, ss[i]);
        }
        return c;
    };

    // dc[k] holds the derivatives of all coordinates along cos(k.)/sqrt(pi), ds[k] along sin
    const int kmax = n / 2 - 1;
    std::vector<Vec> dc(kmax + 1), ds(kmax + 1);
    Vec x = xi;
    auto directional = [&](const Vec& e) {
        for (int j = 0; j < n; ++j) x[j] = xi[j] + eps * e[j];
        const Vec a = coords(x);
        for (int j = 0; j < n; ++j) x[j] = xi[j] - eps * e[j];
        const Vec b = coords(x);
        Vec d(m);
        for (int i = 0; i < m; ++i) d[i] = (a[i] - b[i]) / (2 * eps);
        return d;
    };
    const double norm = 1 / std::sqrt(pi);
    for (int k = 1; k <= kmax; ++k) {
        dc[k] = directional(sample(grid, [&](double t) { return norm * std::cos(k * t); }));
        ds[k] = directional(sample(grid, [&](double t) { return norm * std::sin(k * t); }));
    }

    out.computed.assign(static_cast<size_t>(m) * m, 0.0);
    out.canonical.assign(static_cast<size_t>(m) * m, 0.0);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            double s = 0;
            for (int k = 1; k <= kmax; ++k) s += k * (dc[k][a] * ds[k][b] - ds[k][a] * dc[k][b]);
            out.computed[a * m + b] = s;
        }
    out.canonical[1] = 1;
    out.canonical[m] = -1;
    for (size_t i = 0; i < modes.size(); ++i) {
        const int a = 2 + 2 * static_cast<int>(i);
        out.canonical[a * m + a + 1] = modes[i];
        out.canonical[(a + 1) * m + a] = -modes[i];
    }
    for (size_t i = 0; i < out.computed.size(); ++i)
        out.max_deviation = std::max(out.max_deviation, std::abs(out.computed[i] - out.canonical[i]));
    return out;
}

RadialDeformation flow_J2(double t, const RadialDeformation& xi, const EllipseParams& p)
{
    return {xi.grid, Rectifier(p, xi.grid).flow_J2(t, xi.values)};
}

RadialDeformation flow_J(double t, const RadialDeformation& xi, const EllipseParams& p)
{
    return {xi.grid, Rectifier(p, xi.grid).flow_J(t, xi.values)};
}

double time_of_impact(const RadialDeformation& xi, const EllipseParams& p)
{
    return Rectifier(p, xi.grid).time_of_impact(xi.values);
}

RectifiedState rectify(const RadialDeformation& xi, const EllipseParams& p)
{
    return Rectifier(p, xi.grid).rectify(xi.values);
}

RadialDeformation rectify_inverse(double eta_c, double eta_s, const RadialDeformation& eta_perp,
                                  const EllipseParams& p)
{
    return {eta_perp.grid, Rectifier(p, eta_perp.grid).rectify_inverse(eta_c, eta_s, eta_perp.values)};
}

} // namespace vpatch
