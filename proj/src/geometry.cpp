#include "vpatch/geometry.hpp"

#include <cmath>
#include <numbers>

namespace vpatch {

namespace {

constexpr double pi = std::numbers::pi;

double wrap_pi(double a)
{
    a = std::remainder(a, 2 * pi);
    return a == -pi ? pi : a;
}

} // namespace

double EllipseParams::require_aleph() const
{
    if (!aleph) throw DomainError("aleph is undefined at gamma = 1");
    return *aleph;
}

double EllipseParams::require_alpha() const
{
    if (!alpha_const) throw DomainError("alpha is undefined at gamma = 1");
    return *alpha_const;
}

EllipseParams ellipse_params(double gamma)
{
    if (!(gamma >= 1)) throw DomainError("gamma must be >= 1");
    EllipseParams p;
    p.gamma = gamma;
    p.omega_gamma = gamma / ((1 + gamma) * (1 + gamma));
    if (gamma > 1) {
        const double s = std::sqrt(2.0 / pi);
        p.aleph = s / (gamma - 1 / gamma);
        p.alpha_const = (gamma * gamma + 1) * s / (gamma * gamma - 1);
    }
    return p;
}

double g_gamma(const EllipseParams& p, double theta)
{
    const double c = std::cos(theta), s = std::sin(theta);
    return p.gamma * c * c + s * s / p.gamma;
}

double dg_gamma(const EllipseParams& p, double theta)
{
    return -(p.gamma - 1 / p.gamma) * std::sin(2 * theta);
}

double kappa(const EllipseParams& p, int n)
{
    if (p.gamma == 1) return 0;
    return std::exp(n * std::log((p.gamma - 1) / (p.gamma + 1)));
}

RadialDeformation::RadialDeformation(Grid g, Vec v) : grid(g), values(std::move(v))
{
    if (static_cast<int>(values.size()) != grid.n_points)
        throw DomainError("sample count does not match grid");
}

bool RadialDeformation::admissible() const
{
    for (double v : values)
        if (!(1 + 2 * v > 0)) return false;
    return true;
}

double beta_fn(const EllipseParams& p, double theta)
{
    return wrap_pi(std::atan2(std::sin(theta), p.gamma * std::cos(theta)) - theta);
}

double beta_inv_fn(const EllipseParams& p, double y)
{
    return wrap_pi(std::atan2(p.gamma * std::sin(y), std::cos(y)) - y);
}

DiffeoPair straightening_diffeo(const EllipseParams& p, const Grid& grid)
{
    DiffeoPair d;
    d.grid = grid;
    d.beta = sample(grid, [&](double t) { return beta_fn(p, t); });
    d.beta_inv = sample(grid, [&](double t) { return beta_inv_fn(p, t); });
    d.one_plus_dbeta = sample(grid, [&](double t) { return 1 / g_gamma(p, t); });
    return d;
}

BoundaryData boundary_data(const RadialDeformation& xi, const EllipseParams& p)
{
    if (!xi.admissible()) throw DomainError("1 + 2 xi must be positive");
    const int n = xi.grid.n_points;
    BoundaryData b;
    b.rho.resize(n);
    for (int j = 0; j < n; ++j) b.rho[j] = std::sqrt(1 + 2 * xi.values[j]);
    // rho' = xi' / rho
    b.drho = spectral_derivative(xi.values);
    for (int j = 0; j < n; ++j) b.drho[j] /= b.rho[j];
    const double sg = std::sqrt(p.gamma);
    b.x.resize(n); b.y.resize(n); b.dx.resize(n); b.dy.resize(n);
    for (int j = 0; j < n; ++j) {
        const double t = xi.grid.node(j), c = std::cos(t), s = std::sin(t);
        b.x[j] = sg * b.rho[j] * c;
        b.y[j] = b.rho[j] * s / sg;
        b.dx[j] = sg * (b.drho[j] * c - b.rho[j] * s);
        b.dy[j] = (b.drho[j] * s + b.rho[j] * c) / sg;
    }
    return b;
}

Vec kernel_M(const RadialDeformation& xi, const EllipseParams& p)
{
    const BoundaryData b = boundary_data(xi, p);
    const int n = xi.grid.n_points;
    Vec m(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double ex = b.x[i] - b.x[j], ey = b.y[i] - b.y[j];
            m[static_cast<size_t>(i) * n + j] = ex * ex + ey * ey;
        }
    return m;
}

RadialDeformation xi_particular(const EllipseParams& p, const Grid& grid)
{
    return {grid, sample(grid, [&](double t) { return 0.5 * (1 / g_gamma(p, t) - 1); })};
}

} // namespace vpatch
