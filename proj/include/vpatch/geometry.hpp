#pragma once

#include "vpatch/grid.hpp"

#include <optional>

namespace vpatch {

struct EllipseParams {
    double gamma = 1;
    double omega_gamma = 0.25;
    std::optional<double> aleph;       // absent at gamma = 1
    std::optional<double> alpha_const; // absent at gamma = 1

    double require_aleph() const;
    double require_alpha() const;
};

EllipseParams ellipse_params(double gamma);

double g_gamma(const EllipseParams& p, double theta);
double dg_gamma(const EllipseParams& p, double theta);

// kappa_n = ((gamma-1)/(gamma+1))^n, 0 at gamma = 1
double kappa(const EllipseParams& p, int n);

struct RadialDeformation {
    Grid grid;
    Vec values;

    RadialDeformation() = default;
    RadialDeformation(Grid g, Vec v);
    static RadialDeformation zero(Grid g) { return {g, Vec(g.n_points, 0.0)}; }

    // 1 + 2 xi > 0 everywhere
    bool admissible() const;
};

struct DiffeoPair {
    Grid grid;
    Vec beta;     // beta(theta_j)
    Vec beta_inv; // beta_inv(theta_j)
    Vec one_plus_dbeta;
};

double beta_fn(const EllipseParams& p, double theta);
double beta_inv_fn(const EllipseParams& p, double y);

DiffeoPair straightening_diffeo(const EllipseParams& p, const Grid& grid);

// Dense row-major N x N matrix of |w(theta_i) - w(theta_j)|^2.
Vec kernel_M(const RadialDeformation& xi, const EllipseParams& p);

RadialDeformation xi_particular(const EllipseParams& p, const Grid& grid);

// Boundary point w = sqrt(1+2xi) * (sqrt(gamma) cos + i sin / sqrt(gamma)).
struct BoundaryData {
    Vec rho, drho;  // rho = sqrt(1+2xi) and its theta derivative
    Vec x, y;       // boundary coordinates
    Vec dx, dy;     // tangent
};

BoundaryData boundary_data(const RadialDeformation& xi, const EllipseParams& p);

} // namespace vpatch
