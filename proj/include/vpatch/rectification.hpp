#pragma once

#include "vpatch/geometry.hpp"

#include <string>
#include <vector>

namespace vpatch {

struct RectifiedState {
    double j_coord = 0;
    double t_coord = 0;
    RadialDeformation u_perp;
};

// psi(z) = (-1 + sqrt(1 + 4z))/2, inverse of y + y^2 on (-1/4, 3/4)
double psi(double z);

// Straightened transport flow and the affine J-flow for one (gamma, grid).
class Rectifier {
public:
    Rectifier(const EllipseParams& p, const Grid& grid, Exec exec = Exec::parallel);

    const EllipseParams& params() const { return p_; }
    const Grid& grid() const { return grid_; }

    Vec flow_J2(double t, const Vec& xi) const;
    Vec flow_J2_adjoint(double t, const Vec& v) const;
    Vec flow_J(double t, const Vec& xi) const;
    Vec vector_field_J(const Vec& xi) const; // -s_2 + 2 aleph d(g xi)

    double time_of_impact(const Vec& xi) const;
    Vec grad_time_of_impact(const Vec& xi) const;

    RectifiedState rectify(const Vec& xi) const;
    Vec rectify_inverse(double eta_c, double eta_s, const Vec& eta_perp) const;

    double smallness_radius = 0.05;
    int max_newton = 50;

private:
    EllipseParams p_;
    Grid grid_;
    Exec exec_;
    double aleph_;
    Vec g_, inv_g_, straight_, c2_, s2_, c4_, xi_p_;
};

// Discrete Poisson brackets {F, G} = (grad F, d_theta grad G) of the coordinates
// (J, t_bar, alpha~_n, beta~_n), n in {1, 3, ..., n_test}, at xi. Gradients are
// central differences along cos(k theta), sin(k theta), 1 <= k < N/2.
struct BracketTable {
    std::vector<std::string> labels;
    Vec computed;  // row-major, labels.size() squared
    Vec canonical; // {J, t} = 1, {alpha~_n, beta~_n} = n, antisymmetric, zero otherwise
    double max_deviation = 0;
};

BracketTable poisson_brackets(const Rectifier& r, const Vec& xi, int n_test, double eps = 1e-6);

RadialDeformation flow_J2(double t, const RadialDeformation& xi, const EllipseParams& p);
RadialDeformation flow_J(double t, const RadialDeformation& xi, const EllipseParams& p);
double time_of_impact(const RadialDeformation& xi, const EllipseParams& p);
RectifiedState rectify(const RadialDeformation& xi, const EllipseParams& p);
RadialDeformation rectify_inverse(double eta_c, double eta_s, const RadialDeformation& eta_perp,
                                  const EllipseParams& p);

} // namespace vpatch
