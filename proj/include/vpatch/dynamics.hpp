#pragma once

#include "vpatch/quadrature.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>

namespace vpatch {

struct ConservedSet {
    double circulation = 0;
    double center_modulus = 0;
    double angular_momentum = 0;
    double pseudo_energy = 0;
    std::optional<double> rectified_momentum; // needs gamma > 1
};

// d xi / dt for the patch seen in a frame rotating with angular velocity omega.
Vec evera_rhs(const RadialDeformation& xi, double omega, const EllipseParams& p,
              Exec exec = Exec::parallel);

ConservedSet conserved_set(const RadialDeformation& xi, const EllipseParams& p,
                           Exec exec = Exec::parallel);

double angular_momentum(const RadialDeformation& xi, const EllipseParams& p);
double pseudo_energy(const RadialDeformation& xi, const EllipseParams& p, Exec exec = Exec::parallel);
double rectified_momentum(const RadialDeformation& xi, const EllipseParams& p);

// H = -E/2 + (omega/2) J
double hamiltonian(const RadialDeformation& xi, double omega, const EllipseParams& p);

// v(xi) multiplying q in the linearized field
Vec v_function(const SplitKernel& k);

// Symmetric part: (omega g + v(xi)) q - W(xi)[q]
Vec linearized_symbol_apply(const RadialDeformation& xi, const Vec& q, double omega,
                            const EllipseParams& p, Exec exec = Exec::parallel);

// d_theta of the symmetric part
Vec linearized_apply(const RadialDeformation& xi, const Vec& q, double omega,
                     const EllipseParams& p, Exec exec = Exec::parallel);

// 2x2 matrix [[a, b], [c, d]] of linearized_apply(0, ., Omega_gamma) acting on the mode
// coordinates (alpha_n, beta_n): (alpha', beta') = A (alpha, beta).
std::array<double, 4> assembled_block(int n, const EllipseParams& p, const Grid& grid);

struct IntegrateOptions {
    double dt = 1e-3;
    double t_end = 1;
    int record_stride = 100;
    double blowup_margin = 0.1;
    bool keep_states = true;
};

struct TrajectoryRecord {
    Vec times;
    std::vector<Vec> states;
    std::vector<ConservedSet> diagnostics;
    double dt = 0;
    std::string method = "rk4";
    bool aborted = false;
    std::string abort_reason;
};

TrajectoryRecord integrate(const RadialDeformation& xi0, double omega, const EllipseParams& p,
                           const IntegrateOptions& opt);

// Columns t, C, |Z|, J, E, Jrect, max|xi|
void write_trajectory_csv(const TrajectoryRecord& rec, std::ostream& os);

// <prefix>.bin holds the recorded states as little-endian float64, row-major
// (one row of n_points values per recorded time); <prefix>.json describes it.
void write_state_dump(const TrajectoryRecord& rec, const Grid& grid, const std::string& prefix);

} // namespace vpatch
