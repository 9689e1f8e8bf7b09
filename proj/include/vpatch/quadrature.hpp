#pragma once

#include "vpatch/geometry.hpp"

#include <atomic>
#include <cmath>

namespace vpatch {

// Translation-invariant weights for the kernel ln(4 sin^2((theta - theta')/2)).
struct LogKernelRule {
    Grid grid;
    Vec weights;       // R_d, d = (i - j) mod N
    Vec inv_four_sin2; // 1 / (4 sin^2(pi d / N)), 0 at d = 0
    Vec cos_d, sin_d;  // cos(theta_d), sin(theta_d)
};

LogKernelRule build_log_rule(const Grid& grid);

// Cached per grid size; safe to call concurrently.
const LogKernelRule& log_rule(const Grid& grid);

// sum_j R_{i-j} f_j
Vec apply_log_rule(const LogKernelRule& rule, const Vec& f);

// ln M(xi)(theta_i, theta_j) = ln(4 sin^2) + S_ij with S smooth; S_ii = ln |w'(theta_i)|^2.
class SplitKernel {
public:
    SplitKernel(const RadialDeformation& xi, const EllipseParams& p);

    const Grid& grid() const { return grid_; }
    const LogKernelRule& rule() const { return *rule_; }
    const BoundaryData& boundary() const { return bd_; }

    double M(int i, int j) const
    {
        const double ex = bd_.x[i] - bd_.x[j], ey = bd_.y[i] - bd_.y[j];
        return ex * ex + ey * ey;
    }

    double smooth(int i, int j) const
    {
        if (i == j) return diag_[i];
        const int n = grid_.n_points;
        const int d = ((i - j) % n + n) % n;
        return std::log(M(i, j) * rule_->inv_four_sin2[d]);
    }

    // I_i = sum_j (R_{i-j} + h S_ij) f(i, j), i.e. the quadrature of int ln M f dtheta'.
    template <class F>
    Vec integrate(F&& f, Exec exec = Exec::parallel) const
    {
        const int n = grid_.n_points;
        const double h = grid_.h();
        Vec out(n);
        std::atomic<bool> bad{false};
        auto row = [&](int i) {
            double s = 0;
            for (int j = 0; j < n; ++j) {
                int d = i - j;
                if (d < 0) d += n;
                double sm;
                if (i == j) {
                    sm = diag_[i];
                } else {
                    const double r = M(i, j) * rule_->inv_four_sin2[d];
                    if (!(r > 0) || !std::isfinite(r)) bad = true;
                    sm = std::log(r);
                }
                s += (rule_->weights[d] + h * sm) * f(i, j);
            }
            out[i] = s;
        };
        if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
            for (int i = 0; i < n; ++i) row(i);
        } else {
            for (int i = 0; i < n; ++i) row(i);
        }
        if (bad) throw DomainError("patch boundary self-intersecting at resolution");
        return out;
    }

private:
    Grid grid_;
    const LogKernelRule* rule_;
    BoundaryData bd_;
    Vec diag_;
};

// I(theta_i) = int ln M(xi)(theta_i, theta') f(theta_i, theta') dtheta', f given as a dense row-major matrix.
Vec log_M_convolve(const RadialDeformation& xi, const EllipseParams& p, const Vec& f,
                   Exec exec = Exec::parallel);

// W(xi)[q](theta) = (1/4pi) int ln M(xi)(theta, theta') q(theta') dtheta'
Vec w_operator_apply(const RadialDeformation& xi, const EllipseParams& p, const Vec& q,
                     Exec exec = Exec::parallel);
Vec w_operator_apply(const SplitKernel& k, const Vec& q, Exec exec = Exec::parallel);

} // namespace vpatch
