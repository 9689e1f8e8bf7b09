#include "vpatch/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace vpatch {

LogKernelRule build_log_rule(const Grid& grid)
{
    const int N = grid.n_points, n = N / 2;
    const double pi = std::numbers::pi;
    LogKernelRule r;
    r.grid = grid;
    r.weights.assign(N, 0.0);
    r.inv_four_sin2.assign(N, 0.0);
    r.cos_d.resize(N);
    r.sin_d.resize(N);
    for (int d = 0; d < N; ++d) {
        const double t = grid.node(d);
        double s = 0;
        for (int m = 1; m < n; ++m) s += std::cos(m * t) / m;
        r.weights[d] = -(2 * pi / n) * s - (pi / (double(n) * n)) * std::cos(n * t);
        if (d != 0) {
            const double sn = std::sin(pi * d / N);
            r.inv_four_sin2[d] = 1 / (4 * sn * sn);
        }
        r.cos_d[d] = std::cos(t);
        r.sin_d[d] = std::sin(t);
    }
    return r;
}

const LogKernelRule& log_rule(const Grid& grid)
{
    static std::mutex mu;
    static std::map<int, std::unique_ptr<LogKernelRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[grid.n_points];
    if (!slot) slot = std::make_unique<LogKernelRule>(build_log_rule(grid));
    return *slot;
}

Vec apply_log_rule(const LogKernelRule& rule, const Vec& f)
{
    const int n = rule.grid.n_points;
    Vec out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0;
        for (int j = 0; j < n; ++j) s += rule.weights[((i - j) % n + n) % n] * f[j];
        out[i] = s;
    }
    return out;
}

SplitKernel::SplitKernel(const RadialDeformation& xi, const EllipseParams& p)
    : grid_(xi.grid), rule_(&log_rule(xi.grid)), bd_(boundary_data(xi, p))
{
    const int n = grid_.n_points;
    diag_.resize(n);
    for (int i = 0; i < n; ++i)
        diag_[i] = std::log(bd_.dx[i] * bd_.dx[i] + bd_.dy[i] * bd_.dy[i]);
}

Vec log_M_convolve(const RadialDeformation& xi, const EllipseParams& p, const Vec& f, Exec exec)
{
    const int n = xi.grid.n_points;
    if (static_cast<long>(f.size()) != static_cast<long>(n) * n)
        throw DomainError("integrand must be an N x N matrix");
    SplitKernel k(xi, p);
    return k.integrate([&](int i, int j) { return f[static_cast<size_t>(i) * n + j]; }, exec);
}

Vec w_operator_apply(const SplitKernel& k, const Vec& q, Exec exec)
{
    Vec out = k.integrate([&](int, int j) { return q[j]; }, exec);
    const double c = 1 / (4 * std::numbers::pi);
    for (double& v : out) v *= c;
    return out;
}

Vec w_operator_apply(const RadialDeformation& xi, const EllipseParams& p, const Vec& q, Exec exec)
{
    return w_operator_apply(SplitKernel(xi, p), q, exec);
}

} // namespace vpatch
