#include "vpatch/dynamics.hpp"
#include "vpatch/io.hpp"
#include "vpatch/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <ostream>

namespace vpatch {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inv4pi = 1 / (4 * pi);

} // namespace

Vec evera_rhs(const RadialDeformation& xi, double omega, const EllipseParams& p, Exec exec)
{
    const SplitKernel k(xi, p);
    const BoundaryData& b = k.boundary();
    const LogKernelRule& r = k.rule();
    const int n = xi.grid.n_points;

    // d2/dtheta dtheta' of rho(theta) rho(theta') sin(theta' - theta)
    Vec integral = k.integrate(
        [&](int i, int j) {
            int d = i - j;
            if (d < 0) d += n;
            const double s = -r.sin_d[d], c = r.cos_d[d];
            return (b.drho[i] * b.drho[j] + b.rho[i] * b.rho[j]) * s +
                   (b.drho[i] * b.rho[j] - b.rho[i] * b.drho[j]) * c;
        },
        exec);

    Vec transport(n);
    for (int j = 0; j < n; ++j)
        transport[j] = g_gamma(p, xi.grid.node(j)) * (1 + 2 * xi.values[j]);
    transport = spectral_derivative(transport);

    Vec out(n);
    for (int j = 0; j < n; ++j) out[j] = 0.5 * omega * transport[j] + inv4pi * integral[j];
    return out;
}

double angular_momentum(const RadialDeformation& xi, const EllipseParams& p)
{
    const Grid& g = xi.grid;
    double s = 0;
    for (int j = 0; j < g.n_points; ++j) {
        const double r2 = 1 + 2 * xi.values[j];
        s += r2 * r2 * g_gamma(p, g.node(j));
    }
    return 0.25 * s * g.h();
}

double rectified_momentum(const RadialDeformation& xi, const EllipseParams& p)
{
    const double aleph = p.require_aleph();
    const Grid& g = xi.grid;
    double s = 0;
    for (int j = 0; j < g.n_points; ++j) {
        const double x = xi.values[j];
        s += (x + x * x) * g_gamma(p, g.node(j));
    }
    return aleph * s * g.h();
}

double pseudo_energy(const RadialDeformation& xi, const EllipseParams& p, Exec exec)
{
    const SplitKernel k(xi, p);
    const BoundaryData& b = k.boundary();
    const int n = xi.grid.n_points;
    const double h = xi.grid.h();
    // G = M * d2M/dtheta dtheta', with d2M = -2 Re(w'(theta) conj(w'(theta')))
    auto G = [&](int i, int j) {
        return -2 * k.M(i, j) * (b.dx[i] * b.dx[j] + b.dy[i] * b.dy[j]);
    };
    const Vec rows = k.integrate(G, exec);
    double s = 0;
    for (int i = 0; i < n; ++i) {
        double gsum = 0;
        for (int j = 0; j < n; ++j) gsum += G(i, j);
        s += rows[i] - 2 * h * gsum;
    }
    return s * h / (32 * pi);
}

ConservedSet conserved_set(const RadialDeformation& xi, const EllipseParams& p, Exec exec)
{
    const Grid& g = xi.grid;
    ConservedSet c;
    double area = 0;
    std::complex<double> z = 0;
    const double sg = std::sqrt(p.gamma);
    for (int j = 0; j < g.n_points; ++j) {
        const double t = g.node(j), r2 = 1 + 2 * xi.values[j];
        area += xi.values[j];
        z += r2 * std::sqrt(r2) * std::complex<double>(sg * std::cos(t), std::sin(t) / sg);
    }
    c.circulation = pi + area * g.h();
    c.center_modulus = std::abs(z) * g.h() / 3;
    c.angular_momentum = angular_momentum(xi, p);
    c.pseudo_energy = pseudo_energy(xi, p, exec);
    if (p.aleph) c.rectified_momentum = rectified_momentum(xi, p);
    return c;
}

double hamiltonian(const RadialDeformation& xi, double omega, const EllipseParams& p)
{
    return -0.5 * pseudo_energy(xi, p) + 0.5 * omega * angular_momentum(xi, p);
}

Vec v_function(const SplitKernel& k)
{
    const BoundaryData& b = k.boundary();
    const LogKernelRule& r = k.rule();
    const int n = k.grid().n_points;
    // d/dtheta' [rho(theta') sin(theta' - theta)] / rho(theta)
    Vec v = k.integrate([&](int i, int j) {
        int d = i - j;
        if (d < 0) d += n;
        return b.drho[j] * (-r.sin_d[d]) + b.rho[j] * r.cos_d[d];
    });
    for (int i = 0; i < n; ++i) v[i] *= inv4pi / b.rho[i];
    return v;
}

Vec linearized_symbol_apply(const RadialDeformation& xi, const Vec& q, double omega,
                            const EllipseParams& p, Exec exec)
{
    const SplitKernel k(xi, p);
    const Vec v = v_function(k);
    const Vec w = w_operator_apply(k, q, exec);
    const int n = xi.grid.n_points;
    Vec out(n);
    for (int j = 0; j < n; ++j)
        out[j] = (omega * g_gamma(p, xi.grid.node(j)) + v[j]) * q[j] - w[j];
    return out;
}

Vec linearized_apply(const RadialDeformation& xi, const Vec& q, double omega,
                     const EllipseParams& p, Exec exec)
{
    return spectral_derivative(linearized_symbol_apply(xi, q, omega, p, exec));
}

std::array<double, 4> assembled_block(int n, const EllipseParams& p, const Grid& grid)
{
    const RadialDeformation zero = RadialDeformation::zero(grid);
    const Vec c = basis_c(n, grid), s = basis_s(n, grid);
    const Vec lc = linearized_apply(zero, c, p.omega_gamma, p);
    const Vec ls = linearized_apply(zero, s, p.omega_gamma, p);
    const double cc = dot(grid, c, c), ss = dot(grid, s, s);
    return {dot(grid, lc, c) / cc, dot(grid, ls, c) / cc, dot(grid, lc, s) / ss, dot(grid, ls, s) / ss};
}

TrajectoryRecord integrate(const RadialDeformation& xi0, double omega, const EllipseParams& p,
                           const IntegrateOptions& opt)
{
    if (!(opt.dt > 0)) throw DomainError("dt must be positive");
    if (!(opt.t_end >= 0)) throw DomainError("t_end must be non-negative");
    if (opt.record_stride < 1) throw DomainError("record_stride must be >= 1");
    if (!xi0.admissible()) throw DomainError("initial state has 1 + 2 xi <= 0");

    const Grid grid = xi0.grid;
    const int n = grid.n_points;
    const long steps = std::lround(opt.t_end / opt.dt);

    TrajectoryRecord rec;
    rec.dt = opt.dt;
    auto record = [&](double t, const Vec& x) {
        rec.times.push_back(t);
        if (opt.keep_states) rec.states.push_back(x);
        rec.diagnostics.push_back(conserved_set({grid, x}, p));
    };

    Vec x = xi0.values;
    remove_mean(x);
    record(0, x);

    auto f = [&](const Vec& y) { return evera_rhs({grid, y}, omega, p); };
    Vec tmp(n);
    long step = 0;
    try {
        for (step = 1; step <= steps; ++step) {
            const double dt = opt.dt;
            const Vec k1 = f(x);
            for (int j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * dt * k1[j];
            const Vec k2 = f(tmp);
            for (int j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * dt * k2[j];
            const Vec k3 = f(tmp);
            for (int j = 0; j < n; ++j) tmp[j] = x[j] + dt * k3[j];
            const Vec k4 = f(tmp);
            for (int j = 0; j < n; ++j)
                x[j] += dt / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
            remove_mean(x);

            double lo = 1e300;
            for (double v : x) lo = std::min(lo, 1 + 2 * v);
            if (!(lo >= opt.blowup_margin)) {
                rec.aborted = true;
                rec.abort_reason = "min(1 + 2 xi) fell below the blow-up margin";
                break;
            }
            if (step % opt.record_stride == 0 || step == steps) record(step * opt.dt, x);
        }
    } catch (const DomainError& e) {
        // x still holds the last completed step
        rec.aborted = true;
        rec.abort_reason = e.what();
        --step;
    }
    if (rec.aborted && step * opt.dt > rec.times.back()) {
        try {
            record(step * opt.dt, x);
        } catch (const DomainError&) {
        }
    }
    return rec;
}

void write_trajectory_csv(const TrajectoryRecord& rec, std::ostream& os)
{
    os << "t,C,abs_Z,J,E,J_rect,max_abs_xi\n";
    for (size_t r = 0; r < rec.times.size(); ++r) {
        const ConservedSet& c = rec.diagnostics[r];
        const double mx = rec.states.empty() ? std::nan("") : max_abs(rec.states[r]);
        os << fmt_num(rec.times[r]) << ',' << fmt_num(c.circulation) << ','
           << fmt_num(c.center_modulus) << ',' << fmt_num(c.angular_momentum) << ','
           << fmt_num(c.pseudo_energy) << ','
           << fmt_num(c.rectified_momentum.value_or(std::nan(""))) << ',' << fmt_num(mx) << '\n';
    }
}

void write_state_dump(const TrajectoryRecord& rec, const Grid& grid, const std::string& prefix)
{
    static_assert(std::endian::native == std::endian::little, "dump layout assumes little-endian host");
    std::ofstream bin(prefix + ".bin", std::ios::binary);
    for (const Vec& s : rec.states)
        bin.write(reinterpret_cast<const char*>(s.data()), static_cast<std::streamsize>(s.size() * sizeof(double)));
    if (!bin) throw std::runtime_error("cannot write " + prefix + ".bin");

    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["layout"] = "float64 little-endian, row-major [n_records][n_points]";
    j["n_points"] = grid.n_points;
    j["n_records"] = rec.states.size();
    j["dt"] = rec.dt;
    j["method"] = rec.method;
    j["times"] = rec.times;
    j["aborted"] = rec.aborted;
    std::ofstream meta(prefix + ".json");
    meta << j.dump(2) << '\n';
}

} // namespace vpatch
