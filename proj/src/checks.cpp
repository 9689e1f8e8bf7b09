#include "vpatch/checks.hpp"
#include "vpatch/dynamics.hpp"
#include "vpatch/rectification.hpp"
#include "vpatch/resonance.hpp"
#include "vpatch/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace vpatch {

namespace {

constexpr double pi = std::numbers::pi;
// Reference root of 4g/(1+g)^2 - 1/2 - ((g-1)/(g+1))^4 / 2 from a 40-digit bisection.
constexpr double kGammaBar4 = 4.611581789308714980881;

std::string fmt(const char* f, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CheckResult equilibrium()
{
    const auto t0 = std::chrono::steady_clock::now();
    const EllipseParams p = ellipse_params(2);
    const Grid grid(256);
    const Vec r = evera_rhs(RadialDeformation::zero(grid), 2.0 / 9.0, p);
    const double e = max_abs(r), secs = seconds_since(t0);
    return {1, "equilibrium", e <= 1e-10 && secs < 1,
            fmt("max|rhs(0)| = %.3e", e) + fmt(", %.3f s", secs), secs};
}

CheckResult singular_identity()
{
    const Grid grid(256);
    const int n = grid.n_points;
    Vec f(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            f[static_cast<size_t>(i) * n + j] = std::sin(grid.node(j) - grid.node(i)) / (4 * pi);
    double worst = 0;
    for (double g : {1.5, 2.0, 4.0}) {
        const EllipseParams p = ellipse_params(g);
        const Vec I = log_M_convolve(RadialDeformation::zero(grid), p, f);
        for (int k = 0; k < 32; ++k) {
            const int i = k * n / 32;
            const double expect = -0.5 * p.omega_gamma * dg_gamma(p, grid.node(i));
            worst = std::max(worst, std::abs(I[i] - expect));
        }
    }
    return {2, "singular-integral identity", worst <= 1e-9, fmt("max error %.3e over 96 points", worst), 0};
}

CheckResult w0_multiplier()
{
    const Grid grid(256);
    const EllipseParams p = ellipse_params(2);
    const RadialDeformation zero = RadialDeformation::zero(grid);
    const SplitKernel k(zero, p);
    double worst = 0;
    for (int j = 1; j <= 32; ++j) {
        const double kj = kappa(p, j);
        const Vec c = sample(grid, [&](double t) { return std::cos(j * t); });
        const Vec s = sample(grid, [&](double t) { return std::sin(j * t); });
        const Vec wc = w_operator_apply(k, c), ws = w_operator_apply(k, s);
        for (int i = 0; i < grid.n_points; ++i) {
            worst = std::max(worst, std::abs(wc[i] + (1 + kj) / (2.0 * j) * c[i]));
            worst = std::max(worst, std::abs(ws[i] + (1 - kj) / (2.0 * j) * s[i]));
        }
    }
    return {3, "W0 multiplier", worst <= 1e-9, fmt("max error %.3e for j <= 32", worst), 0};
}

CheckResult degenerate_mode()
{
    const Grid grid(128);
    double mu = 0, upper = 0;
    for (double g : {1.5, 2.0, 3.0, 5.0}) {
        const EllipseParams p = ellipse_params(g);
        mu = std::max(mu, std::abs(mode_data(2, p).mu_plus));
        upper = std::max(upper, std::abs(assembled_block(2, p, grid)[1]));
    }
    return {4, "degenerate mode", mu <= 1e-14 && upper <= 1e-9,
            fmt("max|mu2+| = %.3e", mu) + fmt(", max block upper entry %.3e", upper), 0};
}

CheckResult critical_ratio()
{
    const double g3 = critical_gamma(3), g4 = critical_gamma(4);
    const bool ok = std::abs(g3 - 3) <= 1e-10 && g4 > g3 && std::abs(g4 - kGammaBar4) <= 1e-10;
    return {5, "critical ratio", ok,
            fmt("gbar3 = %.12f", g3) + fmt(", gbar4 = %.12f", g4) +
                fmt(", |gbar4 - oracle| = %.2e", std::abs(g4 - kGammaBar4)),
            0};
}

CheckResult stability_classes()
{
    const Grid grid(128);
    const EllipseParams p4 = ellipse_params(4);
    const auto A = assembled_block(3, p4, grid);
    const double tr = A[0] + A[3], disc = (A[0] - A[3]) * (A[0] - A[3]) + 4 * A[1] * A[2];
    const ModeData m3 = mode_data(3, p4);
    bool ok = disc > 0 && m3.cls == StabilityClass::hyperbolic;
    double err = 1;
    if (disc > 0) {
        const double l1 = 0.5 * (tr + std::sqrt(disc)), l2 = 0.5 * (tr - std::sqrt(disc));
        err = std::max(std::abs(l1 - m3.omega_n), std::abs(l2 + m3.omega_n));
    }
    ok = ok && err <= 1e-8;
    const EllipseParams p2 = ellipse_params(2);
    int bad = 0;
    for (int n = 3; n <= 64; ++n)
        if (mode_data(n, p2).cls != StabilityClass::elliptic) ++bad;
    ok = ok && bad == 0;
    return {6, "stability classes", ok,
            fmt("gamma=4 mode 3 eigenvalue error %.3e", err) + fmt(", non-elliptic modes at gamma=2: %.0f", bad),
            0};
}

CheckResult linear_flow()
{
    const Grid grid(128);
    const EllipseParams p = ellipse_params(2);
    const std::map<int, double> amp{{4, 1.0}};
    const double Om = mode_data(4, p).omega_n, period = 2 * pi / Om;
    const int K = 16;
    std::vector<Vec> q(K);
    for (int k = 0; k < K; ++k) q[k] = linear_solution(k * period / K, amp, p, grid, 2);
    // spectral derivative in time along each theta node
    double resid = 0;
    std::vector<Vec> qt(K, Vec(grid.n_points));
    for (int i = 0; i < grid.n_points; ++i) {
        Vec series(K);
        for (int k = 0; k < K; ++k) series[k] = q[k][i];
        Vec d = spectral_derivative(series);
        for (int k = 0; k < K; ++k) qt[k][i] = d[k] * (2 * pi / period);
    }
    const RadialDeformation zero = RadialDeformation::zero(grid);
    for (int k = 0; k < K; ++k) {
        const Vec L = linearized_apply(zero, q[k], p.omega_gamma, p);
        for (int i = 0; i < grid.n_points; ++i) resid = std::max(resid, std::abs(qt[k][i] - L[i]));
    }
    const Vec q1 = linear_solution(period, amp, p, grid, 2);
    double closure = 0;
    for (int i = 0; i < grid.n_points; ++i) closure = std::max(closure, std::abs(q1[i] - q[0][i]));
    return {7, "linear flow", resid <= 1e-9 && closure <= 1e-9,
            fmt("residual %.3e", resid) + fmt(", period closure %.3e", closure), 0};
}

CheckResult hamiltonian_structure()
{
    const Grid grid(128);
    const EllipseParams p = ellipse_params(2);
    std::mt19937_64 rng(8);
    const RadialDeformation xi{grid, random_field(grid, 8, 1e-3, rng)};
    const double om = p.omega_gamma, eps = 1e-5;
    const int n = grid.n_points;
    Vec grad(n, 0.0);
    for (int k = 1; k < n / 2; ++k)
        for (int par = 0; par < 2; ++par) {
            const Vec dir = sample(grid, [&](double t) { return par ? std::sin(k * t) : std::cos(k * t); });
            Vec a = xi.values, b = xi.values;
            for (int j = 0; j < n; ++j) {
                a[j] += eps * dir[j];
                b[j] -= eps * dir[j];
            }
            const double dH = (hamiltonian({grid, a}, om, p) - hamiltonian({grid, b}, om, p)) / (2 * eps);
            for (int j = 0; j < n; ++j) grad[j] += dH * dir[j] / pi;
        }
    const Vec lhs = evera_rhs(xi, om, p);
    const Vec rhs = spectral_derivative(grad);
    double e = 0;
    for (int j = 0; j < n; ++j) e = std::max(e, std::abs(lhs[j] - rhs[j]));
    const double rel = e / max_abs(lhs);
    return {8, "Hamiltonian structure", rel <= 1e-5, fmt("relative error %.3e", rel), 0};
}

CheckResult linearization()
{
    const Grid grid(128);
    const EllipseParams p = ellipse_params(2);
    std::mt19937_64 rng(9);
    const Vec xi = random_field(grid, 6, 1e-2, rng);
    const Vec q = random_field(grid, 6, 1.0, rng);
    const double om = p.omega_gamma;
    const Vec L = linearized_apply({grid, xi}, q, om, p);
    std::vector<double> err;
    for (double h : {1e-3, 5e-4, 2.5e-4}) {
        Vec a = xi, b = xi;
        for (int j = 0; j < grid.n_points; ++j) {
            a[j] += h * q[j];
            b[j] -= h * q[j];
        }
        const Vec fa = evera_rhs({grid, a}, om, p), fb = evera_rhs({grid, b}, om, p);
        double e = 0;
        for (int j = 0; j < grid.n_points; ++j) e = std::max(e, std::abs((fa[j] - fb[j]) / (2 * h) - L[j]));
        err.push_back(e);
    }
    const double o1 = std::log2(err[0] / err[1]), o2 = std::log2(err[1] / err[2]);
    const bool ok = std::abs(o1 - 2) <= 0.2 && std::abs(o2 - 2) <= 0.2;
    return {9, "linearization consistency", ok,
            fmt("errors %.3e", err[0]) + fmt(" %.3e", err[1]) + fmt(" %.3e", err[2]) + fmt(", orders %.3f", o1) +
                fmt(" %.3f", o2),
            0};
}

CheckResult conservation()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Grid grid(256);
    const EllipseParams p = ellipse_params(2);
    Vec x = sample(grid, [](double t) {
        return std::cos(2 * t) + 0.6 * std::sin(3 * t) + 0.4 * std::cos(4 * t + 0.3) + 0.3 * std::sin(5 * t);
    });
    const double s = 1e-2 / max_abs(x);
    for (double& v : x) v *= s;
    IntegrateOptions opt;
    opt.dt = 1e-3;
    opt.t_end = 5;
    opt.record_stride = 500;
    opt.keep_states = false;
    const TrajectoryRecord rec = integrate({grid, x}, p.omega_gamma, p, opt);
    const ConservedSet& c0 = rec.diagnostics.front();
    double dC = 0, dJ = 0, dE = 0, dR = 0;
    for (const ConservedSet& c : rec.diagnostics) {
        dC = std::max(dC, std::abs(c.circulation - c0.circulation) / std::abs(c0.circulation));
        dJ = std::max(dJ, std::abs(c.angular_momentum - c0.angular_momentum) / std::abs(c0.angular_momentum));
        dE = std::max(dE, std::abs(c.pseudo_energy - c0.pseudo_energy) / std::abs(c0.pseudo_energy));
        dR = std::max(dR, std::abs(*c.rectified_momentum - *c0.rectified_momentum) /
                              std::abs(*c0.rectified_momentum));
    }
    const double secs = seconds_since(t0);
    const bool ok = !rec.aborted && rec.times.back() >= 5 - 1e-9 && dC <= 1e-8 && dJ <= 1e-8 && dE <= 1e-7 &&
                    dR <= 1e-7 && secs < 60;
    return {10, "conservation", ok,
            fmt("drift C %.2e", dC) + fmt(" J %.2e", dJ) + fmt(" E %.2e", dE) + fmt(" Jrect %.2e", dR) +
                fmt(", %.1f s", secs),
            secs};
}

CheckResult rectification_suite()
{
    const Grid grid(128);
    const EllipseParams p = ellipse_params(2);
    const Rectifier R(p, grid);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    double trip = 0, jerr = 0, pair = 0, shift = 0;
    for (int k = 0; k < 100; ++k) {
        const Vec xi = random_field(grid, 8, 1e-3 * unit(rng), rng);
        const RectifiedState r = R.rectify(xi);
        const Vec back = R.rectify_inverse(r.j_coord, r.t_coord, r.u_perp.values);
        for (int j = 0; j < grid.n_points; ++j) trip = std::max(trip, std::abs(back[j] - xi[j]));
        jerr = std::max(jerr, std::abs(rectified_momentum({grid, back}, p) - r.j_coord));
        if (k < 10) {
            const Vec X = R.vector_field_J(xi);
            pair = std::max(pair, std::abs(dot(grid, R.grad_time_of_impact(xi), X) + 1));
            const double tb = R.time_of_impact(xi);
            for (double tau : {-0.02, 0.01, 0.02})
                shift = std::max(shift, std::abs(R.time_of_impact(R.flow_J(tau, xi)) - (tb - tau)));
        }
    }
    // inverse on independent random coordinates
    for (int k = 0; k < 20; ++k) {
        std::uniform_real_distribution<double> c(-1e-3, 1e-3);
        Vec perp = random_field(grid, 8, 1e-3, rng);
        const double a2 = 0.5 * dot(grid, perp, basis_c(2, grid)), b2 = 0.5 * dot(grid, perp, basis_s(2, grid));
        const Vec c2 = basis_c(2, grid), s2 = basis_s(2, grid);
        for (int j = 0; j < grid.n_points; ++j) perp[j] -= a2 * c2[j] + b2 * s2[j];
        const double ec = c(rng), es = c(rng);
        const Vec x = R.rectify_inverse(ec, es, perp);
        jerr = std::max(jerr, std::abs(rectified_momentum({grid, x}, p) - ec));
    }
    const bool ok = trip <= 1e-9 && jerr <= 1e-9 && pair <= 1e-8 && shift <= 1e-9;
    return {11, "rectification", ok,
            fmt("round trip %.2e", trip) + fmt(", J error %.2e", jerr) + fmt(", |dt[X]+1| %.2e", pair) +
                fmt(", flow shift %.2e", shift),
            0};
}

CheckResult flow_representation()
{
    const Grid grid(128);
    const EllipseParams p = ellipse_params(2);
    const Rectifier R(p, grid);
    std::mt19937_64 rng(12);
    const Vec xi0 = random_field(grid, 6, 1e-2, rng);
    const double a = *p.aleph;
    const int n = grid.n_points;
    const Vec g = sample(grid, [&](double t) { return g_gamma(p, t); });
    auto f = [&](const Vec& x) {
        Vec u(n);
        for (int j = 0; j < n; ++j) u[j] = g[j] * x[j];
        Vec du = spectral_derivative(u);
        for (double& v : du) v *= 2 * a;
        return du;
    };
    const double dt = 1e-4;
    Vec x = xi0, tmp(n);
    double worst = 0;
    for (int step = 1; step <= 1000; ++step) {
        const Vec k1 = f(x);
        for (int j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * dt * k1[j];
        const Vec k2 = f(tmp);
        for (int j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * dt * k2[j];
        const Vec k3 = f(tmp);
        for (int j = 0; j < n; ++j) tmp[j] = x[j] + dt * k3[j];
        const Vec k4 = f(tmp);
        for (int j = 0; j < n; ++j) x[j] += dt / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
        if (step % 100 == 0) {
            const Vec y = R.flow_J2(step * dt, xi0);
            for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(y[j] - x[j]));
        }
    }
    return {12, "flow representation", worst <= 1e-6, fmt("max deviation %.3e over t in [0, 0.1]", worst), 0};
}

CheckResult measure_trend()
{
    const auto t0 = std::chrono::steady_clock::now();
    ResonanceConfig cfg;
    cfg.sites = {4, 5};
    cfg.n_bar = 2;
    cfg.tau = 3;
    cfg.l_max = 20;
    cfg.n_max = 64;
    cfg.upsilon = 1e-4;
    cfg.upsilon_sequence = {1e-2, 1e-3, 1e-4};
    const ResonanceReport rep = measure_estimate(cfg);
    const double len = cfg.gamma_hi - cfg.gamma_lo;
    const double m0 = rep.trend[0].excluded_measure, m1 = rep.trend[1].excluded_measure,
                 m2 = rep.trend[2].excluded_measure;
    const double secs = seconds_since(t0);
    const bool ok = m0 >= m1 && m1 >= m2 && m0 > m2 && m2 < 0.05 * len && secs < 60;
    return {13, "measure trend", ok,
            fmt("excluded fraction %.4f", m0 / len) + fmt(" / %.4f", m1 / len) + fmt(" / %.5f", m2 / len) +
                fmt(", %.1f s", secs),
            secs};
}

CheckResult transversality()
{
    ResonanceConfig cfg;
    cfg.sites = {4, 5};
    cfg.n_bar = 2;
    const TransversalitySweep sw = transversality_sweep(cfg, 2);
    double derr = 0;
    for (double g : {1.5, 2.0, 2.5, 3.5, 6.0})
        for (int n = 1; n <= 64; ++n) {
            const double fd = richardson_derivative([&](double x) { return mu_minus(n, x); }, g, 1);
            derr = std::max(derr, std::abs(fd - dmu_minus_dgamma(n, g)));
        }
    const bool ok = sw.min_margin > 0 && derr <= 1e-8;
    return {14, "transversality", ok,
            fmt("min margin %.3e", sw.min_margin) + fmt(" over %.0f grid points", double(sw.gammas.size())) +
                fmt(", dmu-/dgamma error %.2e", derr),
            0};
}

template <CheckResult (*F)()>
CheckResult timed()
{
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = F();
    r.seconds = seconds_since(t0);
    return r;
}

} // namespace

Vec random_field(const Grid& grid, int max_mode, double amplitude, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd;
    std::vector<double> a(max_mode + 1), b(max_mode + 1);
    for (int k = 1; k <= max_mode; ++k) {
        a[k] = nd(rng) / k;
        b[k] = nd(rng) / k;
    }
    Vec x = sample(grid, [&](double t) {
        double s = 0;
        for (int k = 1; k <= max_mode; ++k) s += a[k] * std::cos(k * t) + b[k] * std::sin(k * t);
        return s;
    });
    const double m = max_abs(x);
    for (double& v : x) v *= amplitude / m;
    return x;
}

const std::vector<Check>& acceptance_checks()
{
    static const std::vector<Check> checks{
        {1, "equilibrium", timed<equilibrium>},
        {2, "singular-integral identity", timed<singular_identity>},
        {3, "W0 multiplier", timed<w0_multiplier>},
        {4, "degenerate mode", timed<degenerate_mode>},
        {5, "critical ratio", timed<critical_ratio>},
        {6, "stability classes", timed<stability_classes>},
        {7, "linear flow", timed<linear_flow>},
        {8, "Hamiltonian structure", timed<hamiltonian_structure>},
        {9, "linearization consistency", timed<linearization>},
        {10, "conservation", timed<conservation>},
        {11, "rectification", timed<rectification_suite>},
        {12, "flow representation", timed<flow_representation>},
        {13, "measure trend", timed<measure_trend>},
        {14, "transversality", timed<transversality>},
    };
    return checks;
}

std::string format_result(const CheckResult& r)
{
    std::ostringstream os;
    os << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.detail;
    return os.str();
}

} // namespace vpatch
