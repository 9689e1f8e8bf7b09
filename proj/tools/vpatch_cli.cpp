// vpatch: command-line front end.
//
// Exit status: 0 on success, 1 on a rejected configuration or failed precondition,
// 2 on a numerical abort (blow-up, non-convergence).

#include "vpatch/checks.hpp"
#include "vpatch/dynamics.hpp"
#include "vpatch/io.hpp"
#include "vpatch/rectification.hpp"
#include "vpatch/resonance.hpp"
#include "vpatch/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

using namespace vpatch;
using nlohmann::ordered_json;

namespace {

// Output sink: a file when a path is given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw DomainError("cannot open output file " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

// zero | random:SEED:AMP[:MAXMODE] | c3:1e-3,s5:-2e-4,...
Vec parse_xi0(const std::string& spec, const Grid& grid)
{
    if (spec == "zero") return Vec(grid.n_points, 0.0);
    if (spec.rfind("random:", 0) == 0) {
        std::istringstream is(spec.substr(7));
        std::string tok;
        std::vector<std::string> parts;
        while (std::getline(is, tok, ':')) parts.push_back(tok);
        if (parts.size() < 2 || parts.size() > 3) throw DomainError("--xi0 random expects random:SEED:AMP[:MAXMODE]");
        std::mt19937_64 rng(std::stoull(parts[0]));
        const double amp = std::stod(parts[1]);
        const int maxm = parts.size() == 3 ? std::stoi(parts[2]) : 8;
        if (maxm < 1 || maxm >= grid.n_points / 2) throw DomainError("--xi0 random: MAXMODE must lie in [1, N/2)");
        return random_field(grid, maxm, amp, rng);
    }
    Vec x(grid.n_points, 0.0);
    std::istringstream is(spec);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        const auto colon = tok.find(':');
        if (tok.size() < 4 || (tok[0] != 'c' && tok[0] != 's') || colon == std::string::npos)
            throw DomainError("cannot parse --xi0 term '" + tok + "' (expected cK:AMP or sK:AMP)");
        const int k = std::stoi(tok.substr(1, colon - 1));
        const double a = std::stod(tok.substr(colon + 1));
        if (k < 1 || k >= grid.n_points / 2) throw DomainError("--xi0 mode index must lie in [1, N/2)");
        const bool cosine = tok[0] == 'c';
        for (int j = 0; j < grid.n_points; ++j) {
            const double t = grid.node(j);
            x[j] += a * (cosine ? std::cos(k * t) : std::sin(k * t));
        }
    }
    return x;
}

double parse_omega(const std::string& s, const EllipseParams& p)
{
    if (s == "equilibrium") return p.omega_gamma;
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError("--omega must be 'equilibrium' or a number");
    }
}

std::string num(double v) { return fmt_num(v); }

ordered_json json_num(double v)
{
    if (std::isfinite(v)) return v;
    return fmt_num(v);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    double gamma = 2;
    int n_points = 256;
    std::string xi0 = "zero";
    std::string omega = "equilibrium";
    double dt = 1e-3, t_end = 1;
    int stride = 100;
    double blowup_margin = 0.1;
    std::string out, dump, plot;
};

int run_simulate(const SimulateArgs& a)
{
    const EllipseParams p = ellipse_params(a.gamma);
    const Grid grid(a.n_points);
    const RadialDeformation xi0(grid, parse_xi0(a.xi0, grid));
    const double omega = parse_omega(a.omega, p);
    IntegrateOptions o;
    o.dt = a.dt;
    o.t_end = a.t_end;
    o.record_stride = a.stride;
    o.blowup_margin = a.blowup_margin;
    const TrajectoryRecord rec = integrate(xi0, omega, p, o);

    if (!a.out.empty()) {
        Sink s(a.out);
        write_trajectory_csv(rec, s.os());
    }
    if (!a.dump.empty()) write_state_dump(rec, grid, a.dump);
    if (!a.plot.empty()) {
        // final boundary as (x, y) columns
        Sink s(a.plot);
        const BoundaryData b = boundary_data({grid, rec.states.back()}, p);
        s.os() << "x,y\n";
        for (int j = 0; j <= grid.n_points; ++j) {
            const int k = j % grid.n_points;
            s.os() << num(b.x[k]) << ',' << num(b.y[k]) << '\n';
        }
    }

    double mx = 0;
    for (const Vec& s : rec.states) mx = std::max(mx, max_abs(s));
    const ConservedSet& c0 = rec.diagnostics.front();
    const ConservedSet& c1 = rec.diagnostics.back();
    std::printf("t_final %s\n", num(rec.times.back()).c_str());
    std::printf("max_abs_xi %s\n", num(mx).c_str());
    std::printf("drift_C %s\n", num(std::abs(c1.circulation - c0.circulation)).c_str());
    std::printf("drift_J %s\n", num(std::abs(c1.angular_momentum - c0.angular_momentum)).c_str());
    std::printf("drift_E %s\n", num(std::abs(c1.pseudo_energy - c0.pseudo_energy)).c_str());
    if (rec.aborted) throw NumericalAbort("trajectory aborted at t = " + num(rec.times.back()) + ": " + rec.abort_reason);
    return 0;
}

// ---------------------------------------------------------------- spectrum

int run_spectrum(double gamma, int n_max, const std::string& out)
{
    if (n_max < 1) throw DomainError("--n-max must be >= 1");
    const EllipseParams p = ellipse_params(gamma);
    Sink s(out);
    s.os() << "n,mu_plus,mu_minus,omega_n,m_n,class\n";
    for (int n = 1; n <= n_max; ++n) {
        const ModeData m = mode_data(n, p);
        s.os() << n << ',' << num(m.mu_plus) << ',' << num(m.mu_minus) << ',' << num(m.omega_n) << ','
               << num(m.m_n) << ',' << to_string(m.cls) << '\n';
    }
    return 0;
}

int run_critical(std::optional<int> n, int n_max, const std::string& out)
{
    if (n) {
        std::printf("%.10f\n", critical_gamma(*n));
        return 0;
    }
    if (n_max < 3) throw DomainError("--n-max must be >= 3");
    Sink s(out);
    s.os() << "n,gamma_bar\n";
    for (int k = 3; k <= n_max; ++k) s.os() << k << ',' << num(critical_gamma(k)) << '\n';
    return 0;
}

// ---------------------------------------------------------------- rectify-check

struct RectifyArgs {
    double gamma = 2;
    int n_points = 64;
    int samples = 20;
    unsigned long long seed = 1;
    double amplitude = 1e-3;
    int n_test = 6;
    double tol = 1e-9;
    std::string out;
};

int run_rectify_check(const RectifyArgs& a)
{
    const EllipseParams p = ellipse_params(a.gamma);
    const Grid grid(a.n_points);
    if (a.n_points < 32) throw DomainError("--n-points must be >= 32 for rectify-check");
    if (a.samples < 1) throw DomainError("--samples must be >= 1");
    if (!(a.amplitude > 0)) throw DomainError("--amplitude must be positive");
    const Rectifier R(p, grid);
    std::mt19937_64 rng(a.seed);

    double trip = 0, jerr = 0;
    for (int k = 0; k < a.samples; ++k) {
        const Vec xi = random_field(grid, 8, a.amplitude, rng);
        const RectifiedState r = R.rectify(xi);
        const Vec back = R.rectify_inverse(r.j_coord, r.t_coord, r.u_perp.values);
        for (int j = 0; j < grid.n_points; ++j) trip = std::max(trip, std::abs(back[j] - xi[j]));
        jerr = std::max(jerr, std::abs(rectified_momentum({grid, back}, p) - r.j_coord));
    }

    ordered_json brackets = ordered_json::array();
    double worst_bracket = 0;
    for (double amp : {0.0, a.amplitude}) {
        const Vec xi = amp > 0 ? random_field(grid, 8, amp, rng) : Vec(grid.n_points, 0.0);
        const BracketTable t = poisson_brackets(R, xi, a.n_test);
        worst_bracket = std::max(worst_bracket, t.max_deviation);
        ordered_json e;
        e["amplitude"] = amp;
        e["max_deviation"] = t.max_deviation;
        e["labels"] = t.labels;
        e["computed"] = t.computed;
        brackets.push_back(e);
    }

    // largest amplitude on a doubling ladder at which every sample round-trips
    Rectifier loose(p, grid);
    loose.smallness_radius = std::numeric_limits<double>::infinity();
    double radius = 0;
    ordered_json ladder = ordered_json::array();
    std::mt19937_64 rr(a.seed + 1);
    for (double amp = 1e-3; amp < 0.45; amp *= 2) {
        bool ok = true;
        double err = 0;
        std::string why;
        for (int k = 0; k < 5 && ok; ++k) {
            const Vec xi = random_field(grid, 8, amp, rr);
            try {
                const RectifiedState r = loose.rectify(xi);
                const Vec back = loose.rectify_inverse(r.j_coord, r.t_coord, r.u_perp.values);
                for (int j = 0; j < grid.n_points; ++j) err = std::max(err, std::abs(back[j] - xi[j]));
                if (!(err <= a.tol)) ok = false;
            } catch (const std::exception& e) {
                ok = false;
                why = e.what();
            }
        }
        ordered_json step;
        step["amplitude"] = amp;
        step["ok"] = ok;
        step["max_error"] = json_num(err);
        if (!why.empty()) step["reason"] = why;
        ladder.push_back(step);
        if (!ok) break;
        radius = amp;
    }

    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["gamma"] = a.gamma;
    j["n_points"] = a.n_points;
    j["seed"] = a.seed;
    j["round_trip"] = {{"samples", a.samples},
                       {"amplitude", a.amplitude},
                       {"max_error", trip},
                       {"max_J_error", jerr},
                       {"pass", trip <= a.tol && jerr <= a.tol}};
    j["brackets"] = {{"n_test", a.n_test},
                     {"max_deviation", worst_bracket},
                     {"pass", worst_bracket <= 1e-6},
                     {"points", brackets}};
    // when every rung succeeds the radius is only a lower bound
    const bool exhausted = ladder.back()["ok"].get<bool>();
    j["empirical_radius"] = {
        {"tolerance", a.tol}, {"radius", radius}, {"lower_bound_only", exhausted}, {"ladder", ladder}};
    Sink s(a.out);
    s.os() << j.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------- resonance

struct ResonanceArgs {
    ResonanceConfig cfg;
    bool no_restriction = false;
    int transversality = -1;
    std::string out, summary;
};

ordered_json summary_json(const UpsilonSummary& s)
{
    ordered_json j;
    j["upsilon"] = s.upsilon;
    j["excluded_measure"] = s.excluded_measure;
    j["good_measure"] = s.good_measure;
    ordered_json fails;
    for (int f = 0; f < kFamilies; ++f) fails[to_string(static_cast<Family>(f))] = s.failures[f];
    j["failures_by_family"] = fails;
    ordered_json iv = ordered_json::array();
    for (auto [a, b] : s.excluded_intervals) iv.push_back({a, b});
    j["excluded_intervals"] = iv;
    return j;
}

int run_resonance(ResonanceArgs a)
{
    ResonanceConfig& cfg = a.cfg;
    cfg.index_restriction = !a.no_restriction;
    validate(cfg);
    const ResonanceReport rep = measure_estimate(cfg);
    const double len = cfg.gamma_hi - cfg.gamma_lo;

    if (!a.out.empty()) {
        Sink s(a.out);
        s.os() << "gamma,family,margin,pass\n";
        for (size_t i = 0; i < rep.gammas.size(); ++i)
            for (int f = 0; f < kFamilies; ++f) {
                const double m = rep.margins[i][f];
                s.os() << num(rep.gammas[i]) << ',' << to_string(static_cast<Family>(f)) << ',' << num(m) << ','
                       << (m >= cfg.upsilon ? 1 : 0) << '\n';
            }
    }

    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = {{"sites", cfg.sites},
                   {"n_bar", cfg.n_bar},
                   {"upsilon", cfg.upsilon},
                   {"tau", cfg.tau},
                   {"l_max", cfg.l_max},
                   {"n_max", cfg.n_max},
                   {"gamma_range", {cfg.gamma_lo, cfg.gamma_hi}},
                   {"dgamma", cfg.dgamma},
                   {"freq_shift", cfg.freq_shift},
                   {"index_restriction", cfg.index_restriction}};
    j["n_cells"] = rep.gammas.size();
    j["cell_width"] = rep.cell;
    j["primary"] = summary_json(rep.primary);
    j["excluded_fraction"] = rep.primary.excluded_measure / len;
    ordered_json trend = ordered_json::array();
    for (const UpsilonSummary& s : rep.trend) trend.push_back(summary_json(s));
    j["trend"] = trend;
    j["min_margin"] = rep.min_margin;
    j["median_margin"] = rep.median_margin;
    if (a.transversality >= 0) {
        const TransversalitySweep sw = transversality_sweep(cfg, a.transversality);
        j["transversality"] = {{"k_max", a.transversality}, {"min_margin", sw.min_margin}};
    }
    if (!a.summary.empty()) {
        Sink s(a.summary);
        s.os() << j.dump(2) << '\n';
    }
    std::printf("excluded fraction at upsilon %s: %s\n", num(cfg.upsilon).c_str(),
                num(rep.primary.excluded_measure / len).c_str());
    for (const UpsilonSummary& s : rep.trend)
        std::printf("  upsilon %s: excluded fraction %s\n", num(s.upsilon).c_str(),
                    num(s.excluded_measure / len).c_str());
    return 0;
}

// ---------------------------------------------------------------- verify

int run_verify(const std::vector<int>& only)
{
    int failed = 0, ran = 0;
    for (const Check& c : acceptance_checks()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const CheckResult r = c.run();
        ++ran;
        if (!r.pass) ++failed;
        std::printf("%s\n", format_result(r).c_str());
        std::fflush(stdout);
    }
    if (ran == 0) throw DomainError("--only selects no acceptance property");
    std::printf("%d of %d properties passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}

void set_workers(int workers)
{
    if (workers <= 0) {
        if (const char* env = std::getenv("VPATCH_WORKERS")) workers = std::atoi(env);
    }
    if (workers > 0) omp_set_num_threads(workers);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Contour dynamics of vortex patches near Kirchhoff ellipses"};
    app.require_subcommand(1);
    int workers = 0;
    app.add_option("--workers", workers, "Worker threads (default: $VPATCH_WORKERS, else all cores)");

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Integrate the radial deformation and write diagnostics");
    s->add_option("--gamma", sim.gamma, "Ellipse aspect ratio (>= 1)")->capture_default_str();
    s->add_option("--n-points", sim.n_points, "Grid size (even, >= 8)")->capture_default_str();
    s->add_option("--xi0", sim.xi0, "zero | random:SEED:AMP[:MAXMODE] | cK:AMP,sK:AMP,...")->capture_default_str();
    s->add_option("--omega", sim.omega, "Frame angular velocity, or 'equilibrium'")->capture_default_str();
    s->add_option("--dt", sim.dt, "RK4 step")->capture_default_str();
    s->add_option("--t-end", sim.t_end, "Final time")->capture_default_str();
    s->add_option("--stride", sim.stride, "Record every STRIDE steps")->capture_default_str();
    s->add_option("--blowup-margin", sim.blowup_margin, "Abort when min(1 + 2 xi) drops below this")
        ->capture_default_str();
    s->add_option("--out", sim.out, "Diagnostics CSV");
    s->add_option("--dump", sim.dump, "State dump prefix (.bin + .json)");
    s->add_option("--plot-data", sim.plot, "Final boundary as x,y CSV");

    double sp_gamma = 2;
    int sp_nmax = 16;
    std::string sp_out;
    auto* sp = app.add_subcommand("spectrum", "Linear spectrum table");
    sp->add_option("--gamma", sp_gamma, "Ellipse aspect ratio")->capture_default_str();
    sp->add_option("--n-max", sp_nmax, "Largest mode")->capture_default_str();
    sp->add_option("--out", sp_out, "CSV path (default stdout)");

    std::optional<int> cg_n;
    int cg_nmax = 12;
    std::string cg_out;
    auto* cg = app.add_subcommand("critical-gammas", "Critical aspect ratios");
    cg->add_option("--n", cg_n, "Single mode (prints the ratio with 10 decimals)");
    cg->add_option("--n-max", cg_nmax, "Table for n = 3..N")->capture_default_str();
    cg->add_option("--out", cg_out, "CSV path (default stdout)");

    RectifyArgs rc;
    auto* r = app.add_subcommand("rectify-check", "Round-trip and bracket checks of the rectification");
    r->add_option("--gamma", rc.gamma, "Ellipse aspect ratio (> 1)")->capture_default_str();
    r->add_option("--n-points", rc.n_points, "Grid size")->capture_default_str();
    r->add_option("--samples", rc.samples, "Random round-trip samples")->capture_default_str();
    r->add_option("--amplitude", rc.amplitude, "max|xi| of the samples")->capture_default_str();
    r->add_option("--seed", rc.seed, "RNG seed")->capture_default_str();
    r->add_option("--n-test", rc.n_test, "Largest mode in the bracket table")->capture_default_str();
    r->add_option("--tol", rc.tol, "Round-trip tolerance")->capture_default_str();
    r->add_option("--out", rc.out, "JSON path (default stdout)");

    ResonanceArgs ra;
    auto* rs = app.add_subcommand("resonance", "Melnikov margins and excluded measure over a gamma grid");
    rs->add_option("--sites", ra.cfg.sites, "Tangential sites")->delimiter(',')->capture_default_str();
    rs->add_option("--n-bar", ra.cfg.n_bar, "Hyperbolic threshold")->capture_default_str();
    rs->add_option("--upsilon", ra.cfg.upsilon, "Exclusion threshold")->capture_default_str();
    rs->add_option("--upsilon-seq", ra.cfg.upsilon_sequence, "Thresholds for the trend")
        ->delimiter(',')
        ->capture_default_str();
    rs->add_option("--tau", ra.cfg.tau, "Diophantine exponent")->capture_default_str();
    rs->add_option("--l-max", ra.cfg.l_max, "Bound on |ell|_1")->capture_default_str();
    rs->add_option("--n-max", ra.cfg.n_max, "Largest normal mode")->capture_default_str();
    rs->add_option("--gamma-lo", ra.cfg.gamma_lo, "Interval start")->capture_default_str();
    rs->add_option("--gamma-hi", ra.cfg.gamma_hi, "Interval end")->capture_default_str();
    rs->add_option("--dgamma", ra.cfg.dgamma, "Grid spacing")->capture_default_str();
    rs->add_option("--shift", ra.cfg.freq_shift, "Frequency shift per mode")->capture_default_str();
    rs->add_flag("--no-index-restriction", ra.no_restriction, "Enumerate every index");
    rs->add_option("--transversality", ra.transversality, "Also sweep transversality margins to order K");
    rs->add_option("--out", ra.out, "Per-gamma CSV");
    rs->add_option("--summary", ra.summary, "JSON summary");

    std::vector<int> only;
    auto* v = app.add_subcommand("verify", "Run the acceptance properties");
    v->add_option("--only", only, "Run only these ids")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        set_workers(workers);
        if (*s) return run_simulate(sim);
        if (*sp) return run_spectrum(sp_gamma, sp_nmax, sp_out);
        if (*cg) return run_critical(cg_n, cg_nmax, cg_out);
        if (*r) return run_rectify_check(rc);
        if (*rs) return run_resonance(ra);
        if (*v) return run_verify(only);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalAbort& e) {
        std::cerr << "aborted: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument&) {
        std::cerr << "error: invalid number in arguments\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
