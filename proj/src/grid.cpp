#include "vpatch/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace vpatch {

Grid::Grid(int n) : n_points(n)
{
    if (n < 8 || n % 2 != 0)
        throw DomainError("n_points must be even and >= 8, got " + std::to_string(n));
}

double Grid::h() const { return 2.0 * std::numbers::pi / n_points; }

double Grid::node(int j) const { return h() * j; }

Vec Grid::nodes() const
{
    Vec x(n_points);
    for (int j = 0; j < n_points; ++j)
        x[j] = node(j);
    return x;
}

double mean(const Vec& v)
{
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double max_abs(const Vec& v)
{
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const Grid& grid, const Vec& a, const Vec& b)
{
    double s = 0;
    for (int j = 0; j < grid.n_points; ++j) s += a[j] * b[j];
    return s * grid.h();
}

void remove_mean(Vec& v)
{
    const double m = mean(v);
    for (double& x : v) x -= m;
}

namespace {

// FFTW planning is not thread-safe; plans are created once per size under a lock
// and executed through the new-array interface afterwards.
struct Plans {
    fftw_plan r2c;
    fftw_plan c2r;
};

std::mutex plan_mutex;
std::map<int, Plans> plan_cache;

const Plans& plans_for(int n)
{
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = plan_cache.find(n);
    if (it != plan_cache.end()) return it->second;
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    Plans p;
    p.r2c = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_1d(n, out, in, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    return plan_cache.emplace(n, p).first->second;
}

struct Buffers {
    double* re;
    fftw_complex* cx;
    explicit Buffers(int n) : re(fftw_alloc_real(n)), cx(fftw_alloc_complex(n / 2 + 1)) {}
    ~Buffers() { fftw_free(re); fftw_free(cx); }
    Buffers(const Buffers&) = delete;
    Buffers& operator=(const Buffers&) = delete;
};

} // namespace

std::vector<std::complex<double>> forward_fft(const Vec& f)
{
    const int n = static_cast<int>(f.size());
    const Plans& p = plans_for(n);
    Buffers b(n);
    std::copy(f.begin(), f.end(), b.re);
    fftw_execute_dft_r2c(p.r2c, b.re, b.cx);
    std::vector<std::complex<double>> c(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k)
        c[k] = std::complex<double>(b.cx[k][0], b.cx[k][1]) / static_cast<double>(n);
    return c;
}

Vec inverse_fft(const std::vector<std::complex<double>>& c, int n)
{
    const Plans& p = plans_for(n);
    Buffers b(n);
    for (int k = 0; k <= n / 2; ++k) {
        b.cx[k][0] = c[k].real();
        b.cx[k][1] = c[k].imag();
    }
    b.cx[0][1] = 0;
    b.cx[n / 2][1] = 0;
    fftw_execute_dft_c2r(p.c2r, b.cx, b.re);
    return Vec(b.re, b.re + n);
}

Vec spectral_derivative(const Vec& f)
{
    const int n = static_cast<int>(f.size());
    auto c = forward_fft(f);
    for (int k = 0; k < n / 2; ++k)
        c[k] *= std::complex<double>(0, k);
    c[n / 2] = 0;
    return inverse_fft(c, n);
}

Vec trig_interpolate(const Vec& f, const Vec& x, Exec exec)
{
    const int n = static_cast<int>(f.size());
    const int half = n / 2;
    const auto c = forward_fft(f);
    // f(x) = c0 + sum_{k<N/2} 2 Re(c_k e^{ikx}) + c_{N/2} cos(N/2 x)
    Vec out(x.size());
    const long m = static_cast<long>(x.size());
    auto eval = [&](long i) {
        const std::complex<double> z = std::polar(1.0, x[i]);
        std::complex<double> zk = z;
        double s = c[0].real();
        for (int k = 1; k < half; ++k) {
            s += 2.0 * (c[k].real() * zk.real() - c[k].imag() * zk.imag());
            zk *= z;
        }
        s += c[half].real() * std::cos(half * x[i]);
        out[i] = s;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < m; ++i) eval(i);
    } else {
        for (long i = 0; i < m; ++i) eval(i);
    }
    return out;
}

} // namespace vpatch
