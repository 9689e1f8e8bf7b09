#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace vpatch {

using Vec = std::vector<double>;

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised when an iteration fails to converge or a trajectory leaves the chart.
class NumericalAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Exec { serial, parallel };

struct Grid {
    int n_points = 256;

    Grid() = default;
    explicit Grid(int n);

    double h() const;
    double node(int j) const;
    Vec nodes() const;
};

// Sample a function of theta on the grid.
template <class F>
Vec sample(const Grid& grid, F&& f)
{
    Vec out(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j)
        out[j] = f(grid.node(j));
    return out;
}

double mean(const Vec& v);
double max_abs(const Vec& v);
double dot(const Grid& grid, const Vec& a, const Vec& b); // trapezoid L2 pairing on [0, 2pi)
void remove_mean(Vec& v);

// Half-spectrum c_k, k = 0..N/2, with f_j = sum_k c_k e^{ik theta_j} (Hermitian extension).
std::vector<std::complex<double>> forward_fft(const Vec& f);
Vec inverse_fft(const std::vector<std::complex<double>>& c, int n_points);

Vec spectral_derivative(const Vec& f);

// Evaluate the trigonometric interpolant of f at arbitrary points.
// The Nyquist mode is interpreted as cos(N/2 x) so the result is real.
Vec trig_interpolate(const Vec& f, const Vec& x, Exec exec = Exec::parallel);

} // namespace vpatch
