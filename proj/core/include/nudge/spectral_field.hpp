#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "nudge/grid.hpp"

namespace nudge {

using Complex = std::complex<double>;

/// Real 2D velocity field on the periodic torus, stored as Fourier coefficients
/// of its two components:
///
///     w(x) = sum_k what(k) exp(i k.x)
///
/// so that ||w||^2 = |Omega| * sum_k |what(k)|^2. Coefficient arrays use the
/// Grid's row-major (y, x) mode layout. The mode k = 0 holds the bulk velocity.
class SpectralField {
public:
    explicit SpectralField(Grid grid);

    const Grid& grid() const { return grid_; }

    std::vector<Complex>& x() { return x_; }
    std::vector<Complex>& y() { return y_; }
    const std::vector<Complex>& x() const { return x_; }
    const std::vector<Complex>& y() const { return y_; }
    std::vector<Complex>& component(int c) { return c == 0 ? x_ : y_; }
    const std::vector<Complex>& component(int c) const { return c == 0 ? x_ : y_; }

    /// Coefficient of component c at integer wavevector (kx, ky).
    Complex& at(int c, int kx, int ky);
    Complex at(int c, int kx, int ky) const;

    /// Sets the coefficient at (kx, ky) and its conjugate partner at (-kx, -ky).
    void set_mode(int c, int kx, int ky, Complex value);

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double s);

    void set_zero();
    bool all_finite() const;

private:
    Grid grid_;
    std::vector<Complex> x_;
    std::vector<Complex> y_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Real samples of both velocity components on the grid points
/// (x_i, y_j) = (i*h, j*h), row-major in (j, i).
struct PhysicalField {
    Grid grid;
    std::vector<double> x;
    std::vector<double> y;

    explicit PhysicalField(Grid g) : grid(g), x(g.size(), 0.0), y(g.size(), 0.0) {}
};

/// Throws std::invalid_argument when two fields live on different grids.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// Random real field with independent Gaussian coefficients on modes
/// 0 < max(|kx|,|ky|) <= kmax, scaled so that ||w|| = amplitude. Optionally
/// Leray-projected. Deterministic in the seed.
SpectralField random_field(const Grid& grid, int kmax, double amplitude, std::uint64_t seed,
                           bool divergence_free = true);

}  // namespace nudge
