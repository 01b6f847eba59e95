#pragma once

#include <cstddef>

namespace nudge {

/// Uniform periodic grid on the square torus [0, l)^2 with n points (and n
/// Fourier modes) per dimension.
///
/// Mode index i in [0, n) maps to the integer wavenumber i for i <= n/2 and
/// i - n otherwise, i.e. the set {-n/2+1, ..., n/2}. Physical wavenumbers are
/// the integer ones scaled by 2*pi/l.
class Grid {
public:
    Grid(int n, double l = 1.0);

    int n() const { return n_; }
    double length() const { return l_; }
    double area() const { return l_ * l_; }
    double spacing() const { return l_ / n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

    /// Integer wavenumber of mode index i.
    int wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }
    /// Mode index of integer wavenumber k (k in {-n/2+1, ..., n/2}).
    int index(int k) const { return k >= 0 ? k : k + n_; }
    /// Physical wavenumber 2*pi*k/l of mode index i.
    double physical_wavenumber(int i) const;
    bool is_nyquist(int i) const { return i == n_ / 2; }

    /// Flat offset of (row j, column i); rows run along y, columns along x.
    std::size_t offset(int j, int i) const { return static_cast<std::size_t>(j) * n_ + i; }

    bool operator==(const Grid& other) const = default;

private:
    int n_;
    double l_;
};

}  // namespace nudge
