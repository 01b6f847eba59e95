#include "nudge/spectral_field.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "nudge/field_ops.hpp"

namespace nudge {

SpectralField::SpectralField(Grid grid)
    : grid_(grid), x_(grid.size(), Complex{}), y_(grid.size(), Complex{}) {}

Complex& SpectralField::at(int c, int kx, int ky) {
    return component(c)[grid_.offset(grid_.index(ky), grid_.index(kx))];
}

Complex SpectralField::at(int c, int kx, int ky) const {
    return component(c)[grid_.offset(grid_.index(ky), grid_.index(kx))];
}

void SpectralField::set_mode(int c, int kx, int ky, Complex value) {
    at(c, kx, ky) = value;
    const int n = grid_.n();
    // (-kx, -ky) folded back into {-n/2+1, ..., n/2}
    const int mx = (-kx == -n / 2) ? n / 2 : -kx;
    const int my = (-ky == -n / 2) ? n / 2 : -ky;
    if (mx == kx && my == ky) {
        at(c, kx, ky) = Complex{value.real(), 0.0};
    } else {
        at(c, mx, my) = std::conj(value);
    }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    require_same_grid(grid_, other.grid_, "operator+=");
    for (std::size_t i = 0; i < x_.size(); ++i) {
        x_[i] += other.x_[i];
        y_[i] += other.y_[i];
    }
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    require_same_grid(grid_, other.grid_, "operator-=");
    for (std::size_t i = 0; i < x_.size(); ++i) {
        x_[i] -= other.x_[i];
        y_[i] -= other.y_[i];
    }
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (std::size_t i = 0; i < x_.size(); ++i) {
        x_[i] *= s;
        y_[i] *= s;
    }
    return *this;
}

void SpectralField::set_zero() {
    std::fill(x_.begin(), x_.end(), Complex{});
    std::fill(y_.begin(), y_.end(), Complex{});
}

bool SpectralField::all_finite() const {
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (!std::isfinite(x_[i].real()) || !std::isfinite(x_[i].imag()) ||
            !std::isfinite(y_[i].real()) || !std::isfinite(y_[i].imag())) {
            return false;
        }
    }
    return true;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string(what) + ": grid mismatch (" + std::to_string(a.n()) +
                                    " vs " + std::to_string(b.n()) + ")");
    }
}

SpectralField random_field(const Grid& grid, int kmax, double amplitude, std::uint64_t seed,
                           bool divergence_free) {
    SpectralField f(grid);
    if (amplitude == 0.0) {
        return f;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int kcap = std::min(kmax, grid.n() / 2 - 1);
    // Visit each conjugate pair once: ky > 0, or ky == 0 and kx > 0.
    for (int ky = 0; ky <= kcap; ++ky) {
        for (int kx = -kcap; kx <= kcap; ++kx) {
            if (ky == 0 && kx <= 0) {
                continue;
            }
            for (int c = 0; c < 2; ++c) {
                const double re = normal(rng);
                const double im = normal(rng);
                f.set_mode(c, kx, ky, Complex{re, im});
            }
        }
    }
    if (divergence_free) {
        f = leray_project(f);
    }
    const double norm = l2_norm(f);
    if (norm > 0.0) {
        f *= amplitude / norm;
    }
    return f;
}

}  // namespace nudge
