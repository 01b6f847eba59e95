#include "nudge/field_ops.hpp"

#include <algorithm>
#include <cmath>

namespace nudge {

double inner(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a.grid(), b.grid(), "inner");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.grid().size(); ++i) {
        sum += (std::conj(a.x()[i]) * b.x()[i]).real() + (std::conj(a.y()[i]) * b.y()[i]).real();
    }
    return sum * a.grid().area();
}

double l2_norm(const SpectralField& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.grid().size(); ++i) {
        sum += std::norm(f.x()[i]) + std::norm(f.y()[i]);
    }
    return std::sqrt(sum * f.grid().area());
}

double h1_seminorm(const SpectralField& f) {
    const Grid& g = f.grid();
    double sum = 0.0;
    for (int j = 0; j < g.n(); ++j) {
        const double ky = g.physical_wavenumber(j);
        for (int i = 0; i < g.n(); ++i) {
            const double kx = g.physical_wavenumber(i);
            const auto o = g.offset(j, i);
            sum += (kx * kx + ky * ky) * (std::norm(f.x()[o]) + std::norm(f.y()[o]));
        }
    }
    return std::sqrt(sum * g.area());
}

NormReport norms(const SpectralField& f) {
    NormReport r;
    r.l2 = l2_norm(f);
    r.h1semi = h1_seminorm(f);
    if (r.h1semi > 0.0) {
        r.lambda_t = r.l2 / r.h1semi;
    }
    return r;
}

double lambda_t(const SpectralField& f) { return norms(f).lambda_t; }

double max_divergence(const SpectralField& f) {
    const Grid& g = f.grid();
    double worst = 0.0;
    for (int j = 0; j < g.n(); ++j) {
        const double ky = g.physical_wavenumber(j);
        for (int i = 0; i < g.n(); ++i) {
            const double kx = g.physical_wavenumber(i);
            const auto o = g.offset(j, i);
            worst = std::max(worst, std::abs(kx * f.x()[o] + ky * f.y()[o]));
        }
    }
    return worst;
}

SpectralField leray_project(const SpectralField& f) {
    const Grid& g = f.grid();
    SpectralField out(f);
    for (int j = 0; j < g.n(); ++j) {
        const double ky = g.physical_wavenumber(j);
        for (int i = 0; i < g.n(); ++i) {
            const auto o = g.offset(j, i);
            if (g.is_nyquist(i) || g.is_nyquist(j)) {
                out.x()[o] = Complex{};
                out.y()[o] = Complex{};
                continue;
            }
            if (i == 0 && j == 0) {
                continue;
            }
            const double kx = g.physical_wavenumber(i);
            const Complex kdotu = kx * f.x()[o] + ky * f.y()[o];
            const Complex scale = kdotu / (kx * kx + ky * ky);
            out.x()[o] = f.x()[o] - kx * scale;
            out.y()[o] = f.y()[o] - ky * scale;
        }
    }
    return out;
}

// Largest k with 3k < n: triple products of retained modes then never alias
// back into the retained box. Equals n/3 unless 3 divides n.
int dealias_cutoff(const Grid& grid) { return (grid.n() - 1) / 3; }

SpectralField dealias(const SpectralField& f) {
    const Grid& g = f.grid();
    const int cutoff = dealias_cutoff(g);
    SpectralField out(f);
    for (int j = 0; j < g.n(); ++j) {
        const int ky = std::abs(g.wavenumber(j));
        for (int i = 0; i < g.n(); ++i) {
            const int kx = std::abs(g.wavenumber(i));
            if (std::max(kx, ky) > cutoff) {
                const auto o = g.offset(j, i);
                out.x()[o] = Complex{};
                out.y()[o] = Complex{};
            }
        }
    }
    return out;
}

SpectralField restrict_to(const SpectralField& f, const Grid& target) {
    const Grid& src = f.grid();
    if (target.n() > src.n() || target.length() != src.length()) {
        throw std::invalid_argument("restrict_to: target grid must be coarser on the same domain");
    }
    SpectralField out(target);
    const int half = target.n() / 2;
    for (int ky = -half + 1; ky < half; ++ky) {
        for (int kx = -half + 1; kx < half; ++kx) {
            for (int c = 0; c < 2; ++c) {
                out.at(c, kx, ky) = f.at(c, kx, ky);
            }
        }
    }
    return out;
}

}  // namespace nudge
