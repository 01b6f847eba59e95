#include "nudge/observation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "nudge/fft.hpp"
#include "nudge/field_ops.hpp"

namespace nudge {

namespace {

// x <- x / (alpha + gamma |k|^2) mode by mode.
void apply_inverse_helmholtz(SpectralField& f, double alpha, double gamma) {
    const Grid& g = f.grid();
    for (int j = 0; j < g.n(); ++j) {
        const double ky = g.physical_wavenumber(j);
        for (int i = 0; i < g.n(); ++i) {
            const double kx = g.physical_wavenumber(i);
            const double d = alpha + gamma * (kx * kx + ky * ky);
            const auto o = g.offset(j, i);
            f.x()[o] /= d;
            f.y()[o] /= d;
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// FourierLowPass

FourierLowPass::FourierLowPass(int cutoff, double length) : cutoff_(cutoff), length_(length) {
    if (cutoff < 0) {
        throw std::invalid_argument("Fourier observer cutoff must be >= 0");
    }
}

bool FourierLowPass::in_band(int kx, int ky) const {
    return std::max(std::abs(kx), std::abs(ky)) <= cutoff_;
}

void FourierLowPass::check_grid(const Grid& grid) const {
    if (cutoff_ >= grid.n() / 2) {
        throw std::invalid_argument("Fourier observer cutoff " + std::to_string(cutoff_) +
                                    " does not fit on a grid of " + std::to_string(grid.n()) +
                                    " modes");
    }
    if (grid.length() != length_) {
        throw std::invalid_argument("Fourier observer built for a different domain length");
    }
}

SpectralField FourierLowPass::project(const SpectralField& w) const {
    const Grid& g = w.grid();
    check_grid(g);
    SpectralField out(g);
    for (int j = 0; j < g.n(); ++j) {
        for (int i = 0; i < g.n(); ++i) {
            if (in_band(g.wavenumber(i), g.wavenumber(j))) {
                const auto o = g.offset(j, i);
                out.x()[o] = w.x()[o];
                out.y()[o] = w.y()[o];
            }
        }
    }
    return out;
}

double FourierLowPass::length_scale() const {
    return length_ / (2.0 * std::numbers::pi * (cutoff_ + 1));
}

std::string FourierLowPass::describe() const { return "fourier(K=" + std::to_string(cutoff_) + ")"; }

SpectralField FourierLowPass::solve_shifted(const SpectralField& rhs, double alpha, double gamma,
                                            double c) const {
    const Grid& g = rhs.grid();
    check_grid(g);
    SpectralField out(rhs);
    for (int j = 0; j < g.n(); ++j) {
        const double ky = g.physical_wavenumber(j);
        for (int i = 0; i < g.n(); ++i) {
            const double kx = g.physical_wavenumber(i);
            const bool band = in_band(g.wavenumber(i), g.wavenumber(j));
            const double d = alpha + gamma * (kx * kx + ky * ky) + (band ? c : 0.0);
            const auto o = g.offset(j, i);
            out.x()[o] /= d;
            out.y()[o] /= d;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CellAverage

namespace {

// Cell sums <phi_c, w> for both components, phi_c = indicator / sqrt(|cell|).
// Layout: component-major, then cell row, then cell column.
Eigen::VectorXd cell_coordinates(const PhysicalField& p, int m, double cell_side) {
    const Grid& g = p.grid;
    const int b = g.n() / m;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * m * m);
    for (int c = 0; c < 2; ++c) {
        const auto& data = c == 0 ? p.x : p.y;
        for (int j = 0; j < g.n(); ++j) {
            for (int i = 0; i < g.n(); ++i) {
                z[c * m * m + (j / b) * m + (i / b)] += data[g.offset(j, i)];
            }
        }
    }
    // mean * sqrt(|cell|) = sum / b^2 * cell_side
    z *= cell_side / (static_cast<double>(b) * b);
    return z;
}

PhysicalField expand_cells(const Grid& g, int m, double cell_side, const Eigen::VectorXd& z) {
    const int b = g.n() / m;
    PhysicalField p(g);
    for (int c = 0; c < 2; ++c) {
        auto& data = c == 0 ? p.x : p.y;
        for (int j = 0; j < g.n(); ++j) {
            for (int i = 0; i < g.n(); ++i) {
                data[g.offset(j, i)] = z[c * m * m + (j / b) * m + (i / b)] / cell_side;
            }
        }
    }
    return p;
}

}  // namespace

struct CellAverage::Cache {
    struct Entry {
        Eigen::MatrixXd vectors;
        Eigen::VectorXd values;
    };
    std::mutex mutex;
    std::map<std::tuple<int, double, double>, std::shared_ptr<const Entry>> entries;
};

CellAverage::CellAverage(int cells, double length)
    : cells_(cells), length_(length), cache_(std::make_shared<Cache>()) {
    if (cells < 1) {
        throw std::invalid_argument("cell observer needs at least one cell per dimension");
    }
}

void CellAverage::check_grid(const Grid& grid) const {
    if (grid.n() % cells_ != 0) {
        throw std::invalid_argument("cell observer: grid size " + std::to_string(grid.n()) +
                                    " is not divisible by " + std::to_string(cells_) + " cells");
    }
    if (grid.length() != length_) {
        throw std::invalid_argument("cell observer built for a different domain length");
    }
}

SpectralField CellAverage::project(const SpectralField& w) const {
    const Grid& g = w.grid();
    check_grid(g);
    const double side = length_ / cells_;
    const auto z = cell_coordinates(to_physical(w), cells_, side);
    return from_physical(expand_cells(g, cells_, side, z));
}

double CellAverage::length_scale() const { return length_ * std::numbers::sqrt2 / cells_; }

double CellAverage::c1() const { return 1.0 / std::numbers::pi; }

std::string CellAverage::describe() const { return "cells(m=" + std::to_string(cells_) + ")"; }

SpectralField CellAverage::solve_shifted(const SpectralField& rhs, double alpha, double gamma,
                                         double c) const {
    const Grid& g = rhs.grid();
    check_grid(g);
    SpectralField y(rhs);
    apply_inverse_helmholtz(y, alpha, gamma);
    if (c == 0.0) {
        return y;
    }

    const int m = cells_;
    const double side = length_ / m;
    const int dim = 2 * m * m;

    std::shared_ptr<const Cache::Entry> entry;
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        const auto key = std::make_tuple(g.n(), alpha, gamma);
        auto it = cache_->entries.find(key);
        if (it != cache_->entries.end()) {
            entry = it->second;
        }
    }
    if (!entry) {
        // M = B^T P A^-1 P B is block-circulant over cell offsets: two probe
        // columns (one per component, cell 0) determine it.
        Eigen::MatrixXd probe(dim, 2);
        for (int comp = 0; comp < 2; ++comp) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
            e[comp * m * m] = 1.0;
            SpectralField col = leray_project(from_physical(expand_cells(g, m, side, e)));
            apply_inverse_helmholtz(col, alpha, gamma);
            col = leray_project(col);
            probe.col(comp) = cell_coordinates(to_physical(col), m, side);
        }
        Eigen::MatrixXd mat(dim, dim);
        for (int ca = 0; ca < 2; ++ca) {
            for (int ja = 0; ja < m; ++ja) {
                for (int ia = 0; ia < m; ++ia) {
                    const int row = ca * m * m + ja * m + ia;
                    for (int cb = 0; cb < 2; ++cb) {
                        for (int jb = 0; jb < m; ++jb) {
                            for (int ib = 0; ib < m; ++ib) {
                                const int col = cb * m * m + jb * m + ib;
                                const int dj = ((ja - jb) % m + m) % m;
                                const int di = ((ia - ib) % m + m) % m;
                                mat(row, col) = probe(ca * m * m + dj * m + di, cb);
                            }
                        }
                    }
                }
            }
        }
        mat = 0.5 * (mat + mat.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat);
        auto fresh = std::make_shared<Cache::Entry>();
        fresh->vectors = solver.eigenvectors();
        fresh->values = solver.eigenvalues().cwiseMax(0.0);
        std::lock_guard<std::mutex> lock(cache_->mutex);
        entry = cache_->entries.emplace(std::make_tuple(g.n(), alpha, gamma), std::move(fresh))
                    .first->second;
    }

    // x = y - A^-1 P B (1/c + M)^-1 B^T y
    const Eigen::VectorXd z = cell_coordinates(to_physical(y), m, side);
    Eigen::VectorXd w = entry->vectors.transpose() * z;
    for (int i = 0; i < dim; ++i) {
        w[i] /= 1.0 / c + entry->values[i];
    }
    w = entry->vectors * w;
    SpectralField correction = leray_project(from_physical(expand_cells(g, m, side, w)));
    apply_inverse_helmholtz(correction, alpha, gamma);
    y -= correction;
    return y;
}

// ---------------------------------------------------------------------------

std::unique_ptr<ObservationOperator> make_observer(const ObserverSpec& spec, double length) {
    switch (spec.kind) {
    case ObserverKind::Fourier:
        return std::make_unique<FourierLowPass>(spec.resolution, length);
    case ObserverKind::Cells:
        return std::make_unique<CellAverage>(spec.resolution, length);
    }
    throw std::invalid_argument("unknown observer kind");
}

double interp_defect_ratio(const ObservationOperator& op, const SpectralField& w) {
    const double grad = h1_seminorm(w);
    if (!(grad > 0.0)) {
        throw std::invalid_argument("interp_defect_ratio: field has zero gradient");
    }
    return l2_norm(w - op.project(w)) / grad;
}

}  // namespace nudge
