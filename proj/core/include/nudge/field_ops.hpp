#pragma once

#include <limits>

#include "nudge/spectral_field.hpp"

namespace nudge {

struct NormReport {
    double l2 = 0.0;
    double h1semi = 0.0;
    /// l2 / h1semi; +inf when the gradient vanishes.
    double lambda_t = std::numeric_limits<double>::infinity();
};

/// L2 inner product (a, b) over the torus, real part.
double inner(const SpectralField& a, const SpectralField& b);

double l2_norm(const SpectralField& f);
/// ||grad f|| with the full (Frobenius) gradient.
double h1_seminorm(const SpectralField& f);
NormReport norms(const SpectralField& f);

/// Taylor-type length scale ||w|| / ||grad w||.
double lambda_t(const SpectralField& f);

/// max over modes of |k . what(k)| (physical wavenumbers).
double max_divergence(const SpectralField& f);

/// Orthogonal projection onto divergence-free fields:
/// what <- what - k (k.what)/|k|^2 for k != 0. Nyquist modes, whose sign is
/// ambiguous on an even grid, are removed.
SpectralField leray_project(const SpectralField& f);

/// 2/3-rule truncation: zeroes modes with max(|kx|,|ky|) > n/3.
SpectralField dealias(const SpectralField& f);

/// Largest integer wavenumber kept by dealias.
int dealias_cutoff(const Grid& grid);

/// Spectral restriction to a coarser (or equal) grid: keeps the shared
/// wavevectors, excluding the target's Nyquist modes.
SpectralField restrict_to(const SpectralField& f, const Grid& target);

}  // namespace nudge
