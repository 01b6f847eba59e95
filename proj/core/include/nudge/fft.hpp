#pragma once

#include <span>
#include <vector>

#include "nudge/spectral_field.hpp"

namespace nudge {

/// Forward transform of n*n real samples to normalized Fourier coefficients
/// (divided by n^2, so the inverse is a plain sum over modes).
std::vector<Complex> forward_scalar(const Grid& grid, std::span<const double> samples);

/// Inverse of forward_scalar; returns the real part of the synthesized samples.
std::vector<double> backward_scalar(const Grid& grid, std::span<const Complex> coeffs);

PhysicalField to_physical(const SpectralField& f);
SpectralField from_physical(const PhysicalField& samples);
SpectralField from_physical(const PhysicalField& samples, const Grid& grid);

}  // namespace nudge
