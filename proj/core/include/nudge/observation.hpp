#pragma once

#include <memory>
#include <string>

#include "nudge/spectral_field.hpp"

namespace nudge {

/// Observation operator I_H: an L2-orthogonal projection onto an observation
/// subspace with resolution length H, satisfying
///
///     ||(I - I_H) w|| <= c1 * H * ||grad w||.
class ObservationOperator {
public:
    virtual ~ObservationOperator() = default;

    /// I_H w. Throws std::invalid_argument if the grid cannot host this operator.
    virtual SpectralField project(const SpectralField& w) const = 0;

    /// Resolution length H.
    virtual double length_scale() const = 0;
    virtual double c1() const = 0;
    virtual std::string describe() const = 0;

    /// Solves (alpha + gamma |k|^2) x + c P I_H x = rhs for divergence-free rhs
    /// on the divergence-free subspace (P is the Leray projection). This is the
    /// implicit part of a nudged time step; alpha > 0, gamma >= 0, c >= 0.
    virtual SpectralField solve_shifted(const SpectralField& rhs, double alpha, double gamma,
                                        double c) const = 0;

    /// Throws std::invalid_argument if `grid` is incompatible with this operator.
    virtual void check_grid(const Grid& grid) const = 0;
};

/// Fourier truncation: keeps modes with max(|kx|, |ky|) <= K.
/// H = l / (2 pi (K + 1)), c1 = 1 (sharp for the first excluded shell).
class FourierLowPass final : public ObservationOperator {
public:
    explicit FourierLowPass(int cutoff, double length = 1.0);

    int cutoff() const { return cutoff_; }

    SpectralField project(const SpectralField& w) const override;
    double length_scale() const override;
    double c1() const override { return 1.0; }
    std::string describe() const override;
    SpectralField solve_shifted(const SpectralField& rhs, double alpha, double gamma,
                                double c) const override;
    void check_grid(const Grid& grid) const override;

    bool in_band(int kx, int ky) const;

private:
    int cutoff_;
    double length_;
};

/// Averages over an m x m array of square cells (L2 projection onto piecewise
/// constants, evaluated on the grid points). H is the cell diameter l*sqrt(2)/m
/// and c1 = 1/pi, the Payne-Weinberger constant for convex cells.
///
/// I_H does not commute with the Leray projection, so the implicit solve goes
/// through a Woodbury identity on the 2 m^2 cell averages. The small dense
/// matrix is eigendecomposed once per (n, alpha, gamma) and cached; the cache
/// is shared between copies and guarded by a mutex.
class CellAverage final : public ObservationOperator {
public:
    explicit CellAverage(int cells, double length = 1.0);

    int cells() const { return cells_; }

    SpectralField project(const SpectralField& w) const override;
    double length_scale() const override;
    double c1() const override;
    std::string describe() const override;
    SpectralField solve_shifted(const SpectralField& rhs, double alpha, double gamma,
                                double c) const override;
    void check_grid(const Grid& grid) const override;

    struct Cache;

private:
    int cells_;
    double length_;
    std::shared_ptr<Cache> cache_;
};

enum class ObserverKind { Fourier, Cells };

struct ObserverSpec {
    ObserverKind kind = ObserverKind::Fourier;
    /// Fourier cutoff K, or cells per dimension m.
    int resolution = 4;
};

std::unique_ptr<ObservationOperator> make_observer(const ObserverSpec& spec, double length = 1.0);

/// ||(I - I_H) w|| / ||grad w||; never exceeds c1 * H.
/// Throws std::invalid_argument when grad w vanishes.
double interp_defect_ratio(const ObservationOperator& op, const SpectralField& w);

}  // namespace nudge
