#pragma once

#include <optional>

#include "nudge/observation.hpp"
#include "nudge/spectral_field.hpp"

namespace nudge {

enum class ForcingKind {
    /// Truth e^t (cos 2 pi y, sin 2 pi x) (or (1+t) times the same shape).
    ManufacturedPeriodic,
    /// Unforced; the truth is the decaying Taylor-Green vortex.
    TaylorGreenZero,
    /// amplitude * min(1, t/ramp) * (sin(2 pi k_f y), 0).
    Kolmogorov,
};

enum class TimeProfile { Exponential, Linear };

struct ForcingSpec {
    ForcingKind kind = ForcingKind::Kolmogorov;
    int k_f = 4;
    /// Kolmogorov forcing amplitude; initial Taylor-Green amplitude.
    double amplitude = 1.0;
    double ramp = 1.0;
    /// Manufactured solution growth factor: e^t or 1 + t.
    TimeProfile profile = TimeProfile::Exponential;

    void validate() const;
};

struct SolverConfig {
    double nu = 1.0;
    double dt = 0.01;
    Grid grid{32};
    ForcingSpec forcing{};

    void validate() const;
};

/// Two time levels for BDF2. Both fields are divergence-free.
struct SolverState {
    SpectralField v_now;
    SpectralField v_prev;
    double t = 0.0;
    long step_index = 0;
};

SolverState initial_state(const SpectralField& v0, double t0 = 0.0);

/// Nudging feedback chi * I_H (u - v) for one step; `data` is the truth at the
/// new time level on the solver grid.
struct NudgeTerm {
    const ObservationOperator& observer;
    double chi;
    const SpectralField& data;
};

/// Skew-symmetrized trilinear form 1/2 (a.grad b, c) - 1/2 (a.grad c, b),
/// evaluated pseudo-spectrally on 2/3-dealiased inputs.
double trilinear_skew(const SpectralField& a, const SpectralField& b, const SpectralField& c);

/// P[ u.grad u + 1/2 (div u) u ] for u = dealias(v_star), dealiased.
SpectralField nonlinear_term(const SpectralField& v_star);

/// Leray-projected body force at time t.
SpectralField forcing(double t, const SolverConfig& cfg);

/// Manufactured truth on `grid` at time t.
SpectralField manufactured_truth(double t, const Grid& grid,
                                 TimeProfile profile = TimeProfile::Exponential);
/// Leray-projected forcing that makes manufactured_truth an exact NSE solution.
/// Throws ConfigError unless cfg.forcing.kind is ManufacturedPeriodic.
SpectralField manufactured_forcing(double t, const SolverConfig& cfg);

/// Exact Taylor-Green vortex amplitude * e^{-8 pi^2 nu t} (-cos 2 pi x sin 2 pi y,
/// sin 2 pi x cos 2 pi y) on the unit-period torus.
SpectralField taylor_green(double t, double nu, double amplitude, const Grid& grid);

/// Explicit half of one step: everything but the implicit solve.
///
/// The step solves (alpha + gamma |k|^2) v + weight * chi * P I_H v
///                  = rhs + weight * chi * P I_H u.
struct PreparedStep {
    SpectralField rhs;
    double alpha;
    double gamma;
    double weight;
    double t_new;
    long step_index;
};

/// BDF2 with extrapolated nonlinearity N(2 v^n - v^{n-1}); the first step
/// (step_index == 0) is backward Euler with N(v^0).
PreparedStep prepare_step(const SolverState& state, const SolverConfig& cfg);
SolverState complete_step(const SolverState& state, const PreparedStep& prepared,
                          const std::optional<NudgeTerm>& nudge);

SolverState bdf2_step(const SolverState& state, const SolverConfig& cfg,
                      const std::optional<NudgeTerm>& nudge = std::nullopt);

}  // namespace nudge
