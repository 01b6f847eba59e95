#pragma once

#include "nudge/nse_solver.hpp"
#include "nudge/observation.hpp"
#include "nudge/step_record.hpp"

namespace nudge {

enum class ControllerKind { Constant, Algo1, Algo2 };

struct ControllerConfig {
    ControllerKind kind = ControllerKind::Algo2;
    /// Initial chi; also the floor (and the Algorithm 2 band width chi_0).
    double chi0 = 1.0;
    double chi_max = 1e6;
    /// Algorithm 1 upper safety factor (>= 1).
    double factor = 1.3;
    /// Algorithm 1 lower tolerance (0 < tol < 1).
    double tol = 0.2;
    int max_repeats = 25;

    void validate() const;
    double clamp(double chi) const;
};

struct ControllerState {
    double chi_n = 1.0;
    /// Last accepted ||I_H e|| (Algorithm 1).
    double prev_estimator = 0.0;
    /// Set by Algorithm 1's too-large branch; the next step runs at half chi.
    bool pending_halve = false;
    int repeats_used = 0;
};

ControllerState initial_controller_state(const ControllerConfig& cfg, double initial_estimator);

enum class Decision {
    Accept,
    /// Discard the step and re-solve from the checkpoint with `chi`.
    RepeatWith,
    /// Keep the step; the following step uses `chi`.
    AcceptThen,
};

struct StepOutcome {
    Decision decision = Decision::Accept;
    double chi = 0.0;
    /// est_new / est_prev (Algorithm 1) or chi_n - Q (Algorithm 2).
    double diagnostic = 0.0;
    /// Accepted only because no admissible repeat was left.
    bool forced = false;
};

/// Algorithm 1: double and repeat when est_new >= factor * est_prev, halve the
/// next step's chi when est_new <= tol * est_prev, accept otherwise.
StepOutcome algo1_decide(const ControllerState& state, double est_prev, double est_new,
                         const ControllerConfig& cfg);

/// (1/(2 nu)) (1/tau) int_{t_n}^{t_{n+1}} ||grad v||^2 by the trapezoidal rule.
double trapezoid_band(double nu, double tau, double g_n, double g_np1);

/// 3d replacement of trapezoid_band: (2048/19683) nu^-3 (1/tau) int ||grad v||^4.
double algo2_band_3d(double nu, double tau, double g4_n, double g4_np1);

/// Algorithm 2 with band [chi0, 2 chi0] on g = chi_n - Q.
StepOutcome algo2_decide(const ControllerState& state, double q, const ControllerConfig& cfg);

/// Result of one accepted assimilation step.
struct AssimilatedStep {
    SolverState solver;
    ControllerState controller;
    StepRecord record;
};

/// Advances v by one BDF2 step nudged toward `u_new` (the truth at t_{n+1} on
/// the solver grid), consulting the controller and re-solving from the t_n
/// checkpoint on every repeat. The explicit part of the step is shared between
/// repeats since it does not depend on chi.
AssimilatedStep assimilate_step(const SpectralField& u_new, const SolverState& state,
                                const ControllerState& controller,
                                const ObservationOperator& observer,
                                const SolverConfig& solver_cfg,
                                const ControllerConfig& controller_cfg);

}  // namespace nudge
