#include "nudge/nudging_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nudge/errors.hpp"
#include "nudge/field_ops.hpp"

namespace nudge {

void ControllerConfig::validate() const {
    if (!(chi0 > 0.0)) {
        throw ConfigError("controller chi0 must be positive");
    }
    if (!(chi_max >= chi0)) {
        throw ConfigError("controller chi_max must be >= chi0");
    }
    if (kind == ControllerKind::Algo1) {
        if (!(factor >= 1.0)) {
            throw ConfigError("algo1 factor must be >= 1");
        }
        if (!(tol > 0.0 && tol < 1.0)) {
            throw ConfigError("algo1 tol must lie in (0, 1)");
        }
    }
    if (max_repeats < 0) {
        throw ConfigError("max_repeats must be >= 0");
    }
}

double ControllerConfig::clamp(double chi) const { return std::clamp(chi, chi0, chi_max); }

ControllerState initial_controller_state(const ControllerConfig& cfg, double initial_estimator) {
    ControllerState s;
    s.chi_n = cfg.clamp(cfg.chi0);
    s.prev_estimator = initial_estimator;
    return s;
}

namespace {

// A repeat is only admissible when budget remains and chi would actually move.
StepOutcome repeat_or_force(const ControllerState& state, double next_chi, double diagnostic,
                            const ControllerConfig& cfg) {
    if (state.repeats_used < cfg.max_repeats && next_chi != state.chi_n) {
        return StepOutcome{Decision::RepeatWith, next_chi, diagnostic, false};
    }
    return StepOutcome{Decision::Accept, state.chi_n, diagnostic, true};
}

}  // namespace

StepOutcome algo1_decide(const ControllerState& state, double est_prev, double est_new,
                         const ControllerConfig& cfg) {
    const double ratio = est_prev > 0.0 ? est_new / est_prev : (est_new > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (est_new > 0.0 && est_new >= cfg.factor * est_prev) {
        return repeat_or_force(state, cfg.clamp(2.0 * state.chi_n), ratio, cfg);
    }
    if (est_new <= cfg.tol * est_prev) {
        return StepOutcome{Decision::AcceptThen, cfg.clamp(0.5 * state.chi_n), ratio, false};
    }
    return StepOutcome{Decision::Accept, state.chi_n, ratio, false};
}

double trapezoid_band(double nu, double tau, double g_n, double g_np1) {
    if (!(nu > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("trapezoid_band: nu and tau must be positive");
    }
    const double integral = 0.5 * tau * (g_n + g_np1);
    return integral / tau / (2.0 * nu);
}

double algo2_band_3d(double nu, double tau, double g4_n, double g4_np1) {
    if (!(nu > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("algo2_band_3d: nu and tau must be positive");
    }
    const double integral = 0.5 * tau * (g4_n + g4_np1);
    return (2048.0 / 19683.0) / (nu * nu * nu) * integral / tau;
}

StepOutcome algo2_decide(const ControllerState& state, double q, const ControllerConfig& cfg) {
    const double g = state.chi_n - q;
    const double reset = cfg.clamp(1.1 * cfg.chi0 + q);
    if (g < cfg.chi0) {
        return repeat_or_force(state, reset, g, cfg);
    }
    if (g > 2.0 * cfg.chi0) {
        return StepOutcome{Decision::AcceptThen, reset, g, false};
    }
    return StepOutcome{Decision::Accept, state.chi_n, g, false};
}

AssimilatedStep assimilate_step(const SpectralField& u_new, const SolverState& state,
                                const ControllerState& controller,
                                const ObservationOperator& observer,
                                const SolverConfig& solver_cfg,
                                const ControllerConfig& controller_cfg) {
    require_same_grid(u_new.grid(), state.v_now.grid(), "assimilate_step");
    ControllerState ctl = controller;
    ctl.repeats_used = 0;
    if (ctl.pending_halve) {
        ctl.chi_n = controller_cfg.clamp(0.5 * ctl.chi_n);
        ctl.pending_halve = false;
    }

    const PreparedStep prepared = prepare_step(state, solver_cfg);
    const double grad_now = h1_seminorm(state.v_now);
    const double g_n = grad_now * grad_now;
    const double est_prev = ctl.prev_estimator;
    const double u_norm = l2_norm(u_new);

    while (true) {
        const double chi = ctl.chi_n;
        SolverState candidate = complete_step(state, prepared, NudgeTerm{observer, chi, u_new});
        if (!candidate.v_now.all_finite()) {
            throw NumericalError("non-finite velocity at t=" + std::to_string(prepared.t_new) +
                                 " (chi=" + std::to_string(chi) + ")");
        }
        const SpectralField err = u_new - candidate.v_now;
        const double err_l2 = l2_norm(err);
        const double est_new = l2_norm(observer.project(err));
        const double grad_new = h1_seminorm(candidate.v_now);
        const double g_np1 = grad_new * grad_new;

        StepOutcome outcome;
        double q = 0.0;
        switch (controller_cfg.kind) {
        case ControllerKind::Constant:
            outcome = StepOutcome{Decision::Accept, chi, 0.0, false};
            break;
        case ControllerKind::Algo1:
            outcome = algo1_decide(ctl, est_prev, est_new, controller_cfg);
            break;
        case ControllerKind::Algo2:
            q = trapezoid_band(solver_cfg.nu, solver_cfg.dt, g_n, g_np1);
            outcome = algo2_decide(ctl, q, controller_cfg);
            break;
        }

        if (outcome.decision == Decision::RepeatWith) {
            ctl.chi_n = outcome.chi;
            ++ctl.repeats_used;
            continue;
        }

        StepRecord rec;
        rec.step = candidate.step_index;
        rec.t = candidate.t;
        rec.chi = chi;
        rec.err_l2 = err_l2;
        rec.rel_err = u_norm > 0.0 ? err_l2 / u_norm : 0.0;
        rec.proj_err = est_new;
        rec.rel_proj_err = u_norm > 0.0 ? est_new / u_norm : 0.0;
        rec.grad_v_sq = g_np1;
        rec.repeats = ctl.repeats_used;
        rec.forced = outcome.forced;
        rec.est_prev = est_prev;
        rec.band_q = q;

        ctl.prev_estimator = est_new;
        if (outcome.decision == Decision::AcceptThen) {
            if (controller_cfg.kind == ControllerKind::Algo1) {
                ctl.pending_halve = true;
            } else {
                ctl.chi_n = outcome.chi;
            }
        }
        return AssimilatedStep{std::move(candidate), ctl, rec};
    }
}

}  // namespace nudge
