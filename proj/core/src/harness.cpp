#include "nudge/harness.hpp"

#include <cmath>
#include <future>
#include <numbers>

#include "nudge/errors.hpp"
#include "nudge/field_ops.hpp"
#include "nudge/nse_solver.hpp"
#include "nudge/nudging_control.hpp"

namespace nudge {

namespace {

class AnalyticTruth final : public TruthSource {
public:
    explicit AnalyticTruth(const ExperimentConfig& cfg) : cfg_(cfg), grid_(cfg.grid()) {
        if (cfg.model.kind == ForcingKind::Kolmogorov) {
            throw ConfigError("kolmogorov forcing has no analytic truth");
        }
        current_ = evaluate(0.0);
    }

    SpectralField initial() const override { return evaluate(0.0); }

    SpectralField advance() override {
        ++step_;
        current_ = evaluate(static_cast<double>(step_) * cfg_.dt);
        return current_;
    }

    double grad_sq() const override {
        const double g = h1_seminorm(current_);
        return g * g;
    }

private:
    SpectralField evaluate(double t) const {
        if (cfg_.model.kind == ForcingKind::ManufacturedPeriodic) {
            return manufactured_truth(t, grid_, cfg_.model.profile);
        }
        return taylor_green(t, cfg_.nu, cfg_.model.amplitude, grid_);
    }

    ExperimentConfig cfg_;
    Grid grid_;
    long step_ = 0;
    SpectralField current_{grid_};
};

class DnsTruth final : public TruthSource {
public:
    explicit DnsTruth(const ExperimentConfig& cfg)
        : coarse_(cfg.grid()),
          solver_{cfg.nu, cfg.dt / cfg.truth.substeps, Grid(cfg.truth.grid_n_fine, cfg.length),
                  cfg.model},
          substeps_(cfg.truth.substeps),
          state_(initial_state(initial_fine(cfg, solver_.grid))) {
        solver_.validate();
    }

    SpectralField initial() const override { return restrict_to(state_.v_now, coarse_); }

    SpectralField advance() override {
        for (int s = 0; s < substeps_; ++s) {
            state_ = bdf2_step(state_, solver_);
        }
        if (!state_.v_now.all_finite()) {
            throw NumericalError("truth DNS produced a non-finite velocity at t=" +
                                 std::to_string(state_.t));
        }
        return restrict_to(state_.v_now, coarse_);
    }

    double grad_sq() const override {
        const double g = h1_seminorm(state_.v_now);
        return g * g;
    }

private:
    static SpectralField initial_fine(const ExperimentConfig& cfg, const Grid& fine) {
        switch (cfg.model.kind) {
        case ForcingKind::ManufacturedPeriodic:
            return manufactured_truth(0.0, fine, cfg.model.profile);
        case ForcingKind::TaylorGreenZero:
            return taylor_green(0.0, cfg.nu, cfg.model.amplitude, fine);
        case ForcingKind::Kolmogorov:
            return random_field(fine, cfg.truth.u0_kmax, cfg.truth.u0_amplitude, cfg.seed);
        }
        throw std::logic_error("unhandled forcing kind");
    }

    Grid coarse_;
    SolverConfig solver_;
    int substeps_;
    SolverState state_;
};

}  // namespace

std::unique_ptr<TruthSource> make_truth(const ExperimentConfig& cfg) {
    if (cfg.truth.kind == TruthKind::Analytic) {
        return std::make_unique<AnalyticTruth>(cfg);
    }
    return std::make_unique<DnsTruth>(cfg);
}

SpectralField initial_guess(const ExperimentConfig& cfg, const SpectralField& u0) {
    if (cfg.v0.kind == InitialKind::Zero) {
        return SpectralField(u0.grid());
    }
    const auto seed = cfg.v0.seed.value_or(cfg.seed + 1);
    return u0 + random_field(u0.grid(), cfg.v0.kmax, cfg.v0.amplitude, seed);
}

RunSummary run_twin(const ExperimentConfig& cfg, const RecordSink& sink) {
    cfg.validate();
    const SolverConfig solver_cfg = cfg.solver_config();
    const auto observer = make_observer(cfg.observer, cfg.length);
    observer->check_grid(solver_cfg.grid);
    auto truth = make_truth(cfg);

    const SpectralField u0 = truth->initial();
    SolverState state = initial_state(initial_guess(cfg, u0));
    const SpectralField e0 = u0 - state.v_now;
    ControllerState controller =
        initial_controller_state(cfg.controller, l2_norm(observer->project(e0)));

    RunSummary summary;
    summary.initial_err = l2_norm(e0);
    const double u0_norm = l2_norm(u0);
    summary.initial_rel_err = u0_norm > 0.0 ? summary.initial_err / u0_norm : 0.0;
    summary.chi_final = controller.chi_n;

    const long n_steps = cfg.steps();
    const double dt = cfg.dt;
    const double horizon = static_cast<double>(n_steps) * dt;
    double g_prev = truth->grad_sq();
    double energy_prev = u0_norm * u0_norm;
    SpectralField u = u0;

    for (long k = 1; k <= n_steps; ++k) {
        u = truth->advance();
        AssimilatedStep step =
            assimilate_step(u, state, controller, *observer, solver_cfg, cfg.controller);
        state = std::move(step.solver);
        controller = step.controller;
        const StepRecord& rec = step.record;

        const double g = truth->grad_sq();
        const double u_norm = l2_norm(u);
        const double energy = u_norm * u_norm;
        summary.truth_avg_grad_sq += 0.5 * dt * (g_prev + g) / horizon;
        summary.truth_avg_grad_4 += 0.5 * dt * (g_prev * g_prev + g * g) / horizon;
        summary.truth_avg_energy += 0.5 * dt * (energy_prev + energy) / horizon;
        g_prev = g;
        energy_prev = energy;

        summary.steps = k;
        summary.final_err = rec.err_l2;
        summary.final_rel_err = rec.rel_err;
        summary.chi_max_observed = std::max(summary.chi_max_observed, rec.chi);
        summary.chi_final = rec.chi;
        summary.total_repeats += rec.repeats;
        summary.forced_steps += rec.forced ? 1 : 0;
        if (sink) {
            sink(rec);
        }
    }
    summary.final_lambda_t_err = lambda_t(u - state.v_now);
    return summary;
}

std::vector<StepRecord> run_twin(const ExperimentConfig& cfg, RunSummary* summary) {
    std::vector<StepRecord> records;
    records.reserve(static_cast<std::size_t>(std::max(0L, cfg.steps())));
    const RunSummary s = run_twin(cfg, [&](const StepRecord& r) { records.push_back(r); });
    if (summary != nullptr) {
        *summary = s;
    }
    return records;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& base,
                                            const std::vector<double>& dt_list, bool parallel,
                                            std::vector<RunSummary>* summaries) {
    if (base.truth.kind != TruthKind::Analytic) {
        throw ConfigError("convergence studies need an analytic truth");
    }
    auto run_one = [&base](double dt) {
        ExperimentConfig cfg = base;
        cfg.dt = dt;
        cfg.dt_list.clear();
        return run_twin(cfg, RecordSink{});
    };

    std::vector<RunSummary> results;
    if (parallel) {
        std::vector<std::future<RunSummary>> futures;
        for (double dt : dt_list) {
            futures.push_back(std::async(std::launch::async, run_one, dt));
        }
        for (auto& f : futures) {
            results.push_back(f.get());
        }
    } else {
        for (double dt : dt_list) {
            results.push_back(run_one(dt));
        }
    }

    std::vector<ConvergenceRow> rows;
    for (std::size_t i = 0; i < dt_list.size(); ++i) {
        ConvergenceRow row;
        row.dt = dt_list[i];
        row.final_err = results[i].final_err;
        row.chi_max_observed = results[i].chi_max_observed;
        if (i > 0) {
            row.rate = std::log2(results[i - 1].final_err / results[i].final_err);
        }
        rows.push_back(row);
    }
    if (summaries != nullptr) {
        *summaries = std::move(results);
    }
    return rows;
}

ConditionInputs condition_inputs(const ExperimentConfig& cfg, const RunSummary& summary) {
    const auto observer = make_observer(cfg.observer, cfg.length);
    ConditionInputs in;
    in.nu = cfg.nu;
    in.c1 = observer->c1();
    in.h = observer->length_scale();
    in.chi = summary.chi_max_observed > 0.0 ? summary.chi_max_observed : cfg.controller.chi0;
    // For a constant controller chi0 is the nudging strength itself; the decay
    // rate asked of the chi-condition is then the smallest useful one.
    in.chi0 = cfg.controller.kind == ControllerKind::Constant ? 1.0 : cfg.controller.chi0;
    in.avg_grad_sq = summary.truth_avg_grad_sq;
    in.avg_grad_4 = summary.truth_avg_grad_4;
    if (std::isfinite(summary.final_lambda_t_err) && summary.final_lambda_t_err > 0.0) {
        in.lambda_t_e = summary.final_lambda_t_err;
    }
    const double area = cfg.length * cfg.length;
    if (summary.truth_avg_energy > 0.0) {
        FlowScales scales;
        scales.length = cfg.length;
        scales.velocity = std::sqrt(summary.truth_avg_energy / area);
        scales.nu = cfg.nu;
        const int k_index = cfg.model.kind == ForcingKind::Kolmogorov ? cfg.model.k_f : 1;
        scales.kf = 2.0 * std::numbers::pi * k_index / cfg.length;
        in.scales = scales;
    }
    return in;
}

}  // namespace nudge
