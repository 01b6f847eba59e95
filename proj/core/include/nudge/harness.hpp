#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "nudge/conditions.hpp"
#include "nudge/experiment_config.hpp"
#include "nudge/step_record.hpp"

namespace nudge {

/// Truth velocity u(t_k) restricted to the assimilation grid, produced in
/// step order. Analytic truths are evaluated directly; DNS truths are stepped
/// on their own (finer) grid and spectrally truncated.
class TruthSource {
public:
    virtual ~TruthSource() = default;
    /// u(t_0) on the assimilation grid.
    virtual SpectralField initial() const = 0;
    /// Advances to the next time level and returns u there.
    virtual SpectralField advance() = 0;
    /// ||grad u||^2 at the current level, on the truth's own grid.
    virtual double grad_sq() const = 0;
};

std::unique_ptr<TruthSource> make_truth(const ExperimentConfig& cfg);

/// v(0) for the experiment: zero, or u(0) plus the seeded perturbation.
SpectralField initial_guess(const ExperimentConfig& cfg, const SpectralField& u0);

struct RunSummary {
    long steps = 0;
    double initial_err = 0.0;
    double initial_rel_err = 0.0;
    double final_err = 0.0;
    double final_rel_err = 0.0;
    double chi_max_observed = 0.0;
    double chi_final = 0.0;
    long total_repeats = 0;
    long forced_steps = 0;
    /// Time averages (trapezoidal) of truth ||grad u||^2, ||grad u||^4, ||u||^2.
    double truth_avg_grad_sq = 0.0;
    double truth_avg_grad_4 = 0.0;
    double truth_avg_energy = 0.0;
    /// lambda_T(u - v) at the final time (infinite if the error is constant).
    double final_lambda_t_err = 0.0;
};

using RecordSink = std::function<void(const StepRecord&)>;

/// Twin experiment: advances truth and the nudged solution in lockstep and
/// hands every accepted step to `sink`.
RunSummary run_twin(const ExperimentConfig& cfg, const RecordSink& sink);
std::vector<StepRecord> run_twin(const ExperimentConfig& cfg, RunSummary* summary = nullptr);

struct ConvergenceRow {
    double dt = 0.0;
    double final_err = 0.0;
    /// log2(err(2 dt) / err(dt)); empty on the first row.
    std::optional<double> rate;
    double chi_max_observed = 0.0;
};

/// One run_twin per step size (analytic truth only). With `parallel`, the runs
/// execute concurrently; results are identical either way.
std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& base,
                                            const std::vector<double>& dt_list,
                                            bool parallel = false,
                                            std::vector<RunSummary>* summaries = nullptr);

/// Condition evaluators applied to a finished run.
ConditionInputs condition_inputs(const ExperimentConfig& cfg, const RunSummary& summary);

}  // namespace nudge
