#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nudge/nse_solver.hpp"
#include "nudge/nudging_control.hpp"
#include "nudge/observation.hpp"

namespace nudge {

enum class TruthKind { Analytic, Dns };

struct TruthSpec {
    TruthKind kind = TruthKind::Analytic;
    /// DNS grid; must be >= grid_n.
    int grid_n_fine = 0;
    /// DNS sub-steps per assimilation step (the fine grid may need a smaller
    /// step for stability of the explicit advection).
    int substeps = 1;
    /// Random DNS initial condition for Kolmogorov runs: ||u0|| and max mode.
    double u0_amplitude = 0.5;
    int u0_kmax = 4;
};

enum class InitialKind { Zero, Perturbed };

/// v0 = 0, or v0 = u(0) + random divergence-free perturbation.
struct InitialSpec {
    InitialKind kind = InitialKind::Zero;
    /// Perturbation seed; defaults to the experiment seed + 1.
    std::optional<std::uint64_t> seed;
    double amplitude = 0.0;
    int kmax = 8;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ForcingSpec model{};
    double nu = 1e-3;
    int grid_n = 32;
    double length = 1.0;
    TruthSpec truth{};
    double dt = 0.01;
    double t_final = 1.0;
    ObserverSpec observer{};
    ControllerConfig controller{};
    InitialSpec v0{};
    std::uint64_t seed = 1;
    std::string output_path = "out";
    /// Step sizes for convergence studies.
    std::vector<double> dt_list{};

    /// Throws ConfigError on any inconsistency.
    void validate() const;
    long steps() const;
    Grid grid() const { return Grid(grid_n, length); }
    SolverConfig solver_config() const;
};

/// Built-in experiment designs: converge, longtime, saturate, twin-decay.
/// Throws ConfigError for unknown names.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Overlays the keys of a YAML file onto `cfg`. Keys mirror the field names
/// above (nested maps for model, truth, observer, controller, v0). Unknown keys
/// are rejected. Throws ConfigError (bad content) or IoError (unreadable file).
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);
void apply_config_text(ExperimentConfig& cfg, const std::string& yaml_text);

ControllerKind parse_controller_kind(const std::string& s);
ForcingKind parse_forcing_kind(const std::string& s);
std::string to_string(ControllerKind k);
std::string to_string(ForcingKind k);
std::string to_string(TruthKind k);
std::string to_string(ObserverKind k);
std::string to_string(InitialKind k);

}  // namespace nudge
