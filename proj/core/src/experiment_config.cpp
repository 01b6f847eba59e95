#include "nudge/experiment_config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nudge/errors.hpp"
#include "nudge/field_ops.hpp"

namespace nudge {

long ExperimentConfig::steps() const { return std::lround(t_final / dt); }

SolverConfig ExperimentConfig::solver_config() const {
    return SolverConfig{nu, dt, grid(), model};
}

void ExperimentConfig::validate() const {
    if (grid_n < 4 || grid_n % 2 != 0) {
        throw ConfigError("grid_n must be an even integer >= 4");
    }
    if (!(t_final > 0.0)) {
        throw ConfigError("t_final must be positive");
    }
    solver_config().validate();
    const long n = steps();
    if (n < 1 || std::abs(n * dt - t_final) > 1e-9 * t_final) {
        throw ConfigError("t_final must be an integer multiple of dt");
    }
    for (double h : dt_list) {
        const long k = std::lround(t_final / h);
        if (!(h > 0.0) || k < 1 || std::abs(k * h - t_final) > 1e-9 * t_final) {
            throw ConfigError("every dt_list entry must divide t_final");
        }
    }
    if (truth.kind == TruthKind::Dns) {
        if (truth.grid_n_fine < grid_n || truth.grid_n_fine % 2 != 0) {
            throw ConfigError("truth.grid_n_fine must be an even integer >= grid_n");
        }
        if (truth.substeps < 1) {
            throw ConfigError("truth.substeps must be >= 1");
        }
        if (!(truth.u0_amplitude >= 0.0) || truth.u0_kmax < 1) {
            throw ConfigError("truth.u0_amplitude must be >= 0 and truth.u0_kmax >= 1");
        }
    } else if (model.kind == ForcingKind::Kolmogorov) {
        throw ConfigError("kolmogorov forcing has no analytic truth; use truth.kind: dns");
    }
    if (observer.kind == ObserverKind::Fourier) {
        if (observer.resolution < 0 || observer.resolution >= grid_n / 2) {
            throw ConfigError("observer k must lie in [0, grid_n/2)");
        }
    } else if (observer.resolution < 1 || grid_n % observer.resolution != 0) {
        throw ConfigError("observer m must divide grid_n");
    }
    controller.validate();
    if (v0.kind == InitialKind::Perturbed && (!(v0.amplitude >= 0.0) || v0.kmax < 1)) {
        throw ConfigError("v0.amplitude must be >= 0 and v0.kmax >= 1");
    }
}

// ---------------------------------------------------------------------------
// presets

std::vector<std::string> preset_names() { return {"converge", "longtime", "saturate", "twin-decay"}; }

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    if (name == "converge" || name == "longtime") {
        c.model = ForcingSpec{ForcingKind::ManufacturedPeriodic, 4, 1.0, 1.0, TimeProfile::Exponential};
        c.nu = 1.0;
        c.truth = TruthSpec{TruthKind::Analytic};
        c.observer = ObserverSpec{ObserverKind::Fourier, 4};
        c.controller = ControllerConfig{ControllerKind::Algo2, 1.0, 1e6, 1.3, 0.2, 25};
        c.v0 = InitialSpec{InitialKind::Perturbed, std::nullopt, 0.0, 8};
        if (name == "converge") {
            c.grid_n = 128;
            c.t_final = 2.0;
            c.dt_list = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
            c.dt = c.dt_list.back();
        } else {
            c.grid_n = 32;
            c.t_final = 10.0;
            c.dt = 1.0 / 64.0;
        }
    } else if (name == "saturate") {
        c.model = ForcingSpec{ForcingKind::Kolmogorov, 4, 1.0, 1.0, TimeProfile::Exponential};
        c.nu = 1e-3;
        // A 4x4 box keeps the coarse model inside its advective stability limit
        // at dt = 0.01 while the flow still becomes unstable and decorrelates.
        c.length = 4.0;
        c.grid_n = 16;
        c.truth = TruthSpec{TruthKind::Dns, 64, 16, 1e-3, 8};
        c.dt = 0.01;
        c.t_final = 10.0;
        c.observer = ObserverSpec{ObserverKind::Fourier, 3};
        c.controller = ControllerConfig{ControllerKind::Algo1, 1.0, 1e6, 1.1, 0.3, 25};
        c.v0 = InitialSpec{InitialKind::Zero, std::nullopt, 0.0, 8};
    } else if (name == "twin-decay") {
        c.model = ForcingSpec{ForcingKind::TaylorGreenZero, 4, 0.05, 1.0, TimeProfile::Exponential};
        c.nu = 0.01;
        c.grid_n = 64;
        c.truth = TruthSpec{TruthKind::Analytic};
        c.dt = 1e-3;
        c.t_final = 0.5;
        c.observer = ObserverSpec{ObserverKind::Fourier, 15};
        c.controller = ControllerConfig{ControllerKind::Constant, 40.0, 1e6, 1.3, 0.2, 25};
        c.v0 = InitialSpec{InitialKind::Perturbed, std::nullopt, 0.05, 20};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    c.output_path = "out/" + name;
    return c;
}

// ---------------------------------------------------------------------------
// string conversions

ControllerKind parse_controller_kind(const std::string& s) {
    if (s == "constant") return ControllerKind::Constant;
    if (s == "algo1") return ControllerKind::Algo1;
    if (s == "algo2") return ControllerKind::Algo2;
    throw ConfigError("unknown controller kind '" + s + "' (expected constant, algo1, algo2)");
}

ForcingKind parse_forcing_kind(const std::string& s) {
    if (s == "manufactured-periodic") return ForcingKind::ManufacturedPeriodic;
    if (s == "taylor-green-zero") return ForcingKind::TaylorGreenZero;
    if (s == "kolmogorov") return ForcingKind::Kolmogorov;
    throw ConfigError("unknown model kind '" + s +
                      "' (expected manufactured-periodic, taylor-green-zero, kolmogorov)");
}

std::string to_string(ControllerKind k) {
    switch (k) {
    case ControllerKind::Constant: return "constant";
    case ControllerKind::Algo1: return "algo1";
    case ControllerKind::Algo2: return "algo2";
    }
    return "?";
}

std::string to_string(ForcingKind k) {
    switch (k) {
    case ForcingKind::ManufacturedPeriodic: return "manufactured-periodic";
    case ForcingKind::TaylorGreenZero: return "taylor-green-zero";
    case ForcingKind::Kolmogorov: return "kolmogorov";
    }
    return "?";
}

std::string to_string(TruthKind k) { return k == TruthKind::Analytic ? "analytic" : "dns"; }
std::string to_string(ObserverKind k) { return k == ObserverKind::Fourier ? "fourier" : "cells"; }
std::string to_string(InitialKind k) { return k == InitialKind::Zero ? "zero" : "perturbed"; }

// ---------------------------------------------------------------------------
// YAML overlay

namespace {

template <typename T>
T read(const YAML::Node& node, const std::string& key) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("config key '" + key + "' has an invalid value");
    }
}

void require_map(const YAML::Node& node, const std::string& key) {
    if (!node.IsMap()) {
        throw ConfigError("config key '" + key + "' must be a mapping");
    }
}

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) {
            throw ConfigError("unknown config key '" + where + key + "'");
        }
    }
}

void apply_model(ForcingSpec& m, const YAML::Node& n) {
    require_map(n, "model");
    check_keys(n, "model.", {"kind", "k_f", "amplitude", "ramp", "profile"});
    if (n["kind"]) m.kind = parse_forcing_kind(read<std::string>(n["kind"], "model.kind"));
    if (n["k_f"]) m.k_f = read<int>(n["k_f"], "model.k_f");
    if (n["amplitude"]) m.amplitude = read<double>(n["amplitude"], "model.amplitude");
    if (n["ramp"]) m.ramp = read<double>(n["ramp"], "model.ramp");
    if (n["profile"]) {
        const auto p = read<std::string>(n["profile"], "model.profile");
        if (p == "exponential") {
            m.profile = TimeProfile::Exponential;
        } else if (p == "linear") {
            m.profile = TimeProfile::Linear;
        } else {
            throw ConfigError("model.profile must be exponential or linear");
        }
    }
}

void apply_truth(TruthSpec& t, const YAML::Node& n) {
    if (n.IsScalar()) {
        const auto kind = read<std::string>(n, "truth");
        if (kind == "analytic") {
            t.kind = TruthKind::Analytic;
        } else if (kind == "dns") {
            t.kind = TruthKind::Dns;
        } else {
            throw ConfigError("truth must be analytic or dns");
        }
        return;
    }
    require_map(n, "truth");
    check_keys(n, "truth.", {"kind", "grid_n_fine", "substeps", "u0_amplitude", "u0_kmax"});
    if (n["kind"]) apply_truth(t, n["kind"]);
    if (n["grid_n_fine"]) t.grid_n_fine = read<int>(n["grid_n_fine"], "truth.grid_n_fine");
    if (n["substeps"]) t.substeps = read<int>(n["substeps"], "truth.substeps");
    if (n["u0_amplitude"]) t.u0_amplitude = read<double>(n["u0_amplitude"], "truth.u0_amplitude");
    if (n["u0_kmax"]) t.u0_kmax = read<int>(n["u0_kmax"], "truth.u0_kmax");
}

void apply_observer(ObserverSpec& o, const YAML::Node& n) {
    require_map(n, "observer");
    check_keys(n, "observer.", {"kind", "k", "m"});
    if (n["kind"]) {
        const auto kind = read<std::string>(n["kind"], "observer.kind");
        if (kind == "fourier") {
            o.kind = ObserverKind::Fourier;
        } else if (kind == "cells") {
            o.kind = ObserverKind::Cells;
        } else {
            throw ConfigError("observer.kind must be fourier or cells");
        }
    }
    if (n["k"] && n["m"]) {
        throw ConfigError("observer takes either k (fourier) or m (cells), not both");
    }
    if (n["k"]) o.resolution = read<int>(n["k"], "observer.k");
    if (n["m"]) o.resolution = read<int>(n["m"], "observer.m");
}

void apply_controller(ControllerConfig& c, const YAML::Node& n) {
    require_map(n, "controller");
    check_keys(n, "controller.", {"kind", "chi0", "chi_max", "factor", "tol", "max_repeats"});
    if (n["kind"]) c.kind = parse_controller_kind(read<std::string>(n["kind"], "controller.kind"));
    if (n["chi0"]) c.chi0 = read<double>(n["chi0"], "controller.chi0");
    if (n["chi_max"]) c.chi_max = read<double>(n["chi_max"], "controller.chi_max");
    if (n["factor"]) c.factor = read<double>(n["factor"], "controller.factor");
    if (n["tol"]) c.tol = read<double>(n["tol"], "controller.tol");
    if (n["max_repeats"]) c.max_repeats = read<int>(n["max_repeats"], "controller.max_repeats");
}

void apply_v0(InitialSpec& v, const YAML::Node& n) {
    if (n.IsScalar()) {
        const auto kind = read<std::string>(n, "v0");
        if (kind == "zero") {
            v.kind = InitialKind::Zero;
        } else if (kind == "perturbed") {
            v.kind = InitialKind::Perturbed;
        } else {
            throw ConfigError("v0 must be zero or perturbed");
        }
        return;
    }
    require_map(n, "v0");
    check_keys(n, "v0.", {"kind", "seed", "amplitude", "kmax"});
    if (n["kind"]) apply_v0(v, n["kind"]);
    if (n["seed"]) v.seed = read<std::uint64_t>(n["seed"], "v0.seed");
    if (n["amplitude"]) v.amplitude = read<double>(n["amplitude"], "v0.amplitude");
    if (n["kmax"]) v.kmax = read<int>(n["kmax"], "v0.kmax");
}

void apply_root(ExperimentConfig& cfg, const YAML::Node& root) {
    if (root.IsNull()) {
        return;
    }
    require_map(root, "<root>");
    check_keys(root, "", {"name", "model", "nu", "grid_n", "length", "truth", "dt", "t_final",
                          "observer", "controller", "v0", "seed", "output_path", "dt_list"});
    if (root["name"]) cfg.name = read<std::string>(root["name"], "name");
    if (root["model"]) apply_model(cfg.model, root["model"]);
    if (root["nu"]) cfg.nu = read<double>(root["nu"], "nu");
    if (root["grid_n"]) cfg.grid_n = read<int>(root["grid_n"], "grid_n");
    if (root["length"]) cfg.length = read<double>(root["length"], "length");
    if (root["truth"]) apply_truth(cfg.truth, root["truth"]);
    if (root["dt"]) cfg.dt = read<double>(root["dt"], "dt");
    if (root["t_final"]) cfg.t_final = read<double>(root["t_final"], "t_final");
    if (root["observer"]) apply_observer(cfg.observer, root["observer"]);
    if (root["controller"]) apply_controller(cfg.controller, root["controller"]);
    if (root["v0"]) apply_v0(cfg.v0, root["v0"]);
    if (root["seed"]) cfg.seed = read<std::uint64_t>(root["seed"], "seed");
    if (root["output_path"]) cfg.output_path = read<std::string>(root["output_path"], "output_path");
    if (root["dt_list"]) cfg.dt_list = read<std::vector<double>>(root["dt_list"], "dt_list");
}

}  // namespace

void apply_config_text(ExperimentConfig& cfg, const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    apply_root(cfg, root);
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
        apply_config_text(cfg, text.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace nudge
