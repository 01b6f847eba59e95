// nudge: run continuous-data-assimilation experiments and evaluate the
// parameter conditions.
//
//   nudge converge   [--config f.yaml] [overrides] [--parallel]
//   nudge longtime   [--config f.yaml] [overrides]
//   nudge saturate   [--config f.yaml] [overrides]
//   nudge twin-decay [--config f.yaml] [overrides]
//   nudge conditions [--config f.yaml] [--chi X --H Y ...]
//
// Exit codes: 0 success, 1 config error, 2 runtime/numerical failure, 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "nudge/conditions.hpp"
#include "nudge/errors.hpp"
#include "nudge/experiment_config.hpp"
#include "nudge/harness.hpp"
#include "nudge/observation.hpp"
#include "nudge/output.hpp"

namespace fs = std::filesystem;
using namespace nudge;

namespace {

struct Overrides {
    std::string config;
    std::optional<double> dt;
    std::optional<double> chi0;
    std::optional<std::string> controller;
    std::optional<int> observer_k;
    std::optional<double> nu;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "YAML experiment configuration");
    cmd->add_option("--dt", o.dt, "time step");
    cmd->add_option("--chi0", o.chi0, "initial / floor nudging parameter");
    cmd->add_option("--controller", o.controller, "constant | algo1 | algo2");
    cmd->add_option("--observer-k", o.observer_k, "observer resolution (Fourier K or cells m)");
    cmd->add_option("--nu", o.nu, "kinematic viscosity");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--out", o.out, "output directory");
}

ExperimentConfig build_config(const std::string& name, const Overrides& o) {
    ExperimentConfig cfg = preset(name);
    if (!o.config.empty()) {
        apply_config_file(cfg, o.config);
    }
    if (o.dt) {
        cfg.dt = *o.dt;
        if (!cfg.dt_list.empty()) {
            cfg.dt_list = {*o.dt};
        }
    }
    if (o.chi0) cfg.controller.chi0 = *o.chi0;
    if (o.controller) cfg.controller.kind = parse_controller_kind(*o.controller);
    if (o.observer_k) cfg.observer.resolution = *o.observer_k;
    if (o.nu) cfg.nu = *o.nu;
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.output_path = *o.out;
    cfg.validate();
    return cfg;
}

void print_summary(const ExperimentConfig& cfg, const RunSummary& s) {
    std::printf("%s: %ld steps, final rel_err %.3e, chi_max %.3e, repeats %ld, forced %ld\n",
                cfg.name.c_str(), s.steps, s.final_rel_err, s.chi_max_observed, s.total_repeats,
                s.forced_steps);
}

int run_experiment(const std::string& name, const Overrides& o) {
    const ExperimentConfig cfg = build_config(name, o);
    const fs::path out(cfg.output_path);
    CsvWriter csv(out / "records.csv");
    const RunSummary summary = run_twin(cfg, [&csv](const StepRecord& r) { csv.write(r); });
    csv.close();
    const ConditionReport conditions = evaluate_conditions(condition_inputs(cfg, summary));
    emit_report(cfg, conditions, summary, out / "report.json");
    print_summary(cfg, summary);
    std::printf("wrote %s and %s\n", (out / "records.csv").c_str(), (out / "report.json").c_str());
    return 0;
}

int run_converge(const Overrides& o, bool parallel) {
    ExperimentConfig cfg = build_config("converge", o);
    const fs::path out(cfg.output_path);
    const std::vector<double> dts = cfg.dt_list.empty() ? std::vector<double>{cfg.dt} : cfg.dt_list;
    std::vector<RunSummary> summaries;
    const auto rows = run_convergence(cfg, dts, parallel, &summaries);
    emit_convergence_csv(rows, out / "convergence.csv");

    std::printf("%-10s %-12s %-8s %-10s\n", "dt", "||u-v||", "rate", "chi_max");
    for (const auto& r : rows) {
        std::printf("%-10.6g %-12.4e %-8s %-10.4g\n", r.dt, r.final_err,
                    r.rate ? std::to_string(*r.rate).substr(0, 5).c_str() : "-", r.chi_max_observed);
    }
    cfg.dt = dts.back();
    const ConditionReport conditions = evaluate_conditions(condition_inputs(cfg, summaries.back()));
    emit_report(cfg, conditions, summaries.back(), out / "report.json");
    std::printf("wrote %s and %s\n", (out / "convergence.csv").c_str(), (out / "report.json").c_str());
    return 0;
}

struct ConditionArgs {
    std::optional<double> chi, h, c1, avg_grad_sq, avg_grad_4, lambda_t, length, velocity, kf;
};

int run_conditions(const Overrides& o, const ConditionArgs& a) {
    ExperimentConfig cfg;
    if (!o.config.empty()) {
        apply_config_file(cfg, o.config);
    }
    if (o.chi0) cfg.controller.chi0 = *o.chi0;
    if (o.observer_k) cfg.observer.resolution = *o.observer_k;
    if (o.nu) cfg.nu = *o.nu;
    const auto observer = make_observer(cfg.observer, cfg.length);

    ConditionInputs in;
    in.nu = cfg.nu;
    in.c1 = a.c1.value_or(observer->c1());
    in.h = a.h.value_or(observer->length_scale());
    in.chi0 = cfg.controller.chi0;
    in.chi = a.chi.value_or(cfg.controller.chi0);
    in.avg_grad_sq = a.avg_grad_sq.value_or(0.0);
    in.avg_grad_4 = a.avg_grad_4.value_or(0.0);
    in.lambda_t_e = a.lambda_t;
    if (a.velocity) {
        FlowScales scales;
        scales.length = a.length.value_or(cfg.length);
        scales.velocity = *a.velocity;
        scales.nu = cfg.nu;
        scales.kf = a.kf;
        in.scales = scales;
    }
    if (!(in.nu > 0.0) || !(in.h > 0.0) || !(in.chi > 0.0) || !(in.chi0 > 0.0)) {
        throw ConfigError("conditions need positive nu, H, chi and chi0");
    }
    const std::string text = conditions_json(in, evaluate_conditions(in));
    std::cout << text << '\n';
    if (o.out) {
        const fs::path path = fs::path(*o.out) / "conditions.json";
        ensure_parent_dir(path);
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (f == nullptr || std::fprintf(f, "%s\n", text.c_str()) < 0 || std::fclose(f) != 0) {
            throw IoError("cannot write " + path.string());
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nudging data assimilation for 2D Navier-Stokes with adaptive chi"};
    app.require_subcommand(1);

    Overrides converge_o, longtime_o, saturate_o, decay_o, cond_o;
    bool parallel = false;

    auto* converge = app.add_subcommand("converge", "time-step convergence study (manufactured solution)");
    add_common(converge, converge_o);
    converge->add_flag("--parallel", parallel, "run the dt sweep concurrently");
    auto* longtime = app.add_subcommand("longtime", "long-time manufactured-solution run");
    add_common(longtime, longtime_o);
    auto* saturate = app.add_subcommand("saturate", "fine-DNS truth vs coarse assimilation, Kolmogorov forcing");
    add_common(saturate, saturate_o);
    auto* decay = app.add_subcommand("twin-decay", "exponential error decay under satisfied conditions");
    add_common(decay, decay_o);

    auto* cond = app.add_subcommand("conditions", "evaluate the H and chi conditions and Re scalings");
    add_common(cond, cond_o);
    ConditionArgs ca;
    cond->add_option("--chi", ca.chi, "nudging parameter (default chi0)");
    cond->add_option("--H", ca.h, "observation length (default from observer)");
    cond->add_option("--c1", ca.c1, "interpolation constant (default from observer)");
    cond->add_option("--avg-grad-sq", ca.avg_grad_sq, "time average of ||grad u||^2");
    cond->add_option("--avg-grad-4", ca.avg_grad_4, "time average of ||grad u||^4");
    cond->add_option("--lambda-t", ca.lambda_t, "lambda_T of the error");
    cond->add_option("--L", ca.length, "large-scale length");
    cond->add_option("--U", ca.velocity, "large-scale velocity (enables Re scalings)");
    cond->add_option("--kf", ca.kf, "forcing wavenumber (2d scaling)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*converge) return run_converge(converge_o, parallel);
        if (*longtime) return run_experiment("longtime", longtime_o);
        if (*saturate) return run_experiment("saturate", saturate_o);
        if (*decay) return run_experiment("twin-decay", decay_o);
        if (*cond) return run_conditions(cond_o, ca);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
