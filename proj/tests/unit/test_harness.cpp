#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nudge/errors.hpp"
#include "nudge/experiment_config.hpp"
#include "nudge/field_ops.hpp"
#include "nudge/harness.hpp"
#include "nudge/output.hpp"

using namespace nudge;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const char* env = std::getenv("NUDGE_TEST_TMP");
    fs::path dir = env != nullptr ? fs::path(env) : fs::temp_directory_path() / "nudge-tests";
    dir /= name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

StepRecord random_record(std::mt19937_64& rng, long step) {
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    auto any = [&] { return std::exp(u(rng)) * (u(rng) < 0 ? 1.0 : 1.0 / 3.0); };
    StepRecord r;
    r.step = step;
    r.t = step * 0.01;
    r.chi = any();
    r.err_l2 = any();
    r.rel_err = any();
    r.proj_err = any();
    r.rel_proj_err = any();
    r.grad_v_sq = any();
    r.repeats = static_cast<int>(rng() % 26);
    return r;
}

// Small analytic twin: (1 + t) times a fixed divergence-free shape is
// reproduced exactly by the time stepper.
ExperimentConfig linear_twin() {
    ExperimentConfig c;
    c.model.kind = ForcingKind::ManufacturedPeriodic;
    c.model.profile = TimeProfile::Linear;
    c.nu = 1.0;
    c.grid_n = 16;
    c.truth.kind = TruthKind::Analytic;
    c.dt = 0.1;
    c.t_final = 1.0;
    c.observer = ObserverSpec{ObserverKind::Fourier, 4};
    c.v0 = InitialSpec{InitialKind::Perturbed, std::nullopt, 0.0, 8};
    return c;
}

// Short forced run against a finer DNS truth.
ExperimentConfig small_dns() {
    ExperimentConfig c = preset("saturate");
    c.grid_n = 16;
    c.truth.grid_n_fine = 32;
    c.truth.substeps = 4;
    c.t_final = 0.5;
    return c;
}

std::string csv_of(const std::vector<StepRecord>& records) {
    std::string s;
    for (const auto& r : records) {
        s += format_record(r) + "\n";
    }
    return s;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("record CSV files") {
    const auto dir = scratch_dir("csv");
    SUBCASE("empty stream gives a header-only file") {
        emit_csv({}, dir / "empty.csv");
        CHECK(slurp(dir / "empty.csv") == std::string(kRecordHeader) + "\n");
        CHECK(read_csv(dir / "empty.csv").empty());
    }
    SUBCASE("one record round trips") {
        std::mt19937_64 rng(1);
        const auto r = random_record(rng, 1);
        emit_csv({r}, dir / "one.csv");
        const auto text = slurp(dir / "one.csv");
        CHECK(std::count(text.begin(), text.end(), '\n') == 2);
        const auto back = read_csv(dir / "one.csv");
        REQUIRE(back.size() == 1);
        CHECK(back[0].chi == r.chi);
        CHECK(back[0].grad_v_sq == r.grad_v_sq);
        CHECK(back[0].repeats == r.repeats);
    }
    SUBCASE("ten thousand records re-serialize bit-identically") {
        std::mt19937_64 rng(2);
        std::vector<StepRecord> records;
        for (long k = 1; k <= 10000; ++k) {
            records.push_back(random_record(rng, k));
        }
        emit_csv(records, dir / "big.csv");
        const auto back = read_csv(dir / "big.csv");
        REQUIRE(back.size() == records.size());
        emit_csv(back, dir / "again.csv");
        CHECK(slurp(dir / "big.csv") == slurp(dir / "again.csv"));
        for (std::size_t i = 0; i < back.size(); ++i) {
            CHECK(back[i].err_l2 == records[i].err_l2);
        }
    }
    SUBCASE("streaming writer matches the batch writer") {
        std::mt19937_64 rng(3);
        std::vector<StepRecord> records;
        CsvWriter w(dir / "stream.csv");
        for (long k = 1; k <= 50; ++k) {
            records.push_back(random_record(rng, k));
            w.write(records.back());
        }
        w.close();
        emit_csv(records, dir / "batch.csv");
        CHECK(slurp(dir / "stream.csv") == slurp(dir / "batch.csv"));
    }
    SUBCASE("errors name the path") {
        std::ofstream(dir / "bad.csv") << "step,t\n1,2\n";
        try {
            read_csv(dir / "bad.csv");
            FAIL("expected an IoError");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find("bad.csv") != std::string::npos);
        }
        std::ofstream(dir / "blocker") << "x";
        CHECK_THROWS_AS(emit_csv({}, dir / "blocker" / "out.csv"), IoError);
        CHECK_THROWS_AS(parse_record("1,2,3"), std::invalid_argument);
    }
}

TEST_CASE("doubles are written with 17 significant digits") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-300.0, 300.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = std::pow(10.0, u(rng) / 10.0) * (i % 2 ? -1.0 : 1.0);
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("configuration text") {
    ExperimentConfig c = preset("saturate");
    apply_config_text(c, "nu: 0.002\ncontroller: {kind: algo2, chi0: 3}\nobserver: {k: 2}\n"
                         "truth: {grid_n_fine: 32}\nv0: perturbed\n");
    CHECK(c.nu == 0.002);
    CHECK(c.controller.kind == ControllerKind::Algo2);
    CHECK(c.controller.chi0 == 3.0);
    CHECK(c.observer.resolution == 2);
    CHECK(c.truth.grid_n_fine == 32);
    CHECK(c.truth.kind == TruthKind::Dns);
    CHECK(c.v0.kind == InitialKind::Perturbed);
    CHECK_NOTHROW(c.validate());

    CHECK_THROWS_AS(apply_config_text(c, "viscosity: 1"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "controller: {gain: 1}"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "nu: fast"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "controller: {kind: pid}"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "observer: {k: 2, m: 4}"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "[1, 2"), ConfigError);
    CHECK_THROWS_AS(preset("nope"), ConfigError);

    ExperimentConfig d = preset("twin-decay");
    d.dt = 0.003;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d = preset("twin-decay");
    d.observer.resolution = 40;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d = preset("twin-decay");
    d.observer = ObserverSpec{ObserverKind::Cells, 6};
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d = preset("saturate");
    d.truth.kind = TruthKind::Analytic;
    CHECK_THROWS_AS(d.validate(), ConfigError);

    const auto dir = scratch_dir("config");
    CHECK_THROWS_AS(apply_config_file(c, dir / "missing.yaml"), IoError);
    for (const auto& name : preset_names()) {
        CHECK_NOTHROW(preset(name).validate());
    }
}

TEST_CASE("zero initial error stays at roundoff for every controller") {
    for (auto kind : {ControllerKind::Constant, ControllerKind::Algo1, ControllerKind::Algo2}) {
        auto cfg = linear_twin();
        cfg.controller.kind = kind;
        for (const auto& r : run_twin(cfg)) {
            CHECK(r.rel_err <= 1e-10);
            CHECK(r.chi >= cfg.controller.chi0);
        }
    }
}

TEST_CASE("same-resolution DNS truth is tracked to roundoff") {
    ExperimentConfig c = small_dns();
    c.truth.grid_n_fine = c.grid_n;
    c.truth.substeps = 1;
    c.controller = ControllerConfig{ControllerKind::Constant, 1e4, 1e6, 1.3, 0.2, 25};
    c.observer.resolution = 5;
    c.v0 = InitialSpec{InitialKind::Perturbed, std::nullopt, 0.0, 8};
    for (const auto& r : run_twin(c)) {
        CHECK(r.rel_err <= 1e-12);
    }
}

TEST_CASE("runs are deterministic and rows obey contraction") {
    for (auto kind : {ControllerKind::Algo1, ControllerKind::Algo2}) {
        auto c = small_dns();
        c.controller.kind = kind;
        RunSummary s1, s2;
        const auto a = run_twin(c, &s1);
        const auto b = run_twin(c, &s2);
        CHECK(a.size() == static_cast<std::size_t>(c.steps()));
        CHECK(csv_of(a) == csv_of(b));
        CHECK(s1.final_err == s2.final_err);
        for (const auto& r : a) {
            CHECK(r.proj_err <= r.err_l2 * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("a run equals a fresh run driven by its own chi sequence") {
    auto c = small_dns();
    c.controller.kind = ControllerKind::Algo2;
    c.controller.chi0 = 5.0;
    const auto reference = run_twin(c);
    long repeats = 0;
    for (const auto& r : reference) {
        repeats += r.repeats;
    }
    CHECK(repeats > 0);

    // replay with one constant controller per step
    const auto observer = make_observer(c.observer, c.length);
    auto truth = make_truth(c);
    const SolverConfig solver_cfg = c.solver_config();
    SolverState state = initial_state(initial_guess(c, truth->initial()));
    for (const auto& r : reference) {
        const ControllerConfig fixed{ControllerKind::Constant, r.chi, r.chi, 1.3, 0.2, 0};
        const auto u = truth->advance();
        const auto step = assimilate_step(u, state, initial_controller_state(fixed, 0.0), *observer,
                                          solver_cfg, fixed);
        CHECK(step.record.err_l2 == r.err_l2);
        CHECK(step.record.grad_v_sq == r.grad_v_sq);
        state = step.solver;
    }
}

TEST_CASE("convergence tables") {
    SUBCASE("exactly representable solution sits at the floor") {
        auto c = linear_twin();
        c.t_final = 1.0;
        c.controller.kind = ControllerKind::Algo2;
        const auto rows = run_convergence(c, {0.5, 0.25, 0.125});
        REQUIRE(rows.size() == 3);
        CHECK_FALSE(rows[0].rate.has_value());
        CHECK(rows[1].rate.has_value());
        for (const auto& r : rows) {
            CHECK(r.final_err <= 1e-12);
            CHECK(r.chi_max_observed >= 1.0);
        }
    }
    SUBCASE("manufactured solution converges at second order") {
        auto c = preset("converge");
        c.grid_n = 16;
        const std::vector<double> dts{0.5, 0.25, 0.125, 0.0625};
        const auto serial = run_convergence(c, dts, false);
        const auto parallel = run_convergence(c, dts, true);
        for (std::size_t i = 0; i < dts.size(); ++i) {
            CHECK(serial[i].final_err == parallel[i].final_err);
        }
        for (std::size_t i = 2; i < dts.size(); ++i) {
            CHECK(*serial[i].rate >= 1.7);
            CHECK(*serial[i].rate <= 2.5);
        }
    }
    SUBCASE("DNS truth is rejected") {
        CHECK_THROWS_AS(run_convergence(small_dns(), {0.1}), ConfigError);
    }
}

TEST_CASE("convergence CSV") {
    const auto dir = scratch_dir("conv");
    std::vector<ConvergenceRow> rows{{0.5, 1e-2, std::nullopt, 3.0}, {0.25, 2.5e-3, 2.0, 4.0}};
    emit_convergence_csv(rows, dir / "c.csv");
    std::istringstream text(slurp(dir / "c.csv"));
    std::string line;
    std::getline(text, line);
    CHECK(line == kConvergenceHeader);
    std::getline(text, line);
    CHECK(line.find(",,") != std::string::npos);
    std::getline(text, line);
    CHECK(line.rfind("0.25,", 0) == 0);
}

TEST_CASE("run reports carry the condition evaluation") {
    auto c = preset("twin-decay");
    c.t_final = 0.05;
    RunSummary s;
    run_twin(c, &s);
    const auto in = condition_inputs(c, s);
    CHECK(in.chi == 40.0);
    CHECK(in.chi0 == 1.0);
    CHECK(in.h == doctest::Approx(1.0 / (32.0 * M_PI)));
    CHECK(in.avg_grad_sq > 0.0);
    const auto report = evaluate_conditions(in);
    CHECK(report.h.ok);
    CHECK(report.h.slack == doctest::Approx(0.00208).epsilon(0.01));

    const auto dir = scratch_dir("report");
    emit_report(c, report, s, dir / "nested" / "report.json");
    const auto text = slurp(dir / "nested" / "report.json");
    for (const char* key : {"\"config\"", "\"summary\"", "\"conditions\"", "\"h_condition\""}) {
        CHECK(text.find(key) != std::string::npos);
    }
}

}  // TEST_SUITE
