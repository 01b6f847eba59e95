// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <future>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "nudge/conditions.hpp"
#include "nudge/experiment_config.hpp"
#include "nudge/field_ops.hpp"
#include "nudge/harness.hpp"
#include "nudge/observation.hpp"
#include "nudge/output.hpp"

using namespace nudge;

namespace {

struct Verdict {
    bool ok = true;
    std::string detail;

    void require(bool cond, const char* fmt, ...) {
        char buf[512];
        va_list args;
        va_start(args, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, args);
        va_end(args);
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += cond ? "" : "NOT ";
        detail += buf;
        ok = ok && cond;
    }
};

int failures = 0;

void report(int id, const char* title, const Verdict& v, double seconds) {
    std::printf("criterion %d [%s]: %s (%.1fs) %s\n", id, title, v.ok ? "PASS" : "FAIL", seconds,
                v.detail.c_str());
    std::fflush(stdout);
    failures += v.ok ? 0 : 1;
}

template <typename F>
void criterion(int id, const char* title, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        body(v);
    } catch (const std::exception& e) {
        v.require(false, "threw: %s", e.what());
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    report(id, title, v, took.count());
}

std::string serialized(const std::vector<StepRecord>& rs) {
    std::string s;
    for (const auto& r : rs) {
        s += format_record(r);
        s += '\n';
    }
    return s;
}

// Temporal order on the periodic manufactured solution.
void order_two(Verdict& v) {
    ExperimentConfig c = preset("converge");
    c.controller.kind = ControllerKind::Algo2;
    c.controller.chi0 = 1.0;
    const std::vector<double> dts{0.5, 0.25, 0.125, 0.0625, 0.03125};
    const auto rows = run_convergence(c, dts, true);
    for (const auto& r : rows) {
        if (!r.rate) {
            continue;
        }
        v.require(*r.rate >= 1.7 && *r.rate <= 2.5, "rate(dt=%g)=%.3f in [1.7,2.5]", r.dt, *r.rate);
    }
}

// Truth and assimilated run on the same grid from the same initial state.
void same_resolution(Verdict& v) {
    ExperimentConfig c = preset("saturate");
    c.length = 1.0;
    c.grid_n = 32;
    c.truth = TruthSpec{TruthKind::Dns, 32, 1, 0.5, 8};
    c.t_final = 1.0;
    c.observer = ObserverSpec{ObserverKind::Fourier, 32 / 3};
    c.controller = ControllerConfig{ControllerKind::Constant, 1e4, 1e6, 1.3, 0.2, 25};
    c.v0 = InitialSpec{InitialKind::Perturbed, std::nullopt, 0.0, 8};
    double worst = 0.0;
    for (const auto& r : run_twin(c)) {
        worst = std::max(worst, r.rel_err);
    }
    v.require(worst < 1e-10, "max rel_err %.2e < 1e-10", worst);
}

// Exponential decay of the error under the parameter conditions.
void guaranteed_decay(Verdict& v) {
    const ExperimentConfig c = preset("twin-decay");
    RunSummary s;
    const auto rs = run_twin(c, &s);
    const auto in = condition_inputs(c, s);
    const auto h = h_condition(in.nu, in.c1, in.h, c.controller.chi0);
    v.require(h.ok, "H condition slack %.5f", h.slack);

    // largest decay rate the chi-condition certifies for the measured flow
    const double chi0 = c.controller.chi0 - s.truth_avg_grad_sq / (2.0 * c.nu);
    v.require(chi0 >= 1.0, "chi0 = chi - avg|grad u|^2/(2 nu) = %.2f >= 1", chi0);

    // pre-floor window: until the error first comes within 100x of its minimum
    double floor = s.initial_err;
    for (const auto& r : rs) {
        floor = std::min(floor, r.err_l2);
    }
    std::vector<double> ts{0.0}, ys{std::log(s.initial_err)};
    for (const auto& r : rs) {
        if (r.err_l2 < 100.0 * floor) {
            break;
        }
        ts.push_back(r.t);
        ys.push_back(std::log(r.err_l2));
    }
    const double n = static_cast<double>(ts.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sy += ys[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * ys[i];
    }
    const double rate = -(n * sty - st * sy) / (n * stt - st * st);
    v.require(ts.size() >= 10 && rate >= chi0, "fitted rate %.2f >= chi0 over %zu points", rate,
              ts.size());
    const double bound = std::exp(-chi0 * c.t_final) * s.initial_err;
    v.require(s.final_err <= 2.0 * bound, "e(T)=%.2e <= 2*exp(-chi0 T)e(0)=%.2e", s.final_err,
              2.0 * bound);
}

struct SaturateRuns {
    std::vector<StepRecord> algo1, algo2, algo1_again, algo2_again;
    ExperimentConfig cfg1, cfg2;
};

SaturateRuns saturate_runs() {
    SaturateRuns out;
    out.cfg1 = preset("saturate");
    out.cfg1.controller.kind = ControllerKind::Algo1;
    out.cfg2 = preset("saturate");
    out.cfg2.controller.kind = ControllerKind::Algo2;
    auto a1 = std::async(std::launch::async, [&] { return run_twin(out.cfg1); });
    auto a2 = std::async(std::launch::async, [&] { return run_twin(out.cfg2); });
    auto b1 = std::async(std::launch::async, [&] { return run_twin(out.cfg1); });
    auto b2 = std::async(std::launch::async, [&] { return run_twin(out.cfg2); });
    out.algo1 = a1.get();
    out.algo2 = a2.get();
    out.algo1_again = b1.get();
    out.algo2_again = b2.get();
    return out;
}

void controller_contracts(Verdict& v, const SaturateRuns& runs) {
    v.require(runs.algo1.size() >= 1000 && runs.algo2.size() >= 1000, "%zu and %zu steps",
              runs.algo1.size(), runs.algo2.size());
    long bad1 = 0, bad2 = 0, out_of_range = 0, forced = 0;
    const auto& c1 = runs.cfg1.controller;
    const auto& c2 = runs.cfg2.controller;
    for (const auto& r : runs.algo1) {
        if (!r.forced && !(r.proj_err < c1.factor * r.est_prev)) ++bad1;
        if (r.chi < c1.chi0 || r.chi > 1e6) ++out_of_range;
        forced += r.forced;
    }
    for (const auto& r : runs.algo2) {
        if (!r.forced && !(r.chi - r.band_q >= c2.chi0)) ++bad2;
        if (r.chi < c2.chi0 || r.chi > 1e6) ++out_of_range;
        forced += r.forced;
    }
    v.require(bad1 == 0, "(a) algo1 violations %ld", bad1);
    v.require(bad2 == 0, "(b) algo2 violations %ld", bad2);
    v.require(out_of_range == 0, "(c) chi outside [chi0, 1e6] %ld", out_of_range);
    v.require(serialized(runs.algo1) == serialized(runs.algo1_again) &&
                  serialized(runs.algo2) == serialized(runs.algo2_again),
              "(d) bit-identical reruns");
    v.detail += "; forced steps " + std::to_string(forced);
}

void observation_suite(Verdict& v) {
    const Grid g(64, 1.0);
    std::vector<std::unique_ptr<ObservationOperator>> ops;
    ops.push_back(std::make_unique<FourierLowPass>(10));
    ops.push_back(std::make_unique<CellAverage>(8));
    for (const auto& op : ops) {
        double idem = 0, adj = 0, pyth = 0, contraction = 0, ratio = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const int kmax = 1 + static_cast<int>(seed % 21);
            const auto a = random_field(g, kmax, 1.0, 1000 + seed);
            const auto b = random_field(g, 21, 1.0, 2000 + seed, false);
            const auto pa = op->project(a);
            const auto pb = op->project(b);
            const double na = l2_norm(a), nb = l2_norm(b);
            idem = std::max(idem, l2_norm(op->project(pa) - pa) / na);
            adj = std::max(adj, std::abs(inner(pa, b) - inner(a, pb)) / (na * nb));
            pyth = std::max(pyth, std::abs(std::pow(l2_norm(pa), 2) + std::pow(l2_norm(a - pa), 2) -
                                           na * na) /
                                      (na * na));
            contraction = std::max(contraction, l2_norm(pa) / na);
            ratio = std::max(ratio, interp_defect_ratio(*op, a) / (op->c1() * op->length_scale()));
        }
        const auto name = op->describe();
        v.require(idem <= 1e-12, "%s idempotence %.1e", name.c_str(), idem);
        v.require(adj <= 1e-10, "self-adjoint %.1e", adj);
        v.require(pyth <= 1e-10, "Pythagoras %.1e", pyth);
        v.require(contraction <= 1.0, "contraction %.6f", contraction);
        v.require(ratio <= 1.0, "defect/(c1 H) max %.4f", ratio);
    }
}

void saturation(Verdict& v, const SaturateRuns& runs) {
    const double t_final = runs.cfg1.t_final;
    for (const auto* rs : {&runs.algo1, &runs.algo2}) {
        const char* name = rs == &runs.algo1 ? "algo1" : "algo2";
        double peak = 0, peak_t = 0, low = INFINITY, plateau_lo = INFINITY, plateau_hi = 0,
               chi_top = 0;
        for (const auto& r : *rs) {
            if (r.t <= 1.0 && r.rel_err > peak) {
                peak = r.rel_err;
                peak_t = r.t;
            }
            chi_top = std::max(chi_top, r.chi);
        }
        for (const auto& r : *rs) {
            if (r.t > peak_t && r.t <= 2.0) low = std::min(low, r.rel_err);
            if (r.t >= 0.5 * t_final) {
                plateau_lo = std::min(plateau_lo, r.rel_err);
                plateau_hi = std::max(plateau_hi, r.rel_err);
            }
        }
        v.require(low <= 0.1 * peak, "%s drop %.2e -> %.2e by t=2", name, peak, low);
        v.require(plateau_lo >= 0.05 && plateau_hi <= 5.0, "%s plateau [%.3f, %.3f] in [0.05, 5]",
                  name, plateau_lo, plateau_hi);
        v.require(chi_top >= 1e6, "%s max chi %.3g reaches 1e6", name, chi_top);
    }
}

void initial_chi(Verdict& v) {
    ExperimentConfig base = preset("saturate");
    base.t_final = 3.0;
    const std::vector<double> chis{1.0, 10.0, 100.0, 1000.0};
    std::vector<std::future<double>> adaptive, constant;
    for (double chi : chis) {
        for (auto kind : {ControllerKind::Algo2, ControllerKind::Constant}) {
            ExperimentConfig c = base;
            c.controller.kind = kind;
            c.controller.chi0 = chi;
            auto job = std::async(std::launch::async, [c] {
                RunSummary s;
                run_twin(c, &s);
                return s.final_rel_err;
            });
            (kind == ControllerKind::Algo2 ? adaptive : constant).push_back(std::move(job));
        }
    }
    std::vector<double> a, k;
    for (auto& f : adaptive) a.push_back(f.get());
    for (auto& f : constant) k.push_back(f.get());
    const double span = *std::max_element(a.begin(), a.end()) / *std::min_element(a.begin(), a.end());
    v.require(span < 10.0, "algo2 final rel_err %.3e %.3e %.3e %.3e span x%.2f < 10", a[0], a[1],
              a[2], a[3], span);
    bool monotone = true;
    for (std::size_t i = 1; i < k.size(); ++i) monotone = monotone && k[i] < k[i - 1];
    v.require(monotone, "constant final rel_err %.3e %.3e %.3e %.3e decreasing", k[0], k[1], k[2],
              k[3]);
}

void conditions(Verdict& v) {
    auto r = h_condition(1.0, 1.0, 0.1, 10.0);
    v.require(r.ok && std::abs(r.slack - 0.8) < 1e-15, "h(chi=10) slack %.17g", r.slack);
    r = h_condition(1.0, 1.0, 0.1, 50.0);
    v.require(r.ok && r.slack == 0.0, "h(chi=50) slack %.3g", r.slack);
    r = chi_condition_2d(3.0, 0.5, 1.0, 1.0);
    v.require(r.ok && r.slack == 1.0, "chi2d slack %.3g", r.slack);
    r = chi_condition_2d(1.0 + 3.0 / (2.0 * 0.25), 0.25, 3.0, 1.0);
    v.require(r.ok && r.slack == 0.0, "chi2d boundary slack %.3g", r.slack);
    r = chi_condition_3d(1.0, 1.0, 0.0, 1.0);
    v.require(r.ok && r.slack == 1.0, "chi3d slack %.3g", r.slack);
    r = chi_condition_3d(1.0, 1.0, 19683.0 / 2048.0, 1.0);
    v.require(!r.ok && std::abs(r.slack + 1.0) < 1e-15, "chi3d cancellation slack %.3g", r.slack);
    r = refined_h_condition(10.0, 1.0, 1.0, 0.3, 0.3, 0.5);
    v.require(!r.ok && r.slack < 0.0, "refined degenerate slack %.3g", r.slack);

    const auto s2 = re_scalings(FlowScales{1.0, 1.0, 0.01, 1.0}, 2);
    v.require(std::abs(s2.chi_turnover - 2000.0) < 1e-9, "2d Re=100 chi T* %.6g", s2.chi_turnover);
    v.require(std::abs(s2.h_over_l - 3.16e-3) < 0.01e-3, "H/L %.4e", s2.h_over_l);
    const auto s3 = re_scalings(FlowScales{1.0, 1.0, 0.1, std::nullopt}, 3);
    v.require(std::abs(s3.chi_turnover - 1e4) < 1e-9 && std::abs(s3.h_over_l - 1e-3) < 1e-15,
              "3d Re=10 chi T* %.6g, H/L %.3g", s3.chi_turnover, s3.h_over_l);
}

}  // namespace

int main() {
    criterion(1, "temporal order 2", order_two);
    criterion(2, "same-resolution twin", same_resolution);
    criterion(3, "exponential error decay", guaranteed_decay);

    std::printf("running the saturate preset (algo1, algo2, and reruns)...\n");
    std::fflush(stdout);
    const auto start = std::chrono::steady_clock::now();
    const SaturateRuns runs = saturate_runs();
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    std::printf("saturate runs took %.1fs\n", took.count());

    criterion(4, "controller contracts", [&](Verdict& v) { controller_contracts(v, runs); });
    criterion(5, "observation operators", observation_suite);
    criterion(6, "saturation", [&](Verdict& v) { saturation(v, runs); });
    criterion(7, "initial-chi robustness", initial_chi);
    criterion(8, "condition evaluators", conditions);

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
