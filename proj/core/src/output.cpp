#include "nudge/output.hpp"

#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nudge/errors.hpp"

namespace nudge {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_record(const StepRecord& r) {
    std::string line = std::to_string(r.step);
    for (double v : {r.t, r.chi, r.err_l2, r.rel_err, r.proj_err, r.rel_proj_err, r.grad_v_sq}) {
        line += ',';
        line += format_double(v);
    }
    line += ',';
    line += std::to_string(r.repeats);
    return line;
}

StepRecord parse_record(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (cells.size() != 9) {
        throw std::invalid_argument("record row needs 9 fields, got " + std::to_string(cells.size()));
    }
    auto number = [&](std::size_t i) {
        char* end = nullptr;
        const double v = std::strtod(cells[i].c_str(), &end);
        if (end == cells[i].c_str() || *end != '\0') {
            throw std::invalid_argument("bad numeric field '" + cells[i] + "'");
        }
        return v;
    };
    StepRecord r;
    r.step = std::stol(cells[0]);
    r.t = number(1);
    r.chi = number(2);
    r.err_l2 = number(3);
    r.rel_err = number(4);
    r.proj_err = number(5);
    r.rel_proj_err = number(6);
    r.grad_v_sq = number(7);
    r.repeats = std::stoi(cells[8]);
    return r;
}

void ensure_parent_dir(const std::filesystem::path& path) {
    const auto parent = path.parent_path();
    if (parent.empty()) {
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) {
        throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
    }
}

void CsvWriter::Closer::operator()(std::FILE* f) const {
    if (f != nullptr) {
        std::fclose(f);
    }
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path) {
    ensure_parent_dir(path);
    handle_.reset(std::fopen(path.c_str(), "w"));
    if (!handle_) {
        throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
    }
    if (std::fprintf(handle_.get(), "%s\n", kRecordHeader) < 0) {
        throw IoError("write failed on " + path_.string());
    }
}

void CsvWriter::write(const StepRecord& r) {
    if (!handle_ || std::fprintf(handle_.get(), "%s\n", format_record(r).c_str()) < 0) {
        throw IoError("write failed on " + path_.string());
    }
}

void CsvWriter::close() {
    if (handle_) {
        std::FILE* f = handle_.release();
        if (std::fclose(f) != 0) {
            throw IoError("closing " + path_.string() + " failed");
        }
    }
}

void emit_csv(const std::vector<StepRecord>& records, const std::filesystem::path& path) {
    CsvWriter writer(path);
    for (const auto& r : records) {
        writer.write(r);
    }
    writer.close();
}

std::vector<StepRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != kRecordHeader) {
        throw IoError(path.string() + ": missing or unexpected CSV header");
    }
    std::vector<StepRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        try {
            records.push_back(parse_record(line));
        } catch (const std::exception& e) {
            throw IoError(path.string() + ": " + e.what());
        }
    }
    return records;
}

void emit_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::filesystem::path& path) {
    ensure_parent_dir(path);
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << kConvergenceHeader << '\n';
    for (const auto& r : rows) {
        out << format_double(r.dt) << ',' << format_double(r.final_err) << ','
            << (r.rate ? format_double(*r.rate) : std::string{}) << ','
            << format_double(r.chi_max_observed) << '\n';
    }
    if (!out) {
        throw IoError("write failed on " + path.string());
    }
}

namespace {

json to_json(const ConditionResult& r) { return json{{"ok", r.ok}, {"slack", r.slack}}; }

json to_json(const ScalingRecommendation& s) {
    return json{{"dim", s.dim},           {"reynolds", s.reynolds}, {"chi_turnover", s.chi_turnover},
                {"chi_min", s.chi_min},   {"h_over_l", s.h_over_l}, {"h_max", s.h_max},
                {"note", "order-of-magnitude phenomenology, not enforced"}};
}

json to_json(const ConditionReport& r) {
    json j;
    j["h_condition"] = to_json(r.h);
    j["chi_condition_2d"] = to_json(r.chi2d);
    j["chi_condition_3d"] = to_json(r.chi3d);
    j["refined_h_condition"] = r.refined ? to_json(*r.refined) : json(nullptr);
    j["max_admissible_chi"] = r.max_admissible_chi;
    j["scaling_2d"] = r.scaling2d ? to_json(*r.scaling2d) : json(nullptr);
    j["scaling_3d"] = r.scaling3d ? to_json(*r.scaling3d) : json(nullptr);
    return j;
}

json to_json(const ConditionInputs& in) {
    json j{{"nu", in.nu},         {"c1", in.c1},
           {"H", in.h},           {"chi", in.chi},
           {"chi0", in.chi0},     {"avg_grad_sq", in.avg_grad_sq},
           {"avg_grad_4", in.avg_grad_4}};
    j["lambda_t_e"] = in.lambda_t_e ? json(*in.lambda_t_e) : json(nullptr);
    if (in.scales) {
        j["scales"] = json{{"L", in.scales->length},
                           {"U", in.scales->velocity},
                           {"nu", in.scales->nu},
                           {"kf", in.scales->kf ? json(*in.scales->kf) : json(nullptr)}};
    }
    return j;
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["model"] = {{"kind", to_string(c.model.kind)},
                  {"k_f", c.model.k_f},
                  {"amplitude", c.model.amplitude},
                  {"ramp", c.model.ramp},
                  {"profile", c.model.profile == TimeProfile::Exponential ? "exponential" : "linear"}};
    j["nu"] = c.nu;
    j["grid_n"] = c.grid_n;
    j["length"] = c.length;
    j["truth"] = {{"kind", to_string(c.truth.kind)},
                  {"grid_n_fine", c.truth.grid_n_fine},
                  {"substeps", c.truth.substeps},
                  {"u0_amplitude", c.truth.u0_amplitude},
                  {"u0_kmax", c.truth.u0_kmax}};
    j["dt"] = c.dt;
    j["t_final"] = c.t_final;
    j["observer"] = {{"kind", to_string(c.observer.kind)},
                     {c.observer.kind == ObserverKind::Fourier ? "k" : "m", c.observer.resolution}};
    j["controller"] = {{"kind", to_string(c.controller.kind)}, {"chi0", c.controller.chi0},
                       {"chi_max", c.controller.chi_max},     {"factor", c.controller.factor},
                       {"tol", c.controller.tol},             {"max_repeats", c.controller.max_repeats}};
    j["v0"] = {{"kind", to_string(c.v0.kind)},
               {"seed", c.v0.seed.value_or(c.seed + 1)},
               {"amplitude", c.v0.amplitude},
               {"kmax", c.v0.kmax}};
    j["seed"] = c.seed;
    j["output_path"] = c.output_path;
    if (!c.dt_list.empty()) {
        j["dt_list"] = c.dt_list;
    }
    return j;
}

json to_json(const RunSummary& s) {
    return json{{"steps", s.steps},
                {"initial_err", s.initial_err},
                {"initial_rel_err", s.initial_rel_err},
                {"final_err", s.final_err},
                {"final_rel_err", s.final_rel_err},
                {"chi_max_observed", s.chi_max_observed},
                {"chi_final", s.chi_final},
                {"total_repeats", s.total_repeats},
                {"forced_steps", s.forced_steps},
                {"truth_avg_grad_sq", s.truth_avg_grad_sq},
                {"truth_avg_grad_4", s.truth_avg_grad_4},
                {"truth_avg_energy", s.truth_avg_energy},
                {"final_lambda_t_err", std::isfinite(s.final_lambda_t_err)
                                           ? json(s.final_lambda_t_err)
                                           : json(nullptr)}};
}

}  // namespace

std::string conditions_json(const ConditionInputs& in, const ConditionReport& report) {
    return json{{"inputs", to_json(in)}, {"conditions", to_json(report)}}.dump(2);
}

std::string report_json(const ExperimentConfig& cfg, const ConditionReport& conditions,
                        const RunSummary& summary) {
    json j;
    j["config"] = to_json(cfg);
    j["summary"] = to_json(summary);
    j["condition_inputs"] = to_json(condition_inputs(cfg, summary));
    j["conditions"] = to_json(conditions);
    return j.dump(2);
}

void emit_report(const ExperimentConfig& cfg, const ConditionReport& conditions,
                 const RunSummary& summary, const std::filesystem::path& path) {
    ensure_parent_dir(path);
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << report_json(cfg, conditions, summary) << '\n';
    if (!out) {
        throw IoError("write failed on " + path.string());
    }
}

}  // namespace nudge
