#pragma once

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "nudge/conditions.hpp"
#include "nudge/experiment_config.hpp"
#include "nudge/harness.hpp"
#include "nudge/step_record.hpp"

namespace nudge {

inline constexpr const char* kRecordHeader =
    "step,t,chi,err_l2,rel_err,proj_err,rel_proj_err,grad_v_sq,repeats";
inline constexpr const char* kConvergenceHeader = "dt,final_err,rate,chi_max_observed";

/// 17 significant digits: parses back to the same double.
std::string format_double(double x);

std::string format_record(const StepRecord& r);
StepRecord parse_record(const std::string& line);

/// Writes the header and one row per record. Throws IoError naming the path.
void emit_csv(const std::vector<StepRecord>& records, const std::filesystem::path& path);
std::vector<StepRecord> read_csv(const std::filesystem::path& path);

/// Streams rows as they are produced.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);
    void write(const StepRecord& r);
    void close();

private:
    std::filesystem::path path_;
    struct Closer {
        void operator()(std::FILE* f) const;
    };
    std::unique_ptr<std::FILE, Closer> handle_;
};

void emit_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::filesystem::path& path);

std::string report_json(const ExperimentConfig& cfg, const ConditionReport& conditions,
                        const RunSummary& summary);
std::string conditions_json(const ConditionInputs& in, const ConditionReport& report);

/// Run report: configuration, summary, and the condition evaluators.
void emit_report(const ExperimentConfig& cfg, const ConditionReport& conditions,
                 const RunSummary& summary, const std::filesystem::path& path);

/// Creates the parent directories of `path`; throws IoError on failure.
void ensure_parent_dir(const std::filesystem::path& path);

}  // namespace nudge
