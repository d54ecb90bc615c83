#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cerlens/gateway.hpp"
#include "cerlens/report.hpp"

namespace cerlens {

/// Directory conventions of an experiment checkout.
struct Layout {
    std::filesystem::path root = ".";

    std::filesystem::path datasets() const { return root / "dataset"; }
    std::filesystem::path results() const { return root / "Experiment_Results" / "ER" / "result_stat"; }
    std::filesystem::path figures() const { return root / "Experiment_Results" / "figures"; }
    std::filesystem::path traces() const { return root / "Experiment_Results" / "traces"; }
};

/// The external tracer executable could not be found (CLI exit code 5).
class HarnessMissing : public Error {
public:
    using Error::Error;
};

struct TraceOptions {
    Layout layout;
    std::vector<std::string> datasets;
    std::string tracer = "tracer";
    std::optional<int> timeout_seconds;
    bool force = false;
    std::size_t jobs = 1;
};

struct TraceSummary {
    std::size_t written = 0;
    std::size_t skipped = 0;
    /// "dataset/id: reason" for every problem the harness could not trace.
    std::vector<std::string> failures;
};

/// Looks `program` up on PATH (or checks it directly if it contains '/').
std::optional<std::filesystem::path> find_executable(const std::string& program);

TraceSummary run_trace(const TraceOptions& options);

/// Report kinds named on the command line: constructs, cc, cognitive, loc,
/// loop-length, types, all.
std::vector<ReportKind> parse_report_kind(std::string_view name);

struct AnalyzeOptions {
    Layout layout;
    std::vector<ReportKind> kinds;
    std::vector<std::string> models;
    std::vector<std::string> datasets;
    std::size_t jobs = 1;
    Granularity granularity = Granularity::Program;
    LoopAggregation loop_aggregation = LoopAggregation::Max;
    /// Run the tracer for programs without a trace before the loop analysis.
    bool trace = false;
    TraceOptions tracing;
};

/// Writes pooled reports to figures/<dir>/<kind>.{csv,json,svg} and, with
/// several datasets, per-dataset variants <kind>_<dataset>.*. Returns the
/// pooled reports in `kinds` order.
std::vector<AnalysisReport> run_analyze(const AnalyzeOptions& options, std::ostream* summary = nullptr);

struct CollectOptions {
    Layout layout;
    ProviderConfig provider;
    std::vector<std::string> datasets;
};

std::vector<ResultSet> run_collect(const CollectOptions& options);

/// Optimistically merges result files for one dataset under `model_id`,
/// scoring each against the dataset at `layout`.
ResultSet run_merge(const Layout& layout, const std::vector<std::filesystem::path>& inputs,
                    const std::string& model_id, const std::filesystem::path& output);

}  // namespace cerlens
