#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cerlens/cfg.hpp"
#include "cerlens/constructs.hpp"
#include "cerlens/dynamics.hpp"
#include "cerlens/scoring.hpp"
#include "cerlens/stats.hpp"

namespace cerlens {

enum class ReportKind { Constructs, Cyclomatic, Cognitive, Loc, LoopLength, Types };

std::string_view to_string(ReportKind kind);
/// Directory under Experiment_Results/figures/ holding the report's files.
std::string_view figure_directory(ReportKind kind);

/// Whether rho pairs each program's value with its 0/1 success (default) or
/// each occupied bucket's index with its accuracy.
enum class Granularity { Program, Bucket };
std::string_view to_string(Granularity g);

struct ReportRow {
    std::string model;
    std::string cluster;
    std::size_t n = 0;
    std::size_t n_correct = 0;
    /// Absent for empty clusters.
    std::optional<double> accuracy;
    /// Absent when the coefficient is degenerate ("n/a") or not applicable.
    std::optional<double> rho;
};

struct AnalysisReport {
    ReportKind kind = ReportKind::Constructs;
    std::vector<std::string> models;
    std::vector<std::string> clusters;
    std::vector<ReportRow> rows;
    std::optional<Bucketing> bucketing;
    Granularity granularity = Granularity::Program;
    /// Per-model coefficient for bucketed kinds; nullopt = degenerate.
    std::map<std::string, std::optional<double>> rho;
    std::vector<std::string> datasets;
    std::string chart;

    bool has_rho() const { return bucketing.has_value(); }
    const ReportRow* find(std::string_view model, std::string_view cluster) const;
};

/// model -> program key -> outcome.
using OutcomeTable = std::map<std::string, std::map<std::string, Outcome>>;

AnalysisReport construct_report(const std::map<std::string, ConstructTags>& tags,
                                const OutcomeTable& outcomes, const std::vector<std::string>& models);

/// `metric` is one of Cyclomatic, Cognitive, Loc.
AnalysisReport complexity_report(const std::map<std::string, ComplexityProfile>& profiles,
                                 const OutcomeTable& outcomes, const std::vector<std::string>& models,
                                 ReportKind metric, const Bucketing& bucketing,
                                 Granularity granularity = Granularity::Program);

AnalysisReport loop_report(const std::map<std::string, DynamicProfile>& profiles,
                           const OutcomeTable& outcomes, const std::vector<std::string>& models,
                           const Bucketing& bucketing = Bucketing::loop_length_default(),
                           Granularity granularity = Granularity::Program);

/// Rows "TM:<Category>" and "VM:<Category>" per model; n is the number of
/// programs whose expected output has that category.
AnalysisReport type_report(const OutcomeTable& outcomes, const std::vector<std::string>& models);

std::string to_csv(const AnalysisReport& report);
nlohmann::json to_json(const AnalysisReport& report);
/// Plain-text summary table for the terminal.
std::string to_table(const AnalysisReport& report);
std::string render_svg(const AnalysisReport& report);

/// Writes <basename>.csv, <basename>.json and <basename>.svg into `dir`.
void write_report(const AnalysisReport& report, const std::filesystem::path& dir,
                  const std::string& basename);

}  // namespace cerlens
