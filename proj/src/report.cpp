#include "cerlens/report.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#ifndef CERLENS_VERSION
#define CERLENS_VERSION "dev"
#endif

namespace cerlens {

namespace fs = std::filesystem;

std::string_view to_string(ReportKind kind) {
    switch (kind) {
        case ReportKind::Constructs: return "constructs";
        case ReportKind::Cyclomatic: return "cyclomatic";
        case ReportKind::Cognitive: return "cognitive";
        case ReportKind::Loc: return "loc";
        case ReportKind::LoopLength: return "loop_length";
        case ReportKind::Types: return "types";
    }
    return "constructs";
}

std::string_view figure_directory(ReportKind kind) {
    switch (kind) {
        case ReportKind::Constructs: return "constructs";
        case ReportKind::Cyclomatic: return "cyclomatic_complexity";
        case ReportKind::Cognitive: return "cognitive_complexity";
        case ReportKind::Loc: return "lines_of_code";
        case ReportKind::LoopLength: return "loop_length";
        case ReportKind::Types: return "types";
    }
    return "constructs";
}

std::string_view to_string(Granularity g) { return g == Granularity::Program ? "program" : "bucket"; }

const ReportRow* AnalysisReport::find(std::string_view model, std::string_view cluster) const {
    for (const auto& row : rows) {
        if (row.model == model && row.cluster == cluster) return &row;
    }
    return nullptr;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

const std::map<std::string, Outcome>& outcomes_for(const OutcomeTable& table, const std::string& model) {
    static const std::map<std::string, Outcome> empty;
    const auto it = table.find(model);
    return it == table.end() ? empty : it->second;
}

// Shared by the complexity and loop-length reports.
AnalysisReport bucketed_report(ReportKind kind, const std::map<std::string, double>& values,
                               const OutcomeTable& outcomes, const std::vector<std::string>& models,
                               const Bucketing& bucketing, Granularity granularity) {
    AnalysisReport report;
    report.kind = kind;
    report.models = models;
    report.bucketing = bucketing;
    report.granularity = granularity;

    const auto buckets = bucketize(values, bucketing);
    for (const auto& [index, ids] : buckets) report.clusters.push_back(bucketing.labels[index]);

    for (const auto& model : models) {
        const auto& table = outcomes_for(outcomes, model);
        std::vector<double> bucket_index;
        std::vector<double> bucket_accuracy;
        std::vector<ReportRow> model_rows;
        for (const auto& [index, ids] : buckets) {
            ReportRow row{model, bucketing.labels[index], 0, 0, std::nullopt, std::nullopt};
            for (const auto& id : ids) {
                const auto it = table.find(id);
                if (it == table.end()) continue;
                ++row.n;
                row.n_correct += it->second.correct;
            }
            row.accuracy = ratio(row.n_correct, row.n);
            if (row.accuracy) {
                bucket_index.push_back(static_cast<double>(index));
                bucket_accuracy.push_back(*row.accuracy);
            }
            model_rows.push_back(std::move(row));
        }

        std::optional<double> rho;
        try {
            rho = granularity == Granularity::Program ? correlate_property(values, table)
                                                      : spearman_rho(bucket_index, bucket_accuracy);
        } catch (const DegenerateInput&) {
            rho = std::nullopt;
        }
        report.rho[model] = rho;
        for (auto& row : model_rows) {
            row.rho = rho;
            report.rows.push_back(std::move(row));
        }
    }
    report.chart = render_svg(report);
    return report;
}

}  // namespace

AnalysisReport construct_report(const std::map<std::string, ConstructTags>& tags,
                                const OutcomeTable& outcomes, const std::vector<std::string>& models) {
    AnalysisReport report;
    report.kind = ReportKind::Constructs;
    report.models = models;

    std::set<ConstructTag> present;
    for (const auto& [id, t] : tags) present.insert(t.begin(), t.end());
    for (auto tag : kAllConstructTags) {
        if (present.contains(tag)) report.clusters.emplace_back(abbreviation(tag));
    }

    for (const auto& model : models) {
        const auto& table = outcomes_for(outcomes, model);
        for (auto tag : kAllConstructTags) {
            if (!present.contains(tag)) continue;
            ReportRow row{model, std::string(abbreviation(tag)), 0, 0, std::nullopt, std::nullopt};
            for (const auto& [id, t] : tags) {
                if (!t.contains(tag)) continue;
                const auto it = table.find(id);
                if (it == table.end()) continue;
                ++row.n;
                row.n_correct += it->second.correct;
            }
            row.accuracy = ratio(row.n_correct, row.n);
            report.rows.push_back(std::move(row));
        }
    }
    report.chart = render_svg(report);
    return report;
}

AnalysisReport complexity_report(const std::map<std::string, ComplexityProfile>& profiles,
                                 const OutcomeTable& outcomes, const std::vector<std::string>& models,
                                 ReportKind metric, const Bucketing& bucketing, Granularity granularity) {
    std::map<std::string, double> values;
    for (const auto& [id, p] : profiles) {
        switch (metric) {
            case ReportKind::Cyclomatic: values[id] = static_cast<double>(p.cyclomatic); break;
            case ReportKind::Cognitive: values[id] = static_cast<double>(p.cognitive); break;
            case ReportKind::Loc: values[id] = static_cast<double>(p.loc); break;
            default: throw Error("complexity_report: metric must be cyclomatic, cognitive or loc");
        }
    }
    return bucketed_report(metric, values, outcomes, models, bucketing, granularity);
}

AnalysisReport loop_report(const std::map<std::string, DynamicProfile>& profiles,
                           const OutcomeTable& outcomes, const std::vector<std::string>& models,
                           const Bucketing& bucketing, Granularity granularity) {
    std::map<std::string, double> values;
    for (const auto& [id, p] : profiles) values[id] = static_cast<double>(p.program_loop_length);
    return bucketed_report(ReportKind::LoopLength, values, outcomes, models, bucketing, granularity);
}

AnalysisReport type_report(const OutcomeTable& outcomes, const std::vector<std::string>& models) {
    AnalysisReport report;
    report.kind = ReportKind::Types;
    report.models = models;

    std::set<ValueCategory> present;
    for (const auto& model : models) {
        for (const auto& [id, o] : outcomes_for(outcomes, model)) present.insert(o.expected_category);
    }
    for (auto category : kAllValueCategories) {
        if (present.contains(category)) report.clusters.emplace_back(to_string(category));
    }

    for (const auto& model : models) {
        const auto& table = outcomes_for(outcomes, model);
        for (auto category : kAllValueCategories) {
            if (!present.contains(category)) continue;
            std::size_t n = 0;
            std::size_t tm = 0;
            std::size_t vm = 0;
            for (const auto& [id, o] : table) {
                if (o.expected_category != category) continue;
                ++n;
                tm += o.type_match;
                vm += o.value_match;
            }
            const std::string name(to_string(category));
            report.rows.push_back({model, "TM:" + name, n, tm, ratio(tm, n), std::nullopt});
            report.rows.push_back({model, "VM:" + name, n, vm, ratio(vm, n), std::nullopt});
        }
    }
    report.chart = render_svg(report);
    return report;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_fraction(const std::optional<double>& v) {
    return v ? fmt::format("{:.6f}", *v) : std::string{};
}

std::string format_rho(const AnalysisReport& report, const ReportRow& row) {
    if (!report.has_rho()) return {};
    return row.rho ? fmt::format("{:.6f}", *row.rho) : std::string("n/a");
}

}  // namespace

std::string to_csv(const AnalysisReport& report) {
    std::string out = "kind,model,cluster,n,n_correct,accuracy,rho\n";
    for (const auto& row : report.rows) {
        out += fmt::format("{},{},{},{},{},{},{}\n", to_string(report.kind), csv_field(row.model),
                           csv_field(row.cluster), row.n, row.n_correct, format_fraction(row.accuracy),
                           format_rho(report, row));
    }
    return out;
}

nlohmann::json to_json(const AnalysisReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json r = {{"kind", to_string(report.kind)},
                            {"model", row.model},
                            {"cluster", row.cluster},
                            {"n", row.n},
                            {"n_correct", row.n_correct},
                            {"accuracy", nullptr},
                            {"rho", nullptr}};
        if (row.accuracy) r["accuracy"] = *row.accuracy;
        if (report.has_rho()) r["rho"] = row.rho ? nlohmann::json(*row.rho) : nlohmann::json("n/a");
        rows.push_back(std::move(r));
    }
    nlohmann::json meta = {{"tool", "cerlens"},
                           {"tool_version", CERLENS_VERSION},
                           {"kind", to_string(report.kind)},
                           {"models", report.models},
                           {"datasets", report.datasets},
                           {"clusters", report.clusters}};
    if (report.bucketing) {
        meta["bucketing"] = {{"edges", report.bucketing->edges},
                             {"labels", report.bucketing->labels},
                             {"overflow", report.bucketing->overflow}};
        meta["correlation"] = {{"method", "spearman"}, {"granularity", to_string(report.granularity)}};
    }
    return {{"metadata", std::move(meta)}, {"rows", std::move(rows)}};
}

std::string to_table(const AnalysisReport& report) {
    std::string out = fmt::format("{:<12} {:<20} {:<14} {:>6} {:>9} {:>9}", "kind", "model", "cluster", "n",
                                  "n_correct", "accuracy");
    if (report.has_rho()) out += fmt::format(" {:>10}", "rho");
    out += '\n';
    for (const auto& row : report.rows) {
        out += fmt::format("{:<12} {:<20} {:<14} {:>6} {:>9} {:>9}", to_string(report.kind), row.model,
                           row.cluster, row.n, row.n_correct,
                           row.accuracy ? fmt::format("{:.3f}", *row.accuracy) : std::string("-"));
        if (report.has_rho()) {
            out += fmt::format(" {:>10}", row.rho ? fmt::format("{:.4f}", *row.rho) : std::string("n/a"));
        }
        out += '\n';
    }
    return out;
}

void write_report(const AnalysisReport& report, const fs::path& dir, const std::string& basename) {
    fs::create_directories(dir);
    auto write = [&](const std::string& ext, const std::string& bytes) {
        const fs::path path = dir / (basename + ext);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + path.string());
        out << bytes;
    };
    write(".csv", to_csv(report));
    write(".json", to_json(report).dump(2) + "\n");
    write(".svg", report.chart.empty() ? render_svg(report) : report.chart);
}

}  // namespace cerlens
