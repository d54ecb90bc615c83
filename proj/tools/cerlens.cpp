// Command-line entry point: analyze, trace and collect over an experiment tree.
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cerlens/gateway.hpp"
#include "cerlens/pipeline.hpp"
#include "cerlens/syntax.hpp"

namespace {

enum Exit { kOk = 0, kBadArguments = 2, kMissingData = 3, kAnalysisFailure = 4, kHarnessMissing = 5 };

struct Globals {
    std::string root = ".";
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    bool verbose = false;
};

struct AnalyzeArgs {
    std::string kind;
    std::vector<std::string> models;
    std::vector<std::string> datasets;
    std::string granularity = "program";
    std::string loop_aggregation = "max";
    bool trace = false;
    std::string tracer = "tracer";
    int timeout = 0;
};

struct TraceArgs {
    std::vector<std::string> datasets;
    std::string tracer = "tracer";
    int timeout = 0;
    bool force = false;
};

struct CollectArgs {
    std::string model;
    std::vector<std::string> datasets;
    std::string provider = "http_chat";
    std::string endpoint = cerlens::ProviderConfig{}.endpoint;
    std::string api_key_env = cerlens::ProviderConfig{}.api_key_env;
    double temperature = 0.0;
    int max_tokens = 1024;
    std::string mock_fixture;
    double request_timeout = 60.0;
    int retries = 3;
    double backoff = 1.0;
    std::size_t concurrency = 4;
    double rpm = 0;
    std::vector<std::string> merge;
    std::string out;
    bool print_hashes = false;
};

int analyze(const Globals& g, const AnalyzeArgs& a) {
    cerlens::AnalyzeOptions options;
    options.layout.root = g.root;
    options.kinds = cerlens::parse_report_kind(a.kind);
    options.models = a.models;
    options.datasets = a.datasets;
    options.jobs = g.jobs;
    options.granularity = a.granularity == "bucket" ? cerlens::Granularity::Bucket : cerlens::Granularity::Program;
    options.loop_aggregation =
        a.loop_aggregation == "sum" ? cerlens::LoopAggregation::Sum : cerlens::LoopAggregation::Max;
    options.trace = a.trace;
    options.tracing.tracer = a.tracer;
    if (a.timeout > 0) options.tracing.timeout_seconds = a.timeout;
    cerlens::run_analyze(options, &std::cout);
    return kOk;
}

int trace(const Globals& g, const TraceArgs& a) {
    cerlens::TraceOptions options;
    options.layout.root = g.root;
    options.datasets = a.datasets;
    options.tracer = a.tracer;
    if (a.timeout > 0) options.timeout_seconds = a.timeout;
    options.force = a.force;
    options.jobs = g.jobs;
    const auto summary = cerlens::run_trace(options);
    fmt::print("traced {} program(s), skipped {} existing, {} failure(s)\n", summary.written, summary.skipped,
               summary.failures.size());
    for (const auto& f : summary.failures) fmt::print(stderr, "  {}\n", f);
    return kOk;
}

int collect(const Globals& g, const CollectArgs& a) {
    cerlens::Layout layout;
    layout.root = g.root;
    if (!a.merge.empty()) {
        const std::filesystem::path out =
            a.out.empty() ? std::filesystem::path()
                          : std::filesystem::path(a.out);
        std::vector<std::filesystem::path> inputs(a.merge.begin(), a.merge.end());
        std::filesystem::path target = out;
        if (target.empty()) {
            const auto first = cerlens::load_results(inputs.front());
            target = layout.results() / cerlens::result_filename(a.model, first.benchmark_id);
        }
        const auto merged = cerlens::run_merge(layout, inputs, a.model, target);
        fmt::print("merged {} file(s) into {} ({} records)\n", inputs.size(), target.string(), merged.records.size());
        return kOk;
    }
    if (a.print_hashes) {
        for (const auto& ds : a.datasets) {
            for (const auto& p : cerlens::load_benchmark(layout.datasets(), ds)) {
                fmt::print("{} {}\n", p.key(), cerlens::prompt_hash(cerlens::build_prompt(p)));
            }
        }
        return kOk;
    }

    cerlens::CollectOptions options;
    options.layout = layout;
    options.datasets = a.datasets;
    auto& p = options.provider;
    p.model_id = a.model;
    p.kind = *cerlens::provider_kind_from_string(a.provider);
    p.endpoint = a.endpoint;
    p.api_key_env = a.api_key_env;
    p.temperature = a.temperature;
    p.max_tokens = a.max_tokens;
    p.mock_fixture = a.mock_fixture;
    p.timeout = std::chrono::milliseconds(static_cast<long>(a.request_timeout * 1000));
    p.max_retries = a.retries;
    p.backoff = std::chrono::milliseconds(static_cast<long>(a.backoff * 1000));
    p.concurrency = a.concurrency;
    p.requests_per_minute = a.rpm;
    p.verbose = g.verbose;
    for (const auto& set : cerlens::run_collect(options)) {
        std::size_t failed = 0;
        for (const auto& [id, r] : set.records) failed += r.error ? 1 : 0;
        fmt::print("{}: {} record(s), {} failed -> {}\n", cerlens::result_filename(set.model_id, set.benchmark_id),
                   set.records.size(), failed, layout.results().string());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relate program properties to LLM output-prediction success."};
    app.set_version_flag("--version", CERLENS_VERSION);
    app.set_config("--config", "", "Flat key = value file; subcommand keys go under [analyze], [trace], [collect]");
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--root", g.root, "Experiment root holding dataset/ and Experiment_Results/")
        ->capture_default_str();
    app.add_option("--jobs,-j", g.jobs, "Worker threads for per-program analysis and tracing")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_flag("--verbose,-v", g.verbose, "Log provider requests and responses (API keys redacted)");

    AnalyzeArgs aa;
    auto* analyze_cmd = app.add_subcommand("analyze", "Write reports under Experiment_Results/figures/");
    analyze_cmd->add_option("kind", aa.kind, "constructs, cc, cognitive, loc, loop-length, types or all")
        ->required()
        ->check(CLI::IsMember({"constructs", "cc", "cognitive", "loc", "loop-length", "types", "all"}));
    analyze_cmd->add_option("--models,-m", aa.models, "Model ids (result files {MODEL}_{DATASET}.json)")
        ->required()
        ->delimiter(',');
    analyze_cmd->add_option("--datasets,-d", aa.datasets, "Dataset directories under dataset/")
        ->required()
        ->delimiter(',');
    analyze_cmd->add_option("--granularity", aa.granularity, "Spearman pairing: per program or per bucket")
        ->check(CLI::IsMember({"program", "bucket"}))
        ->capture_default_str();
    analyze_cmd->add_option("--loop-aggregation", aa.loop_aggregation, "Combine loop sites by max or sum")
        ->check(CLI::IsMember({"max", "sum"}))
        ->capture_default_str();
    analyze_cmd->add_flag("--trace", aa.trace, "Run the tracer for programs that have no trace yet");
    analyze_cmd->add_option("--tracer", aa.tracer, "Tracer executable")->capture_default_str();
    analyze_cmd->add_option("--timeout", aa.timeout, "Per-program tracer timeout in seconds (0 = tracer default)")
        ->check(CLI::NonNegativeNumber);

    TraceArgs ta;
    auto* trace_cmd = app.add_subcommand("trace", "Record execution traces under Experiment_Results/traces/");
    trace_cmd->add_option("--datasets,-d", ta.datasets, "Datasets to trace")->required()->delimiter(',');
    trace_cmd->add_option("--tracer", ta.tracer, "Tracer executable")->capture_default_str();
    trace_cmd->add_option("--timeout", ta.timeout, "Per-program timeout in seconds (0 = tracer default)")
        ->check(CLI::NonNegativeNumber);
    trace_cmd->add_flag("--force", ta.force, "Re-trace programs that already have a trace");

    CollectArgs ca;
    auto* collect_cmd = app.add_subcommand("collect", "Query a model for output predictions");
    collect_cmd->add_option("--model", ca.model, "Model id used in requests and file names")->required();
    collect_cmd->add_option("--datasets,-d", ca.datasets, "Datasets to query")->delimiter(',');
    collect_cmd->add_option("--provider", ca.provider, "http_chat or mock")
        ->check(CLI::IsMember({"http_chat", "mock"}))
        ->capture_default_str();
    collect_cmd->add_option("--endpoint", ca.endpoint, "OpenAI-compatible chat completions URL")
        ->capture_default_str();
    collect_cmd->add_option("--api-key-env", ca.api_key_env, "Environment variable holding the API key")
        ->capture_default_str();
    collect_cmd->add_option("--temperature", ca.temperature, "Sampling temperature")->capture_default_str();
    collect_cmd->add_option("--max-tokens", ca.max_tokens, "Completion token limit")->capture_default_str();
    collect_cmd->add_option("--mock-fixture", ca.mock_fixture, "JSON map of prompt hash to canned response");
    collect_cmd->add_option("--request-timeout", ca.request_timeout, "Seconds per HTTP request")
        ->capture_default_str();
    collect_cmd->add_option("--retries", ca.retries, "Retries on 408, 429, 5xx and connection errors")
        ->capture_default_str();
    collect_cmd->add_option("--backoff", ca.backoff, "Seconds before the first retry, doubled per retry")
        ->capture_default_str();
    collect_cmd->add_option("--concurrency", ca.concurrency, "Concurrent requests")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    collect_cmd->add_option("--rpm", ca.rpm, "Request rate limit per minute (0 = unlimited)")->capture_default_str();
    collect_cmd->add_option("--merge", ca.merge, "Result files to merge optimistically under --model")
        ->check(CLI::ExistingFile);
    collect_cmd->add_option("--out", ca.out, "Output path for --merge (default: result_stat/{MODEL}_{DATASET}.json)");
    collect_cmd->add_flag("--print-hashes", ca.print_hashes, "Print the prompt hash of every problem and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadArguments;
    }

    try {
        if (*analyze_cmd) return analyze(g, aa);
        if (*trace_cmd) return trace(g, ta);
        if (collect_cmd->parsed() && ca.merge.empty() && ca.datasets.empty()) {
            fmt::print(stderr, "collect: --datasets is required unless --merge is given\n");
            return kBadArguments;
        }
        return collect(g, ca);
    } catch (const cerlens::MissingApiKey& e) {
        fmt::print(stderr, "error: MissingApiKey: {}\n", e.what());
        return kBadArguments;
    } catch (const cerlens::HarnessMissing& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kHarnessMissing;
    } catch (const cerlens::DataError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kMissingData;
    } catch (const cerlens::MixedModelIds& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kMissingData;
    } catch (const cerlens::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kAnalysisFailure;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kAnalysisFailure;
    }
}
