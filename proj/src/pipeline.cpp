#include "cerlens/pipeline.hpp"

#include <atomic>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <iostream>
#include <ostream>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>

#include "cerlens/cfg.hpp"
#include "cerlens/constructs.hpp"
#include "cerlens/corpus.hpp"
#include "cerlens/dynamics.hpp"
#include "cerlens/scoring.hpp"
#include "cerlens/syntax.hpp"

namespace cerlens {

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);
}

template <typename Map>
Map only_dataset(const Map& all, const std::string& dataset) {
    Map out;
    const std::string prefix = dataset + "/";
    for (const auto& [key, value] : all) {
        if (key.starts_with(prefix)) out.emplace(key, value);
    }
    return out;
}

OutcomeTable only_dataset(const OutcomeTable& table, const std::string& dataset) {
    OutcomeTable out;
    for (const auto& [model, outcomes] : table) out[model] = only_dataset(outcomes, dataset);
    return out;
}

std::filesystem::path trace_path(const Layout& layout, const Problem& p) {
    return layout.traces() / p.benchmark_id / (p.problem_id + ".json");
}

// Exit status of the child, or -1 if it could not be started.
int spawn(const std::vector<std::string>& argv) {
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    const pid_t pid = fork();
    if (pid < 0) return -1;
    if (pid == 0) {
        const int devnull = open("/dev/null", O_WRONLY);
        if (devnull >= 0) dup2(devnull, STDOUT_FILENO);
        execvp(args[0], args.data());
        _exit(127);
    }
    int status = 0;
    while (waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) return -1;
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

struct Program {
    const Problem* problem;
    SyntaxTree tree;
};

}  // namespace

std::optional<std::filesystem::path> find_executable(const std::string& program) {
    if (program.empty()) return std::nullopt;
    auto runnable = [](const std::filesystem::path& p) {
        std::error_code ec;
        return std::filesystem::is_regular_file(p, ec) && access(p.c_str(), X_OK) == 0;
    };
    if (program.find('/') != std::string::npos) {
        if (runnable(program)) return std::filesystem::path(program);
        return std::nullopt;
    }
    const char* path = std::getenv("PATH");
    std::stringstream dirs(path ? path : "");
    for (std::string dir; std::getline(dirs, dir, ':');) {
        const auto candidate = std::filesystem::path(dir.empty() ? "." : dir) / program;
        if (runnable(candidate)) return candidate;
    }
    return std::nullopt;
}

TraceSummary run_trace(const TraceOptions& options) {
    const auto tracer = find_executable(options.tracer);
    if (!tracer) throw HarnessMissing("tracer harness '" + options.tracer + "' not found on PATH");

    std::vector<Problem> problems;
    for (const auto& ds : options.datasets) {
        auto loaded = load_benchmark(options.layout.datasets(), ds);
        problems.insert(problems.end(), std::make_move_iterator(loaded.begin()),
                        std::make_move_iterator(loaded.end()));
    }

    TraceSummary summary;
    std::mutex mutex;
    parallel_for(problems.size(), options.jobs, [&](std::size_t i) {
        const Problem& p = problems[i];
        const auto out = trace_path(options.layout, p);
        if (!options.force && std::filesystem::exists(out)) {
            std::lock_guard lock(mutex);
            ++summary.skipped;
            return;
        }
        std::filesystem::create_directories(out.parent_path());
        std::vector<std::string> argv = {tracer->string(), "--problem-dir",
                                         (options.layout.datasets() / p.benchmark_id / p.problem_id).string(),
                                         "--out", out.string()};
        if (options.timeout_seconds) {
            argv.push_back("--timeout");
            argv.push_back(std::to_string(*options.timeout_seconds));
        }
        const int status = spawn(argv);
        std::string failure;
        if (status != 0) {
            failure = status < 0 ? "could not start tracer" : fmt::format("tracer exited with status {}", status);
        } else if (!std::filesystem::exists(out)) {
            failure = "tracer produced no trace file";
        } else {
            try {
                (void)load_trace(out);
            } catch (const Error& e) {
                failure = e.what();
            }
        }
        std::lock_guard lock(mutex);
        if (failure.empty()) {
            ++summary.written;
        } else {
            summary.failures.push_back(p.key() + ": " + failure);
        }
    });
    std::sort(summary.failures.begin(), summary.failures.end());
    return summary;
}

std::vector<ReportKind> parse_report_kind(std::string_view name) {
    if (name == "constructs") return {ReportKind::Constructs};
    if (name == "cc" || name == "cyclomatic") return {ReportKind::Cyclomatic};
    if (name == "cognitive") return {ReportKind::Cognitive};
    if (name == "loc") return {ReportKind::Loc};
    if (name == "loop-length" || name == "loop_length") return {ReportKind::LoopLength};
    if (name == "types") return {ReportKind::Types};
    if (name == "all") {
        return {ReportKind::Constructs, ReportKind::Cyclomatic, ReportKind::Cognitive,
                ReportKind::Loc,        ReportKind::LoopLength, ReportKind::Types};
    }
    throw Error("unknown analysis kind '" + std::string(name) + "'");
}

std::vector<AnalysisReport> run_analyze(const AnalyzeOptions& options, std::ostream* summary) {
    if (options.models.empty()) throw Error("at least one model is required");
    if (options.datasets.empty()) throw Error("at least one dataset is required");
    const Layout& layout = options.layout;

    std::vector<Problem> problems;
    for (const auto& ds : options.datasets) {
        auto loaded = load_benchmark(layout.datasets(), ds);
        problems.insert(problems.end(), std::make_move_iterator(loaded.begin()),
                        std::make_move_iterator(loaded.end()));
    }

    OutcomeTable outcomes;
    for (const auto& model : options.models) {
        for (const auto& ds : options.datasets) {
            const ResultSet set = load_results(layout.results() / result_filename(model, ds));
            for (const auto& p : problems) {
                if (p.benchmark_id != ds) continue;
                const auto it = set.records.find(p.problem_id);
                const PredictionRecord record =
                    it != set.records.end() ? it->second : PredictionRecord{p.problem_id, "", {}, {}, {}};
                outcomes[model][p.key()] = score_prediction(record, p);
            }
        }
    }

    // Parse every program once; static and dynamic analyses share the trees.
    std::vector<Program> programs(problems.size());
    parallel_for(problems.size(), options.jobs, [&](std::size_t i) {
        try {
            programs[i] = Program{&problems[i], parse_program(problems[i].source)};
        } catch (const ParseError& e) {
            throw AnalysisError(problems[i].key() + ": " + e.what());
        }
    });

    auto wants = [&](ReportKind k) {
        return std::find(options.kinds.begin(), options.kinds.end(), k) != options.kinds.end();
    };

    std::map<std::string, ConstructTags> tags;
    std::map<std::string, ComplexityProfile> complexity;
    std::map<std::string, DynamicProfile> dynamics;
    {
        std::vector<ConstructTags> tag_list(programs.size());
        std::vector<ComplexityProfile> complexity_list(programs.size());
        parallel_for(programs.size(), options.jobs, [&](std::size_t i) {
            tag_list[i] = tag_constructs(programs[i].tree);
            complexity_list[i] = complexity_profile(programs[i].tree, programs[i].problem->source);
        });
        for (std::size_t i = 0; i < programs.size(); ++i) {
            tags[programs[i].problem->key()] = tag_list[i];
            complexity[programs[i].problem->key()] = complexity_list[i];
        }
    }

    if (wants(ReportKind::LoopLength)) {
        if (options.trace) {
            TraceOptions tracing = options.tracing;
            tracing.layout = layout;
            tracing.datasets = options.datasets;
            tracing.jobs = options.jobs;
            const TraceSummary traced = run_trace(tracing);
            for (const auto& f : traced.failures) std::cerr << "trace failed: " << f << '\n';
        }
        std::vector<DynamicProfile> profile_list(programs.size());
        parallel_for(programs.size(), options.jobs, [&](std::size_t i) {
            const Problem& p = *programs[i].problem;
            const auto path = trace_path(layout, p);
            if (!std::filesystem::exists(path)) throw MissingFile(path);
            try {
                profile_list[i] = profile_from_trace(load_trace(path), programs[i].tree, options.loop_aggregation);
            } catch (const AnalysisError& e) {
                throw AnalysisError(p.key() + ": " + e.what());
            }
        });
        for (std::size_t i = 0; i < programs.size(); ++i) dynamics[programs[i].problem->key()] = profile_list[i];
    }

    auto build = [&](ReportKind kind, const OutcomeTable& table, const auto& select) {
        switch (kind) {
            case ReportKind::Constructs: return construct_report(select(tags), table, options.models);
            case ReportKind::Cyclomatic:
            case ReportKind::Cognitive:
                return complexity_report(select(complexity), table, options.models, kind,
                                         Bucketing::cyclomatic_default(), options.granularity);
            case ReportKind::Loc:
                return complexity_report(select(complexity), table, options.models, kind, Bucketing::loc_default(),
                                         options.granularity);
            case ReportKind::LoopLength:
                return loop_report(select(dynamics), table, options.models, Bucketing::loop_length_default(),
                                   options.granularity);
            case ReportKind::Types: return type_report(table, options.models);
        }
        throw Error("unhandled report kind");
    };

    std::vector<AnalysisReport> reports;
    for (ReportKind kind : options.kinds) {
        const auto dir = layout.figures() / figure_directory(kind);
        const std::string base(to_string(kind));
        AnalysisReport pooled = build(kind, outcomes, [](const auto& m) -> const auto& { return m; });
        pooled.datasets = options.datasets;
        write_report(pooled, dir, base);
        if (summary) *summary << to_table(pooled) << '\n';
        if (options.datasets.size() > 1) {
            for (const auto& ds : options.datasets) {
                AnalysisReport part =
                    build(kind, only_dataset(outcomes, ds), [&](const auto& m) { return only_dataset(m, ds); });
                part.datasets = {ds};
                write_report(part, dir, base + "_" + ds);
            }
        }
        reports.push_back(std::move(pooled));
    }
    return reports;
}

std::vector<ResultSet> run_collect(const CollectOptions& options) {
    validate(options.provider);
    std::vector<ResultSet> sets;
    for (const auto& ds : options.datasets) {
        const auto problems = load_benchmark(options.layout.datasets(), ds);
        sets.push_back(collect_predictions(options.provider, problems, options.layout.results()));
    }
    return sets;
}

ResultSet run_merge(const Layout& layout, const std::vector<std::filesystem::path>& inputs,
                    const std::string& model_id, const std::filesystem::path& output) {
    if (inputs.empty()) throw Error("--merge needs at least one result file");
    std::vector<ResultSet> sets;
    for (const auto& path : inputs) sets.push_back(load_results(path));
    const std::string dataset = sets.front().benchmark_id;
    for (const auto& s : sets) {
        if (s.benchmark_id != dataset) {
            throw MixedModelIds("cannot merge results for datasets " + dataset + " and " + s.benchmark_id);
        }
    }
    const auto problems = load_benchmark(layout.datasets(), dataset);
    std::map<std::string, const Problem*> by_id;
    for (const auto& p : problems) by_id[p.problem_id] = &p;

    std::vector<std::map<std::string, bool>> scores;
    for (auto& s : sets) {
        s.model_id = model_id;
        auto& score = scores.emplace_back();
        for (const auto& [id, record] : s.records) {
            const auto it = by_id.find(id);
            score[id] = it != by_id.end() && score_prediction(record, *it->second).correct;
        }
    }
    ResultSet merged = merge_results(sets, scores);
    write_results(output, merged);
    return merged;
}

}  // namespace cerlens
