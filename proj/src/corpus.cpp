#include "cerlens/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace cerlens {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UnreadableSource("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw UnreadableSource("read failed: " + path.string());
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << bytes;
    if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace

std::vector<Problem> load_benchmark(const fs::path& root_dir, const std::string& benchmark_id) {
    const fs::path bench_dir = root_dir / benchmark_id;
    std::error_code ec;
    if (!fs::is_directory(bench_dir, ec)) throw MissingFile(bench_dir);

    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(bench_dir)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());

    std::vector<Problem> problems;
    problems.reserve(dirs.size());
    for (const auto& dir : dirs) {
        Problem p;
        p.benchmark_id = benchmark_id;
        p.problem_id = dir.filename().string();

        const fs::path source_path = dir / "main.py";
        const fs::path output_path = dir / "output.txt";
        const fs::path input_path = dir / "input.txt";
        if (!fs::exists(source_path)) throw MissingFile(source_path);
        if (!fs::exists(output_path)) throw MissingFile(output_path);

        p.source = read_file(source_path);
        if (p.source.empty()) throw UnreadableSource("empty source: " + source_path.string());
        p.expected_output = read_file(output_path);
        if (fs::exists(input_path)) p.input_text = read_file(input_path);
        problems.push_back(std::move(p));
    }
    return problems;
}

void write_problem(const fs::path& root_dir, const Problem& problem) {
    const fs::path dir = root_dir / problem.benchmark_id / problem.problem_id;
    fs::create_directories(dir);
    write_file(dir / "main.py", problem.source);
    write_file(dir / "output.txt", problem.expected_output);
    if (!problem.input_text.empty()) write_file(dir / "input.txt", problem.input_text);
}

std::pair<std::string, std::string> parse_result_filename(const fs::path& path) {
    const std::string name = path.filename().string();
    constexpr std::string_view ext = ".json";
    if (name.size() <= ext.size() || !name.ends_with(ext)) {
        throw FilenamePatternMismatch("expected {MODEL}_{DATASET}.json, got " + name);
    }
    const std::string stem = name.substr(0, name.size() - ext.size());
    const auto cut = stem.rfind('_');
    if (cut == std::string::npos || cut == 0 || cut + 1 == stem.size()) {
        throw FilenamePatternMismatch("expected {MODEL}_{DATASET}.json, got " + name);
    }
    return {stem.substr(0, cut), stem.substr(cut + 1)};
}

std::string result_filename(const std::string& model_id, const std::string& benchmark_id) {
    return model_id + "_" + benchmark_id + ".json";
}

ResultSet results_from_json(const nlohmann::json& body, std::string model_id,
                            std::string benchmark_id) {
    if (!body.is_object()) throw MalformedJson("result file body must be a JSON object");
    ResultSet set;
    set.model_id = std::move(model_id);
    set.benchmark_id = std::move(benchmark_id);
    for (const auto& [id, value] : body.items()) {
        if (id == kMetaKey) {
            set.metadata = value;
            continue;
        }
        PredictionRecord record;
        record.problem_id = id;
        if (value.is_string()) {
            // Bare-string shorthand: {"id": "predicted"}.
            record.predicted_output = value.get<std::string>();
        } else if (value.is_object()) {
            const auto it = value.find("predicted_output");
            if (it == value.end() || !it->is_string()) {
                throw MalformedJson("record '" + id + "' lacks a string predicted_output");
            }
            record.predicted_output = it->get<std::string>();
            if (auto r = value.find("reasoning"); r != value.end() && r->is_string()) {
                record.reasoning = r->get<std::string>();
            }
            if (auto c = value.find("correct"); c != value.end() && c->is_boolean()) {
                record.correct = c->get<bool>();
            }
            if (auto e = value.find("error"); e != value.end() && e->is_string()) {
                record.error = e->get<std::string>();
            }
        } else {
            throw MalformedJson("record '" + id + "' must be an object");
        }
        set.records.emplace(id, std::move(record));
    }
    return set;
}

ResultSet load_results(const fs::path& path) {
    auto [model, dataset] = parse_result_filename(path);
    if (!fs::exists(path)) throw MissingFile(path);
    nlohmann::json body;
    try {
        body = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedJson(path.string() + ": " + e.what());
    }
    return results_from_json(body, std::move(model), std::move(dataset));
}

nlohmann::json results_to_json(const ResultSet& set) {
    nlohmann::json body = nlohmann::json::object();
    for (const auto& [id, record] : set.records) {
        nlohmann::json entry = {{"predicted_output", record.predicted_output}};
        if (record.reasoning) entry["reasoning"] = *record.reasoning;
        if (record.correct) entry["correct"] = *record.correct;
        if (record.error) entry["error"] = *record.error;
        body[id] = std::move(entry);
    }
    if (!set.metadata.empty()) body[kMetaKey] = set.metadata;
    return body;
}

void write_results(const fs::path& path, const ResultSet& set) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".partial";
    write_file(tmp, results_to_json(set).dump(2) + "\n");
    fs::rename(tmp, path);
}

std::vector<std::string> unknown_problem_ids(const ResultSet& set,
                                             std::span<const Problem> problems) {
    std::set<std::string_view> known;
    for (const auto& p : problems) known.insert(p.problem_id);
    std::vector<std::string> unknown;
    for (const auto& [id, record] : set.records) {
        if (!known.contains(id)) unknown.push_back(id);
    }
    return unknown;
}

ResultSet merge_results(std::span<const ResultSet> sets,
                        std::span<const std::map<std::string, bool>> scores) {
    if (sets.empty()) return {};
    if (scores.size() != sets.size()) {
        throw Error("merge_results: one score map per result set is required");
    }
    ResultSet merged;
    merged.model_id = sets.front().model_id;
    merged.benchmark_id = sets.front().benchmark_id;
    merged.metadata = sets.front().metadata;
    for (const auto& s : sets) {
        if (s.model_id != merged.model_id || s.benchmark_id != merged.benchmark_id) {
            throw MixedModelIds("cannot merge " + s.model_id + "_" + s.benchmark_id + " into " +
                                merged.model_id + "_" + merged.benchmark_id);
        }
    }

    std::set<std::string> correct_taken;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (const auto& [id, record] : sets[i].records) {
            const auto score = scores[i].find(id);
            const bool is_correct = score != scores[i].end() && score->second;
            auto [it, inserted] = merged.records.try_emplace(id, record);
            if (is_correct && !correct_taken.contains(id)) {
                if (!inserted) it->second = record;
                correct_taken.insert(id);
            }
        }
    }
    return merged;
}

}  // namespace cerlens
