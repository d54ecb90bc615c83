#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cerlens/error.hpp"

namespace cerlens {

/// One benchmark program: `<root>/<benchmark>/<problem_id>/{main.py,input.txt,output.txt}`.
struct Problem {
    std::string benchmark_id;
    std::string problem_id;
    std::string source;
    std::string input_text;
    std::string expected_output;

    /// "benchmark/problem" key used to pool programs across benchmarks.
    std::string key() const { return benchmark_id + "/" + problem_id; }
};

struct PredictionRecord {
    std::string problem_id;
    std::string predicted_output;
    std::optional<std::string> reasoning;
    /// Advisory only: correctness is always recomputed by scoring.
    std::optional<bool> correct;
    /// Set when collection failed for this problem.
    std::optional<std::string> error;

    bool operator==(const PredictionRecord&) const = default;
};

struct ResultSet {
    std::string model_id;
    std::string benchmark_id;
    std::map<std::string, PredictionRecord> records;
    /// Contents of the reserved "__meta__" key (prompt template version etc.).
    nlohmann::json metadata = nlohmann::json::object();

    bool operator==(const ResultSet&) const = default;
};

class MissingFile : public DataError {
public:
    explicit MissingFile(const std::filesystem::path& path)
        : DataError("missing file: " + path.string()), path_(path) {}
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

class UnreadableSource : public DataError {
public:
    using DataError::DataError;
};

class MalformedJson : public DataError {
public:
    using DataError::DataError;
};

class FilenamePatternMismatch : public DataError {
public:
    using DataError::DataError;
};

class MixedModelIds : public Error {
public:
    using Error::Error;
};

inline constexpr const char* kMetaKey = "__meta__";

/// Loads every child directory of `root_dir/benchmark_id` as a Problem,
/// ordered by problem id.
std::vector<Problem> load_benchmark(const std::filesystem::path& root_dir,
                                    const std::string& benchmark_id);

/// Writes the problem folder back to `<root>/<benchmark>/<problem_id>/`.
void write_problem(const std::filesystem::path& root_dir, const Problem& problem);

/// Splits `{MODEL}_{DATASET}.json` at the last underscore.
std::pair<std::string, std::string> parse_result_filename(const std::filesystem::path& path);
std::string result_filename(const std::string& model_id, const std::string& benchmark_id);

ResultSet load_results(const std::filesystem::path& path);
ResultSet results_from_json(const nlohmann::json& body, std::string model_id,
                            std::string benchmark_id);
nlohmann::json results_to_json(const ResultSet& set);

/// Writes atomically (temp file + rename). Output bytes depend only on `set`.
void write_results(const std::filesystem::path& path, const ResultSet& set);

/// Problem ids referenced by `set` that are not part of `problems`.
std::vector<std::string> unknown_problem_ids(const ResultSet& set,
                                             std::span<const Problem> problems);

/// Optimistic merge: per problem keep a record scored correct if any set has
/// one, else the first record in input order.
ResultSet merge_results(std::span<const ResultSet> sets,
                        std::span<const std::map<std::string, bool>> scores);

}  // namespace cerlens
