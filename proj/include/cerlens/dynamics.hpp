#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cerlens/error.hpp"
#include "cerlens/syntax.hpp"

namespace cerlens {

enum class ExitStatus { Ok, Exception, Timeout };

std::string_view to_string(ExitStatus status);

struct CallEvent {
    std::string function;
    bool enter = true;
    std::int64_t index = 0;

    bool operator==(const CallEvent&) const = default;
};

/// Trace file written by the external tracer harness.
struct TraceRecord {
    std::string problem_id;
    std::map<int, std::int64_t> line_hits;
    std::vector<CallEvent> call_events;
    std::string stdout_text;
    ExitStatus exit_status = ExitStatus::Ok;

    bool operator==(const TraceRecord&) const = default;
};

inline constexpr int kTraceSchemaVersion = 1;

class TraceFormatError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class TraceTreeMismatch : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

TraceRecord trace_from_json(const nlohmann::json& body);
nlohmann::json trace_to_json(const TraceRecord& trace);
TraceRecord load_trace(const std::filesystem::path& path);

/// How the per-site loop counts collapse into one number per program.
enum class LoopAggregation { Max, Sum };

struct DynamicProfile {
    /// Loop header line -> total body entries over the whole run.
    std::map<int, std::int64_t> loop_iterations;
    std::int64_t program_loop_length = 0;
    std::map<std::string, std::int64_t> recursion_depth;
    std::map<std::string, std::int64_t> total_calls;
    ExitStatus exit_status = ExitStatus::Ok;
    /// True when the run did not finish normally; counts cover only the executed prefix.
    bool partial = false;

    bool operator==(const DynamicProfile&) const = default;
};

DynamicProfile profile_from_trace(const TraceRecord& trace, const SyntaxTree& tree,
                                  LoopAggregation aggregation = LoopAggregation::Max);

}  // namespace cerlens
