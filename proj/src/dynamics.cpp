#include "cerlens/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace cerlens {

std::string_view to_string(ExitStatus status) {
    switch (status) {
        case ExitStatus::Ok: return "ok";
        case ExitStatus::Exception: return "exception";
        case ExitStatus::Timeout: return "timeout";
    }
    return "ok";
}

namespace {

ExitStatus parse_status(const std::string& s) {
    if (s == "ok") return ExitStatus::Ok;
    if (s == "exception") return ExitStatus::Exception;
    if (s == "timeout") return ExitStatus::Timeout;
    throw TraceFormatError("unknown exit_status '" + s + "'");
}

const nlohmann::json& field(const nlohmann::json& body, const char* name) {
    const auto it = body.find(name);
    if (it == body.end()) throw TraceFormatError(std::string("trace lacks field '") + name + "'");
    return *it;
}

}  // namespace

TraceRecord trace_from_json(const nlohmann::json& body) {
    if (!body.is_object()) throw TraceFormatError("trace must be a JSON object");
    const auto& version = field(body, "version");
    if (!version.is_number_integer() || version.get<int>() != kTraceSchemaVersion) {
        throw TraceFormatError("unsupported trace schema version " + version.dump());
    }
    try {
        TraceRecord t;
        t.problem_id = field(body, "problem_id").get<std::string>();
        for (const auto& [key, hits] : field(body, "line_hits").items()) {
            int line = 0;
            const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), line);
            if (ec != std::errc{} || ptr != key.data() + key.size() || line < 1) {
                throw TraceFormatError("line_hits key '" + key + "' is not a line number");
            }
            t.line_hits[line] = hits.get<std::int64_t>();
        }
        for (const auto& e : field(body, "call_events")) {
            CallEvent ev;
            ev.function = field(e, "function").get<std::string>();
            const auto kind = field(e, "event").get<std::string>();
            if (kind != "enter" && kind != "exit") throw TraceFormatError("unknown call event '" + kind + "'");
            ev.enter = kind == "enter";
            ev.index = field(e, "index").get<std::int64_t>();
            t.call_events.push_back(std::move(ev));
        }
        t.stdout_text = field(body, "stdout").get<std::string>();
        t.exit_status = parse_status(field(body, "exit_status").get<std::string>());
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw TraceFormatError(std::string("malformed trace: ") + e.what());
    }
}

nlohmann::json trace_to_json(const TraceRecord& trace) {
    nlohmann::json hits = nlohmann::json::object();
    for (const auto& [line, count] : trace.line_hits) hits[std::to_string(line)] = count;
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : trace.call_events) {
        events.push_back({{"function", e.function}, {"event", e.enter ? "enter" : "exit"}, {"index", e.index}});
    }
    return {{"version", kTraceSchemaVersion},
            {"problem_id", trace.problem_id},
            {"line_hits", std::move(hits)},
            {"call_events", std::move(events)},
            {"stdout", trace.stdout_text},
            {"exit_status", std::string(to_string(trace.exit_status))}};
}

TraceRecord load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing file: " + path.string());
    try {
        return trace_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw TraceFormatError(path.string() + ": " + e.what());
    }
}

namespace {

struct LoopSite {
    int header_line;
    int first_body_line;
    bool body_starts_with_loop;
};

void collect_loops(const Node& node, std::vector<LoopSite>& out) {
    for (const auto& child : node.children) {
        if (child.kind == NodeKind::For || child.kind == NodeKind::While) {
            const auto first = std::find_if(child.children.begin(), child.children.end(),
                                            [](const Node& c) { return c.slot == Slot::Body; });
            if (first != child.children.end()) {
                const bool nested = first->kind == NodeKind::For || first->kind == NodeKind::While;
                out.push_back({child.start_line, first->start_line, nested});
            }
        }
        collect_loops(child, out);
    }
}

}  // namespace

DynamicProfile profile_from_trace(const TraceRecord& trace, const SyntaxTree& tree,
                                  LoopAggregation aggregation) {
    for (const auto& [line, hits] : trace.line_hits) {
        if (line < tree.root.start_line || line > tree.root.end_line) {
            throw TraceTreeMismatch("trace of '" + trace.problem_id + "' hits line " +
                                    std::to_string(line) + " outside the program (" +
                                    std::to_string(tree.root.end_line) + " lines)");
        }
    }

    DynamicProfile profile;
    profile.exit_status = trace.exit_status;
    profile.partial = trace.exit_status != ExitStatus::Ok;

    auto hits_at = [&](int line) -> std::int64_t {
        const auto it = trace.line_hits.find(line);
        return it == trace.line_hits.end() ? 0 : it->second;
    };

    std::vector<LoopSite> sites;
    collect_loops(tree.root, sites);
    for (const auto& site : sites) {
        std::int64_t count = 0;
        if (site.body_starts_with_loop || site.first_body_line == site.header_line) {
            // Body line hits are not attributable to this loop alone; every
            // completed iteration re-tests the header once more than the body runs.
            count = std::max<std::int64_t>(0, hits_at(site.header_line) - 1);
        } else {
            count = hits_at(site.first_body_line);
        }
        profile.loop_iterations[site.header_line] += count;
    }
    for (const auto& [line, count] : profile.loop_iterations) {
        if (aggregation == LoopAggregation::Max) {
            profile.program_loop_length = std::max(profile.program_loop_length, count);
        } else {
            profile.program_loop_length += count;
        }
    }

    std::map<std::string, std::int64_t> active;
    for (const auto& e : trace.call_events) {
        auto& depth = active[e.function];
        if (e.enter) {
            ++depth;
            ++profile.total_calls[e.function];
            auto& max_depth = profile.recursion_depth[e.function];
            max_depth = std::max(max_depth, depth);
        } else {
            if (depth == 0) {
                throw TraceFormatError("trace of '" + trace.problem_id + "' exits '" + e.function +
                                       "' without a matching enter");
            }
            --depth;
        }
    }
    if (trace.exit_status == ExitStatus::Ok) {
        for (const auto& [fn, depth] : active) {
            if (depth != 0) {
                throw TraceFormatError("trace of '" + trace.problem_id + "' leaves '" + fn +
                                       "' active after a normal exit");
            }
        }
    }
    return profile;
}

}  // namespace cerlens
