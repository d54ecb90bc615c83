#include <doctest.h>

#include "cerlens/dynamics.hpp"
#include "cerlens/syntax.hpp"
#include "support.hpp"

using namespace cerlens;

namespace {

std::filesystem::path trace_file(const std::string& id) {
    return testing::fixtures() / "Experiment_Results/traces/fixture" / (id + ".json");
}

SyntaxTree tree_of(const std::string& id) {
    return parse_program(testing::read_text(testing::fixtures() / "dataset/fixture" / id / "main.py"));
}

DynamicProfile profile(const std::string& id, LoopAggregation agg = LoopAggregation::Max) {
    return profile_from_trace(load_trace(trace_file(id)), tree_of(id), agg);
}

TraceRecord synthetic(std::map<int, std::int64_t> hits, std::vector<CallEvent> calls = {},
                      ExitStatus status = ExitStatus::Ok) {
    TraceRecord t;
    t.problem_id = "synthetic";
    t.line_hits = std::move(hits);
    t.call_events = std::move(calls);
    t.exit_status = status;
    return t;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("closest_zero runs its loop body ten times") {
    const auto t = load_trace(trace_file("closest_zero"));
    CHECK(t.stdout_text == "3\n");
    CHECK(t.exit_status == ExitStatus::Ok);
    const auto p = profile_from_trace(t, tree_of("closest_zero"));
    CHECK(p.loop_iterations == std::map<int, std::int64_t>{{4, 10}});
    CHECK(p.program_loop_length == 10);
    CHECK_FALSE(p.partial);
}

TEST_CASE("a loop that never runs has length zero") {
    const auto p = profile("for_empty");
    CHECK(p.loop_iterations == std::map<int, std::int64_t>{{3, 0}});
    CHECK(p.program_loop_length == 0);
}

TEST_CASE("outer loop whose body starts with a loop uses header hits minus one") {
    const auto p = profile("while_for");
    CHECK(p.loop_iterations == std::map<int, std::int64_t>{{3, 3}, {4, 6}});
    CHECK(p.program_loop_length == 6);
    CHECK(profile("while_for", LoopAggregation::Sum).program_loop_length == 9);
}

TEST_CASE("recursion depth and call totals come from call events") {
    const auto p = profile("fact_rec");
    CHECK(p.recursion_depth.at("fact") == 4);
    CHECK(p.total_calls.at("fact") == 4);
}

TEST_CASE("every fixture trace is consistent with its program") {
    for (const auto& e : std::filesystem::directory_iterator(testing::fixtures() / "dataset/fixture")) {
        const std::string id = e.path().filename().string();
        CAPTURE(id);
        CHECK_NOTHROW(profile(id));
    }
}

TEST_CASE("json round trip") {
    const auto t = load_trace(trace_file("fact_rec"));
    CHECK(trace_from_json(trace_to_json(t)) == t);
    CHECK(trace_to_json(t).at("version") == kTraceSchemaVersion);
}

TEST_CASE("malformed traces are rejected") {
    auto body = trace_to_json(load_trace(trace_file("closest_zero")));
    auto bad_version = body;
    bad_version["version"] = 99;
    CHECK_THROWS_AS(trace_from_json(bad_version), TraceFormatError);
    auto bad_key = body;
    bad_key["line_hits"]["four"] = 1;
    CHECK_THROWS_AS(trace_from_json(bad_key), TraceFormatError);
    auto bad_status = body;
    bad_status["exit_status"] = "crashed";
    CHECK_THROWS_AS(trace_from_json(bad_status), TraceFormatError);
    CHECK_THROWS_AS(load_trace(testing::fixtures() / "no-such-trace.json"), DataError);
}

TEST_CASE("hits outside the program are a tree mismatch") {
    const auto tree = tree_of("closest_zero");
    CHECK_THROWS_AS(profile_from_trace(synthetic({{1, 1}, {11, 1}}), tree), TraceTreeMismatch);
    CHECK_THROWS_AS(profile_from_trace(synthetic({{0, 1}}), tree), TraceTreeMismatch);
}

TEST_CASE("unbalanced call events") {
    const auto tree = parse_program("def f():\n    return 1\nf()\n");
    const CallEvent enter{"f", true, 0};
    const CallEvent exit{"f", false, 1};
    CHECK_THROWS_AS(profile_from_trace(synthetic({{1, 1}}, {exit}), tree), TraceFormatError);
    CHECK_THROWS_AS(profile_from_trace(synthetic({{1, 1}}, {enter}), tree), TraceFormatError);
    // A timed-out run may leave activations open; counts cover the prefix.
    const auto p = profile_from_trace(synthetic({{1, 1}}, {enter}, ExitStatus::Timeout), tree);
    CHECK(p.partial);
    CHECK(p.recursion_depth.at("f") == 1);
}

TEST_CASE("loop body on the header line") {
    const auto tree = parse_program("n = 0\nwhile n < 5: n += 1\nprint(n)\n");
    const auto p = profile_from_trace(synthetic({{1, 1}, {2, 6}, {3, 1}}), tree);
    CHECK(p.program_loop_length == 5);
}

}  // TEST_SUITE
