#include <doctest.h>

#include <random>

#include "cerlens/corpus.hpp"
#include "support.hpp"

using namespace cerlens;

namespace {

ResultSet random_set(std::mt19937_64& rng, std::map<std::string, bool>& score) {
    ResultSet s{"m", "b", {}, nlohmann::json::object()};
    std::uniform_int_distribution<int> pick(0, 9);
    for (int i = 0; i < 12; ++i) {
        if (pick(rng) < 3) continue;  // sets cover different problems
        const std::string id = "p" + std::to_string(i);
        s.records[id] = PredictionRecord{id, "v" + std::to_string(pick(rng)), {}, {}, {}};
        score[id] = pick(rng) < 5;
    }
    return s;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("fixture benchmark loads in id order") {
    const auto problems = load_benchmark(testing::fixtures() / "dataset", "fixture");
    REQUIRE(problems.size() == 24);
    CHECK(std::is_sorted(problems.begin(), problems.end(),
                         [](const Problem& a, const Problem& b) { return a.problem_id < b.problem_id; }));
    const auto& l1 = *std::find_if(problems.begin(), problems.end(), [](auto& p) { return p.problem_id == "closest_zero"; });
    CHECK(l1.input_text == "10\n-3\n");
    CHECK(l1.expected_output == "3\n");
    CHECK(l1.key() == "fixture/closest_zero");
}

TEST_CASE("missing pieces are data errors naming the path") {
    const auto root = testing::scratch("corpus-missing");
    CHECK_THROWS_AS(load_benchmark(root, "nope"), MissingFile);
    std::filesystem::create_directories(root / "b/p1");
    std::ofstream(root / "b/p1/main.py") << "print(1)\n";
    try {
        load_benchmark(root, "b");
        FAIL("expected MissingFile");
    } catch (const MissingFile& e) {
        CHECK(e.path().filename() == "output.txt");
    }
    std::ofstream(root / "b/p1/output.txt") << "1\n";
    std::ofstream(root / "b/p1/main.py") << "";
    CHECK_THROWS_AS(load_benchmark(root, "b"), UnreadableSource);
}

TEST_CASE("problems round-trip through the directory layout") {
    const auto root = testing::scratch("corpus-roundtrip");
    const auto problems = load_benchmark(testing::fixtures() / "dataset", "fixture");
    for (const auto& p : problems) write_problem(root, p);
    const auto again = load_benchmark(root, "fixture");
    REQUIRE(again.size() == problems.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(again[i].source == problems[i].source);
        CHECK(again[i].input_text == problems[i].input_text);
        CHECK(again[i].expected_output == problems[i].expected_output);
    }
}

TEST_CASE("result filenames split at the last underscore") {
    CHECK(parse_result_filename("gpt-4_avatar.json") == std::pair<std::string, std::string>{"gpt-4", "avatar"});
    CHECK(parse_result_filename("dir/semcoder_s_avatar.json") ==
          std::pair<std::string, std::string>{"semcoder_s", "avatar"});
    CHECK_THROWS_AS(parse_result_filename("noseparator.json"), FilenamePatternMismatch);
    CHECK_THROWS_AS(parse_result_filename("a_b.txt"), FilenamePatternMismatch);
    CHECK_THROWS_AS(parse_result_filename("_b.json"), FilenamePatternMismatch);
    CHECK(result_filename("m", "d") == "m_d.json");
}

TEST_CASE("result files round-trip byte for byte") {
    const auto path = testing::fixtures() / "Experiment_Results/ER/result_stat/planted-a_fixture.json";
    const auto set = load_results(path);
    CHECK(set.model_id == "planted-a");
    CHECK(set.benchmark_id == "fixture");
    CHECK(set.records.size() == 24);
    CHECK(set.metadata.contains("planted_rule"));
    const auto out = testing::scratch("corpus-results") / "planted-a_fixture.json";
    write_results(out, set);
    CHECK(load_results(out) == set);
    const auto bytes = testing::read_text(out);
    write_results(out, load_results(out));
    CHECK(testing::read_text(out) == bytes);
}

TEST_CASE("bare-string records and malformed bodies") {
    const auto s = results_from_json(nlohmann::json::parse(R"({"p1": "42", "p2": {"predicted_output": "x", "error": "boom"}})"), "m", "b");
    CHECK(s.records.at("p1").predicted_output == "42");
    CHECK(s.records.at("p2").error == "boom");
    CHECK_THROWS_AS(results_from_json(nlohmann::json::array(), "m", "b"), MalformedJson);
    CHECK_THROWS_AS(results_from_json(nlohmann::json::parse(R"({"p1": {"reasoning": "x"}})"), "m", "b"), MalformedJson);
    const auto bad = testing::scratch("corpus-bad") / "m_b.json";
    std::ofstream(bad) << "{not json";
    CHECK_THROWS_AS(load_results(bad), MalformedJson);
    CHECK_THROWS_AS(load_results(bad.parent_path() / "x_y.json"), MissingFile);
}

TEST_CASE("unknown problem ids are reported") {
    const auto problems = load_benchmark(testing::fixtures() / "dataset", "fixture");
    ResultSet s{"m", "fixture", {}, {}};
    s.records["closest_zero"] = {"closest_zero", "3", {}, {}, {}};
    s.records["ghost"] = {"ghost", "1", {}, {}, {}};
    CHECK(unknown_problem_ids(s, problems) == std::vector<std::string>{"ghost"});
}

TEST_CASE("merge refuses mixed model or benchmark ids") {
    std::vector<ResultSet> sets{{"a", "b", {}, {}}, {"c", "b", {}, {}}};
    std::vector<std::map<std::string, bool>> scores(2);
    CHECK_THROWS_AS(merge_results(sets, scores), MixedModelIds);
}

TEST_CASE("property: merge is idempotent and optimistic on 500 random pairs") {
    std::mt19937_64 rng(1234);
    for (int round = 0; round < 500; ++round) {
        std::map<std::string, bool> sa, sb;
        const ResultSet a = random_set(rng, sa);
        const ResultSet b = random_set(rng, sb);

        // Idempotence: merging a set with itself (or alone) changes nothing.
        const std::vector<ResultSet> aa{a, a};
        const std::vector<std::map<std::string, bool>> saa{sa, sa};
        CHECK(merge_results(aa, saa) == a);
        CHECK(merge_results(std::vector<ResultSet>{a}, std::vector<std::map<std::string, bool>>{sa}) == a);

        const std::vector<ResultSet> ab{a, b};
        const std::vector<std::map<std::string, bool>> sab{sa, sb};
        const ResultSet m = merge_results(ab, sab);

        // Optimistic monotonicity: a problem is correct after merging iff it
        // was correct in some input, and coverage only grows.
        for (const auto& [id, record] : m.records) {
            const bool in_a = a.records.contains(id), in_b = b.records.contains(id);
            CHECK((in_a || in_b));
            const bool ca = in_a && sa.at(id), cb = in_b && sb.at(id);
            const bool merged_correct = (ca && record == a.records.at(id)) || (cb && record == b.records.at(id));
            CHECK(merged_correct == (ca || cb));
            if (!ca && !cb) CHECK(record == (in_a ? a.records.at(id) : b.records.at(id)));
        }
        for (const auto& [id, r] : a.records) CHECK(m.records.contains(id));
        for (const auto& [id, r] : b.records) CHECK(m.records.contains(id));

        // Same per-problem correctness in either order.
        const std::vector<ResultSet> ba{b, a};
        const std::vector<std::map<std::string, bool>> sba{sb, sa};
        const ResultSet m2 = merge_results(ba, sba);
        for (const auto& [id, r] : m.records) {
            const bool c1 = (a.records.contains(id) && sa.at(id)) || (b.records.contains(id) && sb.at(id));
            const bool c2 = (sb.contains(id) && sb.at(id) && m2.records.at(id) == b.records.at(id)) ||
                            (sa.contains(id) && sa.at(id) && m2.records.at(id) == a.records.at(id));
            CHECK(c1 == c2);
        }
    }
}

}  // TEST_SUITE
