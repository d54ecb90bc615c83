#include <doctest.h>

#include <cstdio>
#include <sys/wait.h>

#include "support.hpp"

namespace {

struct Run {
    int code = -1;
    std::string output;
};

Run cli(const std::string& args) {
    const std::string cmd = std::string(CERLENS_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.output.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string root_arg(const std::filesystem::path& root) { return "--root '" + root.string() + "'"; }

// A stand-in tracer that copies the recorded fixture traces into place.
std::filesystem::path fake_tracer(const std::filesystem::path& dir, const std::string& fail_for = "") {
    const auto path = dir / "fake-tracer";
    std::ofstream out(path);
    out << "#!/bin/sh\n"
           "while [ $# -gt 0 ]; do case \"$1\" in --problem-dir) d=\"$2\"; shift 2;; --out) o=\"$2\"; shift 2;; *) shift;; esac; done\n"
           "id=$(basename \"$d\")\n";
    if (!fail_for.empty()) out << "[ \"$id\" = \"" << fail_for << "\" ] && exit 1\n";
    out << "cp '" << (testing::fixtures() / "Experiment_Results/traces/fixture").string() << "'/\"$id\".json \"$o\"\n";
    out.close();
    std::filesystem::permissions(path, std::filesystem::perms::owner_all);
    return path;
}

std::string collect_mock(const std::filesystem::path& root) {
    return "collect --model mock-echo --datasets fixture --provider mock --mock-fixture '" +
           (testing::fixtures() / "mock/mock-echo.json").string() + "' " + root_arg(root);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("--help exits 0 and lists every flag") {
    const auto top = cli("--help");
    CHECK(top.code == 0);
    for (const char* flag : {"--root", "--jobs", "--config", "--verbose", "--version", "analyze", "trace", "collect"}) {
        CHECK_MESSAGE(top.output.find(flag) != std::string::npos, flag);
    }
    const auto analyze = cli("analyze --help");
    CHECK(analyze.code == 0);
    for (const char* flag : {"--models", "--datasets", "--granularity", "--loop-aggregation", "--trace", "--tracer", "--timeout"}) {
        CHECK_MESSAGE(analyze.output.find(flag) != std::string::npos, flag);
    }
    const auto trace = cli("trace --help");
    for (const char* flag : {"--datasets", "--tracer", "--timeout", "--force"}) {
        CHECK_MESSAGE(trace.output.find(flag) != std::string::npos, flag);
    }
    const auto collect = cli("collect --help");
    for (const char* flag : {"--model", "--provider", "--endpoint", "--api-key-env", "--temperature", "--max-tokens",
                             "--mock-fixture", "--request-timeout", "--retries", "--backoff", "--concurrency", "--rpm",
                             "--merge", "--out", "--print-hashes"}) {
        CHECK_MESSAGE(collect.output.find(flag) != std::string::npos, flag);
    }
}

TEST_CASE("bad arguments exit 2") {
    CHECK(cli("").code == 2);
    CHECK(cli("analyze sideways --models a --datasets b").code == 2);
    CHECK(cli("analyze constructs --datasets fixture").code == 2);
    CHECK(cli("--jobs 0 analyze constructs -m a -d b").code == 2);
    CHECK(cli("collect --model m").code == 2);
}

TEST_CASE("collect with mock, then analyze constructs writes the figures tree") {
    const auto root = testing::fixture_copy("cli-constructs");
    const auto collected = cli(collect_mock(root));
    CHECK(collected.code == 0);
    CHECK(std::filesystem::exists(root / "Experiment_Results/ER/result_stat/mock-echo_fixture.json"));
    const auto run = cli("analyze constructs --models mock-echo --datasets fixture " + root_arg(root));
    CHECK(run.code == 0);
    CHECK(run.output.find("constructs") != std::string::npos);
    for (const char* ext : {"csv", "json", "svg"}) {
        CHECK(std::filesystem::exists(root / "Experiment_Results/figures/constructs" / (std::string("constructs.") + ext)));
    }
}

TEST_CASE("missing result file exits 3 naming the expected path") {
    const auto root = testing::fixture_copy("cli-missing");
    const auto run = cli("analyze cc --models nobody --datasets fixture " + root_arg(root));
    CHECK(run.code == 3);
    CHECK(run.output.find("nobody_fixture.json") != std::string::npos);
}

TEST_CASE("unparseable program exits 4") {
    const auto root = testing::fixture_copy("cli-parse");
    std::ofstream(root / "dataset/fixture/basic_sum/main.py") << "def broken(:\n";
    const auto run = cli("analyze cc --models planted-a --datasets fixture " + root_arg(root));
    CHECK(run.code == 4);
    CHECK(run.output.find("basic_sum") != std::string::npos);
}

TEST_CASE("http collect without a key exits 2 with MissingApiKey") {
    const auto root = testing::fixture_copy("cli-key");
    const auto run = cli("collect --model gpt-x --datasets fixture --api-key-env CERLENS_SURELY_UNSET " + root_arg(root));
    CHECK(run.code == 2);
    CHECK(run.output.find("MissingApiKey") != std::string::npos);
}

TEST_CASE("trace: missing harness exits 5; failures are data; reruns skip existing traces") {
    const auto root = testing::fixture_copy("cli-trace");
    std::filesystem::remove_all(root / "Experiment_Results/traces");
    CHECK(cli("trace --datasets fixture --tracer /nonexistent/tracer " + root_arg(root)).code == 5);

    const auto tracer = fake_tracer(root, "try_div");
    auto run = cli("trace --datasets fixture --tracer '" + tracer.string() + "' " + root_arg(root));
    CHECK(run.code == 0);
    CHECK(run.output.find("traced 23") != std::string::npos);
    CHECK(run.output.find("fixture/try_div") != std::string::npos);

    run = cli("trace --datasets fixture --tracer '" + fake_tracer(root).string() + "' " + root_arg(root));
    CHECK(run.output.find("traced 1 program(s), skipped 23") != std::string::npos);
    run = cli("trace --datasets fixture --force --tracer '" + fake_tracer(root).string() + "' " + root_arg(root));
    CHECK(run.output.find("traced 24 program(s), skipped 0") != std::string::npos);
}

TEST_CASE("loop-length needs traces unless --trace is given") {
    const auto root = testing::fixture_copy("cli-loop");
    std::filesystem::remove_all(root / "Experiment_Results/traces");
    CHECK(cli("analyze loop-length -m planted-a -d fixture " + root_arg(root)).code == 3);
    const auto run = cli("analyze loop-length -m planted-a -d fixture --trace --tracer '" +
                         fake_tracer(root).string() + "' " + root_arg(root));
    CHECK(run.code == 0);
    CHECK(std::filesystem::exists(root / "Experiment_Results/figures/loop_length/loop_length.csv"));
}

TEST_CASE("analyze all twice produces byte-identical artifacts") {
    const auto root = testing::fixture_copy("cli-determinism");
    const std::string args = "analyze all -m planted-a,planted-b -d fixture " + root_arg(root);
    REQUIRE(cli(args).code == 0);
    std::map<std::string, std::string> first;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root / "Experiment_Results/figures")) {
        if (e.is_regular_file()) first[e.path().string()] = testing::read_text(e.path());
    }
    CHECK(first.size() == 18);
    REQUIRE(cli("--jobs 3 " + args).code == 0);
    for (const auto& [path, bytes] : first) CHECK(testing::read_text(path) == bytes);
}

TEST_CASE("per-dataset variants appear with more than one dataset") {
    const auto root = testing::fixture_copy("cli-multi");
    std::filesystem::copy(root / "dataset/fixture", root / "dataset/second", std::filesystem::copy_options::recursive);
    std::filesystem::copy(root / "Experiment_Results/ER/result_stat/planted-a_fixture.json",
                          root / "Experiment_Results/ER/result_stat/planted-a_second.json");
    const auto run = cli("analyze constructs -m planted-a -d fixture,second " + root_arg(root));
    CHECK(run.code == 0);
    const auto dir = root / "Experiment_Results/figures/constructs";
    CHECK(std::filesystem::exists(dir / "constructs.csv"));
    CHECK(std::filesystem::exists(dir / "constructs_fixture.csv"));
    CHECK(std::filesystem::exists(dir / "constructs_second.csv"));
    CHECK(testing::read_text(dir / "constructs.csv").find("planted-a,B,4,4,") != std::string::npos);
}

TEST_CASE("--merge keeps a correct prediction when any input has one") {
    const auto root = testing::fixture_copy("cli-merge");
    const auto results = root / "Experiment_Results/ER/result_stat";
    const auto run = cli("collect --model merged --merge '" + (results / "planted-b_fixture.json").string() + "' '" +
                         (results / "planted-a_fixture.json").string() + "' " + root_arg(root));
    CHECK(run.code == 0);
    REQUIRE(std::filesystem::exists(results / "merged_fixture.json"));
    // planted-a is correct on a superset of planted-b's programs, so the merge
    // scores exactly like planted-a.
    REQUIRE(cli("analyze cc -m merged,planted-a -d fixture " + root_arg(root)).code == 0);
    std::map<std::string, std::map<std::string, std::string>> correct;
    std::istringstream csv(testing::read_text(root / "Experiment_Results/figures/cyclomatic_complexity/cyclomatic.csv"));
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
        std::vector<std::string> f;
        std::istringstream fields(line);
        for (std::string x; std::getline(fields, x, ',');) f.push_back(x);
        correct[f[1]][f[2]] = f[4];
    }
    CHECK(correct.at("merged") == correct.at("planted-a"));
}

TEST_CASE("config file supplies defaults that flags override") {
    const auto root = testing::fixture_copy("cli-config");
    std::ofstream(root / "run.ini") << "root = " << root.string() << "\njobs = 2\n[analyze]\nmodels = planted-a\ndatasets = fixture\n";
    auto run = cli("--config '" + (root / "run.ini").string() + "' analyze types");
    CHECK(run.code == 0);
    CHECK(run.output.find("planted-a") != std::string::npos);
    run = cli("--config '" + (root / "run.ini").string() + "' analyze types --models planted-b");
    CHECK(run.code == 0);
    CHECK(run.output.find("planted-b") != std::string::npos);
    CHECK(run.output.find("planted-a") == std::string::npos);
}

}  // TEST_SUITE
