#include <doctest.h>

#include <random>
#include <set>

#include "cerlens/stats.hpp"
#include "support.hpp"

using namespace cerlens;
using testing::oracle_rho;
using testing::random_tied;

TEST_SUITE("stats") {

TEST_CASE("midranks average ties") {
    Eigen::VectorXd v(5);
    v << 10, 20, 10, 30, 20;
    const Eigen::VectorXd r = midranks(v);
    CHECK(r(0) == 1.5);
    CHECK(r(1) == 3.5);
    CHECK(r(2) == 1.5);
    CHECK(r(3) == 5.0);
    CHECK(r(4) == 3.5);
}

TEST_CASE("spearman matches the brute-force oracle on 1000 tied vectors") {
    std::mt19937_64 rng(42);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_tied(rng);
        worst = std::max(worst, std::abs(spearman_rho(p.x, p.y) - oracle_rho(p.x, p.y)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("property: invariant under strictly increasing transforms, symmetric, sign flips") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const auto p = random_tied(rng);
        const double rho = spearman_rho(p.x, p.y);
        std::vector<double> fx, neg;
        for (double v : p.x) {
            fx.push_back(std::exp(v) * 3.0 + 1.0);
            neg.push_back(-v);
        }
        CHECK(spearman_rho(fx, p.y) == doctest::Approx(rho).epsilon(1e-12));
        CHECK(spearman_rho(p.y, p.x) == doctest::Approx(rho).epsilon(1e-12));
        CHECK(spearman_rho(neg, p.y) == doctest::Approx(-rho).epsilon(1e-12));
        CHECK(rho >= -1.0);
        CHECK(rho <= 1.0);
    }
}

TEST_CASE("templated on the scalar type") {
    const std::vector<float> x{1, 2, 3, 4}, y{2, 1, 4, 3};
    CHECK(spearman_rho<float>(x, y) == doctest::Approx(0.6f));
    const std::vector<long double> a{1, 2, 3}, b{3, 2, 1};
    CHECK(spearman_rho<long double>(a, b) == doctest::Approx(-1.0));
}

TEST_CASE("degenerate inputs") {
    CHECK_THROWS_AS(spearman_rho({1, 1, 1}, {1, 2, 3}), DegenerateInput);
    CHECK_THROWS_AS(spearman_rho({1, 2}, {1, 2}), DegenerateInput);
    CHECK_THROWS_AS(spearman_rho({1, 2, 3}, {1, 2}), DegenerateInput);
}

TEST_CASE("bucketing boundaries") {
    const auto loop = Bucketing::loop_length_default();
    CHECK(loop.bucket_count() == 6);
    CHECK(loop.labels[loop.bucket_of(0)] == "0");
    CHECK(loop.labels[loop.bucket_of(1)] == "1-10");
    CHECK(loop.labels[loop.bucket_of(10)] == "1-10");
    CHECK(loop.labels[loop.bucket_of(11)] == "11-50");
    CHECK(loop.labels[loop.bucket_of(500)] == "101-500");
    CHECK(loop.labels[loop.bucket_of(501)] == ">500");
    const auto cc = Bucketing::cyclomatic_default();
    CHECK(cc.labels[cc.bucket_of(3)] == "3");
    CHECK(cc.labels[cc.bucket_of(99)] == ">15");
    Bucketing bad{{5, 1}, {"a", "b"}, false};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("property: bucketize is a total partition") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 200; ++round) {
        std::map<std::string, double> values;
        const int n = std::uniform_int_distribution<int>(0, 60)(rng);
        for (int i = 0; i < n; ++i) values["p" + std::to_string(i)] = std::uniform_int_distribution<int>(0, 800)(rng);
        for (const auto& b : {Bucketing::loop_length_default(), Bucketing::cyclomatic_default(), Bucketing::loc_default()}) {
            const auto buckets = bucketize(values, b);
            std::size_t total = 0;
            std::set<std::string> seen;
            for (const auto& [index, ids] : buckets) {
                CHECK(!ids.empty());
                CHECK(index < b.bucket_count());
                CHECK(std::is_sorted(ids.begin(), ids.end()));
                for (const auto& id : ids) {
                    CHECK(b.bucket_of(values.at(id)) == index);
                    seen.insert(id);
                }
                total += ids.size();
            }
            CHECK(total == values.size());
            CHECK(seen.size() == values.size());
        }
    }
}

TEST_CASE("correlate_property pairs values with success") {
    const std::map<std::string, double> cc{{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}, {"e", 9}};
    const std::map<std::string, bool> ok{{"a", true}, {"b", true}, {"c", false}, {"d", false}, {"z", true}};
    CHECK(correlate_property(cc, ok) < 0);
    CHECK(correlate_property(cc, ok) == doctest::Approx(spearman_rho({1, 2, 3, 4}, {1, 1, 0, 0})));
}

}  // TEST_SUITE
