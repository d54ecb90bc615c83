#include "cerlens/stats.hpp"

namespace cerlens {

std::size_t Bucketing::bucket_of(double value) const {
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (value <= edges[i]) return i;
    }
    return overflow ? edges.size() : edges.size() - 1;
}

void Bucketing::validate() const {
    if (edges.empty()) throw Error("bucketing needs at least one edge");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i - 1] < edges[i])) throw Error("bucketing edges must be strictly ascending");
    }
    if (labels.size() != bucket_count()) throw Error("bucketing needs one label per bucket");
}

Bucketing Bucketing::unit(int max_value) {
    Bucketing b;
    for (int v = 0; v <= max_value; ++v) {
        b.edges.push_back(v);
        b.labels.push_back(std::to_string(v));
    }
    b.overflow = true;
    b.labels.push_back(">" + std::to_string(max_value));
    return b;
}

Bucketing Bucketing::cyclomatic_default() { return unit(15); }

Bucketing Bucketing::loop_length_default() {
    return Bucketing{{0, 10, 50, 100, 500}, {"0", "1-10", "11-50", "51-100", "101-500", ">500"}, true};
}

Bucketing Bucketing::loc_default() {
    return Bucketing{{5, 10, 15, 20, 30, 50}, {"1-5", "6-10", "11-15", "16-20", "21-30", "31-50", ">50"}, true};
}

std::map<std::size_t, std::vector<std::string>> bucketize(const std::map<std::string, double>& values,
                                                          const Bucketing& bucketing) {
    bucketing.validate();
    std::map<std::size_t, std::vector<std::string>> out;
    for (const auto& [id, value] : values) out[bucketing.bucket_of(value)].push_back(id);
    return out;
}

double correlate_property(const std::map<std::string, double>& values,
                          const std::map<std::string, bool>& correct) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& [id, value] : values) {
        const auto it = correct.find(id);
        if (it == correct.end()) continue;
        x.push_back(value);
        y.push_back(it->second ? 1.0 : 0.0);
    }
    return spearman_rho(x, y);
}

double correlate_property(const std::map<std::string, double>& values,
                          const std::map<std::string, Outcome>& outcomes) {
    std::map<std::string, bool> correct;
    for (const auto& [id, outcome] : outcomes) correct.emplace(id, outcome.correct);
    return correlate_property(values, correct);
}

}  // namespace cerlens
