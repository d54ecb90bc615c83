#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cerlens/error.hpp"
#include "cerlens/scoring.hpp"

namespace cerlens {

class DegenerateInput : public Error {
public:
    using Error::Error;
};

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Average ranks (1-based); tied values share the mean of the ranks they span.
template <typename Derived>
Vector<typename Derived::Scalar> midranks(const Eigen::MatrixBase<Derived>& values) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = values.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
    Vector<Scalar> ranks(n);
    for (Eigen::Index i = 0; i < n;) {
        Eigen::Index j = i;
        while (j + 1 < n && values(order[j + 1]) == values(order[i])) ++j;
        const Scalar rank = Scalar(i + j) / Scalar(2) + Scalar(1);
        for (Eigen::Index k = i; k <= j; ++k) ranks(order[k]) = rank;
        i = j + 1;
    }
    return ranks;
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar pearson(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
    using Scalar = typename DerivedX::Scalar;
    const Vector<Scalar> dx = x.array() - x.mean();
    const Vector<Scalar> dy = y.array() - y.mean();
    const Scalar denom = dx.norm() * dy.norm();
    if (denom == Scalar(0)) throw DegenerateInput("correlation of a constant vector is undefined");
    return std::clamp<Scalar>(dx.dot(dy) / denom, Scalar(-1), Scalar(1));
}

/// Tie-aware Spearman rank correlation: Pearson correlation of midranks.
template <typename Scalar>
Scalar spearman_rho(std::span<const Scalar> x, std::span<const Scalar> y) {
    if (x.size() != y.size()) throw DegenerateInput("spearman_rho: length mismatch");
    if (x.size() < 3) throw DegenerateInput("spearman_rho: fewer than 3 observations");
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    const Eigen::Map<const Vector<Scalar>> xv(x.data(), n);
    const Eigen::Map<const Vector<Scalar>> yv(y.data(), n);
    if ((xv.array() == xv(0)).all() || (yv.array() == yv(0)).all()) {
        throw DegenerateInput("spearman_rho: constant input");
    }
    return pearson(midranks(xv), midranks(yv));
}

inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    return spearman_rho<double>(std::span<const double>(x), std::span<const double>(y));
}

/// Value ranges for grouping programs in bar charts. Bucket i holds values
/// <= edges[i] not claimed by an earlier bucket; values above the last edge
/// go to the overflow bucket (or the last bucket when overflow is off).
struct Bucketing {
    std::vector<double> edges;
    std::vector<std::string> labels;  // edges.size() labels, plus one when overflow is set
    bool overflow = false;

    std::size_t bucket_count() const { return edges.size() + (overflow ? 1 : 0); }
    std::size_t bucket_of(double value) const;
    void validate() const;

    /// Unit-width buckets 0..15 plus ">15".
    static Bucketing cyclomatic_default();
    /// [0], [1-10], (10-50], (50-100], (100-500], >500.
    static Bucketing loop_length_default();
    /// Unit-width buckets up to `max_value` with a trailing overflow bucket.
    static Bucketing unit(int max_value);
    /// Fixed-width buckets for LOC.
    static Bucketing loc_default();
};

/// Total partition of the keys: bucket index -> ids (ascending), empty buckets omitted.
std::map<std::size_t, std::vector<std::string>> bucketize(const std::map<std::string, double>& values,
                                                          const Bucketing& bucketing);

/// Spearman between per-program property values and binary success, over
/// the keys present in both maps.
double correlate_property(const std::map<std::string, double>& values,
                          const std::map<std::string, bool>& correct);
double correlate_property(const std::map<std::string, double>& values,
                          const std::map<std::string, Outcome>& outcomes);

}  // namespace cerlens
