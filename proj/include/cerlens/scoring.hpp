#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cerlens/corpus.hpp"
#include "cerlens/error.hpp"

namespace cerlens {

enum class ValueCategory { Int, Decimal, String, Binary, List, Tuple, Object };

inline constexpr std::array<ValueCategory, 7> kAllValueCategories = {
    ValueCategory::Int,  ValueCategory::Decimal, ValueCategory::String, ValueCategory::Binary,
    ValueCategory::List, ValueCategory::Tuple,   ValueCategory::Object};

std::string_view to_string(ValueCategory category);

/// A parsed output literal. Containers hold their elements in `items`;
/// objects hold keys in `items` and values in `values` (empty for sets).
struct Value {
    ValueCategory category = ValueCategory::String;
    /// Int: normalized decimal digits with optional leading '-'. String: canonical text.
    std::string text;
    double number = 0.0;
    bool flag = false;
    bool is_set = false;
    std::vector<Value> items;
    std::vector<Value> values;
};

/// Absolute tolerance for Decimal comparison.
inline constexpr double kDecimalTolerance = 1e-6;

/// Returns std::nullopt only when delimiters are unbalanced. Text that is not
/// a literal of the output grammar is a bare String.
std::optional<Value> parse_value(std::string_view text);

bool canonical_equal(const Value& a, const Value& b);

/// Text after the last "[Output]" marker (the whole text if absent), trimmed,
/// with surrounding code fences removed.
std::string extract_answer(std::string_view response);

inline constexpr std::string_view kAnswerMarker = "[Output]";

struct Outcome {
    std::string problem_id;
    bool correct = false;
    bool type_match = false;
    bool value_match = false;
    ValueCategory expected_category = ValueCategory::String;
    std::optional<ValueCategory> predicted_category;
};

Outcome score_prediction(const PredictionRecord& record, const Problem& problem);

class EmptyCluster : public Error {
public:
    using Error::Error;
};

double reasoning_rate(std::span<const Outcome> outcomes);

}  // namespace cerlens
