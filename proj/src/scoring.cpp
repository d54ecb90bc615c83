#include "cerlens/scoring.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace cerlens {

std::string_view to_string(ValueCategory category) {
    switch (category) {
        case ValueCategory::Int: return "Int";
        case ValueCategory::Decimal: return "Decimal";
        case ValueCategory::String: return "String";
        case ValueCategory::Binary: return "Binary";
        case ValueCategory::List: return "List";
        case ValueCategory::Tuple: return "Tuple";
        case ValueCategory::Object: return "Object";
    }
    return "String";
}

namespace {

constexpr std::string_view kSpace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(kSpace);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(kSpace);
    return s.substr(b, e - b + 1);
}

// Per-line trailing whitespace removed, trailing blank lines dropped,
// leading whitespace of the whole text dropped.
std::string canonical_text(std::string_view s) {
    std::vector<std::string_view> lines;
    std::size_t begin = 0;
    while (true) {
        const auto end = s.find('\n', begin);
        std::string_view line = s.substr(begin, end == std::string_view::npos ? s.npos : end - begin);
        const auto last = line.find_last_not_of(kSpace);
        lines.push_back(last == std::string_view::npos ? std::string_view{} : line.substr(0, last + 1));
        if (end == std::string_view::npos) break;
        begin = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += lines[i];
    }
    const auto first = out.find_first_not_of(kSpace);
    return first == std::string::npos ? std::string{} : out.substr(first);
}

Value make_string(std::string_view raw) {
    Value v;
    v.category = ValueCategory::String;
    v.text = canonical_text(raw);
    return v;
}

// Brackets balance, ignoring brackets inside quotes. A quote that is not
// closed on its own line is an ordinary character (apostrophes in prose).
bool delimiters_balanced(std::string_view s) {
    std::vector<char> stack;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '\'' || c == '"') {
            std::size_t j = i + 1;
            while (j < s.size() && s[j] != c && s[j] != '\n') {
                if (s[j] == '\\') ++j;
                ++j;
            }
            if (j < s.size() && s[j] == c) i = j;
            continue;
        }
        if (c == '(' || c == '[' || c == '{') stack.push_back(c);
        if (c == ')' || c == ']' || c == '}') {
            const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
            if (stack.empty() || stack.back() != open) return false;
            stack.pop_back();
        }
    }
    return stack.empty();
}

class LiteralParser {
public:
    explicit LiteralParser(std::string_view s) : s_(s) {}

    std::optional<Value> parse_all() {
        auto v = value();
        skip_ws();
        if (!v || pos_ != s_.size()) return std::nullopt;
        return v;
    }

private:
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
    void skip_ws() {
        while (pos_ < s_.size() && kSpace.find(s_[pos_]) != std::string_view::npos) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    std::optional<Value> value() {
        skip_ws();
        const char c = peek();
        if (c == '[') return sequence(']', ValueCategory::List);
        if (c == '(') return paren();
        if (c == '{') return braces();
        if (c == '\'' || c == '"') return quoted();
        if ((c == 'b' || c == 'u' || c == 'r') && (peek(1) == '\'' || peek(1) == '"')) {
            ++pos_;
            return quoted();
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return word();
        return std::nullopt;
    }

    std::optional<Value> sequence(char close, ValueCategory category) {
        ++pos_;
        Value v;
        v.category = category;
        if (eat(close)) return v;
        while (true) {
            auto item = value();
            if (!item) return std::nullopt;
            v.items.push_back(std::move(*item));
            if (eat(close)) return v;
            if (!eat(',')) return std::nullopt;
            if (eat(close)) return v;
        }
    }

    std::optional<Value> paren() {
        ++pos_;
        Value v;
        v.category = ValueCategory::Tuple;
        if (eat(')')) return v;
        auto first = value();
        if (!first) return std::nullopt;
        if (eat(')')) return first;  // grouping, not a tuple
        if (!eat(',')) return std::nullopt;
        v.items.push_back(std::move(*first));
        while (!eat(')')) {
            auto item = value();
            if (!item) return std::nullopt;
            v.items.push_back(std::move(*item));
            if (eat(')')) break;
            if (!eat(',')) return std::nullopt;
        }
        return v;
    }

    std::optional<Value> braces() {
        ++pos_;
        Value v;
        v.category = ValueCategory::Object;
        if (eat('}')) return v;
        std::optional<bool> dict;
        while (true) {
            auto key = value();
            if (!key) return std::nullopt;
            const bool has_value = eat(':');
            if (dict && *dict != has_value) return std::nullopt;
            dict = has_value;
            v.items.push_back(std::move(*key));
            if (has_value) {
                auto val = value();
                if (!val) return std::nullopt;
                v.values.push_back(std::move(*val));
            }
            if (eat('}')) break;
            if (!eat(',')) return std::nullopt;
            if (eat('}')) break;
        }
        v.is_set = !*dict;
        return v;
    }

    std::optional<Value> quoted() {
        const char q = peek();
        ++pos_;
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != q) {
            char c = s_[pos_++];
            if (c == '\\' && pos_ < s_.size()) {
                const char e = s_[pos_++];
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '0': out += '\0'; break;
                    case 'x':
                        if (pos_ + 2 <= s_.size()) {
                            out += static_cast<char>(std::strtol(std::string(s_.substr(pos_, 2)).c_str(), nullptr, 16));
                            pos_ += 2;
                        }
                        break;
                    default: out += e; break;
                }
                continue;
            }
            out += c;
        }
        if (pos_ >= s_.size()) return std::nullopt;
        ++pos_;
        return make_string(out);
    }

    std::optional<Value> number() {
        const std::size_t start = pos_;
        if (peek() == '-' || peek() == '+') ++pos_;
        bool digits = false;
        bool decimal = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            ++pos_;
            digits = true;
        }
        if (peek() == '.') {
            decimal = true;
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                ++pos_;
                digits = true;
            }
        }
        if (!digits) return std::nullopt;
        if (peek() == 'e' || peek() == 'E') {
            std::size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
                decimal = true;
                pos_ = p;
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            }
        }
        // A number glued to letters ("3rd", "12abc") is not a numeric literal.
        if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') return std::nullopt;
        const std::string text(s_.substr(start, pos_ - start));
        Value v;
        v.number = std::strtod(text.c_str(), nullptr);
        if (decimal) {
            v.category = ValueCategory::Decimal;
            v.text = text;
            return v;
        }
        v.category = ValueCategory::Int;
        std::string_view body = text;
        bool negative = false;
        if (body.front() == '-' || body.front() == '+') {
            negative = body.front() == '-';
            body.remove_prefix(1);
        }
        const auto nz = body.find_first_not_of('0');
        body = nz == std::string_view::npos ? std::string_view("0") : body.substr(nz);
        v.text = (negative && body != "0" ? "-" : "") + std::string(body);
        return v;
    }

    std::optional<Value> word() {
        const std::size_t start = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '.') ++pos_;
        const std::string_view w = s_.substr(start, pos_ - start);
        if (w == "True" || w == "true" || w == "False" || w == "false") {
            Value v;
            v.category = ValueCategory::Binary;
            v.flag = w == "True" || w == "true";
            return v;
        }
        return make_string(w);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

std::optional<Value> parse_value(std::string_view text) {
    const std::string_view body = trim(text);
    if (body.empty()) return make_string("");
    if (auto v = LiteralParser(body).parse_all()) return v;
    if (!delimiters_balanced(body)) return std::nullopt;
    return make_string(body);
}

bool canonical_equal(const Value& a, const Value& b) {
    if (a.category != b.category) return false;
    switch (a.category) {
        case ValueCategory::Int:
        case ValueCategory::String:
            return a.text == b.text;
        case ValueCategory::Decimal:
            return std::fabs(a.number - b.number) <= kDecimalTolerance;
        case ValueCategory::Binary:
            return a.flag == b.flag;
        case ValueCategory::List:
        case ValueCategory::Tuple:
            if (a.items.size() != b.items.size()) return false;
            for (std::size_t i = 0; i < a.items.size(); ++i) {
                if (!canonical_equal(a.items[i], b.items[i])) return false;
            }
            return true;
        case ValueCategory::Object: {
            if (a.is_set != b.is_set || a.items.size() != b.items.size()) return false;
            std::vector<bool> used(b.items.size(), false);
            for (std::size_t i = 0; i < a.items.size(); ++i) {
                bool found = false;
                for (std::size_t j = 0; j < b.items.size() && !found; ++j) {
                    if (used[j] || !canonical_equal(a.items[i], b.items[j])) continue;
                    if (!a.is_set && !canonical_equal(a.values[i], b.values[j])) continue;
                    used[j] = true;
                    found = true;
                }
                if (!found) return false;
            }
            return true;
        }
    }
    return false;
}

std::string extract_answer(std::string_view response) {
    const auto marker = response.rfind(kAnswerMarker);
    std::string_view answer =
        marker == std::string_view::npos ? response : response.substr(marker + kAnswerMarker.size());
    answer = trim(answer);
    if (answer.starts_with("```")) {
        const auto nl = answer.find('\n');
        answer = nl == std::string_view::npos ? std::string_view{} : answer.substr(nl + 1);
        answer = trim(answer);
    }
    if (answer.ends_with("```")) answer = trim(answer.substr(0, answer.size() - 3));
    return std::string(answer);
}

Outcome score_prediction(const PredictionRecord& record, const Problem& problem) {
    Outcome out;
    out.problem_id = problem.problem_id;
    const auto expected = parse_value(problem.expected_output);
    const Value expected_value = expected ? *expected : make_string(problem.expected_output);
    out.expected_category = expected_value.category;

    const std::string answer = extract_answer(record.predicted_output);
    if (answer.empty()) return out;
    const auto predicted = parse_value(answer);
    if (!predicted) return out;
    out.predicted_category = predicted->category;
    out.type_match = predicted->category == expected_value.category;
    out.value_match = out.type_match && canonical_equal(expected_value, *predicted);
    out.correct = out.value_match;
    return out;
}

double reasoning_rate(std::span<const Outcome> outcomes) {
    if (outcomes.empty()) throw EmptyCluster("reasoning rate of an empty cluster");
    std::size_t correct = 0;
    for (const auto& o : outcomes) correct += o.correct;
    return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

}  // namespace cerlens
