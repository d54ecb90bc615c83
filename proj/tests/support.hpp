// Shared helpers for unit and acceptance tests.
#pragma once

#include <filesystem>
#include <fstream>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace testing {

inline std::filesystem::path fixtures() { return CERLENS_FIXTURES; }

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(read_text(p)); }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("cerlens-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Copy of the fixture experiment tree that tests may write into.
inline std::filesystem::path fixture_copy(const std::string& name) {
    const auto dir = scratch(name);
    std::filesystem::copy(fixtures(), dir, std::filesystem::copy_options::recursive);
    return dir;
}

// O(n^2) midranks and long-double Pearson, written without sorting.
inline double oracle_rho(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    auto ranks = [n](const std::vector<double>& v) {
        std::vector<long double> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            long double below = 0, equal = 0;
            for (std::size_t j = 0; j < n; ++j) {
                below += v[j] < v[i];
                equal += v[j] == v[i];
            }
            r[i] = below + (equal + 1) / 2.0L;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += rx[i], my += ry[i];
    mx /= n;
    my /= n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

inline bool constant(const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; }); }

struct TiedPair {
    std::vector<double> x, y;
};

inline TiedPair random_tied(std::mt19937_64& rng) {
    for (;;) {
        const int n = std::uniform_int_distribution<int>(3, 50)(rng);
        const int levels = std::uniform_int_distribution<int>(2, 8)(rng);
        std::uniform_int_distribution<int> value(0, levels - 1);
        TiedPair p;
        for (int i = 0; i < n; ++i) {
            p.x.push_back(value(rng));
            p.y.push_back(value(rng) * 0.5);
        }
        if (!constant(p.x) && !constant(p.y)) return p;
    }
}

/// Random structured Python programs without short-circuit operators. The
/// generator counts decision points while emitting text, independently of
/// the parser and CFG builder under test.
class ProgramGenerator {
public:
    struct Program {
        std::string source;
        long decisions = 0;
        long functions = 0;  // P: defs + methods + (1 if top-level code)
        bool top_level_code = false;
    };

    explicit ProgramGenerator(std::uint64_t seed) : rng_(seed) {}

    Program program(bool allow_defs = true) {
        out_.clear();
        decisions_ = 0;
        functions_ = 0;
        names_ = 0;
        if (allow_defs) {
            const int defs = uniform(0, 2);
            for (int i = 0; i < defs; ++i) def(0, false);
            if (chance(0.3)) klass();
        }
        const bool top = !allow_defs || functions_ == 0 || chance(0.7);
        if (top) {
            line(0, "x = int(input())");
            block(0, 0, false, false);
        }
        return {out_, decisions_, functions_ + (top ? 1 : 0), top};
    }

    /// The same program with every line moved under `if flag:`.
    static std::string wrap_in_if(const std::string& source) {
        std::string out = "flag = input()\nif flag:\n";
        std::istringstream in(source);
        for (std::string l; std::getline(in, l);) out += (l.empty() ? "" : "    ") + l + "\n";
        return out;
    }

private:
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    void line(int indent, const std::string& text) { out_ += std::string(4 * indent, ' ') + text + "\n"; }

    std::string fresh(const char* prefix) { return prefix + std::to_string(names_++); }

    void def(int indent, bool method) {
        const std::string name = fresh("f");
        line(indent, method ? "def " + name + "(self, x):" : "def " + name + "(x):");
        if (chance(0.3)) line(indent + 1, "\"\"\"Helper.\"\"\"");
        ++functions_;
        block(indent + 1, 0, false, true);
        if (chance(0.5)) line(indent + 1, "return x");
    }

    void klass() {
        line(0, "class " + fresh("C") + ":");
        if (chance(0.5)) line(1, "\"\"\"Container.\"\"\"");
        const int methods = uniform(1, 2);
        for (int i = 0; i < methods; ++i) def(1, true);
    }

    void simple(int indent) {
        switch (uniform(0, 4)) {
            case 0: line(indent, "x = x + " + std::to_string(uniform(1, 9))); break;
            case 1: line(indent, "print(x)"); break;
            case 2: line(indent, "y = abs(x) * 2"); break;
            case 3: line(indent, "items = [x, x + 1]"); break;
            default: line(indent, "pass"); break;
        }
    }

    std::string condition() {
        static const char* ops[] = {"<", ">", "==", "!=", "<=", ">="};
        return "x " + std::string(ops[uniform(0, 5)]) + " " + std::to_string(uniform(0, 20));
    }

    // Emits 1-3 statements; compound statements recurse while depth < 3.
    void block(int indent, int depth, bool in_loop, bool in_function) {
        const int count = uniform(1, 3);
        for (int i = 0; i < count; ++i) statement(indent, depth, in_loop, in_function);
        if (in_loop && chance(0.15)) line(indent, chance(0.5) ? "break" : "continue");
        else if (in_function && chance(0.1)) line(indent, "return x");
        else if (chance(0.05)) line(indent, "raise ValueError('bad')");
    }

    void statement(int indent, int depth, bool in_loop, bool in_function) {
        const int kind = depth >= 3 ? 0 : uniform(0, 7);
        switch (kind) {
            case 1: {
                line(indent, "if " + condition() + ":");
                ++decisions_;
                block(indent + 1, depth + 1, in_loop, in_function);
                const int elifs = uniform(0, 2);
                for (int e = 0; e < elifs; ++e) {
                    line(indent, "elif " + condition() + ":");
                    ++decisions_;
                    block(indent + 1, depth + 1, in_loop, in_function);
                }
                if (chance(0.5)) {
                    line(indent, "else:");
                    block(indent + 1, depth + 1, in_loop, in_function);
                }
                break;
            }
            case 2: {
                line(indent, "for " + fresh("i") + " in range(" + std::to_string(uniform(0, 5)) + "):");
                ++decisions_;
                block(indent + 1, depth + 1, true, in_function);
                if (chance(0.2)) {
                    line(indent, "else:");
                    block(indent + 1, depth + 1, in_loop, in_function);
                }
                break;
            }
            case 3: {
                line(indent, "while " + condition() + ":");
                ++decisions_;
                line(indent + 1, "x = x - 1");
                block(indent + 1, depth + 1, true, in_function);
                if (chance(0.2)) {
                    line(indent, "else:");
                    block(indent + 1, depth + 1, in_loop, in_function);
                }
                break;
            }
            case 4: {
                line(indent, "try:");
                block(indent + 1, depth + 1, in_loop, in_function);
                static const char* handlers[] = {"except ValueError:", "except (KeyError, IndexError) as e:",
                                                 "except ZeroDivisionError as err:"};
                const int n = uniform(0, 3);
                for (int h = 0; h < n; ++h) {
                    line(indent, handlers[h]);
                    ++decisions_;
                    block(indent + 1, depth + 1, in_loop, in_function);
                }
                if (n > 0 && chance(0.3)) {
                    line(indent, "else:");
                    block(indent + 1, depth + 1, in_loop, in_function);
                }
                if (n == 0 || chance(0.3)) {
                    line(indent, "finally:");
                    block(indent + 1, depth + 1, in_loop, in_function);
                }
                break;
            }
            case 5: {
                line(indent, "match x:");
                static const char* refutable[] = {"case 1:", "case 'a' | 'b':", "case [a, b]:",
                                                  "case {'k': v}:", "case int(n) if n > 3:", "case m if m < 0:"};
                const int arms = uniform(1, 3);
                for (int a = 0; a < arms; ++a) {
                    line(indent + 1, refutable[uniform(0, 5)]);
                    ++decisions_;
                    block(indent + 2, depth + 1, in_loop, in_function);
                }
                if (chance(0.5)) {
                    // An irrefutable last arm removes the fallthrough path.
                    line(indent + 1, chance(0.5) ? "case _:" : "case other:");
                    block(indent + 2, depth + 1, in_loop, in_function);
                }
                break;
            }
            case 6: {
                line(indent, "with open('data.txt') as fh:");
                block(indent + 1, depth + 1, in_loop, in_function);
                break;
            }
            case 7: {
                line(indent, "y = [v * 2 for v in range(x)]");
                line(indent, "z = len(y)");
                break;
            }
            default: simple(indent); break;
        }
    }

    std::mt19937_64 rng_;
    std::string out_;
    long decisions_ = 0;
    long functions_ = 0;
    int names_ = 0;
};

}  // namespace testing
