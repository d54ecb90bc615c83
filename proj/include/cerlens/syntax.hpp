#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cerlens/error.hpp"

namespace cerlens {

enum class NodeKind {
    Module,
    FunctionDef,
    If,
    For,
    While,
    Match,
    MatchCase,
    Try,
    ExceptHandler,
    Call,
    Return,
    Assign,
    Expr,
    Other,
};

/// Where a child sits inside its parent statement.
enum class Slot {
    Header,   // expressions of the statement itself (tests, iterables, arguments)
    Body,
    OrElse,   // if/elif else-branch, loop else, try else
    Handler,  // except clauses of a Try
    Finally,
    Case,     // case arms of a Match
};

std::string_view to_string(NodeKind kind);

struct Node {
    NodeKind kind = NodeKind::Other;
    Slot slot = Slot::Body;
    /// Function name, callee text, case pattern, or the keyword of an Other
    /// statement ("break", "continue", "raise", "with", "class", ...).
    std::string detail;
    int start_line = 0;
    int end_line = 0;
    bool is_elif = false;      // If nodes produced by `elif`
    bool irrefutable = false;  // MatchCase with a wildcard/capture pattern and no guard
    std::vector<Node> children;

    bool operator==(const Node&) const = default;
};

/// Normalized tree of a subject program; every node carries its line range.
struct SyntaxTree {
    Node root;
    /// Physical line count of the source the tree was parsed from.
    int line_count = 0;

    bool operator==(const SyntaxTree&) const = default;
};

class ParseError : public AnalysisError {
public:
    ParseError(int line, int column, const std::string& message);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    int line_;
    int column_;
    std::string message_;
};

SyntaxTree parse_program(std::string_view source);

/// Lines that are neither blank nor comment-only. Never fails: unterminated
/// strings simply run to the end of the text.
std::size_t count_loc(std::string_view source);

std::size_t physical_line_count(std::string_view source);

/// Depth-first pre-order visit of `root` and all of its descendants.
template <typename Fn>
void walk(const Node& root, Fn&& fn) {
    fn(root);
    for (const auto& child : root.children) walk(child, fn);
}

// Lexer surface, exposed for the parser and its tests.
namespace lex {

enum class TokenType { Name, Number, String, Op, Newline, Indent, Dedent, EndMarker };

struct Token {
    TokenType type;
    std::string text;
    int line = 0;
    int column = 0;
    int end_line = 0;
};

std::vector<Token> tokenize(std::string_view source);

}  // namespace lex

}  // namespace cerlens
