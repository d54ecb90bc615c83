#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cerlens/syntax.hpp"

namespace cerlens {

using lex::Token;
using lex::TokenType;

ParseError::ParseError(int line, int column, const std::string& message)
    : AnalysisError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                    message),
      line_(line),
      column_(column),
      message_(message) {}

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Module: return "Module";
        case NodeKind::FunctionDef: return "FunctionDef";
        case NodeKind::If: return "If";
        case NodeKind::For: return "For";
        case NodeKind::While: return "While";
        case NodeKind::Match: return "Match";
        case NodeKind::MatchCase: return "MatchCase";
        case NodeKind::Try: return "Try";
        case NodeKind::ExceptHandler: return "ExceptHandler";
        case NodeKind::Call: return "Call";
        case NodeKind::Return: return "Return";
        case NodeKind::Assign: return "Assign";
        case NodeKind::Expr: return "Expr";
        case NodeKind::Other: return "Other";
    }
    return "Other";
}

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async",  "await", "break",
    "class", "continue", "def",   "del",      "elif",   "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",     "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",    "while",  "with",   "yield"};

bool is_keyword(std::string_view name) {
    return std::find(kKeywords.begin(), kKeywords.end(), name) != kKeywords.end();
}

constexpr std::array<std::string_view, 13> kAugAssign = {
    "+=", "-=", "*=", "/=", "//=", "%=", "@=", "&=", "|=", "^=", ">>=", "<<=", "**="};

using Sink = std::vector<Node>;

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Node parse_module(int line_count) {
        Node root;
        root.kind = NodeKind::Module;
        root.start_line = 1;
        root.end_line = line_count;
        while (!at(TokenType::EndMarker)) {
            if (at(TokenType::Newline)) {
                advance();
                continue;
            }
            Sink stmts;
            parse_statement(stmts);
            append(root, std::move(stmts), Slot::Body);
        }
        return root;
    }

private:
    // ---- token helpers -------------------------------------------------

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t n = 1) const {
        return toks_[std::min(pos_ + n, toks_.size() - 1)];
    }
    bool at(TokenType t) const { return cur().type == t; }
    bool at_op(std::string_view op) const { return cur().type == TokenType::Op && cur().text == op; }
    bool at_kw(std::string_view kw) const { return cur().type == TokenType::Name && cur().text == kw; }
    static bool is_op(const Token& t, std::string_view op) { return t.type == TokenType::Op && t.text == op; }
    static bool is_kw(const Token& t, std::string_view kw) { return t.type == TokenType::Name && t.text == kw; }

    const Token& advance() {
        const Token& t = toks_[pos_];
        if (t.type != TokenType::Newline && t.type != TokenType::Indent && t.type != TokenType::Dedent) {
            last_line_ = t.end_line;
        }
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    [[noreturn]] void fail(const std::string& message) const {
        const Token& t = cur();
        std::string what = message;
        if (t.type == TokenType::Indent) what = "unexpected indent";
        throw ParseError(t.line, t.column, what);
    }

    [[noreturn]] void fail_invalid() const {
        const Token& t = cur();
        if (t.type == TokenType::Newline || t.type == TokenType::EndMarker) {
            fail("invalid syntax: unexpected end of statement");
        }
        fail("invalid syntax near '" + t.text + "'");
    }

    const Token& expect_op(std::string_view op) {
        if (!at_op(op)) fail("expected '" + std::string(op) + "'");
        return advance();
    }
    const Token& expect_kw(std::string_view kw) {
        if (!at_kw(kw)) fail("expected '" + std::string(kw) + "'");
        return advance();
    }
    const Token& expect_name() {
        if (!at(TokenType::Name) || is_keyword(cur().text)) fail("expected a name");
        return advance();
    }

    bool at_statement_end() const {
        return at(TokenType::Newline) || at(TokenType::EndMarker) || at_op(";");
    }

    static void append(Node& parent, Sink&& kids, Slot slot) {
        for (auto& k : kids) {
            k.slot = slot;
            parent.children.push_back(std::move(k));
        }
    }

    static Node make(NodeKind kind, int line, std::string detail = {}) {
        Node n;
        n.kind = kind;
        n.start_line = line;
        n.end_line = line;
        n.detail = std::move(detail);
        return n;
    }

    void close(Node& n) const { n.end_line = std::max(n.start_line, last_line_); }

    // ---- statements ----------------------------------------------------

    void parse_statement(Sink& out) {
        if (at(TokenType::Indent)) fail("unexpected indent");
        if (at_op("@")) {
            out.push_back(parse_decorated());
            return;
        }
        if (at(TokenType::Name)) {
            const std::string& kw = cur().text;
            if (kw == "if") return out.push_back(parse_if(false));
            if (kw == "while") return out.push_back(parse_while());
            if (kw == "for") return out.push_back(parse_for());
            if (kw == "try") return out.push_back(parse_try());
            if (kw == "with") return out.push_back(parse_with());
            if (kw == "def") return out.push_back(parse_def(Sink{}, cur().line));
            if (kw == "class") return out.push_back(parse_class(Sink{}, cur().line));
            if (kw == "async") {
                const Token& next = peek();
                if (is_kw(next, "def") || is_kw(next, "for") || is_kw(next, "with")) {
                    const int line = cur().line;
                    advance();
                    Node n = is_kw(next, "def") ? parse_def(Sink{}, line)
                             : is_kw(next, "for") ? parse_for()
                                                  : parse_with();
                    n.start_line = line;
                    return out.push_back(std::move(n));
                }
            }
            if (kw == "match" && looks_like_match()) return out.push_back(parse_match());
        }
        parse_simple_statements(out);
    }

    void parse_simple_statements(Sink& out) {
        out.push_back(parse_small_statement());
        while (at_op(";")) {
            advance();
            if (at(TokenType::Newline) || at(TokenType::EndMarker)) break;
            out.push_back(parse_small_statement());
        }
        if (at(TokenType::EndMarker)) return;
        if (!at(TokenType::Newline)) fail_invalid();
        advance();
    }

    Node parse_small_statement() {
        const Token& t = cur();
        const int line = t.line;
        if (t.type == TokenType::Name) {
            const std::string kw = t.text;
            if (kw == "pass" || kw == "break" || kw == "continue") {
                advance();
                Node n = make(NodeKind::Other, line, kw);
                close(n);
                return n;
            }
            if (kw == "return") {
                advance();
                Node n = make(NodeKind::Return, line);
                Sink s;
                if (!at_statement_end()) parse_testlist_star_expr(s);
                append(n, std::move(s), Slot::Header);
                close(n);
                return n;
            }
            if (kw == "raise") {
                advance();
                Node n = make(NodeKind::Other, line, "raise");
                Sink s;
                if (!at_statement_end()) {
                    parse_test(s);
                    if (at_kw("from")) {
                        advance();
                        parse_test(s);
                    }
                }
                append(n, std::move(s), Slot::Header);
                close(n);
                return n;
            }
            if (kw == "global" || kw == "nonlocal") {
                advance();
                expect_name();
                while (at_op(",")) {
                    advance();
                    expect_name();
                }
                Node n = make(NodeKind::Other, line, kw);
                close(n);
                return n;
            }
            if (kw == "del") {
                advance();
                Node n = make(NodeKind::Other, line, "del");
                Sink s;
                parse_exprlist(s);
                append(n, std::move(s), Slot::Header);
                close(n);
                return n;
            }
            if (kw == "assert") {
                advance();
                Node n = make(NodeKind::Other, line, "assert");
                Sink s;
                parse_test(s);
                if (at_op(",")) {
                    advance();
                    parse_test(s);
                }
                append(n, std::move(s), Slot::Header);
                close(n);
                return n;
            }
            if (kw == "import") {
                advance();
                parse_dotted_as_names();
                Node n = make(NodeKind::Other, line, "import");
                close(n);
                return n;
            }
            if (kw == "from") {
                advance();
                parse_import_from();
                Node n = make(NodeKind::Other, line, "import");
                close(n);
                return n;
            }
        }
        return parse_expression_statement();
    }

    void parse_dotted_name() {
        expect_name();
        while (at_op(".")) {
            advance();
            expect_name();
        }
    }

    void parse_dotted_as_names() {
        while (true) {
            parse_dotted_name();
            if (at_kw("as")) {
                advance();
                expect_name();
            }
            if (!at_op(",")) break;
            advance();
        }
    }

    void parse_import_from() {
        bool relative = false;
        while (at_op(".") || at_op("...")) {
            advance();
            relative = true;
        }
        if (!at_kw("import")) parse_dotted_name();
        else if (!relative) fail("expected a module name");
        expect_kw("import");
        if (at_op("*")) {
            advance();
            return;
        }
        const bool paren = at_op("(");
        if (paren) advance();
        while (true) {
            expect_name();
            if (at_kw("as")) {
                advance();
                expect_name();
            }
            if (!at_op(",")) break;
            advance();
            if (paren && at_op(")")) break;
        }
        if (paren) expect_op(")");
    }

    Node parse_expression_statement() {
        const int line = cur().line;
        const std::size_t start = pos_;
        Sink s;
        if (at_kw("yield")) {
            parse_yield(s);
        } else {
            parse_testlist_star_expr(s);
        }
        bool only_strings = true;
        for (std::size_t i = start; i < pos_; ++i) {
            if (toks_[i].type != TokenType::String) only_strings = false;
        }
        NodeKind kind = NodeKind::Expr;
        if (at_op(":")) {
            advance();
            parse_test(s);
            if (at_op("=")) {
                advance();
                parse_assign_value(s);
            }
            kind = NodeKind::Assign;
        } else if (cur().type == TokenType::Op &&
                   std::find(kAugAssign.begin(), kAugAssign.end(), cur().text) != kAugAssign.end()) {
            advance();
            parse_assign_value(s);
            kind = NodeKind::Assign;
        } else {
            while (at_op("=")) {
                advance();
                parse_assign_value(s);
                kind = NodeKind::Assign;
            }
        }
        if (!at_statement_end()) fail_invalid();
        Node n = make(kind, line, kind == NodeKind::Expr && only_strings ? "docstring" : "");
        append(n, std::move(s), Slot::Header);
        close(n);
        return n;
    }

    void parse_assign_value(Sink& s) {
        if (at_kw("yield")) {
            parse_yield(s);
        } else {
            parse_testlist_star_expr(s);
        }
    }

    // ':' followed by either an indented suite or simple statements on the same line.
    void parse_block(Node& parent, Slot slot) {
        expect_op(":");
        Sink body;
        if (at(TokenType::Newline)) {
            advance();
            if (!at(TokenType::Indent)) fail("expected an indented block");
            advance();
            while (!at(TokenType::Dedent) && !at(TokenType::EndMarker)) {
                if (at(TokenType::Newline)) {
                    advance();
                    continue;
                }
                parse_statement(body);
            }
            if (at(TokenType::Dedent)) advance();
        } else {
            parse_simple_statements(body);
        }
        append(parent, std::move(body), slot);
    }

    Node parse_if(bool elif) {
        Node n = make(NodeKind::If, cur().line);
        n.is_elif = elif;
        advance();  // if / elif
        Sink s;
        parse_namedexpr(s);
        append(n, std::move(s), Slot::Header);
        parse_block(n, Slot::Body);
        if (at_kw("elif")) {
            Node chained = parse_if(true);
            chained.slot = Slot::OrElse;
            n.children.push_back(std::move(chained));
        } else if (at_kw("else")) {
            advance();
            parse_block(n, Slot::OrElse);
        }
        close(n);
        return n;
    }

    Node parse_while() {
        Node n = make(NodeKind::While, cur().line);
        advance();
        Sink s;
        parse_namedexpr(s);
        append(n, std::move(s), Slot::Header);
        parse_block(n, Slot::Body);
        if (at_kw("else")) {
            advance();
            parse_block(n, Slot::OrElse);
        }
        close(n);
        return n;
    }

    Node parse_for() {
        Node n = make(NodeKind::For, cur().line);
        expect_kw("for");
        Sink s;
        parse_exprlist(s);
        expect_kw("in");
        parse_testlist_star_expr(s);
        append(n, std::move(s), Slot::Header);
        parse_block(n, Slot::Body);
        if (at_kw("else")) {
            advance();
            parse_block(n, Slot::OrElse);
        }
        close(n);
        return n;
    }

    Node parse_try() {
        Node n = make(NodeKind::Try, cur().line);
        advance();
        parse_block(n, Slot::Body);
        bool handled = false;
        while (at_kw("except")) {
            Node h = make(NodeKind::ExceptHandler, cur().line);
            advance();
            if (at_op("*")) advance();
            Sink s;
            if (!at_op(":")) {
                parse_test(s);
                if (at_op(",")) {
                    // except (A, B) written without parentheses is a syntax error in Python 3
                    fail("multiple exception types must be parenthesized");
                }
                if (at_kw("as")) {
                    advance();
                    expect_name();
                }
            }
            append(h, std::move(s), Slot::Header);
            parse_block(h, Slot::Body);
            close(h);
            h.slot = Slot::Handler;
            n.children.push_back(std::move(h));
            handled = true;
        }
        if (handled && at_kw("else")) {
            advance();
            parse_block(n, Slot::OrElse);
        }
        if (at_kw("finally")) {
            advance();
            parse_block(n, Slot::Finally);
            handled = true;
        }
        if (!handled) fail("expected 'except' or 'finally' block");
        close(n);
        return n;
    }

    Node parse_with() {
        Node n = make(NodeKind::Other, cur().line, "with");
        expect_kw("with");
        Sink s;
        bool parsed = false;
        if (at_op("(")) {
            // Parenthesized context managers: with (a as b, c):
            const std::size_t save = pos_;
            const int save_line = last_line_;
            try {
                Sink trial;
                advance();
                parse_with_items(trial, true);
                expect_op(")");
                if (!at_op(":")) fail("expected ':'");
                s = std::move(trial);
                parsed = true;
            } catch (const ParseError&) {
                pos_ = save;
                last_line_ = save_line;
            }
        }
        if (!parsed) parse_with_items(s, false);
        append(n, std::move(s), Slot::Header);
        parse_block(n, Slot::Body);
        close(n);
        return n;
    }

    void parse_with_items(Sink& s, bool parenthesized) {
        while (true) {
            parse_test(s);
            if (at_kw("as")) {
                advance();
                parse_star_target(s);
            }
            if (!at_op(",")) break;
            advance();
            if (parenthesized && at_op(")")) break;
        }
    }

    void parse_star_target(Sink& s) {
        if (at_op("*")) advance();
        parse_expr(s);
    }

    Node parse_decorated() {
        const int line = cur().line;
        Sink decorators;
        while (at_op("@")) {
            advance();
            parse_namedexpr(decorators);
            if (!at(TokenType::Newline)) fail_invalid();
            advance();
        }
        if (at_kw("async") && is_kw(peek(), "def")) advance();
        if (at_kw("def")) return parse_def(std::move(decorators), line);
        if (at_kw("class")) return parse_class(std::move(decorators), line);
        fail("expected 'def' or 'class' after decorator");
    }

    Node parse_def(Sink decorators, int line) {
        expect_kw("def");
        const Token& name = expect_name();
        Node n = make(NodeKind::FunctionDef, line, name.text);
        Sink s = std::move(decorators);
        expect_op("(");
        parse_parameters(s, ")");
        expect_op(")");
        if (at_op("->")) {
            advance();
            parse_test(s);
        }
        append(n, std::move(s), Slot::Header);
        parse_block(n, Slot::Body);
        close(n);
        return n;
    }

    // Parameter lists of def (closed by ')') and lambda (closed by ':').
    void parse_parameters(Sink& s, std::string_view closer) {
        const bool annotated = closer == ")";
        while (!at_op(closer)) {
            if (at_op("/")) {
                advance();
            } else if (at_op("*") || at_op("**")) {
                const bool bare_star = at_op("*");
                advance();
                if (!(bare_star && (at_op(",") || at_op(closer)))) {
                    expect_name();
                    if (annotated && at_op(":")) {
                        advance();
                        parse_test(s);
                    }
                }
            } else {
                expect_name();
                if (annotated && at_op(":")) {
                    advance();
                    parse_test(s);
                }
                if (at_op("=")) {
                    advance();
                    parse_test(s);
                }
            }
            if (!at_op(",")) break;
            advance();
        }
    }

    Node parse_class(Sink decorators, int line) {
        expect_kw("class");
        const Token& name = expect_name();
        Node n = make(NodeKind::Other, line, "class " + name.text);
        Sink s = std::move(decorators);
        if (at_op("(")) {
            advance();
            parse_arglist(s);
            expect_op(")");
        }
        append(n, std::move(s), Slot::Header);
        parse_block(n, Slot::Body);
        close(n);
        return n;
    }

    // `match` is a soft keyword: a match statement's header line ends in ':'
    // and is followed by an indented `case`.
    bool looks_like_match() const {
        const Token& next = peek();
        if (next.type == TokenType::Op) {
            static constexpr std::array<std::string_view, 6> ok = {"(", "[", "{", "-", "*", "..."};
            if (std::find(ok.begin(), ok.end(), next.text) == ok.end()) return false;
        }
        if (next.type == TokenType::Newline || next.type == TokenType::EndMarker) return false;
        std::size_t i = pos_ + 1;
        while (i < toks_.size() && toks_[i].type != TokenType::Newline &&
               toks_[i].type != TokenType::EndMarker) {
            ++i;
        }
        if (i >= toks_.size() || toks_[i].type != TokenType::Newline) return false;
        if (!is_op(toks_[i - 1], ":")) return false;
        return i + 2 < toks_.size() && toks_[i + 1].type == TokenType::Indent &&
               is_kw(toks_[i + 2], "case");
    }

    Node parse_match() {
        Node n = make(NodeKind::Match, cur().line);
        advance();  // match
        Sink s;
        parse_testlist_star_expr(s);
        append(n, std::move(s), Slot::Header);
        expect_op(":");
        if (!at(TokenType::Newline)) fail_invalid();
        advance();
        if (!at(TokenType::Indent)) fail("expected an indented block");
        advance();
        while (!at(TokenType::Dedent) && !at(TokenType::EndMarker)) {
            if (at(TokenType::Newline)) {
                advance();
                continue;
            }
            if (!at_kw("case")) fail("expected 'case' inside match");
            Node c = parse_case();
            c.slot = Slot::Case;
            n.children.push_back(std::move(c));
        }
        if (at(TokenType::Dedent)) advance();
        if (n.children.empty() || n.children.back().kind != NodeKind::MatchCase) {
            fail("match statement without case blocks");
        }
        close(n);
        return n;
    }

    Node parse_case() {
        Node c = make(NodeKind::MatchCase, cur().line);
        advance();  // case
        std::string pattern;
        std::size_t pattern_tokens = 0;
        int depth = 0;
        while (true) {
            const Token& t = cur();
            if (t.type == TokenType::Newline || t.type == TokenType::EndMarker) fail("expected ':'");
            if (depth == 0 && (is_op(t, ":") || is_kw(t, "if"))) break;
            if (t.type == TokenType::Op) {
                if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
                if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
            }
            if (!pattern.empty() && t.type != TokenType::Op && pattern.back() != '(' &&
                pattern.back() != '[') {
                pattern += ' ';
            }
            pattern += t.text;
            ++pattern_tokens;
            advance();
        }
        if (pattern_tokens == 0) fail("expected a case pattern");
        const bool capture = pattern_tokens == 1 && toks_[pos_ - 1].type == TokenType::Name &&
                             !is_keyword(pattern);
        bool guarded = false;
        Sink s;
        if (at_kw("if")) {
            advance();
            parse_namedexpr(s);
            guarded = true;
        }
        c.detail = pattern;
        c.irrefutable = capture && !guarded;
        append(c, std::move(s), Slot::Header);
        parse_block(c, Slot::Body);
        close(c);
        return c;
    }

    // ---- expressions ---------------------------------------------------
    //
    // Expressions are fully parsed so malformed input is rejected, but only
    // calls, lambdas and comprehensions are kept as nodes. Each function
    // returns the dotted-name text of the expression when it is a plain
    // name or attribute chain ("" otherwise), used to name callees.

    void parse_testlist_star_expr(Sink& s) {
        parse_test_or_star(s);
        while (at_op(",")) {
            advance();
            if (!starts_expression()) break;
            parse_test_or_star(s);
        }
    }

    void parse_exprlist(Sink& s) {
        parse_star_target(s);
        while (at_op(",")) {
            advance();
            if (!starts_expression() || at_kw("in")) break;
            parse_star_target(s);
        }
    }

    bool starts_expression() const {
        const Token& t = cur();
        switch (t.type) {
            case TokenType::Name:
                if (!is_keyword(t.text)) return true;
                return t.text == "True" || t.text == "False" || t.text == "None" || t.text == "not" ||
                       t.text == "lambda" || t.text == "await" || t.text == "yield";
            case TokenType::Number:
            case TokenType::String:
                return true;
            case TokenType::Op:
                return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" ||
                       t.text == "+" || t.text == "~" || t.text == "*" || t.text == "**" ||
                       t.text == "...";
            default:
                return false;
        }
    }

    void parse_test_or_star(Sink& s) {
        if (at_op("*")) {
            advance();
            parse_expr(s);
            return;
        }
        parse_namedexpr(s);
    }

    std::string parse_namedexpr(Sink& s) {
        if (cur().type == TokenType::Name && !is_keyword(cur().text) && is_op(peek(), ":=")) {
            advance();
            advance();
            parse_test(s);
            return {};
        }
        return parse_test(s);
    }

    std::string parse_test(Sink& s) {
        if (at_kw("lambda")) {
            parse_lambda(s);
            return {};
        }
        std::string name = parse_or_test(s);
        if (at_kw("if")) {
            advance();
            parse_or_test(s);
            expect_kw("else");
            parse_test(s);
            return {};
        }
        return name;
    }

    void parse_lambda(Sink& s) {
        Node n = make(NodeKind::Other, cur().line, "lambda");
        advance();
        Sink inner;
        parse_parameters(inner, ":");
        expect_op(":");
        parse_test(inner);
        append(n, std::move(inner), Slot::Body);
        close(n);
        s.push_back(std::move(n));
    }

    std::string parse_or_test(Sink& s) {
        std::string name = parse_and_test(s);
        while (at_kw("or")) {
            advance();
            parse_and_test(s);
            name.clear();
        }
        return name;
    }

    std::string parse_and_test(Sink& s) {
        std::string name = parse_not_test(s);
        while (at_kw("and")) {
            advance();
            parse_not_test(s);
            name.clear();
        }
        return name;
    }

    std::string parse_not_test(Sink& s) {
        if (at_kw("not")) {
            advance();
            parse_not_test(s);
            return {};
        }
        return parse_comparison(s);
    }

    bool at_comparison_op() {
        if (cur().type == TokenType::Op) {
            static constexpr std::array<std::string_view, 7> ops = {"<", ">", "==", ">=", "<=", "!=", "<>"};
            return std::find(ops.begin(), ops.end(), cur().text) != ops.end();
        }
        return at_kw("in") || at_kw("is") || (at_kw("not") && is_kw(peek(), "in"));
    }

    std::string parse_comparison(Sink& s) {
        std::string name = parse_expr(s);
        while (at_comparison_op()) {
            if (at_kw("not")) advance();
            if (at_kw("is")) {
                advance();
                if (at_kw("not")) advance();
            } else {
                advance();
            }
            parse_expr(s);
            name.clear();
        }
        return name;
    }

    static constexpr std::array<std::array<std::string_view, 5>, 6> kBinaryLevels = {{
        {"|", "", "", "", ""},
        {"^", "", "", "", ""},
        {"&", "", "", "", ""},
        {"<<", ">>", "", "", ""},
        {"+", "-", "", "", ""},
        {"*", "/", "//", "%", "@"},
    }};

    bool at_binary_op(std::size_t level) const {
        if (cur().type != TokenType::Op) return false;
        for (auto op : kBinaryLevels[level]) {
            if (!op.empty() && cur().text == op) return true;
        }
        return false;
    }

    std::string parse_binary(Sink& s, std::size_t level) {
        if (level == kBinaryLevels.size()) return parse_factor(s);
        std::string name = parse_binary(s, level + 1);
        while (at_binary_op(level)) {
            advance();
            parse_binary(s, level + 1);
            name.clear();
        }
        return name;
    }

    std::string parse_expr(Sink& s) { return parse_binary(s, 0); }

    std::string parse_factor(Sink& s) {
        if (at_op("+") || at_op("-") || at_op("~")) {
            advance();
            parse_factor(s);
            return {};
        }
        return parse_power(s);
    }

    std::string parse_power(Sink& s) {
        if (at_kw("await")) {
            advance();
            parse_primary(s);
            if (at_op("**")) {
                advance();
                parse_factor(s);
            }
            return {};
        }
        std::string name = parse_primary(s);
        if (at_op("**")) {
            advance();
            parse_factor(s);
            return {};
        }
        return name;
    }

    std::string parse_primary(Sink& s) {
        const int line = cur().line;
        Sink local;
        std::string name = parse_atom(local);
        while (true) {
            if (at_op(".")) {
                advance();
                if (!at(TokenType::Name)) fail("expected an attribute name");
                const std::string attr = advance().text;
                if (!name.empty()) name += "." + attr;
            } else if (at_op("(")) {
                advance();
                Node call = make(NodeKind::Call, line, name.empty() ? "<expr>" : name);
                Sink args;
                parse_arglist(args);
                expect_op(")");
                append(call, std::move(local), Slot::Header);
                append(call, std::move(args), Slot::Header);
                close(call);
                local.clear();
                local.push_back(std::move(call));
                name.clear();
            } else if (at_op("[")) {
                advance();
                parse_subscripts(local);
                expect_op("]");
                name.clear();
            } else {
                break;
            }
        }
        for (auto& n : local) s.push_back(std::move(n));
        return name;
    }

    void parse_arglist(Sink& s) {
        while (!at_op(")")) {
            if (at_op("*") || at_op("**")) {
                advance();
                parse_test(s);
            } else {
                Sink arg;
                const int line = cur().line;
                const bool keyword_arg = cur().type == TokenType::Name && is_op(peek(), "=");
                if (keyword_arg) {
                    advance();
                    advance();
                    parse_test(arg);
                } else {
                    parse_namedexpr(arg);
                    if (at_kw("for") || at_kw("async")) {
                        wrap_comprehension(arg, line);
                    }
                }
                for (auto& n : arg) s.push_back(std::move(n));
            }
            if (!at_op(",")) break;
            advance();
        }
    }

    void parse_subscripts(Sink& s) {
        while (true) {
            if (at_op("*")) {
                advance();
                parse_expr(s);
            } else {
                if (!at_op(":")) parse_namedexpr(s);
                if (at_op(":")) {
                    advance();
                    if (!at_op(":") && !at_op("]") && !at_op(",")) parse_test(s);
                    if (at_op(":")) {
                        advance();
                        if (!at_op("]") && !at_op(",")) parse_test(s);
                    }
                }
            }
            if (!at_op(",")) break;
            advance();
            if (at_op("]")) break;
        }
    }

    // Turns the already-parsed element calls in `elem` into an Other
    // "comprehension" node and parses the for/if clauses into it.
    void wrap_comprehension(Sink& elem, int line) {
        Node n = make(NodeKind::Other, line, "comprehension");
        Sink inner = std::move(elem);
        elem.clear();
        while (at_kw("for") || at_kw("async") || at_kw("if")) {
            if (at_kw("if")) {
                advance();
                if (at_kw("lambda")) {
                    parse_lambda(inner);
                } else {
                    parse_or_test(inner);
                }
                continue;
            }
            if (at_kw("async")) advance();
            expect_kw("for");
            parse_exprlist(inner);
            expect_kw("in");
            parse_or_test(inner);
        }
        append(n, std::move(inner), Slot::Body);
        close(n);
        elem.push_back(std::move(n));
    }

    void parse_yield(Sink& s) {
        expect_kw("yield");
        if (at_kw("from")) {
            advance();
            parse_test(s);
        } else if (!at_statement_end() && !at_op(")") && !at_op("=")) {
            parse_testlist_star_expr(s);
        }
    }

    std::string parse_atom(Sink& s) {
        const Token& t = cur();
        const int line = t.line;
        switch (t.type) {
            case TokenType::Number:
                advance();
                return {};
            case TokenType::String:
                while (at(TokenType::String)) advance();
                return {};
            case TokenType::Name:
                if (t.text == "True" || t.text == "False" || t.text == "None") {
                    advance();
                    return {};
                }
                if (is_keyword(t.text)) fail_invalid();
                return advance().text;
            case TokenType::Op:
                break;
            default:
                fail_invalid();
        }
        if (at_op("...")) {
            advance();
            return {};
        }
        if (at_op("(")) {
            advance();
            if (at_op(")")) {
                advance();
                return {};
            }
            if (at_kw("yield")) {
                parse_yield(s);
                expect_op(")");
                return {};
            }
            Sink elem;
            parse_test_or_star(elem);
            if (at_kw("for") || at_kw("async")) {
                wrap_comprehension(elem, line);
            } else {
                while (at_op(",")) {
                    advance();
                    if (at_op(")")) break;
                    parse_test_or_star(elem);
                }
            }
            expect_op(")");
            for (auto& n : elem) s.push_back(std::move(n));
            return {};
        }
        if (at_op("[")) {
            advance();
            Sink elem;
            if (!at_op("]")) {
                parse_test_or_star(elem);
                if (at_kw("for") || at_kw("async")) {
                    wrap_comprehension(elem, line);
                } else {
                    while (at_op(",")) {
                        advance();
                        if (at_op("]")) break;
                        parse_test_or_star(elem);
                    }
                }
            }
            expect_op("]");
            for (auto& n : elem) s.push_back(std::move(n));
            return {};
        }
        if (at_op("{")) {
            advance();
            Sink elem;
            if (!at_op("}")) {
                bool dict = parse_dict_or_set_item(elem, std::nullopt);
                if (at_kw("for") || at_kw("async")) {
                    wrap_comprehension(elem, line);
                } else {
                    while (at_op(",")) {
                        advance();
                        if (at_op("}")) break;
                        parse_dict_or_set_item(elem, dict);
                    }
                }
            }
            expect_op("}");
            for (auto& n : elem) s.push_back(std::move(n));
            return {};
        }
        fail_invalid();
    }

    // Returns true for a dict item. `dict` pins the kind after the first item.
    bool parse_dict_or_set_item(Sink& s, std::optional<bool> dict) {
        if (at_op("**")) {
            if (dict == false) fail_invalid();
            advance();
            parse_expr(s);
            return true;
        }
        if (at_op("*")) {
            if (dict == true) fail_invalid();
            advance();
            parse_expr(s);
            return false;
        }
        parse_namedexpr(s);
        if (at_op(":")) {
            if (dict == false) fail_invalid();
            advance();
            parse_test(s);
            return true;
        }
        if (dict == true) fail("expected ':'");
        return false;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int last_line_ = 0;
};

}  // namespace

SyntaxTree parse_program(std::string_view source) {
    SyntaxTree tree;
    tree.line_count = static_cast<int>(physical_line_count(source));
    Parser parser(lex::tokenize(source));
    tree.root = parser.parse_module(tree.line_count);
    return tree;
}

}  // namespace cerlens
