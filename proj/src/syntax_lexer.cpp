#include <array>
#include <cctype>
#include <string>
#include <vector>

#include "cerlens/syntax.hpp"

namespace cerlens::lex {

namespace {

bool is_name_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_name_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

constexpr std::array<std::string_view, 4> kThreeCharOps = {"**=", "//=", ">>=", "<<="};
constexpr std::array<std::string_view, 20> kTwoCharOps = {
    "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", ":=", "<>"};
constexpr std::string_view kOneCharOps = "+-*/%@&|^~<>()[]{},:.;=!";

struct Bracket {
    char open;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        while (pos_ < src_.size()) {
            if (at_line_start_) {
                if (!handle_indentation()) continue;
            }
            lex_token();
        }
        finish();
        return std::move(tokens_);
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    int column() const { return static_cast<int>(pos_ - line_begin_) + 1; }

    void newline_advance() {
        ++pos_;
        ++line_;
        line_begin_ = pos_;
    }

    void emit(TokenType type, std::string text, int line, int col) {
        tokens_.push_back(Token{type, std::move(text), line, col, line_});
    }

    // Returns false if the whole physical line was blank/comment and consumed.
    bool handle_indentation() {
        int width = 0;
        std::size_t p = pos_;
        while (p < src_.size()) {
            const char c = src_[p];
            if (c == ' ') {
                ++width;
            } else if (c == '\t') {
                width = (width / 8 + 1) * 8;
            } else if (c == '\f') {
                width = 0;
            } else {
                break;
            }
            ++p;
        }
        pos_ = p;
        const char c = peek();
        if (c == '#' || c == '\n' || c == '\r' || c == '\0') {
            while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            if (pos_ < src_.size()) newline_advance();
            return false;
        }
        at_line_start_ = false;
        if (width > indents_.back()) {
            indents_.push_back(width);
            emit(TokenType::Indent, "", line_, 1);
        } else {
            while (width < indents_.back()) {
                indents_.pop_back();
                emit(TokenType::Dedent, "", line_, 1);
            }
            if (width != indents_.back()) {
                throw ParseError(line_, column(), "unindent does not match any outer indentation level");
            }
        }
        return true;
    }

    void lex_token() {
        const char c = peek();
        if (c == ' ' || c == '\t' || c == '\f' || c == '\r') {
            ++pos_;
            return;
        }
        if (c == '#') {
            while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            return;
        }
        if (c == '\\') {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && src_[p] == '\r') ++p;
            if (p < src_.size() && src_[p] == '\n') {
                pos_ = p;
                newline_advance();
                return;
            }
            throw ParseError(line_, column(), "unexpected character after line continuation");
        }
        if (c == '\n') {
            if (brackets_.empty()) {
                if (!tokens_.empty() && tokens_.back().type != TokenType::Newline) {
                    emit(TokenType::Newline, "", line_, column());
                }
                at_line_start_ = true;
            }
            newline_advance();
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            lex_number();
            return;
        }
        if (is_name_start(static_cast<unsigned char>(c))) {
            if (string_prefix_length() > 0) {
                lex_string();
                return;
            }
            const int col = column();
            const std::size_t start = pos_;
            while (pos_ < src_.size() && is_name_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            emit(TokenType::Name, std::string(src_.substr(start, pos_ - start)), line_, col);
            return;
        }
        if (c == '"' || c == '\'') {
            lex_string();
            return;
        }
        lex_operator();
    }

    // Length of a string prefix (r, b, f, u, rb, ...) immediately followed by a quote, else 0.
    std::size_t string_prefix_length() const {
        auto is_prefix = [](char ch) {
            switch (ch) {
                case 'r': case 'R': case 'b': case 'B': case 'u': case 'U': case 'f': case 'F':
                    return true;
                default:
                    return false;
            }
        };
        std::size_t n = 0;
        while (n < 2 && is_prefix(peek(n))) ++n;
        if (n > 0 && (peek(n) == '"' || peek(n) == '\'')) return n;
        if (n == 2 && is_prefix(peek(0)) && (peek(1) == '"' || peek(1) == '\'')) return 1;
        return 0;
    }

    void lex_string() {
        const int line = line_;
        const int col = column();
        const std::size_t start = pos_;
        pos_ += string_prefix_length();
        const char quote = peek();
        const bool triple = peek(1) == quote && peek(2) == quote;
        pos_ += triple ? 3 : 1;
        while (true) {
            if (pos_ >= src_.size()) {
                throw ParseError(line, col, triple ? "unterminated triple-quoted string literal"
                                                   : "unterminated string literal");
            }
            const char c = src_[pos_];
            if (c == '\\') {
                ++pos_;
                if (pos_ < src_.size()) {
                    if (src_[pos_] == '\n') {
                        newline_advance();
                    } else {
                        ++pos_;
                    }
                }
                continue;
            }
            if (c == '\n') {
                if (!triple) throw ParseError(line, col, "unterminated string literal");
                newline_advance();
                continue;
            }
            if (c == quote) {
                if (!triple) {
                    ++pos_;
                    break;
                }
                if (peek(1) == quote && peek(2) == quote) {
                    pos_ += 3;
                    break;
                }
            }
            ++pos_;
        }
        tokens_.push_back(Token{TokenType::String, std::string(src_.substr(start, pos_ - start)),
                                line, col, line_});
    }

    void lex_number() {
        const int col = column();
        const std::size_t start = pos_;
        const bool radix = peek() == '0' && std::string_view("xXoObB").find(peek(1)) != std::string_view::npos &&
                           peek(1) != '\0';
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
                ++pos_;
                if (!radix && (c == 'e' || c == 'E') && (peek() == '+' || peek() == '-')) ++pos_;
                continue;
            }
            break;
        }
        emit(TokenType::Number, std::string(src_.substr(start, pos_ - start)), line_, col);
    }

    void lex_operator() {
        const int col = column();
        const std::string_view rest = src_.substr(pos_);
        if (rest.starts_with("...")) {
            pos_ += 3;
            emit(TokenType::Op, "...", line_, col);
            return;
        }
        for (auto op : kThreeCharOps) {
            if (rest.starts_with(op)) {
                pos_ += 3;
                emit(TokenType::Op, std::string(op), line_, col);
                return;
            }
        }
        for (auto op : kTwoCharOps) {
            if (rest.starts_with(op)) {
                pos_ += 2;
                emit(TokenType::Op, std::string(op), line_, col);
                return;
            }
        }
        const char c = peek();
        if (kOneCharOps.find(c) == std::string_view::npos) {
            throw ParseError(line_, col, std::string("invalid character '") + c + "'");
        }
        if (c == '(' || c == '[' || c == '{') {
            brackets_.push_back({c, line_, col});
        } else if (c == ')' || c == ']' || c == '}') {
            if (brackets_.empty()) {
                throw ParseError(line_, col, std::string("unmatched '") + c + "'");
            }
            const char open = brackets_.back().open;
            const char expected = open == '(' ? ')' : open == '[' ? ']' : '}';
            if (c != expected) {
                throw ParseError(line_, col, std::string("closing parenthesis '") + c +
                                                 "' does not match opening parenthesis '" + open + "'");
            }
            brackets_.pop_back();
        }
        ++pos_;
        emit(TokenType::Op, std::string(1, c), line_, col);
    }

    void finish() {
        if (!brackets_.empty()) {
            const auto& b = brackets_.back();
            throw ParseError(b.line, b.column, std::string("'") + b.open + "' was never closed");
        }
        if (!tokens_.empty() && tokens_.back().type != TokenType::Newline &&
            tokens_.back().type != TokenType::Dedent) {
            emit(TokenType::Newline, "", line_, column());
        }
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(TokenType::Dedent, "", line_, 1);
        }
        emit(TokenType::EndMarker, "", line_, column());
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_begin_ = 0;
    int line_ = 1;
    bool at_line_start_ = true;
    std::vector<int> indents_{0};
    std::vector<Bracket> brackets_;
    std::vector<Token> tokens_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace cerlens::lex
