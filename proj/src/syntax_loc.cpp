#include <cstddef>
#include <string_view>

#include "cerlens/syntax.hpp"

namespace cerlens {

std::size_t physical_line_count(std::string_view source) {
    if (source.empty()) return 0;
    std::size_t lines = 0;
    for (char c : source) lines += c == '\n';
    if (source.back() != '\n') ++lines;
    return lines;
}

std::size_t count_loc(std::string_view source) {
    // Quote character of an open triple-quoted string, or '\0'.
    char open_triple = '\0';
    std::size_t loc = 0;

    std::size_t begin = 0;
    while (begin < source.size()) {
        std::size_t end = source.find('\n', begin);
        if (end == std::string_view::npos) end = source.size();
        const std::string_view line = source.substr(begin, end - begin);
        begin = end + 1;

        const auto first = line.find_first_not_of(" \t\r\f\v");
        const bool blank = first == std::string_view::npos;
        const bool comment_only = !blank && open_triple == '\0' && line[first] == '#';
        if (!blank && !comment_only) ++loc;

        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (open_triple != '\0') {
                if (c == '\\') {
                    ++i;
                } else if (c == open_triple && line.substr(i, 3) == std::string(3, open_triple)) {
                    open_triple = '\0';
                    i += 2;
                }
                continue;
            }
            if (c == '#') break;
            if (c != '"' && c != '\'') continue;
            if (line.substr(i, 3) == std::string(3, c)) {
                open_triple = c;
                i += 2;
                continue;
            }
            // Single-quoted string: runs to its closing quote or end of line.
            for (++i; i < line.size() && line[i] != c; ++i) {
                if (line[i] == '\\') ++i;
            }
        }
    }
    return loc;
}

}  // namespace cerlens
