#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cerlens/syntax.hpp"

namespace cerlens {

struct CfgNode {
    enum class Role { Entry, Exit, Statement };

    int id = 0;
    Role role = Role::Statement;
    /// Index into ControlFlowGraph::functions.
    int function = 0;
    int line = 0;
    std::string label;
};

struct CfgFunction {
    std::string name;  // "<module>" for the top level
    int entry = 0;
    int exit = 0;
};

/// Statement-level graph of every function body plus the module top level.
/// Edges form a list; construction never produces parallel edges.
struct ControlFlowGraph {
    std::vector<CfgNode> nodes;
    std::vector<std::pair<int, int>> edges;
    std::vector<CfgFunction> functions;

    /// P: one per function/method definition, plus one for a non-empty top level.
    std::size_t function_count() const { return functions.size(); }

    /// Nodes with no path from their function's entry.
    std::vector<int> unreachable() const;

    /// Graphviz dump; node ids are assigned in construction order and stable.
    std::string to_dot() const;
};

ControlFlowGraph build_cfg(const SyntaxTree& tree);

/// E - N + 2P.
long cyclomatic_complexity(const ControlFlowGraph& cfg);

/// Structural nesting-weighted count (see README for the rule table).
long cognitive_complexity(const SyntaxTree& tree);

struct ComplexityProfile {
    std::size_t loc = 0;
    long cyclomatic = 0;
    long cognitive = 0;

    bool operator==(const ComplexityProfile&) const = default;
};

ComplexityProfile complexity_profile(const SyntaxTree& tree, std::string_view source);

}  // namespace cerlens
