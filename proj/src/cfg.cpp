#include "cerlens/cfg.hpp"

#include <algorithm>
#include <sstream>

namespace cerlens {

namespace {

using Frontier = std::vector<int>;

bool is_class(const Node& n) { return n.kind == NodeKind::Other && n.detail.starts_with("class "); }

bool is_definition_only(const Node& stmt) {
    if (stmt.kind == NodeKind::FunctionDef) return true;
    if (!is_class(stmt)) return false;
    for (const auto& child : stmt.children) {
        if (child.slot != Slot::Body) continue;
        const bool ok = child.kind == NodeKind::FunctionDef || is_definition_only(child) ||
                        (child.kind == NodeKind::Other && child.detail == "pass") ||
                        (child.kind == NodeKind::Expr && child.detail == "docstring");
        if (!ok) return false;
    }
    return true;
}

std::string describe(const Node& n) {
    std::string label(to_string(n.kind));
    if (!n.detail.empty()) label += " " + n.detail;
    return label;
}

class Builder {
public:
    ControlFlowGraph run(const SyntaxTree& tree) {
        const Node& module = tree.root;
        const bool top_level_empty =
            std::all_of(module.children.begin(), module.children.end(), is_definition_only);
        if (!top_level_empty) build_function("<module>", module);
        collect_functions(module);
        return std::move(g_);
    }

private:
    struct Loop {
        int header;
        Frontier breaks;
    };

    void collect_functions(const Node& node) {
        for (const auto& child : node.children) {
            if (child.kind == NodeKind::FunctionDef) build_function(child.detail, child);
            collect_functions(child);
        }
    }

    void build_function(const std::string& name, const Node& body_owner) {
        const int index = static_cast<int>(g_.functions.size());
        g_.functions.push_back({name, 0, 0});
        function_ = index;
        const int entry = add_node(CfgNode::Role::Entry, body_owner.start_line, name + " entry");
        exit_ = add_node(CfgNode::Role::Exit, body_owner.end_line, name + " exit");
        g_.functions.back().entry = entry;
        g_.functions.back().exit = exit_;
        loops_.clear();
        const Frontier out = block(body_owner, Slot::Body, {entry});
        link(out, exit_);
    }

    int add_node(CfgNode::Role role, int line, std::string label) {
        const int id = static_cast<int>(g_.nodes.size());
        g_.nodes.push_back({id, role, function_, line, std::move(label)});
        return id;
    }

    int statement_node(const Node& n) { return add_node(CfgNode::Role::Statement, n.start_line, describe(n)); }

    void link(const Frontier& from, int to) {
        for (int f : from) g_.edges.emplace_back(f, to);
    }

    static void merge_into(Frontier& dst, const Frontier& src) {
        for (int id : src) {
            if (std::find(dst.begin(), dst.end(), id) == dst.end()) dst.push_back(id);
        }
    }

    Frontier block(const Node& owner, Slot slot, Frontier in) {
        for (const auto& child : owner.children) {
            if (child.slot == slot) in = statement(child, std::move(in));
        }
        return in;
    }

    Frontier statement(const Node& s, Frontier in) {
        switch (s.kind) {
            case NodeKind::If: return if_statement(s, in);
            case NodeKind::For:
            case NodeKind::While: return loop_statement(s, in);
            case NodeKind::Try: return try_statement(s, in);
            case NodeKind::Match: return match_statement(s, in);
            case NodeKind::Return: {
                const int id = statement_node(s);
                link(in, id);
                link({id}, exit_);
                return {};
            }
            default:
                break;
        }
        const int id = statement_node(s);
        link(in, id);
        if (s.kind != NodeKind::Other) return {id};

        if (s.detail == "raise") {
            link({id}, exit_);
            return {};
        }
        if (s.detail == "break" && !loops_.empty()) {
            loops_.back().breaks.push_back(id);
            return {};
        }
        if (s.detail == "continue" && !loops_.empty()) {
            link({id}, loops_.back().header);
            return {};
        }
        if (s.detail == "with" || is_class(s)) {
            // Body statements run inline after the header.
            return block(s, Slot::Body, {id});
        }
        return {id};
    }

    Frontier if_statement(const Node& s, const Frontier& in) {
        const int id = statement_node(s);
        link(in, id);
        Frontier out = block(s, Slot::Body, {id});
        const bool has_else = std::any_of(s.children.begin(), s.children.end(),
                                          [](const Node& c) { return c.slot == Slot::OrElse; });
        merge_into(out, has_else ? block(s, Slot::OrElse, {id}) : Frontier{id});
        return out;
    }

    Frontier loop_statement(const Node& s, const Frontier& in) {
        const int header = statement_node(s);
        link(in, header);
        loops_.push_back({header, {}});
        const Frontier body = block(s, Slot::Body, {header});
        link(body, header);
        Loop loop = std::move(loops_.back());
        loops_.pop_back();
        Frontier out = block(s, Slot::OrElse, {header});
        merge_into(out, loop.breaks);
        return out;
    }

    Frontier try_statement(const Node& s, const Frontier& in) {
        const int id = statement_node(s);
        link(in, id);
        Frontier out = block(s, Slot::Body, {id});
        out = block(s, Slot::OrElse, std::move(out));
        for (const auto& handler : s.children) {
            if (handler.slot != Slot::Handler) continue;
            const int h = statement_node(handler);
            link({id}, h);
            merge_into(out, block(handler, Slot::Body, {h}));
        }
        return block(s, Slot::Finally, std::move(out));
    }

    Frontier match_statement(const Node& s, const Frontier& in) {
        const int id = statement_node(s);
        link(in, id);
        Frontier out;
        bool exhaustive = false;
        for (const auto& arm : s.children) {
            if (arm.slot != Slot::Case) continue;
            const int c = statement_node(arm);
            link({id}, c);
            merge_into(out, block(arm, Slot::Body, {c}));
            exhaustive = exhaustive || arm.irrefutable;
        }
        if (!exhaustive) merge_into(out, {id});
        return out;
    }

    ControlFlowGraph g_;
    int function_ = 0;
    int exit_ = 0;
    std::vector<Loop> loops_;
};

}  // namespace

std::vector<int> ControlFlowGraph::unreachable() const {
    std::vector<std::vector<int>> succ(nodes.size());
    for (const auto& [from, to] : edges) succ[from].push_back(to);
    std::vector<bool> seen(nodes.size(), false);
    std::vector<int> stack;
    for (const auto& f : functions) {
        stack.push_back(f.entry);
        seen[f.entry] = true;
    }
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        for (int s : succ[n]) {
            if (!seen[s]) {
                seen[s] = true;
                stack.push_back(s);
            }
        }
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!seen[i]) out.push_back(static_cast<int>(i));
    }
    return out;
}

std::string ControlFlowGraph::to_dot() const {
    std::ostringstream out;
    out << "digraph cfg {\n  node [shape=box, fontname=\"monospace\"];\n";
    for (std::size_t f = 0; f < functions.size(); ++f) {
        out << "  subgraph cluster_" << f << " {\n    label=\"" << functions[f].name << "\";\n";
        for (const auto& n : nodes) {
            if (n.function != static_cast<int>(f)) continue;
            std::string label = n.label;
            std::string escaped;
            for (char c : label) {
                if (c == '"' || c == '\\') escaped += '\\';
                escaped += c;
            }
            out << "    n" << n.id << " [label=\"" << escaped;
            if (n.role == CfgNode::Role::Statement) out << " (L" << n.line << ")";
            out << "\"];\n";
        }
        out << "  }\n";
    }
    for (const auto& [from, to] : edges) out << "  n" << from << " -> n" << to << ";\n";
    out << "}\n";
    return out.str();
}

ControlFlowGraph build_cfg(const SyntaxTree& tree) { return Builder{}.run(tree); }

long cyclomatic_complexity(const ControlFlowGraph& cfg) {
    return static_cast<long>(cfg.edges.size()) - static_cast<long>(cfg.nodes.size()) +
           2 * static_cast<long>(cfg.function_count());
}

ComplexityProfile complexity_profile(const SyntaxTree& tree, std::string_view source) {
    return {count_loc(source), cyclomatic_complexity(build_cfg(tree)), cognitive_complexity(tree)};
}

}  // namespace cerlens
