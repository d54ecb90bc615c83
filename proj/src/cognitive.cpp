#include "cerlens/cfg.hpp"

namespace cerlens {

namespace {

long score(const Node& node, int depth);

long block(const Node& owner, Slot slot, int depth) {
    long total = 0;
    for (const auto& child : owner.children) {
        if (child.slot == slot) total += score(child, depth);
    }
    return total;
}

// Else-branch of an if chain: an elif or a plain else adds one without a
// nesting penalty; the statements inside nest one level deeper.
long if_chain(const Node& node, int depth) {
    long total = block(node, Slot::Body, depth + 1);
    for (const auto& child : node.children) {
        if (child.slot != Slot::OrElse) continue;
        if (child.kind == NodeKind::If && child.is_elif) {
            return total + 1 + if_chain(child, depth);
        }
    }
    bool has_else = false;
    for (const auto& child : node.children) has_else = has_else || child.slot == Slot::OrElse;
    if (has_else) total += 1 + block(node, Slot::OrElse, depth + 1);
    return total;
}

long score(const Node& node, int depth) {
    switch (node.kind) {
        case NodeKind::FunctionDef:
            return block(node, Slot::Body, 0);
        case NodeKind::If:
            return 1 + depth + if_chain(node, depth);
        case NodeKind::For:
        case NodeKind::While:
            return 1 + depth + block(node, Slot::Body, depth + 1) + block(node, Slot::OrElse, depth + 1);
        case NodeKind::Try: {
            long total = block(node, Slot::Body, depth);
            for (const auto& child : node.children) {
                if (child.slot == Slot::Handler) total += 1 + depth + block(child, Slot::Body, depth + 1);
            }
            return total + block(node, Slot::OrElse, depth) + block(node, Slot::Finally, depth);
        }
        case NodeKind::Match: {
            long total = 0;
            bool first = true;
            for (const auto& arm : node.children) {
                if (arm.slot != Slot::Case) continue;
                if (!first) total += 1 + depth;
                first = false;
                total += block(arm, Slot::Body, depth + 1);
            }
            return total;
        }
        default: {
            long total = 0;
            for (const auto& child : node.children) total += score(child, depth);
            return total;
        }
    }
}

}  // namespace

long cognitive_complexity(const SyntaxTree& tree) { return block(tree.root, Slot::Body, 0); }

}  // namespace cerlens
