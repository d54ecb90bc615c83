#include "cerlens/constructs.hpp"

namespace cerlens {

std::string_view to_string(ConstructTag tag) {
    switch (tag) {
        case ConstructTag::Basic: return "Basic";
        case ConstructTag::For: return "For";
        case ConstructTag::If: return "If";
        case ConstructTag::Match: return "Match";
        case ConstructTag::NestedIfs: return "NestedIfs";
        case ConstructTag::NestedLoops: return "NestedLoops";
        case ConstructTag::Try: return "Try";
        case ConstructTag::While: return "While";
    }
    return "Basic";
}

std::string_view abbreviation(ConstructTag tag) {
    switch (tag) {
        case ConstructTag::Basic: return "B";
        case ConstructTag::For: return "F";
        case ConstructTag::If: return "I";
        case ConstructTag::Match: return "M";
        case ConstructTag::NestedIfs: return "NI";
        case ConstructTag::NestedLoops: return "NL";
        case ConstructTag::Try: return "T";
        case ConstructTag::While: return "W";
    }
    return "B";
}

std::optional<ConstructTag> construct_tag_from_string(std::string_view name) {
    for (auto tag : kAllConstructTags) {
        if (name == to_string(tag) || name == abbreviation(tag)) return tag;
    }
    return std::nullopt;
}

namespace {

bool is_loop(const Node& n) { return n.kind == NodeKind::For || n.kind == NodeKind::While; }

// Walks one function body (or the module top level); nested function
// definitions start a fresh walk with no enclosing constructs.
void scan(const Node& node, int loop_depth, int if_depth, ConstructTags& tags) {
    for (const auto& child : node.children) {
        if (child.kind == NodeKind::FunctionDef) {
            scan(child, 0, 0, tags);
            continue;
        }
        int loops = loop_depth;
        int ifs = if_depth;
        switch (child.kind) {
            case NodeKind::For:
                tags.insert(ConstructTag::For);
                break;
            case NodeKind::While:
                tags.insert(ConstructTag::While);
                break;
            case NodeKind::If:
                tags.insert(ConstructTag::If);
                break;
            case NodeKind::Match:
                tags.insert(ConstructTag::Match);
                break;
            case NodeKind::Try:
                tags.insert(ConstructTag::Try);
                break;
            default:
                break;
        }
        if (is_loop(child)) {
            if (loop_depth > 0) tags.insert(ConstructTag::NestedLoops);
            ++loops;
        }
        if (child.kind == NodeKind::If) {
            // An elif continues its parent's chain rather than nesting in it.
            const bool chained = child.is_elif && node.kind == NodeKind::If && child.slot == Slot::OrElse;
            if (!chained) {
                if (if_depth > 0) tags.insert(ConstructTag::NestedIfs);
                ++ifs;
            }
        }
        scan(child, loops, ifs, tags);
    }
}

}  // namespace

ConstructTags tag_constructs(const SyntaxTree& tree) {
    ConstructTags tags;
    scan(tree.root, 0, 0, tags);
    if (tags.empty()) tags.insert(ConstructTag::Basic);
    return tags;
}

bool tags_well_formed(const ConstructTags& tags) {
    if (tags.empty()) return false;
    if (tags.contains(ConstructTag::Basic) && tags.size() != 1) return false;
    if (tags.contains(ConstructTag::NestedLoops) &&
        !tags.contains(ConstructTag::For) && !tags.contains(ConstructTag::While)) {
        return false;
    }
    if (tags.contains(ConstructTag::NestedIfs) && !tags.contains(ConstructTag::If)) return false;
    return true;
}

}  // namespace cerlens
