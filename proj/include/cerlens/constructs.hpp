#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "cerlens/syntax.hpp"

namespace cerlens {

enum class ConstructTag { Basic, For, If, Match, NestedIfs, NestedLoops, Try, While };

/// Display order used by reports (matches the figure abbreviations' order).
inline constexpr std::array<ConstructTag, 8> kAllConstructTags = {
    ConstructTag::Basic,     ConstructTag::For,         ConstructTag::If,  ConstructTag::Match,
    ConstructTag::NestedIfs, ConstructTag::NestedLoops, ConstructTag::Try, ConstructTag::While};

std::string_view to_string(ConstructTag tag);
/// B, F, I, M, NI, NL, T, W.
std::string_view abbreviation(ConstructTag tag);
std::optional<ConstructTag> construct_tag_from_string(std::string_view name);

using ConstructTags = std::set<ConstructTag>;

ConstructTags tag_constructs(const SyntaxTree& tree);

/// Checks the tag-set invariants (non-empty, Basic exclusive, nested labels
/// imply their base labels).
bool tags_well_formed(const ConstructTags& tags);

}  // namespace cerlens
