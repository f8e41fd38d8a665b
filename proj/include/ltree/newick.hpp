#pragma once

#include <string>
#include <string_view>

#include "ltree/latent_tree.hpp"

namespace ltree {

/// Newick text rooted at choose_balanced_root (a three-way root), children
/// ordered by their smallest leaf label, hidden nodes labelled H1, H2, ...
/// in postorder. Labels with Newick metacharacters are single-quoted.
std::string to_newick(const LatentTree& tree);

/// Parses one tree. Branch lengths, internal labels and [comments] are
/// ignored; a two-child root is suppressed. Leaves get ids in order of
/// appearance, hidden nodes follow. Throws ParseError (with offset) on
/// malformed text and DataError on duplicate or missing leaf labels and on
/// nodes that would not have degree 3.
LatentTree from_newick(std::string_view text);

LatentTree read_newick_file(const std::string& path);
void write_newick_file(const std::string& path, const LatentTree& tree);

} // namespace ltree
