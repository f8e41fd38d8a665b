#pragma once

#include <set>
#include <string>
#include <vector>

#include "ltree/latent_tree.hpp"

namespace ltree {

/// Nontrivial leaf splits, one per hidden-hidden edge. Each split is stored
/// as the sorted labels of the side that does not contain the anchor (the
/// smallest leaf label), so equal splits compare equal across trees.
struct BipartitionSet {
    std::string anchor;
    std::set<std::vector<std::string>> splits;

    std::size_t size() const noexcept { return splits.size(); }
    bool contains(const std::vector<std::string>& side) const { return splits.count(side) > 0; }
};

BipartitionSet bipartitions(const LatentTree& tree);

/// |S1 \ S2| + |S2 \ S1| over the two split sets. Throws InvalidArgument
/// when the trees have different leaf labels.
int robinson_foulds(const LatentTree& a, const LatentTree& b);

} // namespace ltree
