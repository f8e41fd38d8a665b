#include "ltree/tree_metrics.hpp"

#include <algorithm>

#include "ltree/errors.hpp"

namespace ltree {

BipartitionSet bipartitions(const LatentTree& tree) {
    BipartitionSet out;
    auto labels = tree.leaf_names();
    if (labels.empty()) return out;
    std::sort(labels.begin(), labels.end());
    out.anchor = labels.front();
    const auto total = labels.size();

    for (auto [a, b] : tree.edges()) {
        if (tree.is_leaf(a) || tree.is_leaf(b)) continue;
        std::vector<std::string> side;
        for (NodeId leaf : tree.leaves_beyond(a, b)) side.push_back(tree.name(leaf));
        if (side.size() < 2 || total - side.size() < 2) continue;
        std::sort(side.begin(), side.end());
        if (std::binary_search(side.begin(), side.end(), out.anchor)) {
            std::vector<std::string> other;
            std::set_difference(labels.begin(), labels.end(), side.begin(), side.end(), std::back_inserter(other));
            side = std::move(other);
        }
        out.splits.insert(std::move(side));
    }
    return out;
}

int robinson_foulds(const LatentTree& a, const LatentTree& b) {
    auto la = a.leaf_names();
    auto lb = b.leaf_names();
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    if (la != lb) throw InvalidArgument("Robinson-Foulds needs trees over the same leaf labels");
    const auto sa = bipartitions(a);
    const auto sb = bipartitions(b);
    int diff = 0;
    for (const auto& s : sa.splits) diff += sb.contains(s) ? 0 : 1;
    for (const auto& s : sb.splits) diff += sa.contains(s) ? 0 : 1;
    return diff;
}

} // namespace ltree
