#include "ltree/latent_tree.hpp"

#include <algorithm>
#include <iterator>
#include <unordered_map>

#include "ltree/errors.hpp"

namespace ltree {

const LatentTree::Node& LatentTree::node(NodeId id) const {
    if (id < 0 || id >= node_count()) throw InvalidArgument("node id " + std::to_string(id) + " out of range");
    return nodes_[static_cast<std::size_t>(id)];
}

LatentTree::Node& LatentTree::node(NodeId id) {
    if (id < 0 || id >= node_count()) throw InvalidArgument("node id " + std::to_string(id) + " out of range");
    return nodes_[static_cast<std::size_t>(id)];
}

NodeId LatentTree::add_leaf(std::string name) {
    if (name.empty()) throw InvalidArgument("leaf names must be nonempty");
    if (find(name)) throw InvalidArgument("duplicate node name '" + name + "'");
    nodes_.push_back({std::move(name), true, {}});
    ++leaf_count_;
    return node_count() - 1;
}

NodeId LatentTree::add_hidden(std::string name) {
    if (name.empty()) {
        // Skip past labels already taken by leaves.
        for (int k = hidden_count() + 1; name.empty() || find(name); ++k) name = "H" + std::to_string(k);
    } else if (find(name)) {
        throw InvalidArgument("duplicate node name '" + name + "'");
    }
    nodes_.push_back({std::move(name), false, {}});
    return node_count() - 1;
}

void LatentTree::add_edge(NodeId a, NodeId b) {
    if (a == b) throw InvalidArgument("self loops are not allowed");
    if (has_edge(a, b)) throw InvalidArgument("edge already present");
    node(a).adjacent.push_back(b);
    node(b).adjacent.push_back(a);
    ++edge_count_;
}

void LatentTree::remove_edge(NodeId a, NodeId b) {
    if (!has_edge(a, b)) throw InvalidArgument("edge not present");
    auto drop = [](std::vector<NodeId>& v, NodeId x) { v.erase(std::find(v.begin(), v.end(), x)); };
    drop(node(a).adjacent, b);
    drop(node(b).adjacent, a);
    --edge_count_;
}

bool LatentTree::has_edge(NodeId a, NodeId b) const {
    const auto& adj = node(a).adjacent;
    node(b); // range check
    return std::find(adj.begin(), adj.end(), b) != adj.end();
}

std::vector<NodeId> LatentTree::leaves() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < node_count(); ++i)
        if (nodes_[static_cast<std::size_t>(i)].leaf) out.push_back(i);
    return out;
}

std::vector<NodeId> LatentTree::hidden_nodes() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < node_count(); ++i)
        if (!nodes_[static_cast<std::size_t>(i)].leaf) out.push_back(i);
    return out;
}

std::vector<std::string> LatentTree::leaf_names() const {
    std::vector<std::string> out;
    for (NodeId id : leaves()) out.push_back(name(id));
    return out;
}

std::vector<std::pair<NodeId, NodeId>> LatentTree::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId a = 0; a < node_count(); ++a)
        for (NodeId b : nodes_[static_cast<std::size_t>(a)].adjacent)
            if (a < b) out.emplace_back(a, b);
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<NodeId> LatentTree::find(std::string_view name) const {
    for (NodeId i = 0; i < node_count(); ++i)
        if (nodes_[static_cast<std::size_t>(i)].name == name) return i;
    return std::nullopt;
}

std::vector<NodeId> LatentTree::path(NodeId from, NodeId to) const {
    node(from);
    node(to);
    std::vector<NodeId> parent(static_cast<std::size_t>(node_count()), -1);
    std::vector<NodeId> stack{from};
    parent[static_cast<std::size_t>(from)] = from;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        if (u == to) break;
        for (NodeId v : neighbors(u)) {
            if (parent[static_cast<std::size_t>(v)] == -1) {
                parent[static_cast<std::size_t>(v)] = u;
                stack.push_back(v);
            }
        }
    }
    if (parent[static_cast<std::size_t>(to)] == -1) throw InvalidArgument("nodes are not connected");
    std::vector<NodeId> out{to};
    while (out.back() != from) out.push_back(parent[static_cast<std::size_t>(out.back())]);
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<NodeId> LatentTree::leaves_beyond(NodeId blocked, NodeId start) const {
    std::vector<NodeId> out;
    std::vector<std::pair<NodeId, NodeId>> stack{{start, blocked}};
    while (!stack.empty()) {
        const auto [u, from] = stack.back();
        stack.pop_back();
        if (is_leaf(u)) out.push_back(u);
        for (NodeId v : neighbors(u))
            if (v != from) stack.emplace_back(v, u);
    }
    std::sort(out.begin(), out.end());
    return out;
}

NodeId LatentTree::median(NodeId a, NodeId b, NodeId c) const {
    const auto ab = path(a, b);
    const auto ac = path(a, c);
    // The paths from a toward b and toward c agree up to the median.
    std::size_t i = 0;
    while (i + 1 < ab.size() && i + 1 < ac.size() && ab[i + 1] == ac[i + 1]) ++i;
    return ab[i];
}

void LatentTree::validate() const {
    if (node_count() == 0) throw DataError("tree has no nodes");
    if (node_count() == 1) {
        if (!is_leaf(0)) throw DataError("single-node tree must be a leaf");
        return;
    }
    if (edge_count_ != node_count() - 1) {
        throw DataError("tree must have exactly nodes-1 edges (has " + std::to_string(edge_count_) +
                        " edges for " + std::to_string(node_count()) + " nodes)");
    }
    std::vector<char> seen(static_cast<std::size_t>(node_count()), 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        for (NodeId v : neighbors(u)) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    if (reached != node_count()) throw DataError("tree is not connected");
    for (NodeId i = 0; i < node_count(); ++i) {
        const auto& nd = nodes_[static_cast<std::size_t>(i)];
        if (nd.leaf && nd.adjacent.size() != 1) {
            throw DataError("leaf '" + nd.name + "' has degree " + std::to_string(nd.adjacent.size()));
        }
        if (!nd.leaf && nd.adjacent.size() != 3) {
            throw DataError("hidden node '" + nd.name + "' has degree " +
                            std::to_string(nd.adjacent.size()) + ", expected 3");
        }
    }
}

Pairing induced_pairing(const LatentTree& tree, const std::array<NodeId, 4>& leaves) {
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (leaves[i] == leaves[j]) throw InvalidArgument("quartet leaves must be distinct");

    auto edge_set = [&](NodeId a, NodeId b) {
        const auto p = tree.path(a, b);
        std::vector<std::pair<NodeId, NodeId>> e;
        for (std::size_t i = 0; i + 1 < p.size(); ++i) e.emplace_back(std::min(p[i], p[i + 1]), std::max(p[i], p[i + 1]));
        std::sort(e.begin(), e.end());
        return e;
    };

    std::optional<Pairing> found;
    int matches = 0;
    for (Pairing p : kAllPairings) {
        const int mate = partner_of_first(p);
        int rest[2];
        int r = 0;
        for (int i = 1; i < 4; ++i)
            if (i != mate) rest[r++] = i;
        const auto e1 = edge_set(leaves[0], leaves[static_cast<std::size_t>(mate)]);
        const auto e2 = edge_set(leaves[static_cast<std::size_t>(rest[0])], leaves[static_cast<std::size_t>(rest[1])]);
        std::vector<std::pair<NodeId, NodeId>> shared;
        std::set_intersection(e1.begin(), e1.end(), e2.begin(), e2.end(), std::back_inserter(shared));
        if (shared.empty()) {
            found = p;
            ++matches;
        }
    }
    if (matches != 1) throw DataError("no internal edge separates the quartet (degenerate topology)");
    return *found;
}

LatentTree quartet_tree(const std::array<std::string, 4>& names, Pairing pairing) {
    LatentTree t;
    for (const auto& n : names) t.add_leaf(n);
    const NodeId h = t.add_hidden();
    const NodeId g = t.add_hidden();
    const int mate = partner_of_first(pairing);
    t.add_edge(0, h);
    t.add_edge(mate, h);
    for (int i = 1; i < 4; ++i)
        if (i != mate) t.add_edge(i, g);
    t.add_edge(h, g);
    return t;
}

LatentTree canonicalized(const LatentTree& tree, std::span<const std::string> leaf_order) {
    std::vector<NodeId> order;
    if (leaf_order.empty()) {
        order = tree.leaves();
    } else {
        if (static_cast<int>(leaf_order.size()) != tree.leaf_count()) {
            throw InvalidArgument("leaf order does not list every leaf");
        }
        for (const auto& name : leaf_order) {
            auto id = tree.find(name);
            if (!id || !tree.is_leaf(*id)) throw InvalidArgument("unknown leaf '" + name + "'");
            order.push_back(*id);
        }
    }
    for (NodeId h : tree.hidden_nodes()) order.push_back(h);

    LatentTree out;
    std::vector<NodeId> remap(static_cast<std::size_t>(tree.node_count()), -1);
    for (NodeId old : order) {
        remap[static_cast<std::size_t>(old)] =
            tree.is_leaf(old) ? out.add_leaf(tree.name(old)) : out.add_hidden();
    }
    for (auto [a, b] : tree.edges()) out.add_edge(remap[static_cast<std::size_t>(a)], remap[static_cast<std::size_t>(b)]);
    return out;
}

} // namespace ltree
