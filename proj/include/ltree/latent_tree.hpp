#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ltree/pairing.hpp"

namespace ltree {

using NodeId = int;

/// Unrooted tree whose leaves are observed variables and whose internal
/// nodes are hidden variables. Node ids are dense indices in creation order.
/// The structural invariants (connected, acyclic, hidden degree 3, leaf
/// degree 1) are checked by validate(); builders may pass through invalid
/// intermediate states.
class LatentTree {
public:
    NodeId add_leaf(std::string name);
    /// Empty name means the first free "H<k>" label, k >= hidden_count() + 1.
    NodeId add_hidden(std::string name = {});
    void add_edge(NodeId a, NodeId b);
    void remove_edge(NodeId a, NodeId b);

    int node_count() const noexcept { return static_cast<int>(nodes_.size()); }
    int leaf_count() const noexcept { return leaf_count_; }
    int hidden_count() const noexcept { return node_count() - leaf_count_; }
    int edge_count() const noexcept { return edge_count_; }

    bool is_leaf(NodeId id) const { return node(id).leaf; }
    const std::string& name(NodeId id) const { return node(id).name; }
    std::span<const NodeId> neighbors(NodeId id) const { return node(id).adjacent; }
    int degree(NodeId id) const { return static_cast<int>(node(id).adjacent.size()); }
    bool has_edge(NodeId a, NodeId b) const;

    /// Leaves / hidden nodes in ascending id order.
    std::vector<NodeId> leaves() const;
    std::vector<NodeId> hidden_nodes() const;
    std::vector<std::string> leaf_names() const;
    /// Every edge once, as (smaller id, larger id), sorted.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    std::optional<NodeId> find(std::string_view name) const;

    /// Node sequence from `from` to `to` inclusive.
    std::vector<NodeId> path(NodeId from, NodeId to) const;

    /// Throws DataError describing the first violated invariant.
    void validate() const;

    /// The node shared by the three paths between a, b and c.
    NodeId median(NodeId a, NodeId b, NodeId c) const;

    /// Leaves reachable from `start` without crossing `blocked` (the
    /// component containing `start` after removing node `blocked`).
    std::vector<NodeId> leaves_beyond(NodeId blocked, NodeId start) const;

private:
    struct Node {
        std::string name;
        bool leaf = false;
        std::vector<NodeId> adjacent;
    };

    const Node& node(NodeId id) const;
    Node& node(NodeId id);

    std::vector<Node> nodes_;
    int leaf_count_ = 0;
    int edge_count_ = 0;
};

/// Split of four distinct leaves induced by the topology: the pairing whose
/// two connecting paths share no edge. Throws DataError when no single
/// pairing qualifies (a degree-4 meeting point).
Pairing induced_pairing(const LatentTree& tree, const std::array<NodeId, 4>& leaves);

/// The unique binary tree on four named leaves with the given split.
LatentTree quartet_tree(const std::array<std::string, 4>& names, Pairing pairing);

/// Copy with nodes renumbered: leaves first (in the order of `leaf_order`
/// names, or ascending id if empty), then hidden nodes in ascending id and
/// renamed H1, H2, ...
LatentTree canonicalized(const LatentTree& tree, std::span<const std::string> leaf_order = {});

} // namespace ltree
