#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ltree/latent_tree.hpp"
#include "ltree/resolvers.hpp"

namespace ltree {

/// How the next split node is picked while narrowing down where a leaf goes.
enum class RootPolicy {
    /// Centroid of the remaining region: O(log i) tests per insertion.
    Balanced,
    /// Centroid once, then walk down the chosen branch one node at a time.
    Descend,
};

struct BuildOptions {
    /// Variable indices in insertion order; empty means 0..d-1. The first four
    /// form the initial quartet.
    std::vector<int> insertion_order;
    RootPolicy policy = RootPolicy::Balanced;
};

struct QuartetCall {
    /// Variable indices passed to the resolver: the new leaf first, then one
    /// representative of each branch.
    std::array<int, 4> variables{};
    Pairing verdict = Pairing::P12_34;
};

struct BuildTrace {
    int quartet_test_count = 0;
    /// Tests spent on each insertion after the initial quartet.
    std::vector<int> insertion_depths;
    std::vector<QuartetCall> calls;
};

struct BuildResult {
    LatentTree tree;
    BuildTrace trace;
};

/// Divide-and-conquer construction over variables 0..names.size()-1. The
/// result has leaves in `names` order and hidden nodes H1, H2, ...
/// Throws InvalidArgument when fewer than four variables are given.
BuildResult build_tree(const QuartetResolver& resolver, const std::vector<std::string>& names, std::uint64_t seed,
                       const BuildOptions& options = {});

/// Hidden node minimizing the largest leaf count among its three branches;
/// ties go to the lowest id. Throws InvalidArgument without hidden nodes.
NodeId choose_balanced_root(const LatentTree& tree);

/// Copy with `edge` subdivided by a new hidden node carrying leaf `name`.
LatentTree insert_leaf(const LatentTree& tree, std::pair<NodeId, NodeId> edge, const std::string& name);

/// Copy without leaf `name`; its hidden neighbour is contracted away.
LatentTree remove_leaf(const LatentTree& tree, const std::string& name);

} // namespace ltree
