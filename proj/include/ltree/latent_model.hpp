#pragma once

#include <array>
#include <vector>

#include "ltree/latent_tree.hpp"
#include "ltree/tensor.hpp"

namespace ltree {

inline constexpr double kStochasticTolerance = 1e-12;

/// True when every entry is >= 0 and every column sums to 1 within `tol`.
bool is_column_stochastic(const Matrix& m, double tol = kStochasticTolerance);

/// CPTs oriented away from `root`. cpts[v] holds P(v | parent(v)) with
/// rows indexed by the states of v and columns by the states of the parent;
/// cpts[root] is empty and root_marginal holds P(root).
struct ModelParameters {
    NodeId root = -1;
    std::vector<int> states;
    Vector root_marginal;
    std::vector<Matrix> cpts;
};

/// A latent tree together with its CPTs. Immutable after construction; the
/// constructor validates topology, shapes and stochasticity.
class LatentModel {
public:
    LatentModel(LatentTree tree, ModelParameters params);

    /// Lowest-id hidden node (or node 0 for a tree without hidden nodes).
    static NodeId default_root(const LatentTree& tree);

    const LatentTree& tree() const noexcept { return tree_; }
    const ModelParameters& parameters() const noexcept { return params_; }
    NodeId root() const noexcept { return params_.root; }
    NodeId parent(NodeId v) const { return parent_.at(static_cast<std::size_t>(v)); }
    int depth(NodeId v) const { return depth_.at(static_cast<std::size_t>(v)); }
    int states(NodeId v) const { return params_.states.at(static_cast<std::size_t>(v)); }
    const Matrix& cpt(NodeId v) const { return params_.cpts.at(static_cast<std::size_t>(v)); }
    /// Root first, parents before children.
    const std::vector<NodeId>& preorder() const noexcept { return preorder_; }

    /// Observed state count shared by the leaves (max over leaves).
    int observed_states() const;

    const Vector& marginal(NodeId v) const { return marginals_.at(static_cast<std::size_t>(v)); }

    /// Exact P(a, b) as a states(a) x states(b) table; a != b.
    Matrix joint(NodeId a, NodeId b) const;

    /// P(a | b) as a states(a) x states(b) column-stochastic table. Columns
    /// for zero-probability states of b are left at zero.
    Matrix conditional(NodeId a, NodeId b) const;

    /// Same distribution, CPTs re-oriented away from `new_root`.
    LatentModel rerooted(NodeId new_root) const;

private:
    Matrix down_transition(NodeId ancestor, NodeId v) const;

    LatentTree tree_;
    ModelParameters params_;
    std::vector<NodeId> parent_;
    std::vector<int> depth_;
    std::vector<NodeId> preorder_;
    std::vector<Vector> marginals_;
};

/// Exact joint table of four distinct leaves (axes in the given order).
/// The four leaves must share one state count.
JointTensor4 exact_quartet_distribution(const LatentModel& model, const std::array<NodeId, 4>& leaves);

/// Exact P(X_i, X_j); throws InvalidArgument when i == j.
Matrix pairwise_distribution(const LatentModel& model, NodeId i, NodeId j);

Vector marginal(const LatentModel& model, NodeId i);

} // namespace ltree
