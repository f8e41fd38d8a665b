#include "ltree/latent_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ltree/errors.hpp"

namespace ltree {

bool is_column_stochastic(const Matrix& m, double tol) {
    if (m.size() == 0 || !m.allFinite() || (m.array() < 0.0).any()) return false;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (std::abs(m.col(j).sum() - 1.0) > tol) return false;
    return true;
}

NodeId LatentModel::default_root(const LatentTree& tree) {
    const auto hidden = tree.hidden_nodes();
    return hidden.empty() ? 0 : hidden.front();
}

LatentModel::LatentModel(LatentTree tree, ModelParameters params)
    : tree_(std::move(tree)), params_(std::move(params)) {
    tree_.validate();
    const auto count = static_cast<std::size_t>(tree_.node_count());
    if (params_.root < 0 || params_.root >= tree_.node_count()) throw InvalidArgument("model root out of range");
    if (params_.states.size() != count || params_.cpts.size() != count) {
        throw InvalidArgument("model parameters must cover every node");
    }
    for (int s : params_.states)
        if (s < 1) throw InvalidArgument("state counts must be positive");

    const auto root = static_cast<std::size_t>(params_.root);
    if (params_.root_marginal.size() != params_.states[root] ||
        !is_column_stochastic(params_.root_marginal, kStochasticTolerance)) {
        throw InvalidArgument("root marginal must be a probability vector over the root states");
    }

    parent_.assign(count, -1);
    depth_.assign(count, 0);
    preorder_.clear();
    preorder_.push_back(params_.root);
    for (std::size_t i = 0; i < preorder_.size(); ++i) {
        const NodeId u = preorder_[i];
        for (NodeId v : tree_.neighbors(u)) {
            if (v == parent_[static_cast<std::size_t>(u)]) continue;
            parent_[static_cast<std::size_t>(v)] = u;
            depth_[static_cast<std::size_t>(v)] = depth_[static_cast<std::size_t>(u)] + 1;
            preorder_.push_back(v);
        }
    }

    marginals_.assign(count, Vector());
    marginals_[root] = params_.root_marginal;
    for (std::size_t i = 1; i < preorder_.size(); ++i) {
        const NodeId v = preorder_[i];
        const auto vi = static_cast<std::size_t>(v);
        const Matrix& c = params_.cpts[vi];
        const int parent_states = params_.states[static_cast<std::size_t>(parent_[vi])];
        if (c.rows() != params_.states[vi] || c.cols() != parent_states) {
            throw InvalidArgument("CPT of '" + tree_.name(v) + "' must be " + std::to_string(params_.states[vi]) +
                                  "x" + std::to_string(parent_states));
        }
        if (!is_column_stochastic(c, kStochasticTolerance)) {
            throw InvalidArgument("CPT of '" + tree_.name(v) + "' is not column-stochastic");
        }
        marginals_[vi] = c * marginals_[static_cast<std::size_t>(parent_[vi])];
    }
}

int LatentModel::observed_states() const {
    int n = 0;
    for (NodeId leaf : tree_.leaves()) n = std::max(n, states(leaf));
    return n;
}

// P(v | ancestor) obtained by chaining CPTs down the tree.
Matrix LatentModel::down_transition(NodeId ancestor, NodeId v) const {
    std::vector<NodeId> chain;
    for (NodeId u = v; u != ancestor; u = parent(u)) {
        if (u == -1) throw InvalidArgument("down_transition: not an ancestor");
        chain.push_back(u);
    }
    Matrix t = Matrix::Identity(states(ancestor), states(ancestor));
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) t = cpt(*it) * t;
    return t;
}

Matrix LatentModel::joint(NodeId a, NodeId b) const {
    if (a == b) throw InvalidArgument("joint of a node with itself");
    NodeId x = a;
    NodeId y = b;
    while (depth(x) > depth(y)) x = parent(x);
    while (depth(y) > depth(x)) y = parent(y);
    while (x != y) {
        x = parent(x);
        y = parent(y);
    }
    const NodeId top = x;
    const Matrix ta = down_transition(top, a);
    const Matrix tb = down_transition(top, b);
    return ta * marginal(top).asDiagonal() * tb.transpose();
}

Matrix LatentModel::conditional(NodeId a, NodeId b) const {
    Matrix j = joint(a, b);
    const Vector& pb = marginal(b);
    for (Eigen::Index c = 0; c < j.cols(); ++c) j.col(c) = pb(c) > 0.0 ? Vector(j.col(c) / pb(c)) : Vector::Zero(j.rows());
    return j;
}

LatentModel LatentModel::rerooted(NodeId new_root) const {
    ModelParameters p;
    p.root = new_root;
    p.states = params_.states;
    p.root_marginal = marginal(new_root);
    p.cpts.assign(params_.cpts.size(), Matrix());

    std::vector<NodeId> order{new_root};
    std::vector<NodeId> new_parent(params_.cpts.size(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const NodeId u = order[i];
        for (NodeId v : tree_.neighbors(u)) {
            if (v == new_parent[static_cast<std::size_t>(u)]) continue;
            new_parent[static_cast<std::size_t>(v)] = u;
            order.push_back(v);
            Matrix c = conditional(v, u);
            for (Eigen::Index col = 0; col < c.cols(); ++col)
                if (marginal(u)(col) <= 0.0) c.col(col).setConstant(1.0 / static_cast<double>(c.rows()));
            // Renormalize away rounding so the stochastic check holds tightly.
            for (Eigen::Index col = 0; col < c.cols(); ++col) c.col(col) /= c.col(col).sum();
            p.cpts[static_cast<std::size_t>(v)] = std::move(c);
        }
    }
    p.root_marginal /= p.root_marginal.sum();
    return LatentModel(tree_, std::move(p));
}

JointTensor4 exact_quartet_distribution(const LatentModel& model, const std::array<NodeId, 4>& leaves) {
    const LatentTree& tree = model.tree();
    for (NodeId l : leaves) {
        if (l < 0 || l >= tree.node_count() || !tree.is_leaf(l)) {
            throw InvalidArgument("quartet members must be leaves");
        }
    }
    const Pairing split = induced_pairing(tree, leaves); // also rejects duplicates
    const int n = model.states(leaves[0]);
    for (NodeId l : leaves)
        if (model.states(l) != n) throw InvalidArgument("quartet leaves must share one state count");

    // Positions: {0, mate} hang off h, {q, r} hang off g.
    const int mate = partner_of_first(split);
    std::array<int, 4> pos{0, mate, 0, 0};
    for (int i = 1, r = 2; i < 4; ++i)
        if (i != mate) pos[static_cast<std::size_t>(r++)] = i;
    const auto leaf = [&](int slot) { return leaves[static_cast<std::size_t>(pos[static_cast<std::size_t>(slot)])]; };

    const NodeId h = tree.median(leaf(0), leaf(1), leaf(2));
    const NodeId g = tree.median(leaf(2), leaf(3), leaf(0));
    const Matrix p_hg = model.joint(h, g);
    const Matrix c0 = model.conditional(leaf(0), h);
    const Matrix c1 = model.conditional(leaf(1), h);
    const Matrix c2 = model.conditional(leaf(2), g);
    const Matrix c3 = model.conditional(leaf(3), g);
    const int kh = model.states(h);
    const int kg = model.states(g);

    // w[h](x2, x3) = sum_g P(h, g) P(x2 | g) P(x3 | g)
    std::vector<Matrix> w(static_cast<std::size_t>(kh), Matrix::Zero(n, n));
    for (int hs = 0; hs < kh; ++hs)
        for (int gs = 0; gs < kg; ++gs) {
            const double phg = p_hg(hs, gs);
            if (phg == 0.0) continue;
            for (int x3 = 0; x3 < n; ++x3)
                for (int x2 = 0; x2 < n; ++x2) w[static_cast<std::size_t>(hs)](x2, x3) += phg * c2(x2, gs) * c3(x3, gs);
        }

    JointTensor4 out(n, TensorKind::Exact);
    std::array<int, 4> x{};
    for (int x3 = 0; x3 < n; ++x3)
        for (int x2 = 0; x2 < n; ++x2)
            for (int x1 = 0; x1 < n; ++x1)
                for (int x0 = 0; x0 < n; ++x0) {
                    double v = 0.0;
                    for (int hs = 0; hs < kh; ++hs) v += c0(x0, hs) * c1(x1, hs) * w[static_cast<std::size_t>(hs)](x2, x3);
                    x[static_cast<std::size_t>(pos[0])] = x0;
                    x[static_cast<std::size_t>(pos[1])] = x1;
                    x[static_cast<std::size_t>(pos[2])] = x2;
                    x[static_cast<std::size_t>(pos[3])] = x3;
                    out(x[0], x[1], x[2], x[3]) = v;
                }
    return out;
}

Matrix pairwise_distribution(const LatentModel& model, NodeId i, NodeId j) {
    if (i == j) throw InvalidArgument("pairwise_distribution needs two distinct variables");
    return model.joint(i, j);
}

Vector marginal(const LatentModel& model, NodeId i) { return model.marginal(i); }

} // namespace ltree
