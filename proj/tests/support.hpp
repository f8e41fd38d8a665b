#pragma once

// Independent reference computations and fixture builders shared by the
// unit tests and the acceptance runner.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ltree/latent_model.hpp"
#include "ltree/rng.hpp"
#include "ltree/synthetic.hpp"
#include "ltree/tensor.hpp"

namespace ltree::testing {

// Singular values by one-sided (Hestenes) Jacobi: plane rotations of the
// columns until they are mutually orthogonal; the column norms are then the
// singular values. Sorted descending.
inline std::vector<double> jacobi_singular_values(const Matrix& m) {
    const auto rows = static_cast<int>(m.rows());
    const auto n = static_cast<int>(m.cols());
    std::vector<double> u(static_cast<std::size_t>(rows * n));
    auto at = [&](int i, int j) -> double& { return u[static_cast<std::size_t>(j * rows + i)]; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < rows; ++i) at(i, j) = m(i, j);
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (int i = 0; i < rows; ++i) {
                    alpha += at(i, p) * at(i, p);
                    beta += at(i, q) * at(i, q);
                    gamma += at(i, p) * at(i, q);
                }
                if (std::abs(gamma) <= 1e-17 * std::sqrt(alpha * beta) || gamma == 0.0) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int i = 0; i < rows; ++i) {
                    const double up = at(i, p);
                    const double uq = at(i, q);
                    at(i, p) = c * up - s * uq;
                    at(i, q) = s * up + c * uq;
                }
            }
        if (!rotated) break;
    }
    std::vector<double> out;
    for (int j = 0; j < n; ++j) {
        double ss = 0.0;
        for (int i = 0; i < rows; ++i) ss += at(i, j) * at(i, j);
        out.push_back(std::sqrt(ss));
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    if (rows < n) out.resize(static_cast<std::size_t>(rows));
    return out;
}

inline double jacobi_nuclear_norm(const Matrix& m) {
    const auto s = jacobi_singular_values(m);
    return std::accumulate(s.begin(), s.end(), 0.0);
}

// Entry-by-entry unfolding straight from the index law.
inline Matrix unfold_by_index(const JointTensor4& p, Pairing g) {
    const int n = p.states();
    Matrix out(n * n, n * n);
    for (int x1 = 0; x1 < n; ++x1)
        for (int x2 = 0; x2 < n; ++x2)
            for (int x3 = 0; x3 < n; ++x3)
                for (int x4 = 0; x4 < n; ++x4) {
                    const double v = p(x1, x2, x3, x4);
                    switch (g) {
                    case Pairing::P12_34: out(x1 + n * x2, x3 + n * x4) = v; break;
                    case Pairing::P13_24: out(x1 + n * x3, x2 + n * x4) = v; break;
                    case Pairing::P14_23: out(x1 + n * x4, x2 + n * x3) = v; break;
                    }
                }
    return out;
}

// Joint of four leaves by summing the full factorization over every hidden
// assignment (leaves outside the quartet marginalize to one).
inline JointTensor4 brute_force_quartet(const LatentModel& model, const std::array<NodeId, 4>& leaves) {
    const LatentTree& tree = model.tree();
    const auto hidden = tree.hidden_nodes();
    const int n = model.states(leaves[0]);
    JointTensor4 out(n, TensorKind::Exact);
    std::vector<int> state(static_cast<std::size_t>(tree.node_count()), 0);
    std::vector<int> h(hidden.size(), 0);
    while (true) {
        for (std::size_t i = 0; i < hidden.size(); ++i) state[static_cast<std::size_t>(hidden[i])] = h[i];
        double w = model.parameters().root_marginal(state[static_cast<std::size_t>(model.root())]);
        for (NodeId v : hidden) {
            if (v == model.root()) continue;
            w *= model.cpt(v)(state[static_cast<std::size_t>(v)], state[static_cast<std::size_t>(model.parent(v))]);
        }
        if (w != 0.0) {
            std::array<const Matrix*, 4> c{};
            std::array<int, 4> par{};
            for (std::size_t i = 0; i < 4; ++i) {
                c[i] = &model.cpt(leaves[i]);
                par[i] = state[static_cast<std::size_t>(model.parent(leaves[i]))];
            }
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int cc = 0; cc < n; ++cc)
                        for (int d = 0; d < n; ++d)
                            out(a, b, cc, d) += w * (*c[0])(a, par[0]) * (*c[1])(b, par[1]) * (*c[2])(cc, par[2]) *
                                                (*c[3])(d, par[3]);
        }
        std::size_t i = 0;
        while (i < hidden.size() && ++h[i] == model.states(hidden[i])) h[i++] = 0;
        if (i == hidden.size()) break;
    }
    return out;
}

inline Matrix random_stochastic(int rows, int cols, Rng& rng, double floor = 0.0) {
    std::uniform_real_distribution<double> u(floor, 1.0);
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) m(i, j) = u(rng);
        m.col(j) /= m.col(j).sum();
    }
    return m;
}

inline Vector random_distribution(int k, Rng& rng, double floor = 0.05) {
    return random_stochastic(k, 1, rng, floor).col(0);
}

// Four leaves X1..X4; X1 and the mate of `split` hang off H (node 4), the
// others off G (node 5). H is the root. p_hg is the H x G joint.
inline LatentModel single_edge_model(Pairing split, const Matrix& p_hg, const std::array<Matrix, 4>& leaf_cpts) {
    LatentTree tree = quartet_tree({"X1", "X2", "X3", "X4"}, split);
    const int kh = static_cast<int>(p_hg.rows());
    const int kg = static_cast<int>(p_hg.cols());
    ModelParameters p;
    p.root = 4;
    const Vector ph = p_hg.rowwise().sum();
    p.root_marginal = ph;
    p.states = {static_cast<int>(leaf_cpts[0].rows()), static_cast<int>(leaf_cpts[1].rows()),
                static_cast<int>(leaf_cpts[2].rows()), static_cast<int>(leaf_cpts[3].rows()), kh, kg};
    p.cpts.assign(6, Matrix());
    Matrix g_given_h = p_hg.transpose();
    for (int j = 0; j < kh; ++j) g_given_h.col(j) /= ph(j);
    p.cpts[5] = g_given_h;
    for (std::size_t i = 0; i < 4; ++i) p.cpts[i] = leaf_cpts[i];
    return LatentModel(std::move(tree), std::move(p));
}

struct EdgeFixture {
    Pairing split;
    Matrix p_hg;
    std::array<Matrix, 4> leaf_cpts;  // P(X_i | parent)
    LatentModel model;
};

// Random single-edge model with a dense P_HG (k x k) and n observed states.
inline EdgeFixture random_edge_fixture(int k, int n, Rng& rng, bool independent = false) {
    const Pairing split = kAllPairings[std::uniform_int_distribution<int>(0, 2)(rng)];
    Matrix p_hg;
    if (independent) {
        const Vector ph = random_distribution(k, rng);
        const Vector pg = random_distribution(k, rng);
        p_hg = ph * pg.transpose();
    } else {
        p_hg = random_stochastic(k * k, 1, rng, 0.05).reshaped(k, k);
    }
    std::array<Matrix, 4> cpts;
    for (auto& c : cpts) c = random_stochastic(n, k, rng, 0.0);
    LatentModel model = single_edge_model(split, p_hg, cpts);
    return {split, p_hg, cpts, std::move(model)};
}

// Tree model with every CPT = w * identity + (1 - w) * random stochastic, so
// neighbouring variables are strongly coupled. Rooted at the default root.
inline LatentModel coupled_tree_model(const LatentTree& tree, int k, int n, double w, Rng& rng) {
    ModelParameters p;
    p.root = LatentModel::default_root(tree);
    p.states.assign(static_cast<std::size_t>(tree.node_count()), k);
    for (NodeId l : tree.leaves()) p.states[static_cast<std::size_t>(l)] = n;
    p.root_marginal = random_distribution(p.states[static_cast<std::size_t>(p.root)], rng, 0.3);
    p.cpts.assign(static_cast<std::size_t>(tree.node_count()), Matrix());
    std::vector<NodeId> order{p.root};
    std::vector<NodeId> parent(static_cast<std::size_t>(tree.node_count()), -1);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (NodeId v : tree.neighbors(order[i])) {
            if (v == parent[static_cast<std::size_t>(order[i])]) continue;
            parent[static_cast<std::size_t>(v)] = order[i];
            order.push_back(v);
            const int rows = p.states[static_cast<std::size_t>(v)];
            const int cols = p.states[static_cast<std::size_t>(order[i])];
            p.cpts[static_cast<std::size_t>(v)] = w * identity_cpt(rows, cols) + (1.0 - w) * random_stochastic(rows, cols, rng);
        }
    return LatentModel(tree, std::move(p));
}

// Double-centred random perturbation: rows and columns sum to zero.
inline Matrix centred_perturbation(int k, Rng& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix r(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) r(i, j) = z(rng);
    const Vector rm = r.rowwise().mean();
    const Vector cm = r.colwise().mean().transpose();
    const double g = r.mean();
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) r(i, j) += g - rm(i) - cm(j);
    return r;
}

// Leaves X1..Xd in a path of cherries: ((X1,X2),X3),...,(X{d-1},Xd).
inline LatentTree caterpillar(int d, const std::vector<std::string>& names = {}) {
    LatentTree t;
    for (int i = 0; i < d; ++i) t.add_leaf(names.empty() ? "X" + std::to_string(i + 1) : names[static_cast<std::size_t>(i)]);
    std::vector<NodeId> spine;
    for (int i = 0; i < d - 2; ++i) spine.push_back(t.add_hidden());
    t.add_edge(0, spine[0]);
    t.add_edge(1, spine[0]);
    for (int i = 1; i + 1 < d - 2; ++i) t.add_edge(i + 1, spine[static_cast<std::size_t>(i)]);
    for (int i = 0; i + 1 < d - 2; ++i) t.add_edge(spine[static_cast<std::size_t>(i)], spine[static_cast<std::size_t>(i + 1)]);
    t.add_edge(d - 2, spine.back());
    t.add_edge(d - 1, spine.back());
    return t;
}

// Same topology with leaf labels permuted.
inline LatentTree relabeled(const LatentTree& tree, Rng& rng) {
    auto names = tree.leaf_names();
    std::shuffle(names.begin(), names.end(), rng);
    LatentTree out;
    std::vector<NodeId> remap(static_cast<std::size_t>(tree.node_count()));
    std::size_t next = 0;
    for (NodeId v = 0; v < tree.node_count(); ++v)
        remap[static_cast<std::size_t>(v)] = tree.is_leaf(v) ? out.add_leaf(names[next++]) : out.add_hidden();
    for (auto [a, b] : tree.edges()) out.add_edge(remap[static_cast<std::size_t>(a)], remap[static_cast<std::size_t>(b)]);
    return out;
}

} // namespace ltree::testing
