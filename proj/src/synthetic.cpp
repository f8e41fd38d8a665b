#include "ltree/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ltree/errors.hpp"

namespace ltree {

namespace {

// Root of a rooted binary subtree over `group`.
NodeId grow(LatentTree& t, std::span<const NodeId> group, double beta) {
    const auto g = static_cast<int>(group.size());
    if (g == 1) return group[0];
    const int s = g > 3 ? std::clamp(static_cast<int>(std::lround(beta * g)), 2, g - 2) : 1;
    const NodeId left = grow(t, group.first(static_cast<std::size_t>(s)), beta);
    const NodeId right = grow(t, group.subspan(static_cast<std::size_t>(s)), beta);
    const NodeId h = t.add_hidden();
    t.add_edge(h, left);
    t.add_edge(h, right);
    return h;
}

void check_mu(double mu) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidArgument("perturbation level must be finite and >= 0");
}

} // namespace

LatentTree random_topology(int d, double beta, Rng& rng) {
    if (d < 4) throw InvalidArgument("random topology needs d >= 4");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
    LatentTree t;
    std::vector<NodeId> leaves;
    for (int i = 0; i < d; ++i) leaves.push_back(t.add_leaf("X" + std::to_string(i + 1)));
    std::shuffle(leaves.begin(), leaves.end(), rng);

    const int s = std::clamp(static_cast<int>(std::lround(beta * d)), 2, d - 2);
    const std::span<const NodeId> all(leaves);
    const NodeId left = grow(t, all.first(static_cast<std::size_t>(s)), beta);
    const NodeId right = grow(t, all.subspan(static_cast<std::size_t>(s)), beta);
    t.add_edge(left, right);
    return t;
}

LatentTree random_topology(int d, double beta, std::uint64_t seed) {
    Rng rng(seed);
    return random_topology(d, beta, rng);
}

Matrix identity_cpt(int rows, int cols) {
    if (rows < 1 || cols < 1) throw InvalidArgument("CPT dimensions must be positive");
    Matrix m = Matrix::Zero(rows, cols);
    for (int j = 0; j < cols; ++j) m(j % rows, j) = 1.0;
    return m;
}

Matrix uniform_cpt(int rows, int cols) {
    if (rows < 1 || cols < 1) throw InvalidArgument("CPT dimensions must be positive");
    return Matrix::Constant(rows, cols, 1.0 / rows);
}

Matrix perturb_cpt(const Matrix& base, double mu, Rng& rng) {
    check_mu(mu);
    if (mu == 0.0) return base;
    std::uniform_real_distribution<double> u(0.0, mu);
    Matrix out = base;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) += u(rng);
        out.col(j) /= out.col(j).sum();
    }
    return out;
}

Matrix perturbed_cpt(int rows, int cols, double mu, std::uint64_t seed) {
    Rng rng(seed);
    return perturb_cpt(identity_cpt(rows, cols), mu, rng);
}

QuartetModel make_quartet_model(const QuartetModelSpec& spec, Rng& rng) {
    if (spec.k_h < 1 || spec.k_g < 1 || spec.n < 2) throw InvalidArgument("quartet model needs k >= 1 and n >= 2");
    check_mu(spec.mu);
    const double mu_hidden = spec.mu_hidden.value_or(spec.mu);
    check_mu(mu_hidden);

    const auto truth = kAllPairings[std::uniform_int_distribution<int>(0, 2)(rng)];
    LatentTree tree = quartet_tree({"X1", "X2", "X3", "X4"}, truth);
    const NodeId h = 4;
    const NodeId g = 5;

    ModelParameters p;
    p.root = h;
    p.states = {spec.n, spec.n, spec.n, spec.n, spec.k_h, spec.k_g};
    p.root_marginal = Vector::Constant(spec.k_h, 1.0 / spec.k_h);
    p.cpts.assign(6, Matrix());
    p.cpts[static_cast<std::size_t>(g)] = perturb_cpt(uniform_cpt(spec.k_g, spec.k_h), mu_hidden, rng);
    for (NodeId leaf = 0; leaf < 4; ++leaf) {
        const NodeId parent = tree.neighbors(leaf)[0];
        p.cpts[static_cast<std::size_t>(leaf)] =
            perturb_cpt(identity_cpt(spec.n, p.states[static_cast<std::size_t>(parent)]), spec.mu, rng);
    }
    return {LatentModel(std::move(tree), std::move(p)), truth};
}

LatentModel parameterize_tree(const LatentTree& tree, const TreeModelSpec& spec, Rng& rng) {
    if (spec.k < 1 || spec.n < 2) throw InvalidArgument("tree model needs k >= 1 and n >= 2");
    check_mu(spec.mu);
    const double mu_hidden = spec.mu_hidden.value_or(spec.mu);
    check_mu(mu_hidden);
    const auto count = static_cast<std::size_t>(tree.node_count());

    ModelParameters p;
    p.root = LatentModel::default_root(tree);
    p.states.assign(count, spec.k);
    for (NodeId leaf : tree.leaves()) p.states[static_cast<std::size_t>(leaf)] = spec.n;
    p.root_marginal = Vector::Constant(p.states[static_cast<std::size_t>(p.root)], 1.0 / p.states[static_cast<std::size_t>(p.root)]);
    p.cpts.assign(count, Matrix());

    // Walk away from the root in id order so the draw sequence is fixed.
    std::vector<NodeId> queue{p.root};
    std::vector<char> seen(count, 0);
    seen[static_cast<std::size_t>(p.root)] = 1;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const NodeId u = queue[i];
        std::vector<NodeId> kids(tree.neighbors(u).begin(), tree.neighbors(u).end());
        std::sort(kids.begin(), kids.end());
        for (NodeId v : kids) {
            if (seen[static_cast<std::size_t>(v)]) continue;
            seen[static_cast<std::size_t>(v)] = 1;
            queue.push_back(v);
            const int rows = p.states[static_cast<std::size_t>(v)];
            const int cols = p.states[static_cast<std::size_t>(u)];
            p.cpts[static_cast<std::size_t>(v)] = tree.is_leaf(v) ? perturb_cpt(identity_cpt(rows, cols), spec.mu, rng)
                                                                  : perturb_cpt(uniform_cpt(rows, cols), mu_hidden, rng);
        }
    }
    return LatentModel(tree, std::move(p));
}

} // namespace ltree
