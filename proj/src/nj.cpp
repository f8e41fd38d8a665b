#include "ltree/nj.hpp"

#include <cmath>
#include <limits>

#include "ltree/errors.hpp"
#include "ltree/parallel.hpp"

namespace ltree {

int DistanceMatrix::infinite_count() const {
    int count = 0;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = i + 1; j < d.cols(); ++j) count += std::isinf(d(i, j)) ? 1 : 0;
    return count;
}

void DistanceMatrix::validate() const {
    const auto n = static_cast<Eigen::Index>(names.size());
    if (d.rows() != n || d.cols() != n) throw InvalidArgument("distance matrix shape does not match its names");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d(i, i) != 0.0) throw InvalidArgument("distance matrix diagonal must be zero");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double a = d(i, j);
            const double b = d(j, i);
            if (std::isnan(a) || std::isnan(b)) throw NumericalFailure("distance matrix has NaN entries");
            if (a == b) continue;
            if (std::isinf(a) || std::isinf(b) || std::abs(a - b) > 1e-9) {
                throw InvalidArgument("distance matrix is not symmetric");
            }
        }
    }
}

double additive_distance(const Matrix& p_ij, const Vector& p_i, const Vector& p_j) {
    if (p_ij.rows() != p_i.size() || p_ij.cols() != p_j.size()) {
        throw InvalidArgument("joint table and marginals have mismatched sizes");
    }
    if ((p_ij.rowwise().sum() - p_i).cwiseAbs().maxCoeff() > 1e-9 ||
        (p_ij.colwise().sum().transpose() - p_j).cwiseAbs().maxCoeff() > 1e-9) {
        throw InvalidArgument("marginals are inconsistent with the joint table");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    if ((p_i.array() <= 0.0).any() || (p_j.array() <= 0.0).any()) return inf;

    const Vector sigma = spectral(p_ij).singular_values;
    if (sigma.size() == 0 || sigma(sigma.size() - 1) <= kSingularTolerance * sigma(0)) return inf;
    return 0.5 * p_i.array().log().sum() - sigma.array().log().sum() + 0.5 * p_j.array().log().sum();
}

DistanceMatrix distance_matrix(const SampleSet& samples, int jobs) {
    const int d = samples.variables();
    DistanceMatrix out{samples.names, Matrix::Zero(d, d)};
    std::vector<Vector> marginals(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) marginals[static_cast<std::size_t>(i)] = empirical_marginal(samples, i);
    parallel_for(d * d, jobs, [&](int idx) {
        const int i = idx / d;
        const int j = idx % d;
        if (i >= j) return;
        const double v = additive_distance(empirical_pairwise(samples, i, j), marginals[static_cast<std::size_t>(i)],
                                           marginals[static_cast<std::size_t>(j)]);
        out.d(i, j) = v;
        out.d(j, i) = v;
    });
    return out;
}

DistanceMatrix distance_matrix(const LatentModel& model) {
    const auto leaves = model.tree().leaves();
    const auto d = static_cast<Eigen::Index>(leaves.size());
    DistanceMatrix out{model.tree().leaf_names(), Matrix::Zero(d, d)};
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const NodeId a = leaves[static_cast<std::size_t>(i)];
            const NodeId b = leaves[static_cast<std::size_t>(j)];
            const double v = additive_distance(model.joint(a, b), model.marginal(a), model.marginal(b));
            out.d(i, j) = v;
            out.d(j, i) = v;
        }
    return out;
}

LatentTree neighbor_join(const DistanceMatrix& distances) {
    distances.validate();
    const int d = distances.size();
    if (d < 4) throw InvalidArgument("neighbor joining needs at least 4 leaves");

    LatentTree tree;
    std::vector<NodeId> node;
    for (const auto& name : distances.names) node.push_back(tree.add_leaf(name));
    Matrix D = distances.d.unaryExpr([](double v) { return std::isinf(v) ? kInfiniteDistance : v; });

    std::vector<int> active(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) active[static_cast<std::size_t>(i)] = i;

    while (active.size() > 3) {
        const auto r = static_cast<double>(active.size());
        std::vector<double> row_sum(active.size(), 0.0);
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t b = 0; b < active.size(); ++b) row_sum[a] += D(active[a], active[b]);

        std::size_t bi = 0;
        std::size_t bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                const double q = (r - 2.0) * D(active[a], active[b]) - row_sum[a] - row_sum[b];
                if (q < best) {
                    best = q;
                    bi = a;
                    bj = b;
                }
            }

        const int i = active[bi];
        const int j = active[bj];
        const NodeId u = tree.add_hidden();
        tree.add_edge(node[static_cast<std::size_t>(i)], u);
        tree.add_edge(node[static_cast<std::size_t>(j)], u);

        // Reuse slot i for the new cluster.
        for (int k : active) {
            if (k == i || k == j) continue;
            const double v = 0.5 * (D(i, k) + D(j, k) - D(i, j));
            D(i, k) = v;
            D(k, i) = v;
        }
        node[static_cast<std::size_t>(i)] = u;
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    }

    const NodeId center = tree.add_hidden();
    for (int k : active) tree.add_edge(node[static_cast<std::size_t>(k)], center);
    return tree;
}

} // namespace ltree
