#include "ltree/resolvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ltree/errors.hpp"
#include "ltree/parallel.hpp"

namespace ltree {

namespace {

QuartetVerdict decide(const std::array<double, 3>& scores, bool minimize) {
    QuartetVerdict v;
    v.scores = scores;
    const double best = minimize ? *std::min_element(scores.begin(), scores.end())
                                 : *std::max_element(scores.begin(), scores.end());
    double scale = 0.0;
    for (double s : scores) scale = std::max(scale, std::abs(s));
    const double tol = kTieTolerance * scale;

    int winner = -1;
    int near_best = 0;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(scores[static_cast<std::size_t>(i)] - best) <= tol) {
            ++near_best;
            if (winner < 0) winner = i;
        }
    }
    v.relation = static_cast<Pairing>(winner);
    v.tie = near_best > 1;

    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        if (i == winner) continue;
        const double d = minimize ? scores[static_cast<std::size_t>(i)] - scores[static_cast<std::size_t>(winner)]
                                  : scores[static_cast<std::size_t>(winner)] - scores[static_cast<std::size_t>(i)];
        gap = std::min(gap, d);
    }
    v.margin = std::max(0.0, gap);
    return v;
}

double top_k_product(const Vector& sigma, int k) {
    double p = 1.0;
    for (int s = 0; s < k; ++s) p *= sigma(s);
    return p;
}

} // namespace

QuartetVerdict resolve_nuclear(const JointTensor4& p) {
    std::array<double, 3> scores{};
    for (Pairing g : kAllPairings) scores[static_cast<std::size_t>(g)] = nuclear_norm(unfold(p, g));
    return decide(scores, /*minimize=*/true);
}

QuartetVerdict resolve_spectral_k(const PairwiseTables& pairs, int k) {
    const Matrix* tables[6] = {&pairs.p12, &pairs.p13, &pairs.p14, &pairs.p23, &pairs.p24, &pairs.p34};
    const Eigen::Index n = pairs.p12.rows();
    for (const Matrix* t : tables) {
        if (t->rows() != n || t->cols() != n) throw InvalidArgument("pairwise tables must all be n x n");
    }
    if (k < 1 || k > n) {
        throw InvalidArgument("Spectral@k needs 1 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    }
    Vector sigma[6];
    for (int i = 0; i < 6; ++i) sigma[i] = spectral(*tables[i]).singular_values;
    const std::array<double, 3> scores{top_k_product(sigma[0], k) * top_k_product(sigma[5], k),
                                       top_k_product(sigma[1], k) * top_k_product(sigma[4], k),
                                       top_k_product(sigma[2], k) * top_k_product(sigma[3], k)};
    return decide(scores, /*minimize=*/false);
}

Pairing resolve_oracle(const LatentTree& tree, const std::array<NodeId, 4>& leaves) {
    return induced_pairing(tree, leaves);
}

QuartetResolver make_nuclear_resolver(const SampleSet& samples) {
    return [&samples](const std::array<int, 4>& q) {
        return resolve_nuclear(empirical_quartet_tensor(samples, q)).relation;
    };
}

QuartetResolver make_spectral_resolver(const SampleSet& samples, int k, int jobs) {
    if (k < 1 || k > samples.n) {
        throw InvalidArgument("Spectral@k needs 1 <= k <= n (k=" + std::to_string(k) +
                              ", n=" + std::to_string(samples.n) + ")");
    }
    const int d = samples.variables();
    // Singular values of every pair table; P_ji = P_ij^T shares them.
    auto sigma = std::make_shared<std::vector<Vector>>(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    parallel_for(d * d, jobs, [&](int idx) {
        const int i = idx / d;
        const int j = idx % d;
        if (i < j) (*sigma)[static_cast<std::size_t>(idx)] = spectral(empirical_pairwise(samples, i, j)).singular_values;
    });
    return [sigma, d, k](const std::array<int, 4>& q) {
        auto prod = [&](int a, int b) {
            const int lo = std::min(q[static_cast<std::size_t>(a)], q[static_cast<std::size_t>(b)]);
            const int hi = std::max(q[static_cast<std::size_t>(a)], q[static_cast<std::size_t>(b)]);
            if (lo == hi) throw InvalidArgument("quartet variable indices must be distinct");
            return top_k_product((*sigma)[static_cast<std::size_t>(lo * d + hi)], k);
        };
        const std::array<double, 3> scores{prod(0, 1) * prod(2, 3), prod(0, 2) * prod(1, 3), prod(0, 3) * prod(1, 2)};
        return decide(scores, false).relation;
    };
}

QuartetResolver make_population_nuclear_resolver(const LatentModel& model) {
    const auto leaves = model.tree().leaves();
    return [&model, leaves](const std::array<int, 4>& q) {
        std::array<NodeId, 4> ids{};
        for (std::size_t i = 0; i < 4; ++i) ids[i] = leaves.at(static_cast<std::size_t>(q[i]));
        return resolve_nuclear(exact_quartet_distribution(model, ids)).relation;
    };
}

QuartetResolver make_oracle_resolver(const LatentTree& tree) {
    const auto leaves = tree.leaves();
    return [&tree, leaves](const std::array<int, 4>& q) {
        std::array<NodeId, 4> ids{};
        for (std::size_t i = 0; i < 4; ++i) ids[i] = leaves.at(static_cast<std::size_t>(q[i]));
        return resolve_oracle(tree, ids);
    };
}

} // namespace ltree
