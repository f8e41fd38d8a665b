#pragma once

#include <array>
#include <functional>
#include <memory>

#include "ltree/latent_model.hpp"
#include "ltree/samples.hpp"
#include "ltree/tensor.hpp"

namespace ltree {

/// Relative gap below which two scores count as tied.
inline constexpr double kTieTolerance = 1e-12;

struct QuartetVerdict {
    Pairing relation = Pairing::P12_34;
    /// Nuclear norms of the A, B, C unfoldings, or the three Spectral@k products.
    std::array<double, 3> scores{};
    /// Gap between the winning score and the best of the other two.
    double margin = 0.0;
    bool tie = false;
};

/// Nuclear-norm quartet test: the pairing whose unfolding has the smallest
/// nuclear norm. Ties (gap < 1e-12 * max score) go to the lowest index.
QuartetVerdict resolve_nuclear(const JointTensor4& p);

/// Joint tables of the six pairs of a quartet.
struct PairwiseTables {
    Matrix p12, p13, p14, p23, p24, p34;
};

/// Spectral@k: the pairing maximizing the product of the top-k singular
/// values of its two within-pair tables. Requires 1 <= k <= n.
QuartetVerdict resolve_spectral_k(const PairwiseTables& pairs, int k);

/// Split induced by the true topology.
Pairing resolve_oracle(const LatentTree& tree, const std::array<NodeId, 4>& leaves);

/// A quartet test over variable indices 0..d-1. The factories below keep a
/// reference to their argument, which must outlive the resolver.
using QuartetResolver = std::function<Pairing(const std::array<int, 4>&)>;

/// Nuclear test on empirical tensors of the sample columns.
QuartetResolver make_nuclear_resolver(const SampleSet& samples);

/// Spectral@k on empirical pairwise tables; all pairs are tabulated up front.
QuartetResolver make_spectral_resolver(const SampleSet& samples, int k, int jobs = 1);

/// Nuclear test on exact population tensors; variable i is leaves()[i].
QuartetResolver make_population_nuclear_resolver(const LatentModel& model);

/// Topology oracle; variable i is tree.leaves()[i].
QuartetResolver make_oracle_resolver(const LatentTree& tree);

} // namespace ltree
