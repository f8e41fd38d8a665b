#pragma once

#include <string>
#include <vector>

#include "ltree/latent_model.hpp"
#include "ltree/samples.hpp"

namespace ltree {

/// Stand-in for an infinite distance inside neighbor joining.
inline constexpr double kInfiniteDistance = 1e12;

/// Relative singular-value floor below which a joint table counts as singular.
inline constexpr double kSingularTolerance = 1e-12;

/// Symmetric pairwise distances with zero diagonal. Entries may be +inf.
struct DistanceMatrix {
    std::vector<std::string> names;
    Matrix d;

    int size() const noexcept { return static_cast<int>(names.size()); }
    /// Number of unordered pairs at +inf.
    int infinite_count() const;
    /// Throws InvalidArgument on shape, symmetry (1e-9) or diagonal violations.
    void validate() const;
};

/// Log-determinant distance
///   d = 1/2 sum log P_i - log|det P_ij| + 1/2 sum log P_j,
/// with log|det| taken as the sum of log singular values. Returns +inf when
/// P_ij is singular (smallest singular value <= 1e-12 * largest) or a
/// marginal has a zero entry. Throws InvalidArgument when P_i, P_j disagree
/// with the row/column sums of P_ij by more than 1e-9.
double additive_distance(const Matrix& p_ij, const Vector& p_i, const Vector& p_j);

/// Distances between all sample columns from empirical tables.
DistanceMatrix distance_matrix(const SampleSet& samples, int jobs = 1);

/// Population distances between the leaves of a model (ascending leaf id).
DistanceMatrix distance_matrix(const LatentModel& model);

/// Saitou-Nei neighbor joining on the Q-criterion, lowest index pair on
/// ties; +inf entries are replaced by kInfiniteDistance. The last three
/// clusters share one hidden node, so the output is always binary. Leaves
/// come first in `names` order, hidden nodes are H1, H2, ... in join order.
LatentTree neighbor_join(const DistanceMatrix& distances);

} // namespace ltree
