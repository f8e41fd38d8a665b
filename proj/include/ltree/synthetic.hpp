#pragma once

#include <cstdint>
#include <optional>

#include "ltree/latent_model.hpp"
#include "ltree/rng.hpp"

namespace ltree {

/// Random binary topology over leaves X1..Xd (ids 0..d-1). A shuffled group
/// of g leaves splits into s = clamp(round(beta*g), 2, g-2) and g-s; groups
/// of 2 stop, groups of 3 split 1/2. The top split's two sides are joined
/// directly, giving d-2 hidden nodes. Requires d >= 4 and 0 < beta < 1.
LatentTree random_topology(int d, double beta, Rng& rng);
LatentTree random_topology(int d, double beta, std::uint64_t seed);

/// rows x cols table whose column j is e_j (zero rows pad rows > cols); for
/// rows < cols, column j is e_{j mod rows}.
Matrix identity_cpt(int rows, int cols);

/// Every column uniform: the child ignores its parent.
Matrix uniform_cpt(int rows, int cols);

/// Adds u ~ U[0, mu] to every entry (column by column, top to bottom) and
/// renormalizes each column. mu = 0 returns the base unchanged.
Matrix perturb_cpt(const Matrix& base, double mu, Rng& rng);

/// perturb_cpt applied to identity_cpt(rows, cols).
Matrix perturbed_cpt(int rows, int cols, double mu, std::uint64_t seed);

struct QuartetModelSpec {
    int k_h = 2;
    int k_g = 4;
    int n = 10;
    /// Perturbation of the leaf CPTs (identity base).
    double mu = 0.5;
    /// Perturbation of P(G|H) (independent base); defaults to mu.
    std::optional<double> mu_hidden;
};

struct QuartetModel {
    LatentModel model;
    Pairing truth;
};

/// Leaves X1..X4 hanging off H (k_h states) and G (k_g states). The true
/// pairing is drawn uniformly; H is the root with a uniform marginal.
QuartetModel make_quartet_model(const QuartetModelSpec& spec, Rng& rng);

struct TreeModelSpec {
    int n = 10;
    /// Shared hidden cardinality.
    int k = 4;
    double mu = 0.5;
    std::optional<double> mu_hidden;
};

/// CPTs for every edge of `tree`: perturbed identity into the leaves,
/// perturbed independent tables between hidden nodes, uniform marginal at
/// the lowest-id hidden root.
LatentModel parameterize_tree(const LatentTree& tree, const TreeModelSpec& spec, Rng& rng);

} // namespace ltree
