#include "ltree/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltree/errors.hpp"
#include "ltree/parallel.hpp"

namespace ltree {

namespace {

constexpr double kCenteringTolerance = 1e-10;

} // namespace

double excess_dependence(const Matrix& p12, const Matrix& p34) {
    return nuclear_norm(p12) * nuclear_norm(p34) - p12.norm() * p34.norm();
}

double nuclear_gap(const JointTensor4& p, Pairing truth) {
    const double a = nuclear_norm(unfold(p, truth));
    double gap = std::numeric_limits<double>::infinity();
    for (Pairing other : kAllPairings)
        if (other != truth) gap = std::min(gap, nuclear_norm(unfold(p, other)) - a);
    return gap;
}

double RecoveryDiagnostics::lemma3_bound(double m) const {
    return 1.0 - 8.0 * std::exp(-m * alpha_min * alpha_min / 32.0);
}

double RecoveryDiagnostics::tree_bound(double m) const {
    const double dd = static_cast<double>(d);
    return 1.0 - 8.0 * c * dd * std::log2(dd) * std::exp(-m * alpha_min * alpha_min / 32.0);
}

RecoveryDiagnostics diagnose(const LatentModel& model, const DiagnoseOptions& options) {
    const LatentTree& tree = model.tree();
    const auto leaves = tree.leaves();
    const auto d = static_cast<int>(leaves.size());
    if (d < 4) throw InvalidArgument("diagnostics need at least four leaves");

    RecoveryDiagnostics out;
    out.d = d;
    out.c = options.c;
    for (NodeId h : tree.hidden_nodes()) out.k = std::max(out.k, model.states(h));

    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            for (int c = b + 1; c < d; ++c)
                for (int e = c + 1; e < d; ++e) {
                    QuartetDiagnostic q;
                    q.leaves = {leaves[static_cast<std::size_t>(a)], leaves[static_cast<std::size_t>(b)],
                                leaves[static_cast<std::size_t>(c)], leaves[static_cast<std::size_t>(e)]};
                    out.quartets.push_back(q);
                }

    parallel_for(static_cast<int>(out.quartets.size()), options.jobs, [&](int i) {
        QuartetDiagnostic& q = out.quartets[static_cast<std::size_t>(i)];
        q.truth = induced_pairing(tree, q.leaves);
        const int mate = partner_of_first(q.truth);
        std::array<NodeId, 2> rest{};
        for (int j = 1, r = 0; j < 4; ++j)
            if (j != mate) rest[static_cast<std::size_t>(r++)] = q.leaves[static_cast<std::size_t>(j)];
        q.theta = excess_dependence(model.joint(q.leaves[0], q.leaves[static_cast<std::size_t>(mate)]),
                                    model.joint(rest[0], rest[1]));
        q.alpha = nuclear_gap(exact_quartet_distribution(model, q.leaves), q.truth);
    });

    out.theta_min = std::numeric_limits<double>::infinity();
    out.alpha_min = std::numeric_limits<double>::infinity();
    for (const auto& q : out.quartets) {
        out.theta_min = std::min(out.theta_min, q.theta);
        out.alpha_min = std::min(out.alpha_min, q.alpha);
    }

    out.gamma_min = std::numeric_limits<double>::infinity();
    for (NodeId h : tree.hidden_nodes()) out.gamma_min = std::min(out.gamma_min, model.marginal(h).minCoeff());

    out.a3_ok = true;
    for (auto [u, v] : tree.edges()) {
        if (tree.is_leaf(u) || tree.is_leaf(v)) continue;
        const Matrix delta = model.joint(u, v) - model.marginal(u) * model.marginal(v).transpose();
        out.delta = std::max(out.delta, delta.norm());
        if (delta.rowwise().sum().cwiseAbs().maxCoeff() > kCenteringTolerance ||
            delta.colwise().sum().cwiseAbs().maxCoeff() > kCenteringTolerance) {
            out.a3_ok = false;
        }
    }

    out.lemma2_ok = out.delta <= out.lemma2_threshold();
    out.a4_ok = out.a3_ok && out.delta <= std::min(out.lemma2_threshold(), out.gamma_min);
    return out;
}

} // namespace ltree
