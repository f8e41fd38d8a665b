#pragma once

#include <array>
#include <vector>

#include "ltree/latent_model.hpp"

namespace ltree {

/// Gap ||P12||_* ||P34||_* - ||P12||_F ||P34||_F between the wrong and the
/// right unfoldings of the model with the two hidden nodes made independent.
double excess_dependence(const Matrix& p12, const Matrix& p34);

/// min(||B||_* - ||A||_*, ||C||_* - ||A||_*) where A is the unfolding of the
/// true pairing and B, C are the other two.
double nuclear_gap(const JointTensor4& p, Pairing truth);

struct QuartetDiagnostic {
    std::array<NodeId, 4> leaves{};
    Pairing truth = Pairing::P12_34;
    double theta = 0.0;
    double alpha = 0.0;
};

struct DiagnoseOptions {
    /// Constant in front of d log2 d in the tree-level bound.
    double c = 4.0;
    /// Worker count for the quartet scan; 1 runs the serial path.
    int jobs = 1;
};

struct RecoveryDiagnostics {
    int d = 0;
    /// Largest hidden cardinality.
    int k = 0;
    double c = 4.0;
    double theta_min = 0.0;
    double gamma_min = 0.0;
    double alpha_min = 0.0;
    /// Largest ||P_HG - P_H P_G^T||_F over hidden-hidden edges.
    double delta = 0.0;
    bool lemma2_ok = false;
    bool a3_ok = false;
    bool a4_ok = false;
    std::vector<QuartetDiagnostic> quartets;

    double lemma2_threshold() const { return theta_min / static_cast<double>(k * k + k); }
    /// 1 - 8 exp(-m alpha_min^2 / 32).
    double lemma3_bound(double m) const;
    /// 1 - 8 c d log2(d) exp(-m alpha_min^2 / 32).
    double tree_bound(double m) const;
};

/// Scans every leaf quartet of the model (all leaves must share one state
/// count) and every hidden-hidden edge. Throws InvalidArgument for fewer
/// than four leaves.
RecoveryDiagnostics diagnose(const LatentModel& model, const DiagnoseOptions& options = {});

} // namespace ltree
