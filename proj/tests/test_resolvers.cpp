#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ltree/errors.hpp"
#include "ltree/resolvers.hpp"
#include "ltree/samples.hpp"
#include "ltree/synthetic.hpp"
#include "support.hpp"

using namespace ltree;
namespace lt = ltree::testing;

namespace {

// Scores, winner and gap recomputed with Jacobi norms of index-law unfoldings.
struct ReferenceVerdict {
    std::array<double, 3> scores;
    int winner;
    double margin;
};

ReferenceVerdict reference_nuclear(const JointTensor4& p) {
    ReferenceVerdict r{};
    for (int g = 0; g < 3; ++g) r.scores[static_cast<std::size_t>(g)] = lt::jacobi_nuclear_norm(lt::unfold_by_index(p, static_cast<Pairing>(g)));
    r.winner = static_cast<int>(std::min_element(r.scores.begin(), r.scores.end()) - r.scores.begin());
    std::array<double, 3> s = r.scores;
    std::sort(s.begin(), s.end());
    r.margin = s[1] - s[0];
    return r;
}

// Strongly coupled single-edge model: near-identity leaves, dominant diagonal.
lt::EdgeFixture coupled_fixture(int k, int n, Pairing split, Rng& rng) {
    Matrix p_hg = 0.02 * lt::random_stochastic(k * k, 1, rng).reshaped(k, k);
    p_hg.diagonal() += lt::random_distribution(k, rng) * 0.98;
    std::array<Matrix, 4> cpts;
    for (auto& c : cpts) c = perturb_cpt(identity_cpt(n, k), 0.2, rng);
    LatentModel model = lt::single_edge_model(split, p_hg, cpts);
    return {split, p_hg, cpts, std::move(model)};
}

double top_k_product_reference(const Matrix& m, int k) {
    const auto s = lt::jacobi_singular_values(m);
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= s[static_cast<std::size_t>(i)];
    return p;
}

} // namespace

TEST_CASE("nuclear test agrees with an independent Jacobi evaluation") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = lt::random_edge_fixture(2 + trial % 3, 3 + trial % 2, rng);
        const auto p = exact_quartet_distribution(f.model, {0, 1, 2, 3});
        const QuartetVerdict v = resolve_nuclear(p);
        const ReferenceVerdict r = reference_nuclear(p);
        for (std::size_t g = 0; g < 3; ++g) CHECK(v.scores[g] == doctest::Approx(r.scores[g]).epsilon(1e-10));
        CHECK(static_cast<int>(v.relation) == r.winner);
        CHECK(v.margin == doctest::Approx(r.margin).epsilon(1e-8).scale(1.0));
        CHECK_FALSE(v.tie);
    }
}

TEST_CASE("strong coupling: the true split wins with margin equal to the nuclear gap") {
    Rng rng(32);
    for (Pairing split : kAllPairings) {
        for (int k : {2, 3}) {
            const auto f = coupled_fixture(k, 4, split, rng);
            const auto p = exact_quartet_distribution(f.model, {0, 1, 2, 3});
            const QuartetVerdict v = resolve_nuclear(p);
            CHECK(v.relation == split);
            // alpha = min over the two wrong pairings of (their norm - true norm)
            double alpha = std::numeric_limits<double>::infinity();
            const double truth = lt::jacobi_nuclear_norm(lt::unfold_by_index(p, split));
            for (Pairing g : kAllPairings)
                if (g != split) alpha = std::min(alpha, lt::jacobi_nuclear_norm(lt::unfold_by_index(p, g)) - truth);
            CHECK(alpha > 0.0);
            CHECK(v.margin == doctest::Approx(alpha).epsilon(1e-9));
        }
    }
}

TEST_CASE("independent hidden pair: true norm is the Frobenius product, wrong norms the nuclear product") {
    Rng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = lt::random_edge_fixture(3, 3, rng, /*independent=*/true);
        const auto p = exact_quartet_distribution(f.model, {0, 1, 2, 3});
        const int mate = partner_of_first(f.split);
        int o1 = -1, o2 = -1;
        for (int i = 1; i < 4; ++i)
            if (i != mate) (o1 < 0 ? o1 : o2) = i;
        const Matrix pa = pairwise_distribution(f.model, 0, mate);
        const Matrix pb = pairwise_distribution(f.model, o1, o2);
        const double frob = pa.norm() * pb.norm();
        const double nuc = lt::jacobi_nuclear_norm(pa) * lt::jacobi_nuclear_norm(pb);
        const QuartetVerdict v = resolve_nuclear(p);
        for (Pairing g : kAllPairings) {
            const double s = v.scores[static_cast<std::size_t>(g)];
            CHECK(s == doctest::Approx(g == f.split ? frob : nuc).epsilon(1e-10));
        }
        if (nuc - frob > 1e-9) CHECK(v.relation == f.split);
    }
}

TEST_CASE("exact ties go to the lowest index and report zero margin") {
    const JointTensor4 uniform(3, std::vector<double>(81, 1.0 / 81.0), TensorKind::Exact);
    const QuartetVerdict v = resolve_nuclear(uniform);
    CHECK(v.relation == Pairing::P12_34);
    CHECK(v.tie);
    CHECK(v.margin == 0.0);

    // Two-way tie between 13|24 and 14|23 with 12|34 worse.
    const QuartetVerdict w = [] {
        PairwiseTables t;
        const Matrix strong = Matrix::Identity(2, 2) * 0.5;
        Matrix weak(2, 2);
        weak << 0.3, 0.2, 0.2, 0.3;
        t.p12 = weak;
        t.p34 = weak;
        t.p13 = strong;
        t.p24 = strong;
        t.p14 = strong;
        t.p23 = strong;
        return resolve_spectral_k(t, 2);
    }();
    CHECK(w.relation == Pairing::P13_24);
    CHECK(w.tie);
    CHECK(w.margin == 0.0);
}

TEST_CASE("relabelling the leaves relabels the verdict") {
    Rng rng(34);
    const auto f = coupled_fixture(2, 3, Pairing::P12_34, rng);
    const auto p = exact_quartet_distribution(f.model, {0, 1, 2, 3});
    CHECK(resolve_nuclear(p).relation == Pairing::P12_34);
    // Axis order (x1, x3, x2, x4): the 12|34 split now pairs axes 1 and 3.
    CHECK(resolve_nuclear(exact_quartet_distribution(f.model, {0, 2, 1, 3})).relation == Pairing::P13_24);
    CHECK(resolve_nuclear(exact_quartet_distribution(f.model, {0, 2, 3, 1})).relation == Pairing::P14_23);
    CHECK(resolve_nuclear(exact_quartet_distribution(f.model, {3, 2, 1, 0})).relation == Pairing::P12_34);
    const auto permuted = resolve_nuclear(p.permuted({0, 2, 1, 3}));
    const auto direct = resolve_nuclear(p);
    CHECK(permuted.scores[0] == doctest::Approx(direct.scores[1]));
    CHECK(permuted.scores[1] == doctest::Approx(direct.scores[0]));
    CHECK(permuted.scores[2] == doctest::Approx(direct.scores[2]));
}

TEST_CASE("Spectral@k matches products of Jacobi singular values") {
    Rng rng(35);
    const auto f = lt::random_edge_fixture(3, 4, rng);
    const SampleSet s = sample(f.model, 2000, 9);
    PairwiseTables t{empirical_pairwise(s, 0, 1), empirical_pairwise(s, 0, 2), empirical_pairwise(s, 0, 3),
                     empirical_pairwise(s, 1, 2), empirical_pairwise(s, 1, 3), empirical_pairwise(s, 2, 3)};
    for (int k = 1; k <= 4; ++k) {
        const QuartetVerdict v = resolve_spectral_k(t, k);
        const std::array<double, 3> want{top_k_product_reference(t.p12, k) * top_k_product_reference(t.p34, k),
                                         top_k_product_reference(t.p13, k) * top_k_product_reference(t.p24, k),
                                         top_k_product_reference(t.p14, k) * top_k_product_reference(t.p23, k)};
        for (std::size_t g = 0; g < 3; ++g) CHECK(v.scores[g] == doctest::Approx(want[g]).epsilon(1e-9));
        const int best = static_cast<int>(std::max_element(want.begin(), want.end()) - want.begin());
        CHECK(static_cast<int>(v.relation) == best);
        const auto resolver = make_spectral_resolver(s, k, 1);
        CHECK(resolver({0, 1, 2, 3}) == v.relation);
    }
    CHECK_THROWS_AS(resolve_spectral_k(t, 0), InvalidArgument);
    CHECK_THROWS_AS(resolve_spectral_k(t, 5), InvalidArgument);
    CHECK_THROWS_AS(make_spectral_resolver(s, 5, 1), InvalidArgument);
    t.p23 = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(resolve_spectral_k(t, 1), InvalidArgument);
}

TEST_CASE("sample-based nuclear resolver converges to the true split") {
    Rng rng(36);
    for (Pairing split : kAllPairings) {
        const auto f = coupled_fixture(2, 3, split, rng);
        const SampleSet s = sample(f.model, 20000, rng);
        const auto resolver = make_nuclear_resolver(s);
        CHECK(resolver({0, 1, 2, 3}) == split);
        CHECK(resolver({0, 1, 2, 3}) == resolve_nuclear(empirical_quartet_tensor(s, {0, 1, 2, 3})).relation);
    }
}

TEST_CASE("oracle and population resolvers") {
    Rng rng(37);
    const LatentTree tree = random_topology(8, 0.5, rng);
    const auto oracle = make_oracle_resolver(tree);
    const auto leaves = tree.leaves();
    for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b)
            for (int c = b + 1; c < 8; ++c)
                for (int d = c + 1; d < 8; ++d) {
                    const std::array<NodeId, 4> ids{leaves[static_cast<std::size_t>(a)], leaves[static_cast<std::size_t>(b)],
                                                    leaves[static_cast<std::size_t>(c)], leaves[static_cast<std::size_t>(d)]};
                    CHECK(oracle({a, b, c, d}) == induced_pairing(tree, ids));
                }

    const LatentModel model = parameterize_tree(tree, {3, 2, 0.3, {}}, rng);
    const auto population = make_population_nuclear_resolver(model);
    CHECK(population({0, 1, 2, 3}) ==
          resolve_nuclear(exact_quartet_distribution(model, {leaves[0], leaves[1], leaves[2], leaves[3]})).relation);
}
