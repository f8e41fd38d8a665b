#include <doctest.h>

#include <sstream>

#include "ltree/errors.hpp"
#include "ltree/model_file.hpp"
#include "ltree/newick.hpp"
#include "ltree/synthetic.hpp"
#include "ltree/tree_metrics.hpp"
#include "support.hpp"

using namespace ltree;
namespace lt = ltree::testing;

namespace {

std::vector<std::string> xs(std::initializer_list<int> ids) {
    std::vector<std::string> out;
    for (int i : ids) out.push_back("X" + std::to_string(i));
    return out;
}

} // namespace

TEST_CASE("bipartitions of a six-leaf caterpillar") {
    const BipartitionSet b = bipartitions(lt::caterpillar(6));
    CHECK(b.anchor == "X1");
    CHECK(b.size() == 3);
    // Sides without X1 of the splits 12|3456, 123|456, 1234|56.
    CHECK(b.contains(xs({3, 4, 5, 6})));
    CHECK(b.contains(xs({4, 5, 6})));
    CHECK(b.contains(xs({5, 6})));
}

TEST_CASE("Robinson-Foulds hand values") {
    const LatentTree a = lt::caterpillar(6);
    const LatentTree b = lt::caterpillar(6, xs({1, 3, 2, 4, 5, 6}));
    // b has 13|2456, 123|456, 1234|56: one split on each side unmatched.
    CHECK(robinson_foulds(a, b) == 2);
    CHECK(robinson_foulds(a, a) == 0);
    CHECK(robinson_foulds(quartet_tree({"a", "b", "c", "d"}, Pairing::P12_34),
                          quartet_tree({"a", "b", "c", "d"}, Pairing::P13_24)) == 2);
    CHECK_THROWS_AS(robinson_foulds(a, lt::caterpillar(6, {"X1", "X2", "X3", "X4", "X5", "Y"})), InvalidArgument);
    CHECK_THROWS_AS(robinson_foulds(a, lt::caterpillar(7)), InvalidArgument);
}

TEST_CASE("Robinson-Foulds can reach its maximum 2(d-3)") {
    // Caterpillar 1..16 against the caterpillar on an interleaved order that
    // separates every consecutive block.
    std::vector<std::string> order;
    for (int i = 1; i <= 16; i += 2) order.push_back("X" + std::to_string(i));
    for (int i = 2; i <= 16; i += 2) order.push_back("X" + std::to_string(i));
    const int rf = robinson_foulds(lt::caterpillar(16), lt::caterpillar(16, order));
    CHECK(rf == 26);
}

TEST_CASE("Robinson-Foulds metric axioms on random triples") {
    Rng rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 5 + trial % 12;
        const LatentTree a = lt::relabeled(random_topology(d, 0.5, rng), rng);
        const LatentTree b = lt::relabeled(random_topology(d, 0.3, rng), rng);
        const LatentTree c = lt::relabeled(random_topology(d, 0.2, rng), rng);
        const int ab = robinson_foulds(a, b), bc = robinson_foulds(b, c), ac = robinson_foulds(a, c);
        CHECK(robinson_foulds(a, a) == 0);
        CHECK(ab == robinson_foulds(b, a));
        CHECK(ac <= ab + bc);
        CHECK(ab % 2 == 0);
        CHECK(ab >= 0);
        CHECK(ab <= 2 * (d - 3));
    }
}

TEST_CASE("Newick round trip") {
    Rng rng(72);
    for (int trial = 0; trial < 100; ++trial) {
        const LatentTree t = lt::relabeled(random_topology(4 + trial % 20, 0.4, rng), rng);
        const std::string text = to_newick(t);
        const LatentTree back = from_newick(text);
        CHECK_NOTHROW(back.validate());
        CHECK(robinson_foulds(t, back) == 0);
        CHECK(to_newick(back) == text);
    }
}

TEST_CASE("Newick output format") {
    const LatentTree q = quartet_tree({"b", "a", "d", "c"}, Pairing::P12_34);
    CHECK(to_newick(q) == "(a,b,(c,d)H1)H2;");
    const LatentTree odd = quartet_tree({"x y", "p(q)", "it's", "z"}, Pairing::P13_24);
    const LatentTree back = from_newick(to_newick(odd));
    CHECK(back.find("x y").has_value());
    CHECK(back.find("p(q)").has_value());
    CHECK(back.find("it's").has_value());
    CHECK(robinson_foulds(odd, back) == 0);
}

TEST_CASE("Newick parsing") {
    const LatentTree t = from_newick("[comment] ((A:0.1,B:2e-3)inner:1,(C,'D d'):0.5)root;\n");
    CHECK(t.leaf_count() == 4);
    CHECK(t.hidden_count() == 2);
    CHECK(t.name(0) == "A");
    CHECK(induced_pairing(t, {0, 1, 2, 3}) == Pairing::P12_34);
    CHECK(from_newick("(A,B,(C,D));").leaf_count() == 4);

    CHECK_THROWS_AS(from_newick("((A,B),(C,D))"), ParseError);
    CHECK_THROWS_WITH_AS(from_newick("((A,B),(C,D);"), doctest::Contains("offset"), ParseError);
    CHECK_THROWS_AS(from_newick("((A,B),(C:x,D));"), ParseError);
    CHECK_THROWS_AS(from_newick("((A,B),(C,D)); extra"), ParseError);
    CHECK_THROWS_AS(from_newick("((A,A),(C,D));"), DataError);
    CHECK_THROWS_AS(from_newick("((A,),(C,D));"), DataError);
    CHECK_THROWS_AS(from_newick("(A,B,C,D);"), DataError);
    CHECK_THROWS_AS(from_newick("((A),(C,D),E);"), DataError);
}

TEST_CASE("model file round trip") {
    Rng rng(73);
    const LatentTree t = random_topology(6, 0.5, rng);
    const LatentModel m = parameterize_tree(t, {4, 2, 0.7, 0.3}, rng);
    std::stringstream ss;
    write_model(ss, m);
    const LatentModel back = read_model(ss);
    CHECK(back.tree().leaf_names() == m.tree().leaf_names());
    const auto leaves = m.tree().leaves();
    for (std::size_t i = 0; i < leaves.size(); ++i)
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
            const NodeId a = *back.tree().find(m.tree().name(leaves[i]));
            const NodeId b = *back.tree().find(m.tree().name(leaves[j]));
            CHECK((back.joint(a, b) - m.joint(leaves[i], leaves[j])).cwiseAbs().maxCoeff() < 1e-15);
        }
}

TEST_CASE("model file parsing and errors") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_model(in);
    };
    const std::string good = "# quartet\n"
                             "leaf a 2\nleaf b 2\nleaf c 2\nleaf d 2\nhidden h 2\nhidden g 2\n"
                             "edge a h\nedge b h\nedge h g\nedge c g\nedge d g\n"
                             "marginal h\n0.4 0.6\n"
                             "cpt g h\n0.9 0.2\n0.1 0.8\n"
                             "cpt a h\n1 0\n0 1\ncpt b h\n1 0\n0 1\n"
                             "cpt c g\n0.7 0.3\n0.3 0.7\ncpt d g\n0.7 0.3\n0.3 0.70000001\n";
    const LatentModel m = parse(good);
    CHECK(m.root() == *m.tree().find("h"));
    CHECK(m.joint(*m.tree().find("a"), *m.tree().find("b"))(1, 1) == doctest::Approx(0.6));
    CHECK(std::abs(m.cpt(*m.tree().find("d")).col(1).sum() - 1.0) < 1e-15);

    auto replace = [&](const std::string& from, const std::string& to) {
        std::string s = good;
        s.replace(s.find(from), from.size(), to);
        return s;
    };
    CHECK_THROWS_WITH_AS(parse(replace("0.9 0.2", "0.5 0.2")), doctest::Contains("line"), DataError);
    CHECK_THROWS_WITH_AS(parse(replace("leaf b 2", "leaf b x")), doctest::Contains("line 3"), DataError);
    CHECK_THROWS_AS(parse(replace("edge d g", "edge d q")), DataError);
    CHECK_THROWS_AS(parse(replace("edge d g\n", "")), DataError);
    CHECK_THROWS_AS(parse(replace("marginal h\n0.4 0.6\n", "")), DataError);
    CHECK_THROWS_AS(parse(replace("cpt g h", "cpt h g")), DataError);
    CHECK_THROWS_AS(parse(replace("leaf a 2", "frob a 2")), DataError);
    CHECK_THROWS_AS(parse(""), DataError);
    CHECK_THROWS_AS(read_model_file("/nonexistent/model.txt"), DataError);
}
