#include "ltree/tree_builder.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "ltree/errors.hpp"
#include "ltree/rng.hpp"

namespace ltree {

namespace {

// Connected part of the working tree still in play for the current leaf.
// Nodes whose other edges were cut away act as pseudo-leaves.
class Region {
public:
    explicit Region(const LatentTree& tree)
        : tree_(tree), in_(static_cast<std::size_t>(tree.node_count()), 1), size_(tree.node_count()) {}

    int size() const noexcept { return size_; }
    bool contains(NodeId v) const { return in_[static_cast<std::size_t>(v)] != 0; }

    int degree(NodeId v) const {
        int d = 0;
        for (NodeId u : tree_.neighbors(v)) d += contains(u) ? 1 : 0;
        return d;
    }

    // Region nodes reachable from u without passing through c.
    std::vector<NodeId> branch(NodeId c, NodeId u) const {
        std::vector<NodeId> out;
        std::vector<std::pair<NodeId, NodeId>> stack{{u, c}};
        while (!stack.empty()) {
            const auto [v, from] = stack.back();
            stack.pop_back();
            out.push_back(v);
            for (NodeId w : tree_.neighbors(v))
                if (w != from && contains(w)) stack.emplace_back(w, v);
        }
        return out;
    }

    int branch_leaves(NodeId c, NodeId u) const {
        int count = 0;
        for (NodeId v : branch(c, u)) count += degree(v) == 1 ? 1 : 0;
        return count;
    }

    // Interior node minimizing the largest branch, lowest id on ties.
    NodeId centroid() const {
        NodeId best = -1;
        int best_size = std::numeric_limits<int>::max();
        for (NodeId v = 0; v < tree_.node_count(); ++v) {
            if (!contains(v) || degree(v) != 3) continue;
            int worst = 0;
            for (NodeId u : tree_.neighbors(v)) worst = std::max(worst, branch_leaves(v, u));
            if (worst < best_size) {
                best_size = worst;
                best = v;
            }
        }
        return best;
    }

    // Keep only the branch of c through u, plus c itself.
    void narrow(NodeId c, NodeId u) {
        std::vector<char> next(in_.size(), 0);
        next[static_cast<std::size_t>(c)] = 1;
        for (NodeId v : branch(c, u)) next[static_cast<std::size_t>(v)] = 1;
        in_ = std::move(next);
        size_ = static_cast<int>(std::count(in_.begin(), in_.end(), 1));
    }

    std::pair<NodeId, NodeId> only_edge() const {
        NodeId a = -1;
        for (NodeId v = 0; v < tree_.node_count(); ++v) {
            if (!contains(v)) continue;
            if (a < 0) {
                a = v;
            } else {
                return {a, v};
            }
        }
        throw InvalidArgument("region has no edge");
    }

private:
    const LatentTree& tree_;
    std::vector<char> in_;
    int size_;
};

NodeId subdivide(LatentTree& t, NodeId a, NodeId b, const std::string& name) {
    const NodeId leaf = t.add_leaf(name);
    const NodeId h = t.add_hidden();
    t.remove_edge(a, b);
    t.add_edge(a, h);
    t.add_edge(h, b);
    t.add_edge(h, leaf);
    return leaf;
}

std::vector<int> checked_order(const BuildOptions& options, int d) {
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    if (options.insertion_order.empty()) return order;
    std::vector<int> sorted = options.insertion_order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != order) throw InvalidArgument("insertion order must be a permutation of the variables");
    return options.insertion_order;
}

} // namespace

BuildResult build_tree(const QuartetResolver& resolver, const std::vector<std::string>& names, std::uint64_t seed,
                       const BuildOptions& options) {
    const int d = static_cast<int>(names.size());
    if (d < 4) throw InvalidArgument("tree building needs at least 4 variables (got " + std::to_string(d) + ")");
    const std::vector<int> order = checked_order(options, d);

    BuildResult result;
    BuildTrace& trace = result.trace;
    auto ask = [&](const std::array<int, 4>& q) {
        const Pairing p = resolver(q);
        ++trace.quartet_test_count;
        trace.calls.push_back({q, p});
        return p;
    };

    const std::array<int, 4> first{order[0], order[1], order[2], order[3]};
    LatentTree& t = result.tree;
    t = quartet_tree({names[static_cast<std::size_t>(first[0])], names[static_cast<std::size_t>(first[1])],
                      names[static_cast<std::size_t>(first[2])], names[static_cast<std::size_t>(first[3])]},
                     ask(first));
    std::vector<int> variable_of(6, -1);
    for (std::size_t i = 0; i < 4; ++i) variable_of[i] = first[i];

    Rng rng(seed);
    for (std::size_t idx = 4; idx < order.size(); ++idx) {
        const int x = order[idx];
        const int before = trace.quartet_test_count;
        Region region(t);
        NodeId next = -1;
        while (region.size() > 2) {
            const NodeId c = options.policy == RootPolicy::Descend && next >= 0 ? next : region.centroid();
            std::array<NodeId, 3> arms{};
            std::copy(t.neighbors(c).begin(), t.neighbors(c).end(), arms.begin());
            std::sort(arms.begin(), arms.end());

            std::array<int, 4> q{x, 0, 0, 0};
            for (std::size_t a = 0; a < 3; ++a) {
                const auto pool = t.leaves_beyond(c, arms[a]);
                std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
                q[a + 1] = variable_of[static_cast<std::size_t>(pool[pick(rng)])];
            }
            const NodeId chosen = arms[static_cast<std::size_t>(partner_of_first(ask(q)) - 1)];
            region.narrow(c, chosen);
            next = chosen;
        }
        const auto [a, b] = region.only_edge();
        const NodeId leaf = subdivide(t, a, b, names[static_cast<std::size_t>(x)]);
        variable_of.resize(static_cast<std::size_t>(t.node_count()), -1);
        variable_of[static_cast<std::size_t>(leaf)] = x;
        trace.insertion_depths.push_back(trace.quartet_test_count - before);
    }

    result.tree = canonicalized(t, names);
    return result;
}

NodeId choose_balanced_root(const LatentTree& tree) {
    if (tree.hidden_count() == 0) throw InvalidArgument("tree has no hidden node");
    const NodeId c = Region(tree).centroid();
    if (c < 0) throw InvalidArgument("tree has no degree-3 hidden node");
    return c;
}

LatentTree insert_leaf(const LatentTree& tree, std::pair<NodeId, NodeId> edge, const std::string& name) {
    if (tree.find(name)) throw InvalidArgument("duplicate leaf '" + name + "'");
    if (!tree.has_edge(edge.first, edge.second)) throw InvalidArgument("insertion edge is not in the tree");
    LatentTree out = tree;
    subdivide(out, edge.first, edge.second, name);
    return out;
}

LatentTree remove_leaf(const LatentTree& tree, const std::string& name) {
    const auto leaf = tree.find(name);
    if (!leaf || !tree.is_leaf(*leaf)) throw InvalidArgument("no leaf named '" + name + "'");
    if (tree.degree(*leaf) != 1) throw DataError("leaf '" + name + "' is not pendant");
    const NodeId h = tree.neighbors(*leaf)[0];
    if (tree.is_leaf(h) || tree.degree(h) != 3) throw DataError("leaf '" + name + "' does not hang off a degree-3 node");
    std::vector<NodeId> rest;
    for (NodeId u : tree.neighbors(h))
        if (u != *leaf) rest.push_back(u);

    LatentTree out;
    std::vector<NodeId> remap(static_cast<std::size_t>(tree.node_count()), -1);
    for (NodeId v = 0; v < tree.node_count(); ++v) {
        if (v == *leaf || v == h) continue;
        remap[static_cast<std::size_t>(v)] = tree.is_leaf(v) ? out.add_leaf(tree.name(v)) : out.add_hidden(tree.name(v));
    }
    for (auto [a, b] : tree.edges()) {
        if (a == *leaf || b == *leaf || a == h || b == h) continue;
        out.add_edge(remap[static_cast<std::size_t>(a)], remap[static_cast<std::size_t>(b)]);
    }
    out.add_edge(remap[static_cast<std::size_t>(rest[0])], remap[static_cast<std::size_t>(rest[1])]);
    return out;
}

} // namespace ltree
