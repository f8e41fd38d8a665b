#include "ltree/newick.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <vector>

#include "ltree/errors.hpp"
#include "ltree/tree_builder.hpp"

namespace ltree {

namespace {

constexpr std::string_view kMeta = "()[]':;, \t\r\n";

std::string quoted(const std::string& label) {
    if (label.find_first_of(kMeta) == std::string::npos) return label;
    std::string out = "'";
    for (char c : label) {
        if (c == '\'') out += '\'';
        out += c;
    }
    return out + "'";
}

struct Emitter {
    const LatentTree& tree;
    int next_label = 1;

    // Smallest leaf label beneath each child, used for ordering.
    std::string smallest(NodeId v, NodeId from) const {
        std::string best;
        for (NodeId leaf : tree.leaves_beyond(from, v))
            if (best.empty() || tree.name(leaf) < best) best = tree.name(leaf);
        return best;
    }

    std::string emit(NodeId v, NodeId from) {
        if (tree.is_leaf(v)) return quoted(tree.name(v));
        std::vector<std::pair<std::string, NodeId>> kids;
        for (NodeId u : tree.neighbors(v))
            if (u != from) kids.emplace_back(smallest(u, v), u);
        std::sort(kids.begin(), kids.end());
        std::string out = "(";
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (i) out += ',';
            out += emit(kids[i].second, v);
        }
        return out + ")H" + std::to_string(next_label++);
    }
};

struct ParsedNode {
    std::string label;
    bool quoted = false;
    std::vector<std::unique_ptr<ParsedNode>> children;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    std::unique_ptr<ParsedNode> parse() {
        auto root = subtree();
        skip();
        expect(';');
        skip();
        if (pos_ != text_.size()) fail("unexpected text after ';'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("newick: " + what, pos_);
    }

    void skip() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos_;
            } else if (c == '[') {
                const auto end = text_.find(']', pos_);
                if (end == std::string_view::npos) fail("unterminated comment");
                pos_ = end + 1;
            } else {
                break;
            }
        }
    }

    bool peek(char c) {
        skip();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    void expect(char c) {
        if (!peek(c)) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::unique_ptr<ParsedNode> subtree() {
        auto node = std::make_unique<ParsedNode>();
        if (peek('(')) {
            ++pos_;
            node->children.push_back(subtree());
            while (peek(',')) {
                ++pos_;
                node->children.push_back(subtree());
            }
            expect(')');
        }
        label(*node);
        if (peek(':')) {
            ++pos_;
            length();
        }
        return node;
    }

    void label(ParsedNode& node) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == '\'') {
            node.quoted = true;
            ++pos_;
            while (true) {
                if (pos_ >= text_.size()) fail("unterminated quoted label");
                if (text_[pos_] == '\'') {
                    if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
                        node.label += '\'';
                        pos_ += 2;
                        continue;
                    }
                    ++pos_;
                    break;
                }
                node.label += text_[pos_++];
            }
            return;
        }
        while (pos_ < text_.size() && kMeta.find(text_[pos_]) == std::string_view::npos) node.label += text_[pos_++];
    }

    void length() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && kMeta.find(text_[pos_]) == std::string_view::npos) ++pos_;
        if (pos_ == start) fail("missing branch length");
        const std::string value(text_.substr(start, pos_ - start));
        std::istringstream in(value);
        double v = 0.0;
        if (!(in >> v) || !in.eof()) {
            pos_ = start;
            fail("malformed branch length '" + value + "'");
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

struct Builder {
    LatentTree tree;
    std::set<std::string> seen;

    void add_leaves(const ParsedNode& n) {
        if (n.children.empty()) {
            if (n.label.empty()) throw DataError("newick: leaf without a label");
            if (!seen.insert(n.label).second) throw DataError("newick: duplicate leaf '" + n.label + "'");
            tree.add_leaf(n.label);
            return;
        }
        if (n.children.size() == 1) throw DataError("newick: internal node with a single child");
        for (const auto& c : n.children) add_leaves(*c);
    }

    // Returns the id of the node standing for n; leaves are matched in order.
    NodeId attach(const ParsedNode& n, NodeId& next_leaf, bool is_root) {
        if (n.children.empty()) return next_leaf++;
        const std::size_t limit = is_root ? 3 : 2;
        if (n.children.size() > limit) throw DataError("newick: node with more than three neighbours");
        if (is_root && n.children.size() == 2) {
            const NodeId a = attach(*n.children[0], next_leaf, false);
            const NodeId b = attach(*n.children[1], next_leaf, false);
            tree.add_edge(a, b);
            return a;
        }
        const NodeId h = tree.add_hidden();
        for (const auto& c : n.children) tree.add_edge(h, attach(*c, next_leaf, false));
        return h;
    }
};

} // namespace

std::string to_newick(const LatentTree& tree) {
    tree.validate();
    if (tree.leaf_count() == 0) throw InvalidArgument("cannot write an empty tree");
    if (tree.hidden_count() == 0) {
        std::string out = "(";
        for (NodeId leaf : tree.leaves()) out += (out.size() > 1 ? "," : "") + quoted(tree.name(leaf));
        return out + ");";
    }
    Emitter e{tree};
    return e.emit(choose_balanced_root(tree), -1) + ";";
}

LatentTree from_newick(std::string_view text) {
    const auto root = Parser(text).parse();
    if (root->children.empty()) throw DataError("newick: a tree needs at least two leaves");
    Builder b;
    b.add_leaves(*root);
    NodeId next_leaf = 0;
    b.attach(*root, next_leaf, true);
    b.tree.validate();
    return b.tree;
}

LatentTree read_newick_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open tree file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_newick(ss.str());
}

void write_newick_file(const std::string& path, const LatentTree& tree) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write tree file '" + path + "'");
    out << to_newick(tree) << '\n';
}

} // namespace ltree
