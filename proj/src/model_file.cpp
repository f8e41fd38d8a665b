#include "ltree/model_file.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "ltree/errors.hpp"

namespace ltree {

namespace {

constexpr double kNormalizeTolerance = 1e-6;

struct Line {
    int number;
    std::vector<std::string> tokens;
};

[[noreturn]] void fail(int line, const std::string& what) {
    throw DataError("model file line " + std::to_string(line) + ": " + what);
}

std::vector<Line> tokenize(std::istream& in) {
    std::vector<Line> out;
    std::string text;
    int number = 0;
    while (std::getline(in, text)) {
        ++number;
        if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
        std::istringstream ss(text);
        Line line{number, {}};
        for (std::string tok; ss >> tok;) line.tokens.push_back(tok);
        if (!line.tokens.empty()) out.push_back(std::move(line));
    }
    return out;
}

double number(const Line& line, const std::string& tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v)) fail(line.number, "'" + tok + "' is not a number");
    if (v < 0.0) fail(line.number, "probabilities must be nonnegative");
    return v;
}

int positive(const Line& line, const std::string& tok) {
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size() || v < 1 || v > 1000000) {
        fail(line.number, "'" + tok + "' is not a positive state count");
    }
    return static_cast<int>(v);
}

void normalize_columns(Matrix& m, int line, const std::string& what) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double s = m.col(j).sum();
        if (std::abs(s - 1.0) > kNormalizeTolerance) {
            fail(line, what + " column " + std::to_string(j + 1) + " sums to " + std::to_string(s));
        }
        m.col(j) /= s;
    }
}

struct Table {
    std::string parent;
    Matrix values;
    int line = 0;
};

} // namespace

LatentModel read_model(std::istream& in) {
    const auto lines = tokenize(in);
    LatentTree tree;
    std::vector<int> states;
    std::string root_name;
    Vector marginal;
    std::string marginal_name;
    int marginal_line = 0;
    std::map<std::string, Table> cpts;

    auto lookup = [&](const Line& line, const std::string& name) {
        const auto id = tree.find(name);
        if (!id) fail(line.number, "unknown variable '" + name + "'");
        return *id;
    };

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const Line& line = lines[i];
        const std::string& kw = line.tokens[0];
        const auto argc = line.tokens.size() - 1;
        if (kw == "leaf" || kw == "hidden") {
            if (argc != 2) fail(line.number, "expected '" + kw + " NAME STATES'");
            if (tree.find(line.tokens[1])) fail(line.number, "duplicate variable '" + line.tokens[1] + "'");
            const int k = positive(line, line.tokens[2]);
            if (kw == "leaf") {
                tree.add_leaf(line.tokens[1]);
            } else {
                tree.add_hidden(line.tokens[1]);
            }
            states.push_back(k);
        } else if (kw == "edge") {
            if (argc != 2) fail(line.number, "expected 'edge A B'");
            const NodeId a = lookup(line, line.tokens[1]);
            const NodeId b = lookup(line, line.tokens[2]);
            if (a == b || tree.has_edge(a, b)) fail(line.number, "invalid or repeated edge");
            tree.add_edge(a, b);
        } else if (kw == "root") {
            if (argc != 1) fail(line.number, "expected 'root NAME'");
            if (!root_name.empty()) fail(line.number, "root declared twice");
            lookup(line, line.tokens[1]);
            root_name = line.tokens[1];
        } else if (kw == "marginal") {
            if (argc != 1) fail(line.number, "expected 'marginal NAME'");
            if (!marginal_name.empty()) fail(line.number, "marginal declared twice");
            const NodeId v = lookup(line, line.tokens[1]);
            if (i + 1 >= lines.size()) fail(line.number, "missing marginal values");
            const Line& row = lines[++i];
            const int k = states[static_cast<std::size_t>(v)];
            if (static_cast<int>(row.tokens.size()) != k) {
                fail(row.number, "expected " + std::to_string(k) + " marginal values");
            }
            marginal.resize(k);
            for (int s = 0; s < k; ++s) marginal(s) = number(row, row.tokens[static_cast<std::size_t>(s)]);
            marginal_name = line.tokens[1];
            marginal_line = line.number;
        } else if (kw == "cpt") {
            if (argc != 2) fail(line.number, "expected 'cpt CHILD PARENT'");
            const NodeId child = lookup(line, line.tokens[1]);
            const NodeId parent = lookup(line, line.tokens[2]);
            if (cpts.count(line.tokens[1])) fail(line.number, "second CPT for '" + line.tokens[1] + "'");
            const int rows = states[static_cast<std::size_t>(child)];
            const int cols = states[static_cast<std::size_t>(parent)];
            Table t{line.tokens[2], Matrix(rows, cols), line.number};
            for (int r = 0; r < rows; ++r) {
                if (i + 1 >= lines.size()) fail(line.number, "CPT ends early");
                const Line& row = lines[++i];
                if (static_cast<int>(row.tokens.size()) != cols) {
                    fail(row.number, "expected " + std::to_string(cols) + " values per CPT row");
                }
                for (int c = 0; c < cols; ++c) t.values(r, c) = number(row, row.tokens[static_cast<std::size_t>(c)]);
            }
            normalize_columns(t.values, line.number, "CPT of '" + line.tokens[1] + "'");
            cpts.emplace(line.tokens[1], std::move(t));
        } else {
            fail(line.number, "unknown statement '" + kw + "'");
        }
    }

    if (tree.node_count() == 0) throw DataError("model file declares no variables");
    tree.validate();

    ModelParameters p;
    if (root_name.empty()) {
        p.root = LatentModel::default_root(tree);
    } else {
        p.root = *tree.find(root_name);
    }
    if (marginal_name.empty()) throw DataError("model file has no root marginal");
    if (marginal_name != tree.name(p.root)) {
        fail(marginal_line, "marginal is for '" + marginal_name + "' but the root is '" + tree.name(p.root) + "'");
    }
    {
        Matrix col = marginal;
        normalize_columns(col, marginal_line, "marginal");
        p.root_marginal = col.col(0);
    }

    p.states = states;
    p.cpts.assign(static_cast<std::size_t>(tree.node_count()), Matrix());
    std::vector<NodeId> order{p.root};
    std::vector<NodeId> parent(static_cast<std::size_t>(tree.node_count()), -1);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const NodeId u = order[i];
        for (NodeId v : tree.neighbors(u)) {
            if (v == parent[static_cast<std::size_t>(u)]) continue;
            parent[static_cast<std::size_t>(v)] = u;
            order.push_back(v);
            const auto it = cpts.find(tree.name(v));
            if (it == cpts.end()) {
                throw DataError("model file has no CPT for '" + tree.name(v) + "' given '" + tree.name(u) + "'");
            }
            if (it->second.parent != tree.name(u)) {
                fail(it->second.line, "CPT of '" + tree.name(v) + "' must be conditioned on '" + tree.name(u) +
                                          "' (edges point away from the root)");
            }
            p.cpts[static_cast<std::size_t>(v)] = it->second.values;
        }
    }
    if (const auto it = cpts.find(tree.name(p.root)); it != cpts.end()) {
        fail(it->second.line, "the root '" + tree.name(p.root) + "' takes a marginal, not a CPT");
    }

    try {
        return LatentModel(std::move(tree), std::move(p));
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
}

LatentModel read_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    return read_model(in);
}

void write_model(std::ostream& out, const LatentModel& model) {
    const LatentTree& tree = model.tree();
    char buf[32];
    auto row = [&](auto&& values, Eigen::Index count) {
        for (Eigen::Index j = 0; j < count; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", values(j));
            out << (j ? " " : "") << buf;
        }
        out << '\n';
    };
    for (NodeId v = 0; v < tree.node_count(); ++v) {
        out << (tree.is_leaf(v) ? "leaf " : "hidden ") << tree.name(v) << ' ' << model.states(v) << '\n';
    }
    for (auto [a, b] : tree.edges()) out << "edge " << tree.name(a) << ' ' << tree.name(b) << '\n';
    out << "root " << tree.name(model.root()) << '\n';
    out << "marginal " << tree.name(model.root()) << '\n';
    const Vector& rm = model.parameters().root_marginal;
    row([&](Eigen::Index j) { return rm(j); }, rm.size());
    for (NodeId v : model.preorder()) {
        if (v == model.root()) continue;
        out << "cpt " << tree.name(v) << ' ' << tree.name(model.parent(v)) << '\n';
        const Matrix& c = model.cpt(v);
        for (Eigen::Index r = 0; r < c.rows(); ++r) row([&](Eigen::Index j) { return c(r, j); }, c.cols());
    }
}

void write_model_file(const std::string& path, const LatentModel& model) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file '" + path + "'");
    write_model(out, model);
}

} // namespace ltree
