#include "ltree/samples.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ltree/errors.hpp"

namespace ltree {

namespace {

// Inverse-CDF draw from a cumulative column.
int draw(const double* cumulative, int count, double u) {
    const double* it = std::upper_bound(cumulative, cumulative + count, u);
    const auto idx = static_cast<int>(it - cumulative);
    return std::min(idx, count - 1);
}

void check_column(const SampleSet& s, int i) {
    if (i < 0 || i >= s.variables()) {
        throw InvalidArgument("variable index " + std::to_string(i) + " out of range");
    }
}

int checked_state(const SampleSet& s, int row, int var) {
    const int v = s.at(row, var);
    if (v < 0 || v >= s.n) {
        throw DataError("state " + std::to_string(v + 1) + " of '" + s.names[static_cast<std::size_t>(var)] +
                        "' in row " + std::to_string(row + 1) + " is outside 1.." + std::to_string(s.n));
    }
    return v;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

SampleSet sample(const LatentModel& model, int m, Rng& rng) {
    if (m < 1) throw InvalidArgument("sample count must be at least 1");
    const LatentTree& tree = model.tree();
    const auto count = static_cast<std::size_t>(tree.node_count());

    // Cumulative columns of every CPT, and of the root marginal.
    std::vector<Matrix> cumulative(count);
    for (NodeId v = 0; v < tree.node_count(); ++v) {
        Matrix c = v == model.root() ? Matrix(model.parameters().root_marginal) : model.cpt(v);
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            for (Eigen::Index i = 1; i < c.rows(); ++i) c(i, j) += c(i - 1, j);
        cumulative[static_cast<std::size_t>(v)] = std::move(c);
    }

    const auto leaves = tree.leaves();
    std::vector<int> column_of(count, -1);
    SampleSet out;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        column_of[static_cast<std::size_t>(leaves[i])] = static_cast<int>(i);
        out.names.push_back(tree.name(leaves[i]));
    }
    out.n = model.observed_states();
    out.m = m;
    out.data.resize(static_cast<std::size_t>(m) * leaves.size());

    std::vector<int> state(count, 0);
    const auto& order = model.preorder();
    for (int row = 0; row < m; ++row) {
        for (NodeId v : order) {
            const auto vi = static_cast<std::size_t>(v);
            const Matrix& c = cumulative[vi];
            const int col = v == model.root() ? 0 : state[static_cast<std::size_t>(model.parent(v))];
            state[vi] = draw(c.col(col).data(), static_cast<int>(c.rows()), uniform01(rng));
            if (column_of[vi] >= 0) {
                out.data[static_cast<std::size_t>(row) * leaves.size() + static_cast<std::size_t>(column_of[vi])] = state[vi];
            }
        }
    }
    return out;
}

SampleSet sample(const LatentModel& model, int m, std::uint64_t seed) {
    Rng rng(seed);
    return sample(model, m, rng);
}

JointTensor4 empirical_quartet_tensor(const SampleSet& s, const std::array<int, 4>& idx) {
    for (int a = 0; a < 4; ++a) {
        check_column(s, idx[static_cast<std::size_t>(a)]);
        for (int b = a + 1; b < 4; ++b)
            if (idx[static_cast<std::size_t>(a)] == idx[static_cast<std::size_t>(b)]) {
                throw InvalidArgument("quartet variable indices must be distinct");
            }
    }
    if (s.m < 1) throw InvalidArgument("empty sample set");
    JointTensor4 t(s.n, TensorKind::Empirical);
    for (int row = 0; row < s.m; ++row) {
        t(checked_state(s, row, idx[0]), checked_state(s, row, idx[1]), checked_state(s, row, idx[2]),
          checked_state(s, row, idx[3])) += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(s.m);
    for (int x4 = 0; x4 < s.n; ++x4)
        for (int x3 = 0; x3 < s.n; ++x3)
            for (int x2 = 0; x2 < s.n; ++x2)
                for (int x1 = 0; x1 < s.n; ++x1) t(x1, x2, x3, x4) *= inv;
    return t;
}

Matrix empirical_pairwise(const SampleSet& s, int i, int j) {
    check_column(s, i);
    check_column(s, j);
    if (i == j) throw InvalidArgument("pairwise table needs two distinct variables");
    Matrix p = Matrix::Zero(s.n, s.n);
    for (int row = 0; row < s.m; ++row) p(checked_state(s, row, i), checked_state(s, row, j)) += 1.0;
    return p / static_cast<double>(s.m);
}

Vector empirical_marginal(const SampleSet& s, int i) {
    check_column(s, i);
    Vector p = Vector::Zero(s.n);
    for (int row = 0; row < s.m; ++row) p(checked_state(s, row, i)) += 1.0;
    return p / static_cast<double>(s.m);
}

SampleSet read_samples_csv(std::istream& in) {
    SampleSet s;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw DataError("sample CSV is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    s.names = split_commas(line);
    for (const auto& name : s.names)
        if (name.empty()) throw DataError("line " + std::to_string(line_no) + ": empty variable name in header");
    {
        auto sorted = s.names;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw DataError("line " + std::to_string(line_no) + ": duplicate variable name in header");
        }
    }

    const std::size_t d = s.names.size();
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(line);
        if (fields.size() != d) {
            throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(d) + " fields, got " +
                            std::to_string(fields.size()));
        }
        for (const auto& f : fields) {
            int v = 0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size() || v < 1) {
                throw DataError("line " + std::to_string(line_no) + ": '" + f + "' is not a positive integer state");
            }
            s.data.push_back(v - 1);
            s.n = std::max(s.n, v);
        }
        ++s.m;
    }
    if (s.m < 1) throw DataError("sample CSV has no data rows");
    return s;
}

SampleSet read_samples_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open sample file '" + path + "'");
    return read_samples_csv(in);
}

void write_samples_csv(std::ostream& out, const SampleSet& s) {
    for (std::size_t i = 0; i < s.names.size(); ++i) out << (i ? "," : "") << s.names[i];
    out << '\n';
    for (int row = 0; row < s.m; ++row) {
        for (int v = 0; v < s.variables(); ++v) out << (v ? "," : "") << s.at(row, v) + 1;
        out << '\n';
    }
}

} // namespace ltree
