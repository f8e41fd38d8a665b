#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ltree/latent_model.hpp"
#include "ltree/rng.hpp"
#include "ltree/tensor.hpp"

namespace ltree {

/// m rows of d discrete observations. States are 0-based in memory; the CSV
/// form is 1-based. `n` is the shared state count (max over variables).
struct SampleSet {
    std::vector<std::string> names;
    int n = 0;
    int m = 0;
    std::vector<int> data; // row-major m x d

    int variables() const noexcept { return static_cast<int>(names.size()); }
    int at(int row, int var) const {
        return data[static_cast<std::size_t>(row) * names.size() + static_cast<std::size_t>(var)];
    }
};

/// m i.i.d. ancestral samples of the leaves (columns in ascending leaf id).
SampleSet sample(const LatentModel& model, int m, Rng& rng);
SampleSet sample(const LatentModel& model, int m, std::uint64_t seed);

/// Raw relative frequencies (count / m) of four distinct columns.
JointTensor4 empirical_quartet_tensor(const SampleSet& s, const std::array<int, 4>& idx);

/// n x n relative-frequency table of columns i and j.
Matrix empirical_pairwise(const SampleSet& s, int i, int j);
Vector empirical_marginal(const SampleSet& s, int i);

/// Header row of names, then comma-separated 1-based integer states.
/// Throws DataError naming the offending line.
SampleSet read_samples_csv(std::istream& in);
SampleSet read_samples_csv_file(const std::string& path);
void write_samples_csv(std::ostream& out, const SampleSet& s);

} // namespace ltree
