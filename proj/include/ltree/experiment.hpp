#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ltree {

struct MethodSpec {
    enum class Kind { Tensor, Spectral, NJ, Oracle };
    Kind kind = Kind::Tensor;
    /// Rank for Spectral@k.
    int k = 0;

    /// "tensor", "spectral@3", "nj" or "oracle".
    std::string label() const;
    /// Inverse of label(); throws InvalidArgument on anything else.
    static MethodSpec parse(const std::string& text);
    friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

std::vector<MethodSpec> parse_methods(const std::string& comma_list);

struct QuartetExperimentConfig {
    int k_h = 2;
    int k_g = 4;
    int n = 10;
    double mu = 0.5;
    std::optional<double> mu_hidden;
    std::vector<int> sample_grid;
    int trials = 1;
    std::vector<MethodSpec> methods;
    std::uint64_t seed = 0;
    int jobs = 1;

    /// Throws InvalidArgument naming the first bad field.
    void validate() const;
};

struct TreeExperimentConfig {
    int d = 16;
    double beta = 0.5;
    int k_lo = 2;
    int k_hi = 8;
    int n = 10;
    double mu = 0.5;
    std::optional<double> mu_hidden;
    std::vector<int> sample_grid;
    int trials = 1;
    std::vector<MethodSpec> methods;
    std::uint64_t seed = 0;
    int jobs = 1;

    void validate() const;
};

struct TrialRow {
    std::string method;
    int m = 0;
    int trial = 0;
    /// 0/1 success for quartets, RF distance for trees; empty when the
    /// method failed on this trial.
    std::optional<int> outcome;
    double elapsed_ms = 0.0;
    std::string error;
    /// Pairs at infinite distance handed to neighbor joining.
    int infinite_distances = 0;
    /// Hidden cardinality drawn for the trial (tree runs).
    int k = 0;
};

struct SummaryRow {
    std::string method;
    int m = 0;
    int count = 0;
    int failures = 0;
    double mean = 0.0;
    /// Sample standard deviation over sqrt(count).
    double se = 0.0;
};

struct ResultTable {
    /// Ordered by method (config order), then m (grid order), then trial.
    std::vector<TrialRow> rows;

    std::vector<SummaryRow> summary() const;
    /// Columns method,m,trial,outcome,elapsed_ms. elapsed_ms stays empty
    /// unless `timing` is set, so untimed output is byte-reproducible.
    void write_csv(std::ostream& out, bool timing = false) const;
};

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

ResultTable run_quartet_experiment(const QuartetExperimentConfig& cfg);
ResultTable run_tree_experiment(const TreeExperimentConfig& cfg);

} // namespace ltree
