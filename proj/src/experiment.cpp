#include "ltree/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "ltree/errors.hpp"
#include "ltree/nj.hpp"
#include "ltree/parallel.hpp"
#include "ltree/resolvers.hpp"
#include "ltree/samples.hpp"
#include "ltree/synthetic.hpp"
#include "ltree/tree_builder.hpp"
#include "ltree/tree_metrics.hpp"

namespace ltree {

std::string MethodSpec::label() const {
    switch (kind) {
    case Kind::Tensor: return "tensor";
    case Kind::Spectral: return "spectral@" + std::to_string(k);
    case Kind::NJ: return "nj";
    case Kind::Oracle: return "oracle";
    }
    return {};
}

MethodSpec MethodSpec::parse(const std::string& text) {
    if (text == "tensor") return {Kind::Tensor, 0};
    if (text == "nj") return {Kind::NJ, 0};
    if (text == "oracle") return {Kind::Oracle, 0};
    const std::string prefix = "spectral@";
    if (text.rfind(prefix, 0) == 0) {
        const std::string digits = text.substr(prefix.size());
        if (!digits.empty() && digits.size() < 6 && digits.find_first_not_of("0123456789") == std::string::npos) {
            const int k = std::stoi(digits);
            if (k >= 1) return {Kind::Spectral, k};
        }
        throw InvalidArgument("spectral method needs a positive integer rank, as in spectral@3 (got '" + text + "')");
    }
    throw InvalidArgument("unknown method '" + text + "' (expected tensor, spectral@k, nj or oracle)");
}

std::vector<MethodSpec> parse_methods(const std::string& comma_list) {
    std::vector<MethodSpec> out;
    std::istringstream in(comma_list);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(MethodSpec::parse(item));
    if (out.empty()) throw InvalidArgument("method list is empty");
    return out;
}

namespace {

void check_common(const std::vector<int>& grid, int trials, const std::vector<MethodSpec>& methods, int n,
                  double mu, const std::optional<double>& mu_hidden, int jobs) {
    if (grid.empty()) throw InvalidArgument("sample grid is empty");
    for (int m : grid)
        if (m < 1) throw InvalidArgument("sample sizes must be positive");
    if (trials < 1) throw InvalidArgument("trials must be positive");
    if (methods.empty()) throw InvalidArgument("no methods given");
    if (n < 2) throw InvalidArgument("observed state count n must be at least 2");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be finite and >= 0");
    if (mu_hidden && (!(*mu_hidden >= 0.0) || !std::isfinite(*mu_hidden))) {
        throw InvalidArgument("mu-hidden must be finite and >= 0");
    }
    if (jobs < 0) throw InvalidArgument("jobs must be >= 0");
    for (const auto& method : methods) {
        if (method.kind == MethodSpec::Kind::Spectral && method.k > n) {
            throw InvalidArgument(method.label() + " needs k <= n (n=" + std::to_string(n) + ")");
        }
    }
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// rows[method][grid][trial] flattened.
struct Grid {
    std::size_t methods, sizes, trials;
    std::vector<TrialRow> cells;

    Grid(std::size_t mth, std::size_t sz, std::size_t tr) : methods(mth), sizes(sz), trials(tr), cells(mth * sz * tr) {}
    TrialRow& at(std::size_t mi, std::size_t gi, std::size_t t) { return cells[(mi * sizes + gi) * trials + t]; }
};

template <class Fn>
void run_method(TrialRow& row, Fn&& fn) {
    const auto start = Clock::now();
    try {
        row.outcome = fn();
    } catch (const Error& e) {
        row.outcome.reset();
        row.error = e.what();
    }
    row.elapsed_ms = ms_since(start);
}

int resolved_jobs(int jobs) { return jobs == 0 ? default_jobs() : jobs; }

std::uint64_t builder_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t grid_index) {
    Rng rng = derive_rng(seed, {trial, grid_index + 1, 1});
    return rng();
}

} // namespace

void QuartetExperimentConfig::validate() const {
    check_common(sample_grid, trials, methods, n, mu, mu_hidden, jobs);
    if (k_h < 2 || k_h > n || k_g < 2 || k_g > n) throw InvalidArgument("hidden cardinalities must satisfy 2 <= k <= n");
}

void TreeExperimentConfig::validate() const {
    check_common(sample_grid, trials, methods, n, mu, mu_hidden, jobs);
    if (d < 4) throw InvalidArgument("tree experiments need d >= 4");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
    if (k_lo < 2 || k_hi < k_lo || k_hi > n) throw InvalidArgument("hidden cardinality range must satisfy 2 <= k_lo <= k_hi <= n");
}

ResultTable run_quartet_experiment(const QuartetExperimentConfig& cfg) {
    cfg.validate();
    const QuartetModelSpec spec{cfg.k_h, cfg.k_g, cfg.n, cfg.mu, cfg.mu_hidden};
    Grid grid(cfg.methods.size(), cfg.sample_grid.size(), static_cast<std::size_t>(cfg.trials));

    parallel_for(cfg.trials, resolved_jobs(cfg.jobs), [&](int trial) {
        const auto t = static_cast<std::uint64_t>(trial);
        Rng model_rng = derive_rng(cfg.seed, {t, 0});
        const QuartetModel qm = make_quartet_model(spec, model_rng);
        for (std::size_t gi = 0; gi < cfg.sample_grid.size(); ++gi) {
            const int m = cfg.sample_grid[gi];
            Rng sample_rng = derive_rng(cfg.seed, {t, gi + 1});
            const SampleSet s = sample(qm.model, m, sample_rng);
            for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
                const MethodSpec& method = cfg.methods[mi];
                TrialRow& row = grid.at(mi, gi, static_cast<std::size_t>(trial));
                row = {method.label(), m, trial, std::nullopt, 0.0, {}, 0, 0};
                run_method(row, [&]() -> int {
                    Pairing got = qm.truth;
                    switch (method.kind) {
                    case MethodSpec::Kind::Tensor:
                        got = resolve_nuclear(empirical_quartet_tensor(s, {0, 1, 2, 3})).relation;
                        break;
                    case MethodSpec::Kind::Spectral: {
                        const PairwiseTables pt{empirical_pairwise(s, 0, 1), empirical_pairwise(s, 0, 2),
                                                empirical_pairwise(s, 0, 3), empirical_pairwise(s, 1, 2),
                                                empirical_pairwise(s, 1, 3), empirical_pairwise(s, 2, 3)};
                        got = resolve_spectral_k(pt, method.k).relation;
                        break;
                    }
                    case MethodSpec::Kind::NJ: {
                        const DistanceMatrix dm = distance_matrix(s);
                        row.infinite_distances = dm.infinite_count();
                        got = induced_pairing(neighbor_join(dm), {0, 1, 2, 3});
                        break;
                    }
                    case MethodSpec::Kind::Oracle: break;
                    }
                    return got == qm.truth ? 1 : 0;
                });
            }
        }
    });
    return {std::move(grid.cells)};
}

ResultTable run_tree_experiment(const TreeExperimentConfig& cfg) {
    cfg.validate();
    Grid grid(cfg.methods.size(), cfg.sample_grid.size(), static_cast<std::size_t>(cfg.trials));

    parallel_for(cfg.trials, resolved_jobs(cfg.jobs), [&](int trial) {
        const auto t = static_cast<std::uint64_t>(trial);
        Rng model_rng = derive_rng(cfg.seed, {t, 0});
        const LatentTree truth = random_topology(cfg.d, cfg.beta, model_rng);
        const int k = std::uniform_int_distribution<int>(cfg.k_lo, cfg.k_hi)(model_rng);
        const LatentModel model = parameterize_tree(truth, {cfg.n, k, cfg.mu, cfg.mu_hidden}, model_rng);
        for (std::size_t gi = 0; gi < cfg.sample_grid.size(); ++gi) {
            const int m = cfg.sample_grid[gi];
            Rng sample_rng = derive_rng(cfg.seed, {t, gi + 1});
            const SampleSet s = sample(model, m, sample_rng);
            const std::uint64_t build_seed = builder_seed(cfg.seed, t, gi);
            for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
                const MethodSpec& method = cfg.methods[mi];
                TrialRow& row = grid.at(mi, gi, static_cast<std::size_t>(trial));
                row = {method.label(), m, trial, std::nullopt, 0.0, {}, 0, k};
                run_method(row, [&]() -> int {
                    switch (method.kind) {
                    case MethodSpec::Kind::Tensor:
                        return robinson_foulds(truth, build_tree(make_nuclear_resolver(s), s.names, build_seed).tree);
                    case MethodSpec::Kind::Spectral:
                        return robinson_foulds(truth,
                                               build_tree(make_spectral_resolver(s, method.k), s.names, build_seed).tree);
                    case MethodSpec::Kind::NJ: {
                        const DistanceMatrix dm = distance_matrix(s);
                        row.infinite_distances = dm.infinite_count();
                        return robinson_foulds(truth, neighbor_join(dm));
                    }
                    case MethodSpec::Kind::Oracle:
                        return robinson_foulds(
                            truth, build_tree(make_oracle_resolver(truth), truth.leaf_names(), build_seed).tree);
                    }
                    return 0;
                });
            }
        }
    });
    return {std::move(grid.cells)};
}

std::vector<SummaryRow> ResultTable::summary() const {
    std::vector<SummaryRow> out;
    for (const TrialRow& row : rows) {
        if (out.empty() || out.back().method != row.method || out.back().m != row.m) out.push_back({row.method, row.m});
        SummaryRow& s = out.back();
        if (!row.outcome) {
            ++s.failures;
            continue;
        }
        ++s.count;
        s.mean += *row.outcome;
    }
    for (SummaryRow& s : out) {
        if (s.count > 0) s.mean /= s.count;
        double ss = 0.0;
        for (const TrialRow& row : rows)
            if (row.method == s.method && row.m == s.m && row.outcome) ss += (*row.outcome - s.mean) * (*row.outcome - s.mean);
        s.se = s.count > 1 ? std::sqrt(ss / (s.count - 1)) / std::sqrt(static_cast<double>(s.count)) : 0.0;
    }
    return out;
}

void ResultTable::write_csv(std::ostream& out, bool timing) const {
    out << "method,m,trial,outcome,elapsed_ms\n";
    char buf[32];
    for (const TrialRow& row : rows) {
        out << row.method << ',' << row.m << ',' << row.trial << ',';
        if (row.outcome) {
            out << *row.outcome;
        } else {
            out << "NA";
        }
        out << ',';
        if (timing) {
            std::snprintf(buf, sizeof buf, "%.3f", row.elapsed_ms);
            out << buf;
        }
        out << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "method,m,count,failures,mean,se\n";
    char buf[64];
    for (const SummaryRow& s : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", s.mean, s.se);
        out << s.method << ',' << s.m << ',' << s.count << ',' << s.failures << ',' << buf << '\n';
    }
}

} // namespace ltree
