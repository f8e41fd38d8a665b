#include "ltree/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>

#include "ltree/diagnostics.hpp"
#include "ltree/errors.hpp"
#include "ltree/experiment.hpp"
#include "ltree/model_file.hpp"
#include "ltree/newick.hpp"
#include "ltree/nj.hpp"
#include "ltree/parallel.hpp"
#include "ltree/samples.hpp"
#include "ltree/synthetic.hpp"
#include "ltree/tree_builder.hpp"

namespace ltree {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr const char* kResultColumns =
    "Result CSV columns: method,m,trial,outcome,elapsed_ms. outcome is 0/1 (quartet) or the "
    "Robinson-Foulds distance (tree), NA when the method failed; elapsed_ms is filled only with --timing.";

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write '" + path + "'");
    return f;
}

json manifest(const std::string& subcommand, const std::vector<std::string>& args, std::uint64_t seed) {
    return json{{"subcommand", subcommand}, {"version", LTREE_VERSION}, {"argv", args}, {"seed", seed}};
}

void write_manifest(const std::string& out_path, const json& m) {
    auto f = open_out(out_path + ".manifest.json");
    f << m.dump(2) << '\n';
}

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json methods_json(const std::vector<MethodSpec>& methods) {
    json out = json::array();
    for (const auto& m : methods) out.push_back(m.label());
    return out;
}

json table_notes(const ResultTable& table) {
    json failures = json::array();
    json infinite = json::array();
    for (const auto& row : table.rows) {
        if (!row.outcome) failures.push_back({{"method", row.method}, {"m", row.m}, {"trial", row.trial}, {"error", row.error}});
        if (row.infinite_distances > 0) {
            infinite.push_back({{"method", row.method},
                                {"m", row.m},
                                {"trial", row.trial},
                                {"pairs", row.infinite_distances},
                                {"sentinel", kInfiniteDistance}});
        }
    }
    return json{{"failures", failures}, {"infinite_distances", infinite}};
}

void print_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-14s %8s %8s %10s %10s\n", "method", "m", "failed", "mean", "se");
    out << buf;
    for (const auto& s : rows) {
        std::snprintf(buf, sizeof buf, "%-14s %8d %8d %10.4f %10.4f\n", s.method.c_str(), s.m, s.failures, s.mean, s.se);
        out << buf;
    }
}

// Writes the result table, its summary and the manifest.
void emit_table(const ResultTable& table, const std::string& out_path, bool timing, json m, std::ostream& out,
                std::ostream& err) {
    const auto summary = table.summary();
    if (out_path.empty()) {
        table.write_csv(out, timing);
        print_summary(err, summary);
        return;
    }
    {
        auto f = open_out(out_path);
        table.write_csv(f, timing);
    }
    {
        auto f = open_out(out_path + ".summary.csv");
        write_summary_csv(f, summary);
    }
    m["notes"] = table_notes(table);
    m["outputs"] = {{"results", out_path}, {"summary", out_path + ".summary.csv"}};
    write_manifest(out_path, m);
    print_summary(out, summary);
}

struct CommonBench {
    std::vector<int> samples;
    int trials = 100;
    std::string methods = "tensor";
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::string out;
    bool timing = false;
    std::optional<double> mu_hidden;
};

void add_common(CLI::App* sub, CommonBench& c) {
    sub->add_option("--samples", c.samples, "Comma-separated sample sizes m")->delimiter(',')->required();
    sub->add_option("--trials", c.trials, "Random models per sample size")->capture_default_str();
    sub->add_option("--methods", c.methods, "Comma-separated list of tensor, spectral@k, nj, oracle")
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "Run seed (default $LTREE_SEED or 1)");
    sub->add_option("--jobs", c.jobs, "Worker threads for the trial loop (0 = all cores)")->capture_default_str();
    sub->add_option("--out", c.out, "Result CSV path; also writes <out>.summary.csv and <out>.manifest.json");
    sub->add_flag("--timing", c.timing, "Fill the elapsed_ms column (output is then not byte-reproducible)");
    sub->add_option("--mu-hidden", c.mu_hidden, "Perturbation of hidden-hidden CPTs (default: --mu)");
    sub->footer(kResultColumns);
}

} // namespace

std::uint64_t default_seed() {
    if (const char* env = std::getenv("LTREE_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0') throw InvalidArgument(std::string("LTREE_SEED is not an unsigned integer: '") + env + "'");
        return v;
    }
    return 1;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Latent tree structure recovery with the nuclear-norm quartet test", "ltree"};
    app.require_subcommand(1);
    app.set_version_flag("--version", LTREE_VERSION);

    // quartet-bench
    auto* qb = app.add_subcommand("quartet-bench", "Quartet recovery rate on random two-hidden-node models");
    QuartetExperimentConfig qcfg;
    CommonBench qc;
    qb->add_option("--kh", qcfg.k_h, "States of the hidden node H")->capture_default_str();
    qb->add_option("--kg", qcfg.k_g, "States of the hidden node G")->capture_default_str();
    qb->add_option("--n", qcfg.n, "Observed states")->capture_default_str();
    qb->add_option("--mu", qcfg.mu, "CPT perturbation level")->capture_default_str();
    add_common(qb, qc);

    // tree-bench
    auto* tb = app.add_subcommand("tree-bench", "Robinson-Foulds error of whole-tree recovery on random trees");
    TreeExperimentConfig tcfg;
    CommonBench tc;
    tb->add_option("--d", tcfg.d, "Observed variables")->capture_default_str();
    tb->add_option("--beta", tcfg.beta, "Split parameter of the random topology")->capture_default_str();
    tb->add_option("--k-min", tcfg.k_lo, "Smallest hidden cardinality")->capture_default_str();
    tb->add_option("--k-max", tcfg.k_hi, "Largest hidden cardinality")->capture_default_str();
    tb->add_option("--n", tcfg.n, "Observed states")->capture_default_str();
    tb->add_option("--mu", tcfg.mu, "CPT perturbation level")->capture_default_str();
    add_common(tb, tc);

    // build
    auto* bd = app.add_subcommand("build", "Build a latent tree from a sample CSV and write it as Newick");
    std::string b_input, b_method = "tensor", b_out, b_policy = "balanced";
    std::optional<std::uint64_t> b_seed;
    bool b_shuffle = false;
    int b_jobs = 1;
    bd->add_option("--input", b_input, "Sample CSV: header of names, then 1-based integer states")->required();
    bd->add_option("--method", b_method, "tensor, spectral@k or nj")->capture_default_str();
    bd->add_option("--out", b_out, "Newick output path (default: stdout); also writes <out>.manifest.json");
    bd->add_option("--seed", b_seed, "Seed for the leaf choices and --shuffle (default $LTREE_SEED or 1)");
    bd->add_flag("--shuffle", b_shuffle, "Insert variables in a seeded random order instead of column order");
    bd->add_option("--policy", b_policy, "Split-node choice: balanced or descend")
        ->check(CLI::IsMember({"balanced", "descend"}))
        ->capture_default_str();
    bd->add_option("--jobs", b_jobs, "Worker threads for pairwise tables (0 = all cores)")->capture_default_str();

    // diagnose
    auto* dg = app.add_subcommand("diagnose", "Recovery conditions and probability bounds of a model file");
    std::string d_model, d_out;
    std::vector<int> d_samples{100, 1000, 10000};
    double d_c = 4.0;
    int d_jobs = 1;
    dg->add_option("--model", d_model, "Model file")->required();
    dg->add_option("--samples", d_samples, "Sample sizes at which to evaluate the bounds")->delimiter(',');
    dg->add_option("--c", d_c, "Constant of the tree-level bound")->capture_default_str();
    dg->add_option("--jobs", d_jobs, "Worker threads for the quartet scan (0 = all cores)")->capture_default_str();
    dg->add_option("--out", d_out, "CSV report path; also writes <out>.manifest.json");
    dg->footer("CSV columns: m,theta_min,gamma_min,alpha_min,delta,lemma2_ok,a3_ok,a4_ok,lemma3_bound,tree_bound");

    // simulate
    auto* sm = app.add_subcommand("simulate", "Draw samples from a model file or from a random tree model");
    std::string s_model, s_out, s_model_out, s_tree_out;
    int s_m = 0;
    std::optional<std::uint64_t> s_seed;
    TreeModelSpec s_spec;
    int s_d = 8;
    double s_beta = 0.5;
    sm->add_option("--model", s_model, "Model file (otherwise a random tree model is generated)");
    sm->add_option("--samples", s_m, "Number of samples")->required();
    sm->add_option("--seed", s_seed, "Seed (default $LTREE_SEED or 1)");
    sm->add_option("--out", s_out, "Sample CSV path (default: stdout)");
    sm->add_option("--model-out", s_model_out, "Write the model used to this path");
    sm->add_option("--tree-out", s_tree_out, "Write the true topology as Newick to this path");
    sm->add_option("--d", s_d, "Leaves of a generated model")->capture_default_str();
    sm->add_option("--beta", s_beta, "Split parameter of a generated model")->capture_default_str();
    sm->add_option("--k", s_spec.k, "Hidden states of a generated model")->capture_default_str();
    sm->add_option("--n", s_spec.n, "Observed states of a generated model")->capture_default_str();
    sm->add_option("--mu", s_spec.mu, "Leaf CPT perturbation of a generated model")->capture_default_str();
    sm->add_option("--mu-hidden", s_spec.mu_hidden, "Hidden CPT perturbation of a generated model");

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    if (storage.empty()) storage.emplace_back("ltree");
    for (auto& a : storage) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto start = Clock::now();
        if (*qb) {
            const std::uint64_t seed = qc.seed.value_or(default_seed());
            qcfg.sample_grid = qc.samples;
            qcfg.trials = qc.trials;
            qcfg.methods = parse_methods(qc.methods);
            qcfg.seed = seed;
            qcfg.jobs = qc.jobs;
            qcfg.mu_hidden = qc.mu_hidden;
            const ResultTable table = run_quartet_experiment(qcfg);
            json m = manifest("quartet-bench", args, seed);
            m["config"] = {{"kh", qcfg.k_h},       {"kg", qcfg.k_g},         {"n", qcfg.n},
                           {"mu", qcfg.mu},        {"mu_hidden", qcfg.mu_hidden.value_or(qcfg.mu)},
                           {"samples", qcfg.sample_grid}, {"trials", qcfg.trials},
                           {"methods", methods_json(qcfg.methods)}, {"jobs", qcfg.jobs}, {"timing", qc.timing}};
            m["timings"] = {{"total_ms", ms_since(start)}};
            emit_table(table, qc.out, qc.timing, std::move(m), out, err);
        } else if (*tb) {
            const std::uint64_t seed = tc.seed.value_or(default_seed());
            tcfg.sample_grid = tc.samples;
            tcfg.trials = tc.trials;
            tcfg.methods = parse_methods(tc.methods);
            tcfg.seed = seed;
            tcfg.jobs = tc.jobs;
            tcfg.mu_hidden = tc.mu_hidden;
            const ResultTable table = run_tree_experiment(tcfg);
            json m = manifest("tree-bench", args, seed);
            m["config"] = {{"d", tcfg.d},           {"beta", tcfg.beta},     {"k_min", tcfg.k_lo},
                           {"k_max", tcfg.k_hi},    {"n", tcfg.n},           {"mu", tcfg.mu},
                           {"mu_hidden", tcfg.mu_hidden.value_or(tcfg.mu)},  {"samples", tcfg.sample_grid},
                           {"trials", tcfg.trials}, {"methods", methods_json(tcfg.methods)},
                           {"jobs", tcfg.jobs},     {"timing", tc.timing}};
            json ks = json::array();
            for (const auto& row : table.rows)
                if (row.method == table.rows.front().method && row.m == table.rows.front().m) ks.push_back(row.k);
            m["trial_hidden_states"] = ks;
            m["timings"] = {{"total_ms", ms_since(start)}};
            emit_table(table, tc.out, tc.timing, std::move(m), out, err);
        } else if (*bd) {
            const std::uint64_t seed = b_seed.value_or(default_seed());
            const SampleSet s = read_samples_csv_file(b_input);
            if (s.variables() < 4) {
                throw DataError("tree building needs at least 4 variables; '" + b_input + "' has " +
                                std::to_string(s.variables()));
            }
            const MethodSpec method = MethodSpec::parse(b_method);
            if (method.kind == MethodSpec::Kind::Oracle) throw InvalidArgument("oracle needs a true tree; use tensor, spectral@k or nj");
            if (method.kind == MethodSpec::Kind::Spectral && method.k > s.n) {
                throw InvalidArgument(method.label() + " needs k <= n (n=" + std::to_string(s.n) + ")");
            }
            const int jobs = b_jobs == 0 ? default_jobs() : b_jobs;
            BuildOptions options;
            options.policy = b_policy == "descend" ? RootPolicy::Descend : RootPolicy::Balanced;
            if (b_shuffle) {
                options.insertion_order.resize(static_cast<std::size_t>(s.variables()));
                std::iota(options.insertion_order.begin(), options.insertion_order.end(), 0);
                Rng rng = derive_rng(seed, {1});
                std::shuffle(options.insertion_order.begin(), options.insertion_order.end(), rng);
            }

            json m = manifest("build", args, seed);
            m["config"] = {{"input", b_input}, {"method", method.label()}, {"policy", b_policy},
                           {"shuffle", b_shuffle}, {"jobs", b_jobs}};
            m["data"] = {{"variables", s.variables()}, {"samples", s.m}, {"states", s.n}};
            LatentTree tree;
            if (method.kind == MethodSpec::Kind::NJ) {
                const DistanceMatrix dm = distance_matrix(s, jobs);
                m["notes"] = {{"infinite_distances", dm.infinite_count()}, {"sentinel", kInfiniteDistance}};
                tree = neighbor_join(dm);
            } else {
                const QuartetResolver resolver = method.kind == MethodSpec::Kind::Tensor
                                                     ? make_nuclear_resolver(s)
                                                     : make_spectral_resolver(s, method.k, jobs);
                BuildResult r = build_tree(resolver, s.names, seed, options);
                m["notes"] = {{"quartet_tests", r.trace.quartet_test_count}};
                tree = std::move(r.tree);
            }
            const std::string newick = to_newick(tree);
            m["timings"] = {{"total_ms", ms_since(start)}};
            if (b_out.empty()) {
                out << newick << '\n';
            } else {
                auto f = open_out(b_out);
                f << newick << '\n';
                write_manifest(b_out, m);
            }
        } else if (*dg) {
            const LatentModel model = read_model_file(d_model);
            if (d_samples.empty()) throw InvalidArgument("--samples needs at least one value");
            for (int v : d_samples)
                if (v < 1) throw InvalidArgument("sample sizes must be positive");
            const RecoveryDiagnostics r = diagnose(model, {d_c, d_jobs == 0 ? default_jobs() : d_jobs});
            char buf[512];
            auto yes = [](bool b) { return b ? "yes" : "no"; };
            out << "leaves             " << r.d << "\n";
            out << "hidden states k    " << r.k << "\n";
            out << "quartets scanned   " << r.quartets.size() << "\n";
            std::snprintf(buf, sizeof buf,
                          "theta_min          %.10g\ngamma_min          %.10g\nalpha_min          %.10g\n"
                          "delta              %.10g\ntheta_min/(k^2+k)  %.10g\n",
                          r.theta_min, r.gamma_min, r.alpha_min, r.delta, r.lemma2_threshold());
            out << buf;
            out << "lemma2_ok          " << yes(r.lemma2_ok) << "\n";
            out << "a3_ok              " << yes(r.a3_ok) << "\n";
            out << "a4_ok              " << yes(r.a4_ok) << "\n";
            std::snprintf(buf, sizeof buf, "%10s %14s %14s\n", "m", "quartet_bound", "tree_bound");
            out << buf;
            for (int mm : d_samples) {
                std::snprintf(buf, sizeof buf, "%10d %14.6g %14.6g\n", mm, r.lemma3_bound(mm), r.tree_bound(mm));
                out << buf;
            }
            if (!d_out.empty()) {
                {
                    auto f = open_out(d_out);
                    f << "m,theta_min,gamma_min,alpha_min,delta,lemma2_ok,a3_ok,a4_ok,lemma3_bound,tree_bound\n";
                    for (int mm : d_samples) {
                        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%d,%d,%d,%.17g,%.17g\n", mm,
                                      r.theta_min, r.gamma_min, r.alpha_min, r.delta, r.lemma2_ok ? 1 : 0,
                                      r.a3_ok ? 1 : 0, r.a4_ok ? 1 : 0, r.lemma3_bound(mm), r.tree_bound(mm));
                        f << buf;
                    }
                }
                json m = manifest("diagnose", args, 0);
                m["seed"] = nullptr;
                m["config"] = {{"model", d_model}, {"samples", d_samples}, {"c", d_c}, {"jobs", d_jobs}};
                m["timings"] = {{"total_ms", ms_since(start)}};
                write_manifest(d_out, m);
            }
        } else if (*sm) {
            const std::uint64_t seed = s_seed.value_or(default_seed());
            std::optional<LatentModel> model;
            if (!s_model.empty()) {
                model.emplace(read_model_file(s_model));
            } else {
                Rng rng = derive_rng(seed, {0});
                const LatentTree tree = random_topology(s_d, s_beta, rng);
                if (s_spec.k < 2 || s_spec.k > s_spec.n) throw InvalidArgument("--k must satisfy 2 <= k <= n");
                model.emplace(parameterize_tree(tree, s_spec, rng));
            }
            Rng rng = derive_rng(seed, {1});
            const SampleSet s = sample(*model, s_m, rng);
            if (s_out.empty()) {
                write_samples_csv(out, s);
            } else {
                auto f = open_out(s_out);
                write_samples_csv(f, s);
            }
            if (!s_model_out.empty()) write_model_file(s_model_out, *model);
            if (!s_tree_out.empty()) write_newick_file(s_tree_out, model->tree());
        }
        return kExitOk;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace ltree
