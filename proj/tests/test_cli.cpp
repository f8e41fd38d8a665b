#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ltree/cli.hpp"
#include "ltree/model_file.hpp"
#include "ltree/newick.hpp"
#include "ltree/samples.hpp"
#include "ltree/synthetic.hpp"
#include "ltree/tree_metrics.hpp"
#include "support.hpp"

using namespace ltree;
namespace fs = std::filesystem;
namespace lt = ltree::testing;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "ltree");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ltree_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("quartet-bench writes one row per method, size and trial") {
    const Run r = run({"quartet-bench", "--kh", "2", "--kg", "4", "--n", "10", "--mu", "0.5", "--samples", "50,2000",
                       "--trials", "10", "--methods", "tensor,oracle", "--seed", "7"});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 41);
    CHECK(r.out.rfind("method,m,trial,outcome,elapsed_ms\n", 0) == 0);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run({"quartet-bench", "--n", "2", "--samples", "100", "--methods", "spectral@3"}).code == 2);
    CHECK(run({"quartet-bench", "--samples", "100", "--methods", "bogus"}).code == 2);
    CHECK(run({"quartet-bench"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"--version"}).code == 0);
}

TEST_CASE("identical flags give identical bytes, plus summary and manifest") {
    TempDir dir;
    const std::vector<std::string> base{"quartet-bench", "--samples", "100,400", "--trials", "6", "--methods",
                                        "tensor,spectral@2,nj", "--seed", "3", "--out"};
    auto a = base, b = base;
    a.push_back(dir / "a.csv");
    b.push_back(dir / "b.csv");
    REQUIRE(run(a).code == 0);
    REQUIRE(run(b).code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv.summary.csv") == slurp(dir / "b.csv.summary.csv"));
    const auto manifest = nlohmann::json::parse(slurp(dir / "a.csv.manifest.json"));
    CHECK(manifest["subcommand"] == "quartet-bench");
    CHECK(manifest["seed"] == 3);
    CHECK(manifest.contains("config"));
    CHECK(manifest.contains("notes"));
}

TEST_CASE("tree-bench rows") {
    const Run r = run({"tree-bench", "--d", "16", "--beta", "0.5", "--mu", "0.2", "--samples", "2000", "--trials", "5",
                       "--methods", "tensor,nj", "--seed", "1"});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 11);
}

TEST_CASE("simulate, build and diagnose round trip") {
    TempDir dir;
    REQUIRE(run({"simulate", "--d", "8", "--k", "2", "--n", "3", "--mu", "0.1", "--mu-hidden", "2", "--samples",
                 "20000", "--seed", "5", "--out", dir / "s.csv", "--model-out", dir / "m.txt", "--tree-out",
                 dir / "t.nwk"})
                .code == 0);
    const SampleSet s = read_samples_csv_file(dir / "s.csv");
    CHECK(s.m == 20000);
    CHECK(s.variables() == 8);
    const LatentTree truth = read_newick_file(dir / "t.nwk");

    const Run built = run({"build", "--input", dir / "s.csv", "--method", "tensor", "--seed", "2"});
    CHECK(built.code == 0);
    const LatentTree tree = from_newick(built.out);
    CHECK(tree.leaf_count() == 8);

    REQUIRE(run({"build", "--input", dir / "s.csv", "--method", "nj", "--out", dir / "nj.nwk"}).code == 0);
    CHECK_NOTHROW(read_newick_file(dir / "nj.nwk").validate());
    CHECK(fs::exists(dir / "nj.nwk.manifest.json"));
    CHECK(run({"build", "--input", dir / "s.csv", "--method", "spectral@2", "--shuffle"}).code == 0);
    CHECK(run({"build", "--input", dir / "s.csv", "--method", "oracle"}).code == 2);
    CHECK(run({"build", "--input", dir / "s.csv", "--policy", "sideways"}).code == 2);

    const Run diag = run({"diagnose", "--model", dir / "m.txt", "--out", dir / "d.csv"});
    CHECK(diag.code == 0);
    CHECK(diag.out.find("theta_min") != std::string::npos);
    CHECK(count_lines(slurp(dir / "d.csv")) == 4);
    CHECK(robinson_foulds(truth, read_model_file(dir / "m.txt").tree()) == 0);
}

TEST_CASE("data errors exit with code 3") {
    TempDir dir;
    {
        std::ofstream f(dir / "three.csv");
        f << "a,b,c\n1,2,1\n2,1,1\n";
    }
    CHECK(run({"build", "--input", dir / "three.csv"}).code == 3);
    CHECK(run({"build", "--input", dir / "missing.csv"}).code == 3);
    {
        std::ofstream f(dir / "bad.csv");
        f << "a,b,c,d\n1,2,1,x\n";
    }
    const Run bad = run({"build", "--input", dir / "bad.csv"});
    CHECK(bad.code == 3);
    CHECK(bad.err.find("line 2") != std::string::npos);
    CHECK(run({"diagnose", "--model", dir / "missing.txt"}).code == 3);
}

TEST_CASE("diagnose reports delta 0 for independent hidden nodes and flags deterministic coupling") {
    TempDir dir;
    Rng rng(81);
    const QuartetModel q = make_quartet_model({3, 3, 3, 0.3, 0.0}, rng);
    write_model_file(dir / "indep.txt", q.model);
    const Run a = run({"diagnose", "--model", dir / "indep.txt"});
    CHECK(a.code == 0);
    CHECK(a.out.find("delta              0\n") != std::string::npos);
    CHECK(a.out.find("a4_ok              yes") != std::string::npos);

    Matrix p_hg = Matrix::Zero(3, 3);
    p_hg(0, 2) = 0.2;
    p_hg(1, 0) = 0.3;
    p_hg(2, 1) = 0.5;
    const Matrix id = Matrix::Identity(3, 3);
    write_model_file(dir / "det.txt", lt::single_edge_model(Pairing::P12_34, p_hg, {id, id, id, id}));
    const Run b = run({"diagnose", "--model", dir / "det.txt"});
    CHECK(b.code == 0);
    CHECK(b.out.find("a4_ok              no") != std::string::npos);
}

TEST_CASE("LTREE_SEED sets the default seed") {
    ::setenv("LTREE_SEED", "42", 1);
    CHECK(default_seed() == 42);
    const Run a = run({"quartet-bench", "--samples", "60", "--trials", "3"});
    const Run b = run({"quartet-bench", "--samples", "60", "--trials", "3", "--seed", "42"});
    CHECK(a.out == b.out);
    ::setenv("LTREE_SEED", "nope", 1);
    CHECK(run({"quartet-bench", "--samples", "60", "--trials", "3"}).code == 2);
    ::unsetenv("LTREE_SEED");
    CHECK(default_seed() == 1);
}
