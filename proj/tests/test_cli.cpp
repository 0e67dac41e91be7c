#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dcmm/cli.hpp"
#include "dcmm/io.hpp"
#include "dcmm/model.hpp"
#include "test_support.hpp"

using namespace dcmm;
namespace fs = std::filesystem;

namespace {

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  int rc = dispatch(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::vector<fs::path> dir_entries(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path());
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("estimate happy path writes all artifacts") {
  test::TempDir tmp("estimate");
  DcmmParams params = test::random_valid_params(120, 2, 3, 0.2, 0.5, 0.9);
  AdjacencyMatrix x = sample_adjacency(build_h(params), 7);
  fs::path graph = tmp.path() / "graph.csv";
  write_adjacency_csv(x, graph);
  fs::path out = tmp.path() / "results";
  std::string text;
  int rc = run({"estimate", "--input", graph.string(), "--k", "2", "--out",
                out.string()},
               &text);
  REQUIRE(rc == 0);
  for (const char* f : {"p_hat.csv", "theta_hat.csv", "pi_hat.csv",
                        "params_hat.txt", "diagnostics.csv", "manifest.txt"}) {
    CHECK(fs::exists(out / f));
  }
  // p_hat.csv is a single flattened row-major line with k*k values
  std::string p_line = test::read_file(out / "p_hat.csv");
  CHECK(std::count(p_line.begin(), p_line.end(), ',') == 3);
  CHECK(std::count(p_line.begin(), p_line.end(), '\n') == 1);
}

TEST_CASE("estimate with k=0 is a usage error and writes nothing") {
  test::TempDir tmp("usage");
  fs::path out = tmp.path() / "results";
  std::string err;
  int rc = run({"estimate", "--input", "nope.csv", "--k", "0", "--out",
                out.string()},
               nullptr, &err);
  CHECK(rc == kExitUsage);
  CHECK_FALSE(fs::exists(out));
  CHECK(err.find("usage error") != std::string::npos);
}

TEST_CASE("failed runs leave no partial outputs") {
  test::TempDir tmp("partial");
  fs::path bad = tmp.path() / "bad.csv";
  write_text(bad, "0,1\n1\n");  // ragged
  fs::path out = tmp.path() / "results";
  std::string err;
  int rc = run({"estimate", "--input", bad.string(), "--k", "2", "--out",
                out.string()},
               nullptr, &err);
  CHECK(rc == kExitValidation);
  CHECK(dir_entries(out).empty());
  CHECK(dir_entries(tmp.path()).size() == 1);  // only bad.csv, no temp leftovers
}

TEST_CASE("pipeline failures exit with code 2 and a stage tag") {
  test::TempDir tmp("stagefail");
  // an empty graph fails in degree_matrix
  fs::path graph = tmp.path() / "zero.csv";
  write_text(graph, "0,0\n0,0\n");
  fs::path out = tmp.path() / "results";
  std::string err;
  int rc = run({"estimate", "--input", graph.string(), "--k", "2", "--out",
                out.string()},
               nullptr, &err);
  CHECK(rc == kExitPipeline);
  CHECK(err.find("degree_matrix") != std::string::npos);
  CHECK(dir_entries(out).empty());
}

TEST_CASE("generate then sample round-trips through the params document") {
  test::TempDir tmp("gen");
  fs::path gen_out = tmp.path() / "model";
  REQUIRE(run({"generate", "--n", "100", "--seed", "8", "--out",
               gen_out.string()}) == 0);
  DcmmParams params = read_params(gen_out / "params.txt");
  CHECK(params.n == 100);
  CHECK(params.k == 2);

  fs::path smp_out = tmp.path() / "graph";
  REQUIRE(run({"sample", "--params", (gen_out / "params.txt").string(),
               "--seed", "9", "--out", smp_out.string()}) == 0);
  AdjacencyMatrix x = read_adjacency_csv(smp_out / "graph.csv");
  CHECK(x.n() == 100);
}

TEST_CASE("params document round trip preserves values") {
  test::TempDir tmp("params");
  DcmmParams params = test::random_valid_params(30, 3, 5);
  fs::path p = tmp.path() / "params.txt";
  write_params(params, p);
  DcmmParams back = read_params(p);
  CHECK((back.theta - params.theta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.pi - params.pi).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.p - params.p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("edge list reader applies symmetric closure; strict mode errors") {
  test::TempDir tmp("edges");
  fs::path e = tmp.path() / "g.txt";
  write_text(e, "0 1\n2 2\n");
  AdjacencyMatrix x = read_edge_list(e, 3, false);
  CHECK(x.x(0, 1) == 1.0);
  CHECK(x.x(1, 0) == 1.0);
  CHECK(x.x(2, 2) == 1.0);
  CHECK_THROWS_AS(read_edge_list(e, 3, true), DcmmError);
  // a both-orientation listing passes strict mode
  fs::path e2 = tmp.path() / "g2.txt";
  write_text(e2, "0 1\n1 0\n2 2\n");
  AdjacencyMatrix x2 = read_edge_list(e2, 3, true);
  CHECK((x2.x - x.x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("edge list writer output passes the strict reader") {
  test::TempDir tmp("edgerw");
  DcmmParams params = test::random_valid_params(20, 2, 6);
  AdjacencyMatrix x = sample_adjacency(build_h(params), 3);
  fs::path e = tmp.path() / "g.txt";
  write_edge_list(x, e);
  AdjacencyMatrix back = read_edge_list(e, 20, true);
  CHECK((back.x - x.x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("experiment-p determinism: identical bytes across runs") {
  test::TempDir tmp("exp1");
  fs::path cfg = tmp.path() / "e1.cfg";
  write_text(cfg,
             "n_list = [200, 300]\n"
             "replicates = 3\n"
             "k = 2\n"
             "p = [[1.0, 0.5], [0.5, 1.0]]\n"
             "vertex_hunter = svs\n");
  fs::path out_a = tmp.path() / "a";
  fs::path out_b = tmp.path() / "b";
  REQUIRE(run({"experiment-p", "--config", cfg.string(), "--seed", "7", "--out",
               out_a.string()}) == 0);
  REQUIRE(run({"experiment-p", "--config", cfg.string(), "--seed", "7",
               "--threads", "2", "--out", out_b.string()}) == 0);
  for (const char* f :
       {"experiment1.csv", "experiment1_summary.csv", "fits.csv"}) {
    CHECK(test::read_file(out_a / f) == test::read_file(out_b / f));
    CHECK_FALSE(test::read_file(out_a / f).empty());
  }
}

TEST_CASE("experiment-theta writes per-n files and fit rows") {
  test::TempDir tmp("exp2");
  fs::path cfg = tmp.path() / "e2.cfg";
  write_text(cfg,
             "n_list = [200]\n"
             "replicates = 4\n"
             "k = 2\n");
  fs::path out = tmp.path() / "r";
  REQUIRE(run({"experiment-theta", "--config", cfg.string(), "--n", "200",
               "--seed", "9", "--out", out.string()}) == 0);
  CHECK(fs::exists(out / "experiment2_n200.csv"));
  std::string fits = test::read_file(out / "fits.csv");
  CHECK(fits.find("experiment2_n200,all,") != std::string::npos);
  CHECK(fits.find("experiment2_n200,high_degree,") != std::string::npos);
}

TEST_CASE("lowerbound-verify emits the documented csv schema") {
  test::TempDir tmp("lb");
  fs::path out = tmp.path() / "r";
  REQUIRE(run({"lowerbound-verify", "--construction", "p", "--n-list",
               "300,600", "--out", out.string()}) == 0);
  std::string csv = test::read_file(out / "lowerbound.csv");
  CHECK(csv.find("n,construction,gap,gap_scaled,kl,c0,c12_or_c13_or_c14,"
                 "assumptions_ok") == 0);
  CHECK(csv.find("300,p,") != std::string::npos);
  CHECK(csv.find("600,p,") != std::string::npos);
}

TEST_CASE("unknown flags are usage errors") {
  std::string err;
  CHECK(run({"estimate", "--nope"}, nullptr, &err) == kExitUsage);
  CHECK(run({"unknown-subcommand"}, nullptr, &err) == kExitUsage);
}

TEST_SUITE_END();
