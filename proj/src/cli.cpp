#include "dcmm/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "dcmm/estimation.hpp"
#include "dcmm/experiments.hpp"
#include "dcmm/io.hpp"
#include "dcmm/lower_bounds.hpp"
#include "dcmm/model.hpp"
#include "dcmm/rng.hpp"
#include "dcmm/svg.hpp"

namespace dcmm {
namespace {

constexpr uint64_t kDefaultSeed = 42;

std::string default_out_dir() {
  const char* env = std::getenv("DCMM_OUT_DIR");
  return env && *env ? env : ".";
}

VertexHunter parse_hunter(const std::string& word) {
  if (word == "spa") return VertexHunter::kSpa;
  if (word == "svs") return VertexHunter::kSvs;
  throw DcmmError(ErrorCode::kInvalidArgument,
                  "vertex_hunter must be spa or svs, got " + word);
}

void write_manifest(OutputStager& stager, const std::string& subcommand,
                    uint64_t seed,
                    const std::map<std::string, std::string>& config) {
  std::ofstream out(stager.stage("manifest.txt"));
  out << "version = " << kVersion << '\n';
  out << "subcommand = " << subcommand << '\n';
  out << "seed = " << seed << '\n';
  for (const auto& [k, v] : config) out << k << " = " << v << '\n';
}

ExperimentConfig load_experiment_config(const std::string& path,
                                        std::optional<uint64_t> seed_override,
                                        std::optional<int> threads_override) {
  KeyValueDoc doc = KeyValueDoc::parse_file(path);
  ExperimentConfig cfg;
  for (double v : doc.get_list("n_list")) {
    cfg.n_list.push_back(static_cast<int>(v));
  }
  cfg.replicates = static_cast<int>(doc.get_number_or("replicates", 30));
  cfg.k = static_cast<int>(doc.get_number_or("k", 2));
  if (doc.has("p")) cfg.p_matrix = doc.get_matrix("p");
  cfg.hunter = parse_hunter(doc.get_word_or("vertex_hunter", "svs"));
  if (doc.has("phi")) cfg.phi = doc.get_number("phi");
  if (doc.has("l")) cfg.l = static_cast<int>(doc.get_number("l"));
  cfg.master_seed =
      seed_override.value_or((uint64_t)doc.get_number_or("seed", kDefaultSeed));
  cfg.threads =
      threads_override.value_or((int)doc.get_number_or("threads", 1));
  return cfg;
}

std::map<std::string, std::string> echo_experiment_config(
    const ExperimentConfig& cfg) {
  std::map<std::string, std::string> echo;
  std::string ns;
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    ns += (i ? ", " : "") + std::to_string(cfg.n_list[i]);
  }
  echo["n_list"] = "[" + ns + "]";
  echo["replicates"] = std::to_string(cfg.replicates);
  echo["k"] = std::to_string(cfg.k);
  echo["vertex_hunter"] = cfg.hunter == VertexHunter::kSpa ? "spa" : "svs";
  if (cfg.phi) echo["phi"] = format_double(*cfg.phi);
  if (cfg.l) echo["l"] = std::to_string(*cfg.l);
  echo["threads"] = std::to_string(cfg.threads);
  return echo;
}

AdjacencyMatrix load_graph(const std::string& input, const std::string& format,
                           bool strict) {
  std::string fmt = format;
  if (fmt.empty()) {
    std::string ext = std::filesystem::path(input).extension().string();
    fmt = (ext == ".csv") ? "csv" : "edges";
  }
  if (fmt == "csv") return read_adjacency_csv(input);
  return read_edge_list(input, -1, strict);
}

// ---- subcommand bodies ----

int cmd_generate(int n, int k, uint64_t seed, const std::string& out_dir,
                 std::ostream& out) {
  if (k != 2) {
    throw DcmmError(ErrorCode::kInvalidArgument,
                    "the generation recipe is defined for k = 2");
  }
  auto [theta, pi] = generate_experiment_pair(n, seed);
  Eigen::MatrixXd p(2, 2);
  p << 1.0, 0.5, 0.5, 1.0;
  DcmmParams params = DcmmParams::checked(theta, pi, p);
  OutputStager stager(out_dir);
  write_params(params, stager.stage("params.txt"));
  write_manifest(stager, "generate", seed,
                 {{"n", std::to_string(n)}, {"k", std::to_string(k)}});
  stager.commit();
  out << "wrote params.txt (n=" << n << ", k=" << k << ")\n";
  return 0;
}

int cmd_sample(const std::string& params_path, const std::string& format,
               uint64_t seed, const std::string& out_dir, std::ostream& out) {
  DcmmParams params = read_params(params_path);
  Eigen::MatrixXd h = build_h(params);
  AdjacencyMatrix x = sample_adjacency(h, seed);
  OutputStager stager(out_dir);
  std::string filename = format == "edges" ? "edges.txt" : "graph.csv";
  if (format == "edges") {
    write_edge_list(x, stager.stage(filename));
  } else {
    write_adjacency_csv(x, stager.stage(filename));
  }
  write_manifest(stager, "sample", seed,
                 {{"params", params_path}, {"format", format}});
  stager.commit();
  out << "wrote " << filename << " (n=" << x.n() << ")\n";
  return 0;
}

int cmd_estimate(const std::string& input, int k, const std::string& format,
                 bool strict, const std::string& hunter,
                 std::optional<double> phi, std::optional<int> l,
                 uint64_t seed, const std::string& out_dir, std::ostream& out) {
  AdjacencyMatrix x = load_graph(input, format, strict);
  PipelineConfig pc;
  pc.hunter = parse_hunter(hunter);
  pc.phi = phi;
  pc.l = l;
  pc.seed = derive_seed(seed, 0, 0, 3);
  EstimationResult est = estimate_all(x, k, pc);

  OutputStager stager(out_dir);
  {
    std::ofstream f(stager.stage("p_hat.csv"));
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        f << format_double(est.p_hat(a, b))
          << ((a == k - 1 && b == k - 1) ? "\n" : ",");
      }
    }
  }
  {
    std::ofstream f(stager.stage("theta_hat.csv"));
    for (int i = 0; i < est.theta_hat.size(); ++i) {
      f << format_double(est.theta_hat(i)) << '\n';
    }
  }
  {
    std::ofstream f(stager.stage("pi_hat.csv"));
    for (int i = 0; i < est.pi_hat.rows(); ++i) {
      for (int a = 0; a < k; ++a) {
        f << format_double(est.pi_hat(i, a)) << (a == k - 1 ? "\n" : ",");
      }
    }
  }
  {
    std::ofstream f(stager.stage("diagnostics.csv"));
    for (int a = 0; a < k; ++a) {
      f << "lambda_" << (a + 1) << ',' << format_double(est.spec.lambda(a))
        << '\n';
    }
    f << "nu_n_hat," << format_double(est.spec.nu_n_hat) << '\n';
    f << "degenerate_gap," << (est.spec.degenerate_gap ? 1 : 0) << '\n';
    f << "phi," << format_double(est.hunt.phi) << '\n';
    f << "clipped_rows," << est.clipped_rows.size() << '\n';
  }
  // estimates as a params document; re-reading validates model invariants,
  // which an estimate without exact pure rows may legitimately fail
  DcmmParams est_params{x.n(), k, est.theta_hat, est.pi_hat, est.p_hat};
  write_params(est_params, stager.stage("params_hat.txt"));
  write_manifest(stager, "estimate", seed,
                 {{"input", input},
                  {"k", std::to_string(k)},
                  {"vertex_hunter", hunter}});
  stager.commit();
  out << "wrote p_hat.csv, theta_hat.csv, pi_hat.csv, params_hat.txt, "
         "diagnostics.csv\n";
  return 0;
}

int cmd_experiment_p(const ExperimentConfig& cfg, bool svg,
                     const std::string& out_dir, std::ostream& out) {
  ExperimentPResult res = run_experiment_p(cfg);
  OutputStager stager(out_dir);
  {
    std::ofstream f(stager.stage("experiment1.csv"));
    f << "n,replicate,err_p12,failed\n";
    for (const auto& r : res.rows) {
      f << r.n << ',' << r.replicate << ',' << format_double(r.err_p12) << ','
        << (r.failed ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream f(stager.stage("experiment1_summary.csv"));
    f << "n,mean_err,se,n_failed\n";
    for (const auto& s : res.summary) {
      f << s.n << ',' << format_double(s.mean_err) << ','
        << format_double(s.se) << ',' << s.n_failed << '\n';
    }
  }
  {
    std::ofstream f(stager.stage("fits.csv"));
    f << "experiment,subset,slope,intercept,r2\n";
    f << "experiment1,all," << format_double(res.fit.slope) << ','
      << format_double(res.fit.intercept) << ','
      << format_double(res.fit.r_squared) << '\n';
  }
  if (svg) {
    write_scatter_svg(stager.stage("experiment1.svg"), res.fit.points,
                      res.fit.slope, res.fit.intercept, "log n",
                      "log mean |P12 error|", "experiment 1");
  }
  write_manifest(stager, "experiment-p", cfg.master_seed,
                 echo_experiment_config(cfg));
  stager.commit();
  out << "experiment1 slope=" << format_double(res.fit.slope)
      << " r2=" << format_double(res.fit.r_squared) << '\n';
  return 0;
}

int cmd_experiment_theta(const ExperimentConfig& cfg, std::optional<int> n_arg,
                         bool svg, const std::string& out_dir,
                         std::ostream& out) {
  std::vector<int> ns =
      n_arg ? std::vector<int>{*n_arg} : cfg.n_list;
  OutputStager stager(out_dir);
  std::ofstream fits(stager.stage("fits.csv"));
  fits << "experiment,subset,slope,intercept,r2\n";
  for (int n : ns) {
    ExperimentThetaResult res = run_experiment_theta(cfg, n);
    std::string tag = "experiment2_n" + std::to_string(n);
    std::ofstream f(stager.stage(tag + ".csv"));
    f << "node,theta_true,theta_bar,mean_abs_err,is_high_degree\n";
    for (const auto& r : res.rows) {
      f << r.node << ',' << format_double(r.theta_true) << ','
        << format_double(r.theta_bar) << ',' << format_double(r.mean_abs_err)
        << ',' << (r.is_high_degree ? 1 : 0) << '\n';
    }
    fits << tag << ",all," << format_double(res.fit_all.slope) << ','
         << format_double(res.fit_all.intercept) << ','
         << format_double(res.fit_all.r_squared) << '\n';
    fits << tag << ",high_degree," << format_double(res.fit_high.slope) << ','
         << format_double(res.fit_high.intercept) << ','
         << format_double(res.fit_high.r_squared) << '\n';
    if (svg) {
      write_scatter_svg(stager.stage(tag + ".svg"), res.fit_all.points,
                        res.fit_all.slope, res.fit_all.intercept, "log theta",
                        "log mean |theta error|", tag);
    }
    out << tag << " all-slope=" << format_double(res.fit_all.slope)
        << " high-slope=" << format_double(res.fit_high.slope) << '\n';
  }
  fits.close();
  write_manifest(stager, "experiment-theta", cfg.master_seed,
                 echo_experiment_config(cfg));
  stager.commit();
  return 0;
}

int cmd_lowerbound(const std::string& construction, std::vector<int> n_list,
                   int k, double c12, double c13, double c14, double c0,
                   double theta_bar, double theta_dist, double lambda_k,
                   const std::string& out_dir, std::ostream& out) {
  if (n_list.empty()) n_list = {500, 1000, 2000};
  OutputStager stager(out_dir);
  std::ofstream f(stager.stage("lowerbound.csv"));
  f << "n,construction,gap,gap_scaled,kl,c0,c12_or_c13_or_c14,assumptions_ok\n";
  for (int n : n_list) {
    LowerBoundPair pair;
    if (construction == "p") {
      pair = build_p_pair(n, k, c12, c0, theta_dist, theta_bar, lambda_k);
    } else if (construction == "theta-membership") {
      pair = build_theta_pair_membership(n, k, c13, c0, theta_dist, theta_bar);
    } else if (construction == "theta-degree") {
      pair = build_theta_pair_degree(n, k, c13, c14, theta_dist, theta_bar);
    } else {
      throw DcmmError(ErrorCode::kInvalidArgument,
                      "unknown construction " + construction);
    }
    PairReport rep = verify_pair(pair);
    f << n << ',' << construction << ',' << format_double(rep.gap) << ','
      << format_double(rep.gap_scaled) << ',' << format_double(rep.kl) << ','
      << format_double(pair.c0) << ',' << format_double(pair.c_main) << ','
      << (rep.assumptions_ok ? 1 : 0) << '\n';
    out << "n=" << n << " gap=" << format_double(rep.gap)
        << " gap_scaled=" << format_double(rep.gap_scaled)
        << " kl=" << format_double(rep.kl)
        << " assumptions_ok=" << (rep.assumptions_ok ? 1 : 0) << '\n';
  }
  f.close();
  write_manifest(stager, "lowerbound-verify", kDefaultSeed,
                 {{"construction", construction}});
  stager.commit();
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"degree-corrected mixed-membership estimation toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string out_dir = default_out_dir();
  uint64_t seed = kDefaultSeed;
  bool seed_given = false;

  // generate
  auto* gen = app.add_subcommand("generate", "draw a model from the two-community recipe");
  int gen_n = 0, gen_k = 2;
  gen->add_option("--n", gen_n, "node count (multiple of 10)")->required();
  gen->add_option("--k", gen_k, "community count");
  gen->add_option("--seed", seed)->each([&](const std::string&) { seed_given = true; });
  gen->add_option("--out", out_dir, "output directory");

  // sample
  auto* smp = app.add_subcommand("sample", "sample an adjacency matrix from a params document");
  std::string smp_params, smp_format = "csv";
  smp->add_option("--params", smp_params, "params document")->required();
  smp->add_option("--format", smp_format)->check(CLI::IsMember({"csv", "edges"}));
  smp->add_option("--seed", seed);
  smp->add_option("--out", out_dir, "output directory");

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate P, Theta, Pi from a graph file");
  std::string est_input, est_format, est_hunter = "svs";
  int est_k = 0, est_l = -1;
  double est_phi = -1.0;
  bool est_strict = false;
  est->add_option("--input", est_input, "adjacency csv or edge list")->required();
  est->add_option("--k", est_k, "community count")->required()->check(CLI::PositiveNumber);
  est->add_option("--format", est_format)->check(CLI::IsMember({"csv", "edges"}));
  est->add_flag("--strict", est_strict, "error on asymmetric edge lists");
  est->add_option("--vertex-hunter", est_hunter)->check(CLI::IsMember({"spa", "svs"}));
  est->add_option("--phi", est_phi, "clustering radius override")
      ->check(CLI::PositiveNumber);
  est->add_option("--l", est_l, "svs center count override")
      ->check(CLI::PositiveNumber);
  est->add_option("--seed", seed);
  est->add_option("--out", out_dir, "output directory");

  // experiment-p
  auto* exp1 = app.add_subcommand("experiment-p", "convergence-rate experiment for P");
  std::string exp1_cfg;
  int exp1_threads = -1;
  bool exp1_svg = false;
  exp1->add_option("--config", exp1_cfg, "experiment config file")->required();
  exp1->add_option("--seed", seed)->each([&](const std::string&) { seed_given = true; });
  exp1->add_option("--threads", exp1_threads, "replicate-level thread cap");
  exp1->add_flag("--svg", exp1_svg, "emit a scatter+fit plot");
  exp1->add_option("--out", out_dir, "output directory");

  // experiment-theta
  auto* exp2 = app.add_subcommand("experiment-theta", "per-node degree error experiment");
  std::string exp2_cfg;
  int exp2_threads = -1, exp2_n = -1;
  bool exp2_svg = false;
  exp2->add_option("--config", exp2_cfg, "experiment config file")->required();
  exp2->add_option("--n", exp2_n, "single n (default: all of n_list)");
  exp2->add_option("--seed", seed)->each([&](const std::string&) { seed_given = true; });
  exp2->add_option("--threads", exp2_threads, "replicate-level thread cap");
  exp2->add_flag("--svg", exp2_svg, "emit scatter+fit plots");
  exp2->add_option("--out", out_dir, "output directory");

  // lowerbound-verify
  auto* lb = app.add_subcommand("lowerbound-verify", "materialize and check a two-point construction");
  std::string lb_construction = "p", lb_nlist;
  int lb_k = 2;
  double lb_c12 = 0.05, lb_c13 = 0.05, lb_c14 = 0.1, lb_c0 = 0.1;
  double lb_theta_bar = 0.4, lb_theta = 0.4, lb_lambda_k = 0.5;
  lb->add_option("--construction", lb_construction)
      ->check(CLI::IsMember({"p", "theta-membership", "theta-degree"}));
  lb->add_option("--n-list", lb_nlist, "comma-separated node counts");
  lb->add_option("--k", lb_k)->check(CLI::PositiveNumber);
  lb->add_option("--c12", lb_c12);
  lb->add_option("--c13", lb_c13);
  lb->add_option("--c14", lb_c14);
  lb->add_option("--c0", lb_c0);
  lb->add_option("--theta-bar", lb_theta_bar);
  lb->add_option("--theta", lb_theta, "distinguished node degree");
  lb->add_option("--lambda-k", lb_lambda_k, "target smallest eigenvalue (p pair)");
  lb->add_option("--out", out_dir, "output directory");

  std::vector<std::string> argv_copy = args;
  std::reverse(argv_copy.begin(), argv_copy.end());
  try {
    app.parse(argv_copy);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_n, gen_k, seed, out_dir, out);
    if (smp->parsed()) return cmd_sample(smp_params, smp_format, seed, out_dir, out);
    if (est->parsed()) {
      return cmd_estimate(est_input, est_k, est_format, est_strict, est_hunter,
                          est_phi > 0 ? std::optional<double>(est_phi) : std::nullopt,
                          est_l > 0 ? std::optional<int>(est_l) : std::nullopt,
                          seed, out_dir, out);
    }
    if (exp1->parsed()) {
      ExperimentConfig cfg = load_experiment_config(
          exp1_cfg, seed_given ? std::optional<uint64_t>(seed) : std::nullopt,
          exp1_threads > 0 ? std::optional<int>(exp1_threads) : std::nullopt);
      return cmd_experiment_p(cfg, exp1_svg, out_dir, out);
    }
    if (exp2->parsed()) {
      ExperimentConfig cfg = load_experiment_config(
          exp2_cfg, seed_given ? std::optional<uint64_t>(seed) : std::nullopt,
          exp2_threads > 0 ? std::optional<int>(exp2_threads) : std::nullopt);
      return cmd_experiment_theta(
          cfg, exp2_n > 0 ? std::optional<int>(exp2_n) : std::nullopt, exp2_svg,
          out_dir, out);
    }
    if (lb->parsed()) {
      std::vector<int> ns;
      if (!lb_nlist.empty()) {
        std::istringstream ss(lb_nlist);
        std::string tok;
        while (std::getline(ss, tok, ',')) ns.push_back(std::stoi(tok));
      }
      return cmd_lowerbound(lb_construction, ns, lb_k, lb_c12, lb_c13, lb_c14,
                            lb_c0, lb_theta_bar, lb_theta, lb_lambda_k, out_dir,
                            out);
    }
  } catch (const PipelineError& e) {
    err << "pipeline error: " << e.what() << '\n';
    return kExitPipeline;
  } catch (const DcmmError& e) {
    switch (e.code()) {
      case ErrorCode::kIoError:
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kShapeMismatch:
      case ErrorCode::kIndivisibleN:
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
      default:
        err << "pipeline error: " << e.what() << '\n';
        return kExitPipeline;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
  return 0;
}

}  // namespace dcmm
