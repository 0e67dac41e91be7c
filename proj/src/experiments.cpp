#include "dcmm/experiments.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "dcmm/rng.hpp"

namespace dcmm {
namespace {

// stream tags for derive_seed(master, n, replicate, tag)
constexpr uint64_t kTagParams = 1;
constexpr uint64_t kTagAdjacency = 2;
constexpr uint64_t kTagKMeans = 3;
constexpr uint64_t kTagFixedParams = 10;

double pairwise_sum(const double* v, std::size_t len) {
  if (len == 0) return 0.0;
  if (len <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += v[i];
    return s;
  }
  std::size_t half = len / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, len - half);
}

Eigen::MatrixXd default_p_matrix(int k) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(k, k, 0.5);
  p.diagonal().setConstant(1.0);
  return p;
}

void check_config(const ExperimentConfig& cfg) {
  if (cfg.n_list.empty()) {
    throw DcmmError(ErrorCode::kInvalidArgument, "n_list empty");
  }
  for (std::size_t i = 1; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] <= cfg.n_list[i - 1]) {
      throw DcmmError(ErrorCode::kInvalidArgument,
                      "n_list must be strictly increasing");
    }
  }
  if (cfg.replicates < 1) {
    throw DcmmError(ErrorCode::kInvalidArgument, "replicates must be >= 1");
  }
  if (cfg.k != 2) {
    throw DcmmError(ErrorCode::kInvalidArgument,
                    "the simulation recipe is defined for k = 2");
  }
  if (cfg.threads < 1) {
    throw DcmmError(ErrorCode::kInvalidArgument, "threads must be >= 1");
  }
}

PipelineConfig pipeline_config(const ExperimentConfig& cfg, uint64_t km_seed) {
  PipelineConfig pc;
  pc.hunter = cfg.hunter;
  pc.phi = cfg.phi;
  pc.l = cfg.l;
  pc.seed = km_seed;
  return pc;
}

// Runs `jobs` items on cfg.threads threads, strided by index so the result
// layout is independent of scheduling.
void run_strided(int threads, std::size_t jobs,
                 const std::function<void(std::size_t)>& body) {
  if (threads <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) body(j);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t j = t; j < jobs; j += threads) body(j);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

double pairwise_mean(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return pairwise_sum(values.data(), values.size()) / values.size();
}

RateFit fit_loglog_slope(const std::vector<double>& xs,
                         const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DcmmError(ErrorCode::kInvalidArgument,
                    "need matching xs/ys with at least 2 points");
  }
  RateFit fit;
  fit.points.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(ys[i])) {
      throw DcmmError(ErrorCode::kNonPositiveInput,
                      "log fit needs strictly positive finite inputs",
                      static_cast<long>(i));
    }
    fit.points.emplace_back(std::log(xs[i]), std::log(ys[i]));
  }
  const double m = static_cast<double>(fit.points.size());
  double mx = 0.0, my = 0.0;
  for (auto& [x, y] : fit.points) {
    mx += x;
    my += y;
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (auto& [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx <= 0.0) {
    throw DcmmError(ErrorCode::kDegenerateX, "all xs equal");
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = syy - fit.slope * sxy;
  fit.r_squared = (syy > 0.0) ? 1.0 - sse / syy : 1.0;
  return fit;
}

ExperimentPResult run_experiment_p(const ExperimentConfig& cfg) {
  check_config(cfg);
  Eigen::MatrixXd p_true =
      cfg.p_matrix.size() ? cfg.p_matrix : default_p_matrix(cfg.k);

  const int reps = cfg.replicates;
  const std::size_t jobs = cfg.n_list.size() * reps;
  ExperimentPResult res;
  res.rows.resize(jobs);

  run_strided(cfg.threads, jobs, [&](std::size_t j) {
    const int n = cfg.n_list[j / reps];
    const int rep = static_cast<int>(j % reps);
    auto& row = res.rows[j];
    row.n = n;
    row.replicate = rep;
    try {
      auto [theta, pi] = generate_experiment_pair(
          n, derive_seed(cfg.master_seed, n, rep, kTagParams));
      DcmmParams truth = DcmmParams::checked(theta, pi, p_true);
      Eigen::MatrixXd h = build_h(truth);
      AdjacencyMatrix x =
          sample_adjacency(h, derive_seed(cfg.master_seed, n, rep, kTagAdjacency));
      EstimationResult est = estimate_all(
          x, cfg.k,
          pipeline_config(cfg, derive_seed(cfg.master_seed, n, rep, kTagKMeans)));
      auto [aligned, rep_al] = align_permutation(est, truth);
      row.err_p12 = std::abs(aligned.p_hat(0, 1) - truth.p(0, 1));
      row.failed = false;
    } catch (const std::exception&) {
      row.err_p12 = std::numeric_limits<double>::quiet_NaN();
      row.failed = true;
    }
  });

  std::vector<double> ns, means;
  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    std::vector<double> ok_errs;
    int failed = 0;
    for (int rep = 0; rep < reps; ++rep) {
      const auto& row = res.rows[ni * reps + rep];
      if (row.failed) {
        ++failed;
      } else {
        ok_errs.push_back(row.err_p12);
      }
    }
    ExperimentPResult::Summary s;
    s.n = cfg.n_list[ni];
    s.n_failed = failed;
    s.mean_err = pairwise_mean(ok_errs);
    if (ok_errs.size() > 1) {
      double var = 0.0;
      for (double e : ok_errs) var += (e - s.mean_err) * (e - s.mean_err);
      var /= (ok_errs.size() - 1);
      s.se = std::sqrt(var / ok_errs.size());
    }
    res.summary.push_back(s);
    ns.push_back(s.n);
    means.push_back(s.mean_err);
  }
  res.fit = fit_loglog_slope(ns, means);
  return res;
}

ExperimentThetaResult run_experiment_theta(const ExperimentConfig& cfg, int n) {
  check_config(cfg);
  Eigen::MatrixXd p_true =
      cfg.p_matrix.size() ? cfg.p_matrix : default_p_matrix(cfg.k);

  // one fixed parameter set for the whole experiment
  auto [theta, pi] = generate_experiment_pair(
      n, derive_seed(cfg.master_seed, n, 0, kTagFixedParams));
  DcmmParams truth = DcmmParams::checked(theta, pi, p_true);
  Eigen::MatrixXd h = build_h(truth);
  const double theta_bar = truth.theta.mean();

  const int reps = cfg.replicates;
  std::vector<Eigen::VectorXd> abs_err(reps);
  std::vector<char> failed(reps, 0);
  run_strided(cfg.threads, reps, [&](std::size_t rep) {
    try {
      AdjacencyMatrix x = sample_adjacency(
          h, derive_seed(cfg.master_seed, n, rep, kTagAdjacency));
      EstimationResult est = estimate_all(
          x, cfg.k,
          pipeline_config(cfg, derive_seed(cfg.master_seed, n, rep, kTagKMeans)));
      auto [aligned, rep_al] = align_permutation(est, truth);
      abs_err[rep] = (aligned.theta_hat - truth.theta).cwiseAbs();
    } catch (const std::exception&) {
      failed[rep] = 1;
    }
  });

  ExperimentThetaResult res;
  res.n = n;
  for (int rep = 0; rep < reps; ++rep) res.n_failed += failed[rep];
  if (res.n_failed == reps) {
    throw DcmmError(ErrorCode::kInvalidArgument, "every replicate failed");
  }

  std::vector<double> th_all, err_all, th_high, err_high;
  for (int i = 0; i < n; ++i) {
    std::vector<double> errs;
    for (int rep = 0; rep < reps; ++rep) {
      if (!failed[rep]) errs.push_back(abs_err[rep](i));
    }
    ExperimentThetaResult::NodeRow row;
    row.node = i;
    row.theta_true = truth.theta(i);
    row.theta_bar = theta_bar;
    row.mean_abs_err = pairwise_mean(errs);
    row.is_high_degree = truth.theta(i) > theta_bar;
    res.rows.push_back(row);
    th_all.push_back(row.theta_true);
    err_all.push_back(row.mean_abs_err);
    if (row.is_high_degree) {
      th_high.push_back(row.theta_true);
      err_high.push_back(row.mean_abs_err);
    }
  }
  res.fit_all = fit_loglog_slope(th_all, err_all);
  res.fit_high = fit_loglog_slope(th_high, err_high);
  return res;
}

}  // namespace dcmm
