#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dcmm/estimation.hpp"

namespace dcmm {

struct ExperimentConfig {
  std::vector<int> n_list;  // strictly increasing
  int replicates = 30;
  int k = 2;
  Eigen::MatrixXd p_matrix;  // defaults to 0.5 I + 0.5 11^T when empty
  VertexHunter hunter = VertexHunter::kSvs;
  std::optional<double> phi;
  std::optional<int> l;
  uint64_t master_seed = 42;
  int threads = 1;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (log x, log y)
};

// Closed-form OLS on (log xs, log ys). Inputs must be strictly positive with
// at least two distinct xs.
RateFit fit_loglog_slope(const std::vector<double>& xs,
                         const std::vector<double>& ys);

struct ExperimentPResult {
  struct Row {
    int n = 0;
    int replicate = 0;
    double err_p12 = 0.0;
    bool failed = false;
  };
  struct Summary {
    int n = 0;
    double mean_err = 0.0;
    double se = 0.0;
    int n_failed = 0;
  };
  std::vector<Row> rows;
  std::vector<Summary> summary;
  RateFit fit;
};

// Per n: fresh (theta, Pi) per replicate, one adjacency sample each, full
// estimation + alignment, mean |P_hat_12 - P_12| over successful replicates.
ExperimentPResult run_experiment_p(const ExperimentConfig& cfg);

struct ExperimentThetaResult {
  struct NodeRow {
    int node = 0;
    double theta_true = 0.0;
    double theta_bar = 0.0;
    double mean_abs_err = 0.0;
    bool is_high_degree = false;
  };
  std::vector<NodeRow> rows;
  RateFit fit_all;
  RateFit fit_high;  // nodes with theta_i > theta_bar
  int n = 0;
  int n_failed = 0;
};

// One fixed (theta, Pi, P) at the given n; `replicates` adjacency samples;
// per-node mean |theta_hat_i - theta_i| fitted against theta_i.
ExperimentThetaResult run_experiment_theta(const ExperimentConfig& cfg, int n);

// Mean via pairwise summation over the given index order. Replicate results
// are collected by index before aggregation, so execution order never affects
// the value.
double pairwise_mean(const std::vector<double>& values);

}  // namespace dcmm
