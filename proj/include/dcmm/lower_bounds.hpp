#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dcmm/model.hpp"

namespace dcmm {

// Two-point construction: a null/alternative DCMM pair with a parameter gap
// and bounded KL divergence between the induced edge distributions.
struct LowerBoundPair {
  DcmmParams null_model;  // Q^mu
  DcmmParams alt_model;   // Q^alpha
  std::string construction;  // "p" | "theta-membership" | "theta-degree"
  double delta_y = 0.0;
  double gap = 0.0;  // |P^a_12 - P^m_12| or |theta^a_i - theta^m_i|
  double kl = 0.0;
  double c0 = 0.0;
  double c_main = 0.0;  // c12, c13 or c14
  double theta_bar = 0.0;
  double theta_distinguished = 0.0;  // theta_tilde (p) or theta_i (theta)
  double lambda_k_target = 0.0;      // free parameter of the Y factor (p only)
  double realized_lambda_k_null = 0.0;
  int distinguished_node = 0;  // 0-based
  std::vector<int> block_sizes;
};

struct PairReport {
  double gap = 0.0;
  double gap_scaled = 0.0;  // construction-specific, constant across n by design
  double kl = 0.0;
  bool assumptions_ok = false;  // pure-node + simplex + P validity, both models
  ValidationReport null_report;
  ValidationReport alt_report;
};

// Null model from the Helmert-type factor Y^mu (first column constant, column
// j carrying +-sqrt(c12 K lambda_K / (j(j-1)))), one distinguished pure node
// of degree theta_tilde, a mixed [3/4, 1/4] block and pure blocks of sizes
// 2kn/(K(K+1)); alternative perturbs row 1 of Y by Delta_Y = c0/sqrt(n
// theta_bar theta_tilde). The reported gap is |P^a_12 - P^m_12|.
LowerBoundPair build_p_pair(int n, int k, double c12, double c0,
                            double theta_tilde, double theta_bar,
                            double lambda_k_target = 0.5);

// Same Y-row perturbation with the c13 factor (no lambda_K) and
// Delta_Y = c0/sqrt(n theta_bar^2); node 2 carries theta_i and the reported
// gap is |theta^a_2 - theta^m_2|.
LowerBoundPair build_theta_pair_membership(int n, int k, double c13, double c0,
                                           double theta_i, double theta_bar);

// Identical Pi and P; only node 2's degree is perturbed to
// theta_i (1 + c14 sqrt(theta_i/theta_bar)).
LowerBoundPair build_theta_pair_degree(int n, int k, double c13, double c14,
                                       double theta_i, double theta_bar);

// Sum of Bernoulli KL terms over unordered pairs (diagonal included), with
// 0 log(0/m) = 0. Entries with h_alpha == h_mu contribute zero; differing
// entries require h_mu strictly inside (0, 1).
double kl_divergence(const Eigen::MatrixXd& h_alpha,
                     const Eigen::MatrixXd& h_mu);

PairReport verify_pair(const LowerBoundPair& pair);

}  // namespace dcmm
