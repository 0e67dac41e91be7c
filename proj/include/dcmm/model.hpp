#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "dcmm/errors.hpp"

namespace dcmm {

// Ground-truth model (theta, Pi, P). Edge probabilities are
// H = Theta * Pi * P * Pi^T * Theta with Theta = diag(theta).
struct DcmmParams {
  int n = 0;
  int k = 0;
  Eigen::VectorXd theta;  // length n, positive
  Eigen::MatrixXd pi;     // n x k, rows on the simplex
  Eigen::MatrixXd p;      // k x k, symmetric, unit diagonal, nonsingular

  // Validates all invariants (row sums, symmetry, unit diagonal snapped from
  // within 1e-12, nonsingularity, H range, pure node per community) and throws
  // DcmmError on the first violation.
  static DcmmParams checked(Eigen::VectorXd theta, Eigen::MatrixXd pi,
                            Eigen::MatrixXd p);
};

// Symmetric 0/1 observed graph; self-loops allowed on the diagonal.
struct AdjacencyMatrix {
  Eigen::MatrixXd x;

  int n() const { return static_cast<int>(x.rows()); }
  static AdjacencyMatrix from_matrix(Eigen::MatrixXd m);
};

// Per-assumption check results. Asymptotic clauses are reported as ratios
// only; boolean flags cover the finitely checkable clauses.
struct ValidationReport {
  bool pure_node_ok = false;
  std::vector<int> missing_pure_communities;  // 0-based
  bool theta_positive_ok = false;
  std::vector<int> nonpositive_theta;
  bool pi_rows_ok = false;
  std::vector<int> bad_pi_rows;
  bool p_symmetric_ok = false;
  bool p_unit_diag_ok = false;
  bool p_nonsingular_ok = false;
  bool h_in_range_ok = false;

  double p_max_entry = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double theta_lower_ratio = 0.0;  // min theta_i / sqrt(log n / n)
  double g_norm = 0.0, g_inv_norm = 0.0;
  double f_norm = 0.0, f_inv_norm = 0.0;
  double lambda_k_noise_ratio = 0.0;  // lambda_K / sqrt(log n / (n theta_bar^2))
  double min_eigengap_ratio = 0.0;    // min_k min_{l!=k} |l_k - l_l| / |l_k|
  std::vector<double> lambda;         // top-k eigenvalues of L0, |.| descending
  double nu_n = 0.0;                  // min{K^{-1/2} lambda_1, lambda_K}

  bool ok() const {
    return pure_node_ok && theta_positive_ok && pi_rows_ok && p_symmetric_ok &&
           p_unit_diag_ok && p_nonsingular_ok && h_in_range_ok;
  }
};

// H = Theta Pi P Pi^T Theta. Throws EntryOutOfRange if any entry leaves
// [0, 1] by more than 1e-12.
Eigen::MatrixXd build_h(const DcmmParams& params);

// Bernoulli sample of the upper triangle (diagonal included), mirrored.
AdjacencyMatrix sample_adjacency(const Eigen::MatrixXd& h, uint64_t seed);

ValidationReport validate_params(const DcmmParams& params);

// Recovers the unique (Theta, Pi, P) with Z Z^T = Theta Pi P Pi^T Theta from
// the factor pair Z = Theta' Pi' Y, P = Y Y^T. Rows of Z must lie in the cone
// spanned by the rows of Y.
DcmmParams reparameterize(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y);

// Degree/membership draw for the two-community simulation recipe: theta_i iid
// U[0.05, 0.8]; 10% pure rows per community, the rest [t, 1-t] with t iid
// U[0.15, 0.85]. Requires n divisible by 10.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> generate_experiment_pair(
    int n, uint64_t seed);

}  // namespace dcmm
