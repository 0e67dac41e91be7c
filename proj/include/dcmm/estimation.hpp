#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dcmm/model.hpp"
#include "dcmm/spectral.hpp"
#include "dcmm/vertex_hunting.hpp"

namespace dcmm {

enum class VertexHunter { kSpa, kSvs };

struct PipelineConfig {
  VertexHunter hunter = VertexHunter::kSvs;
  std::optional<double> phi;
  std::optional<int> l;
  uint64_t seed = 0;  // k-means stream for svs
  // Optional post-hoc rescale P <- Dg^{-1/2} P Dg^{-1/2}; off by default so
  // the raw estimator error stays measurable.
  bool renormalize_diag = false;
};

struct EstimationResult {
  Eigen::MatrixXd p_hat;        // k x k
  Eigen::VectorXd theta_hat;    // n
  Eigen::MatrixXd pi_hat;       // n x k, row-stochastic
  Eigen::VectorXd b1_hat;       // k
  Eigen::MatrixXd q_hat;        // k x k, first column ones, row k = [1, v_k^T]
  SpectralDecomposition spec;
  VertexHuntResult hunt;
  std::vector<int> clipped_rows;  // nodes whose raw weights all clipped to zero
};

struct AlignmentReport {
  std::vector<int> perm;          // perm[truth community] = estimated community
  Eigen::MatrixXd p_abs_err;      // |p_hat - p| after alignment
  Eigen::VectorXd theta_abs_err;  // per node
  double p_max_err = 0.0;
  double theta_max_err = 0.0;
  double pi_max_err = 0.0;
};

// b1(k) = (lambda_1 + v_k^T diag(lambda_2..lambda_K) v_k)^{-1/2}
Eigen::VectorXd compute_b1(const Eigen::VectorXd& lambda,
                           const Eigen::MatrixXd& vertices);

// Solves sum_k w(k) v_k = r_i, sum_k w(k) = 1 per row, then clips w(k)/b1(k)
// at zero and renormalizes. Rows that clip entirely to zero become uniform and
// are recorded in *clipped.
Eigen::MatrixXd estimate_memberships(const Eigen::MatrixXd& rows,
                                     const Eigen::MatrixXd& vertices,
                                     const Eigen::VectorXd& b1,
                                     std::vector<int>* clipped = nullptr);

// P = diag(b1) Q Lambda Q^T diag(b1)
Eigen::MatrixXd estimate_p(const Eigen::VectorXd& b1, const Eigen::MatrixXd& q,
                           const Eigen::VectorXd& lambda);

// theta_i = xi_1(i) sqrt(d_i) / (pi_i^T b1)
Eigen::VectorXd estimate_theta(const Eigen::VectorXd& xi1,
                               const Eigen::VectorXd& dhat,
                               const Eigen::MatrixXd& pi_hat,
                               const Eigen::VectorXd& b1);

// Full pipeline on any symmetric nonnegative matrix (an adjacency sample, or
// H itself for population runs). Errors are rethrown as PipelineError with the
// failing stage named.
EstimationResult run_pipeline(const Eigen::MatrixXd& x, int k,
                              const PipelineConfig& config = {});

EstimationResult estimate_all(const AdjacencyMatrix& x, int k,
                              const PipelineConfig& config = {});

// Brute-force search over all K! community relabelings, minimizing
// ||P_perm - P||_F + ||Pi_perm - Pi||_F. K <= 8.
std::pair<EstimationResult, AlignmentReport> align_permutation(
    const EstimationResult& est, const DcmmParams& truth);

}  // namespace dcmm
