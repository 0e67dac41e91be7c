#include "dcmm/estimation.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace dcmm {
namespace {

constexpr double kConditionLimit = 1e8;
constexpr int kMaxAlignK = 8;

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const DcmmError& e) {
    throw PipelineError(name, e);
  }
}

Eigen::MatrixXd lifted_q(const Eigen::MatrixXd& vertices) {
  const int k = static_cast<int>(vertices.rows());
  Eigen::MatrixXd q(k, k);
  q.col(0).setOnes();
  q.rightCols(k - 1) = vertices;
  return q;
}

}  // namespace

Eigen::VectorXd compute_b1(const Eigen::VectorXd& lambda,
                           const Eigen::MatrixXd& vertices) {
  const int k = static_cast<int>(lambda.size());
  if (vertices.rows() != k || vertices.cols() != k - 1) {
    throw DcmmError(ErrorCode::kShapeMismatch, "vertices must be k x (k-1)");
  }
  Eigen::VectorXd minor = lambda.tail(k - 1);
  Eigen::VectorXd b1(k);
  for (int a = 0; a < k; ++a) {
    double quad = lambda(0) +
                  vertices.row(a) * minor.asDiagonal() * vertices.row(a).transpose();
    if (!(quad > 0.0)) {
      throw DcmmError(ErrorCode::kNegativeUnderRoot,
                      "lambda_1 + v^T Lambda v not positive", a);
    }
    b1(a) = 1.0 / std::sqrt(quad);
  }
  return b1;
}

Eigen::MatrixXd estimate_memberships(const Eigen::MatrixXd& rows,
                                     const Eigen::MatrixXd& vertices,
                                     const Eigen::VectorXd& b1,
                                     std::vector<int>* clipped) {
  const int n = static_cast<int>(rows.rows());
  const int k = static_cast<int>(vertices.rows());
  if (rows.cols() != k - 1 || b1.size() != k) {
    throw DcmmError(ErrorCode::kShapeMismatch, "rows/vertices/b1 inconsistent");
  }
  Eigen::MatrixXd q = lifted_q(vertices);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
  double cond = svd.singularValues().maxCoeff() / svd.singularValues().minCoeff();
  if (!(cond < kConditionLimit)) {
    throw DcmmError(ErrorCode::kSingularVertexMatrix,
                    "lifted vertices are nearly dependent");
  }
  // Row i solves q^T w = [1, r_i]^T.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(q.transpose());
  Eigen::MatrixXd pi_hat(n, k);
  if (clipped) clipped->clear();
  Eigen::VectorXd rhs(k);
  for (int i = 0; i < n; ++i) {
    rhs(0) = 1.0;
    rhs.tail(k - 1) = rows.row(i).transpose();
    Eigen::VectorXd w = lu.solve(rhs);
    Eigen::VectorXd star = (w.array() / b1.array()).max(0.0);
    double s = star.sum();
    if (s > 0.0) {
      pi_hat.row(i) = star.transpose() / s;
    } else {
      pi_hat.row(i).setConstant(1.0 / k);
      if (clipped) clipped->push_back(i);
    }
  }
  return pi_hat;
}

Eigen::MatrixXd estimate_p(const Eigen::VectorXd& b1, const Eigen::MatrixXd& q,
                           const Eigen::VectorXd& lambda) {
  const int k = static_cast<int>(b1.size());
  if (q.rows() != k || q.cols() != k || lambda.size() != k) {
    throw DcmmError(ErrorCode::kShapeMismatch, "b1/q/lambda inconsistent");
  }
  Eigen::MatrixXd core = q * lambda.asDiagonal() * q.transpose();
  Eigen::MatrixXd p = b1.asDiagonal() * core * b1.asDiagonal();
  return 0.5 * (p + p.transpose());
}

Eigen::VectorXd estimate_theta(const Eigen::VectorXd& xi1,
                               const Eigen::VectorXd& dhat,
                               const Eigen::MatrixXd& pi_hat,
                               const Eigen::VectorXd& b1) {
  const int n = static_cast<int>(xi1.size());
  if (dhat.size() != n || pi_hat.rows() != n || pi_hat.cols() != b1.size()) {
    throw DcmmError(ErrorCode::kShapeMismatch, "theta inputs inconsistent");
  }
  Eigen::VectorXd denom = pi_hat * b1;
  Eigen::VectorXd theta(n);
  for (int i = 0; i < n; ++i) {
    if (!(denom(i) > 0.0)) {
      throw DcmmError(ErrorCode::kZeroDenominator, "pi_i^T b1 not positive", i);
    }
    theta(i) = xi1(i) * std::sqrt(dhat(i)) / denom(i);
  }
  return theta;
}

EstimationResult run_pipeline(const Eigen::MatrixXd& x, int k,
                              const PipelineConfig& config) {
  const int n = static_cast<int>(x.rows());
  if (k < 2) {
    throw DcmmError(ErrorCode::kInvalidArgument, "pipeline needs k >= 2");
  }
  if (k > n) {
    throw DcmmError(ErrorCode::kInvalidArgument, "k exceeds node count");
  }
  EstimationResult res;
  Eigen::VectorXd d = stage("degree_matrix", [&] { return degree_matrix(x); });
  Eigen::MatrixXd lap = stage("laplacian", [&] { return laplacian(x, d); });
  res.spec = stage("top_k_eigen", [&] { return top_k_eigen(lap, k); });
  res.spec.dhat = d;
  ScoreEmbedding emb =
      stage("score_embedding", [&] { return score_embedding(res.spec); });
  res.hunt = stage("vertex_hunting", [&] {
    if (config.hunter == VertexHunter::kSpa) {
      return spa_modified(emb.rows, k, config.phi);
    }
    int l = config.l.value_or(default_svs_centers(k, n));
    return svs(emb.rows, k, config.phi, l, config.seed);
  });
  res.b1_hat = stage("compute_b1",
                     [&] { return compute_b1(res.spec.lambda, res.hunt.vertices); });
  res.q_hat = lifted_q(res.hunt.vertices);
  res.pi_hat = stage("estimate_memberships", [&] {
    return estimate_memberships(emb.rows, res.hunt.vertices, res.b1_hat,
                                &res.clipped_rows);
  });
  res.p_hat = stage("estimate_p",
                    [&] { return estimate_p(res.b1_hat, res.q_hat, res.spec.lambda); });
  if (config.renormalize_diag) {
    Eigen::VectorXd dg = res.p_hat.diagonal().cwiseSqrt().cwiseInverse();
    res.p_hat = dg.asDiagonal() * res.p_hat * dg.asDiagonal();
  }
  res.theta_hat = stage("estimate_theta", [&] {
    return estimate_theta(res.spec.xi.col(0), res.spec.dhat, res.pi_hat,
                          res.b1_hat);
  });
  return res;
}

EstimationResult estimate_all(const AdjacencyMatrix& x, int k,
                              const PipelineConfig& config) {
  return run_pipeline(x.x, k, config);
}

std::pair<EstimationResult, AlignmentReport> align_permutation(
    const EstimationResult& est, const DcmmParams& truth) {
  const int k = truth.k;
  if (k > kMaxAlignK) {
    throw DcmmError(ErrorCode::kKTooLarge, "alignment limited to k <= 8");
  }
  if (est.p_hat.rows() != k || est.pi_hat.cols() != k ||
      est.pi_hat.rows() != truth.n) {
    throw DcmmError(ErrorCode::kShapeMismatch, "estimate/truth inconsistent");
  }
  std::vector<int> perm(k), best_perm;
  std::iota(perm.begin(), perm.end(), 0);
  double best_obj = std::numeric_limits<double>::infinity();
  do {
    double p_err = 0.0;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        double d = est.p_hat(perm[a], perm[b]) - truth.p(a, b);
        p_err += d * d;
      }
    }
    double pi_err = 0.0;
    for (int a = 0; a < k; ++a) {
      pi_err += (est.pi_hat.col(perm[a]) - truth.pi.col(a)).squaredNorm();
    }
    double obj = std::sqrt(p_err) + std::sqrt(pi_err);
    if (obj < best_obj) {
      best_obj = obj;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  EstimationResult aligned = est;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      aligned.p_hat(a, b) = est.p_hat(best_perm[a], best_perm[b]);
    }
    aligned.pi_hat.col(a) = est.pi_hat.col(best_perm[a]);
    aligned.b1_hat(a) = est.b1_hat(best_perm[a]);
    aligned.q_hat.row(a) = est.q_hat.row(best_perm[a]);
    if (!est.hunt.vertices.size()) continue;
    aligned.hunt.vertices.row(a) = est.hunt.vertices.row(best_perm[a]);
  }

  AlignmentReport rep;
  rep.perm = best_perm;
  rep.p_abs_err = (aligned.p_hat - truth.p).cwiseAbs();
  rep.p_max_err = rep.p_abs_err.maxCoeff();
  rep.theta_abs_err = (aligned.theta_hat - truth.theta).cwiseAbs();
  rep.theta_max_err = rep.theta_abs_err.maxCoeff();
  rep.pi_max_err = (aligned.pi_hat - truth.pi).cwiseAbs().maxCoeff();
  return {std::move(aligned), std::move(rep)};
}

}  // namespace dcmm
