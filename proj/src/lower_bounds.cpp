#include "dcmm/lower_bounds.hpp"

#include <cmath>

#include "dcmm/spectral.hpp"

namespace dcmm {
namespace {

// Helmert-type factor: first column sqrt(1 - (K-1) gamma), column j >= 2
// carries sqrt(K gamma / (j(j-1))) above the diagonal and -(j-1) times that on
// it. Rows have exact unit norm, so Y Y^T has unit diagonal.
Eigen::MatrixXd build_y(int k, double gamma) {
  if (!(gamma > 0.0) || (k - 1) * gamma >= 1.0) {
    throw DcmmError(ErrorCode::kInvalidArgument,
                    "need 0 < (k-1)*gamma < 1 in the Y factor");
  }
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(k, k);
  y.col(0).setConstant(std::sqrt(1.0 - (k - 1) * gamma));
  for (int j = 2; j <= k; ++j) {
    double s = std::sqrt(k * gamma / (j * (j - 1.0)));
    for (int r = 0; r < j - 1; ++r) y(r, j - 1) = s;
    y(j - 1, j - 1) = -(j - 1.0) * s;
  }
  return y;
}

// Membership rows: node 0 pure in community 1, a mixed [3/4, 1/4] block
// filling the rest of the first 2n/(K(K+1)) rows, then pure blocks of target
// size 2kn/(K(K+1)); sizes rounded to nearest with the remainder on the last
// community.
Eigen::MatrixXd membership_block(int n, int k, std::vector<int>* sizes) {
  double denom = k * (k + 1.0);
  sizes->clear();
  int used = 0;
  for (int c = 1; c <= k; ++c) {
    int b = (c == k) ? n - used
                     : static_cast<int>(std::lround(2.0 * c * n / denom));
    if (b < 1) {
      throw DcmmError(ErrorCode::kBlockSizeMismatch,
                      "block size rounded below 1 (n too small for k)", c - 1);
    }
    sizes->push_back(b);
    used += b;
  }
  if (used != n) {
    throw DcmmError(ErrorCode::kBlockSizeMismatch, "block sizes do not sum to n");
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, k);
  m(0, 0) = 1.0;
  for (int i = 1; i < (*sizes)[0]; ++i) {
    m(i, 0) = 0.75;
    m(i, 1) = 0.25;
  }
  int at = (*sizes)[0];
  for (int c = 2; c <= k; ++c) {
    for (int i = 0; i < (*sizes)[c - 1]; ++i) m(at + i, c - 1) = 1.0;
    at += (*sizes)[c - 1];
  }
  return m;
}

// Row-1 perturbation: first entry loses Delta_Y, second entry absorbs it so
// the row keeps exact unit norm.
Eigen::MatrixXd perturb_y_row1(const Eigen::MatrixXd& y, double delta_y) {
  double u = y(0, 0);
  double s2sq = y(0, 1) * y(0, 1);
  double under = s2sq + 2.0 * delta_y * u - delta_y * delta_y;
  if (!(under >= 0.0) || delta_y >= u) {
    throw DcmmError(ErrorCode::kConeViolation,
                    "delta_y too large for the Y row perturbation");
  }
  Eigen::MatrixXd ya = y;
  ya(0, 0) = u - delta_y;
  ya(0, 1) = std::sqrt(under);
  return ya;
}

DcmmParams reparam_or_cone_error(const Eigen::MatrixXd& z,
                                 const Eigen::MatrixXd& y) {
  try {
    return reparameterize(z, y);
  } catch (const DcmmError& e) {
    if (e.code() == ErrorCode::kNotInCone) {
      throw DcmmError(ErrorCode::kConeViolation,
                      "perturbation left the membership cone (c0 too large)",
                      e.index());
    }
    throw;
  }
}

double realized_lambda_k(const DcmmParams& params) {
  Eigen::MatrixXd h = build_h(params);
  SpectralDecomposition dec = decompose(h, params.k);
  return dec.lambda(params.k - 1);
}

}  // namespace

double kl_divergence(const Eigen::MatrixXd& h_alpha,
                     const Eigen::MatrixXd& h_mu) {
  const int n = static_cast<int>(h_alpha.rows());
  if (h_alpha.cols() != n || h_mu.rows() != n || h_mu.cols() != n) {
    throw DcmmError(ErrorCode::kShapeMismatch, "h matrices inconsistent");
  }
  double kl = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double a = h_alpha(i, j), m = h_mu(i, j);
      if (a == m) continue;
      if (m <= 0.0 || m >= 1.0) {
        throw DcmmError(ErrorCode::kDegenerateNull,
                        "null probability on the boundary at a differing entry",
                        i);
      }
      double term = 0.0;
      if (a > 0.0) term += a * std::log(a / m);
      if (a < 1.0) term += (1.0 - a) * std::log((1.0 - a) / (1.0 - m));
      kl += std::max(term, 0.0);
    }
  }
  return kl;
}

LowerBoundPair build_p_pair(int n, int k, double c12, double c0,
                            double theta_tilde, double theta_bar,
                            double lambda_k_target) {
  if (n < 2 || k < 2) {
    throw DcmmError(ErrorCode::kInvalidArgument, "need n >= 2 and k >= 2");
  }
  if (!(c12 > 0.0 && c12 < 1.0) || !(c0 >= 0.0 && c0 < 1.0)) {
    throw DcmmError(ErrorCode::kInvalidArgument, "c12 in (0,1), c0 in [0,1)");
  }
  double gamma = c12 * lambda_k_target;
  // c12 small enough that min P^mu entry = 1 - c12 K lambda_K stays >= 1/2
  if (1.0 - c12 * k * lambda_k_target < 0.5) {
    throw DcmmError(ErrorCode::kInvalidArgument,
                    "c12 too large: P^mu min entry below 1/2");
  }
  Eigen::MatrixXd y = build_y(k, gamma);
  std::vector<int> sizes;
  Eigen::MatrixXd m = membership_block(n, k, &sizes);
  double theta_check = (n * theta_bar - theta_tilde) / (n - 1);
  if (!(theta_check > 0.0) || !(theta_tilde > 0.0)) {
    throw DcmmError(ErrorCode::kInvalidArgument, "degrees must stay positive");
  }
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(n, theta_check);
  theta(0) = theta_tilde;
  Eigen::MatrixXd z = theta.asDiagonal() * m * y;

  double delta_y = c0 / std::sqrt(n * theta_bar * theta_tilde);
  Eigen::MatrixXd ya = perturb_y_row1(y, delta_y);
  Eigen::MatrixXd za = z;
  za.row(0) = theta_tilde * ya.row(0);

  LowerBoundPair pair;
  pair.null_model = reparam_or_cone_error(z, y);
  pair.alt_model = reparam_or_cone_error(za, ya);
  pair.construction = "p";
  pair.delta_y = delta_y;
  pair.gap = std::abs(pair.alt_model.p(0, 1) - pair.null_model.p(0, 1));
  pair.kl = kl_divergence(build_h(pair.alt_model), build_h(pair.null_model));
  pair.c0 = c0;
  pair.c_main = c12;
  pair.theta_bar = theta_bar;
  pair.theta_distinguished = theta_tilde;
  pair.lambda_k_target = lambda_k_target;
  pair.realized_lambda_k_null = realized_lambda_k(pair.null_model);
  pair.distinguished_node = 0;
  pair.block_sizes = sizes;
  return pair;
}

LowerBoundPair build_theta_pair_membership(int n, int k, double c13, double c0,
                                           double theta_i, double theta_bar) {
  if (n < 3 || k < 2) {
    throw DcmmError(ErrorCode::kInvalidArgument, "need n >= 3 and k >= 2");
  }
  if (!(c13 > 0.0 && c13 < 1.0) || !(c0 >= 0.0 && c0 < 1.0)) {
    throw DcmmError(ErrorCode::kInvalidArgument, "c13 in (0,1), c0 in [0,1)");
  }
  if (1.0 - c13 * k < 0.5) {
    throw DcmmError(ErrorCode::kInvalidArgument,
                    "c13 too large: P^mu min entry below 1/2");
  }
  Eigen::MatrixXd y = build_y(k, c13);
  std::vector<int> sizes;
  Eigen::MatrixXd m = membership_block(n, k, &sizes);
  if (sizes[0] < 2) {
    throw DcmmError(ErrorCode::kBlockSizeMismatch,
                    "first block has no mixed row to distinguish");
  }
  double theta_check = (n * theta_bar - theta_i) / (n - 1);
  if (!(theta_check > 0.0) || !(theta_i > 0.0)) {
    throw DcmmError(ErrorCode::kInvalidArgument, "degrees must stay positive");
  }
  // node 1 (the first mixed row) carries theta_i
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(n, theta_check);
  theta(1) = theta_i;
  Eigen::MatrixXd z = theta.asDiagonal() * m * y;

  double delta_y = c0 / std::sqrt(n * theta_bar * theta_bar);
  Eigen::MatrixXd ya = perturb_y_row1(y, delta_y);
  Eigen::MatrixXd za = z;
  za.row(0) = theta_check * ya.row(0);

  LowerBoundPair pair;
  pair.null_model = reparam_or_cone_error(z, y);
  pair.alt_model = reparam_or_cone_error(za, ya);
  pair.construction = "theta-membership";
  pair.delta_y = delta_y;
  pair.gap = std::abs(pair.alt_model.theta(1) - pair.null_model.theta(1));
  pair.kl = kl_divergence(build_h(pair.alt_model), build_h(pair.null_model));
  pair.c0 = c0;
  pair.c_main = c13;
  pair.theta_bar = theta_bar;
  pair.theta_distinguished = theta_i;
  pair.lambda_k_target = 1.0;
  pair.realized_lambda_k_null = realized_lambda_k(pair.null_model);
  pair.distinguished_node = 1;
  pair.block_sizes = sizes;
  return pair;
}

LowerBoundPair build_theta_pair_degree(int n, int k, double c13, double c14,
                                       double theta_i, double theta_bar) {
  if (n < 3 || k < 2) {
    throw DcmmError(ErrorCode::kInvalidArgument, "need n >= 3 and k >= 2");
  }
  if (!(c13 > 0.0 && c13 < 1.0) || 1.0 - c13 * k < 0.5) {
    throw DcmmError(ErrorCode::kInvalidArgument, "c13 out of range");
  }
  if (c14 < 0.0) {
    throw DcmmError(ErrorCode::kInvalidArgument, "c14 must be nonnegative");
  }
  Eigen::MatrixXd y = build_y(k, c13);
  std::vector<int> sizes;
  Eigen::MatrixXd m = membership_block(n, k, &sizes);
  if (sizes[0] < 2) {
    throw DcmmError(ErrorCode::kBlockSizeMismatch,
                    "first block has no mixed row to distinguish");
  }
  double theta_check = (n * theta_bar - theta_i) / (n - 1);
  if (!(theta_check > 0.0) || !(theta_i > 0.0)) {
    throw DcmmError(ErrorCode::kInvalidArgument, "degrees must stay positive");
  }
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(n, theta_check);
  theta(1) = theta_i;
  double gap = c14 * theta_i * std::sqrt(theta_i / theta_bar);
  Eigen::VectorXd theta_a = theta;
  theta_a(1) = theta_i * (1.0 + c14 * std::sqrt(theta_i / theta_bar));

  Eigen::MatrixXd z = theta.asDiagonal() * m * y;
  Eigen::MatrixXd za = theta_a.asDiagonal() * m * y;

  LowerBoundPair pair;
  pair.null_model = reparam_or_cone_error(z, y);
  pair.alt_model = reparam_or_cone_error(za, y);
  pair.construction = "theta-degree";
  // the kl computation below builds both H matrices and raises
  // EntryOutOfRange if the perturbed entries leave [0, 1]
  pair.delta_y = 0.0;
  pair.gap = gap;
  pair.kl = kl_divergence(build_h(pair.alt_model), build_h(pair.null_model));
  pair.c0 = 0.0;
  pair.c_main = c14;
  pair.theta_bar = theta_bar;
  pair.theta_distinguished = theta_i;
  pair.lambda_k_target = 1.0;
  pair.realized_lambda_k_null = realized_lambda_k(pair.null_model);
  pair.distinguished_node = 1;
  pair.block_sizes = sizes;
  return pair;
}

PairReport verify_pair(const LowerBoundPair& pair) {
  PairReport rep;
  rep.gap = pair.gap;
  rep.kl = pair.kl;
  if (pair.construction == "p") {
    rep.gap_scaled = pair.gap * std::sqrt(pair.null_model.n * pair.theta_bar *
                                          pair.theta_distinguished);
  } else if (pair.construction == "theta-membership") {
    rep.gap_scaled = pair.gap / (pair.theta_distinguished * pair.delta_y);
  } else {
    double unit = pair.theta_distinguished *
                  std::sqrt(pair.theta_distinguished / pair.theta_bar);
    rep.gap_scaled = (pair.c_main > 0.0) ? pair.gap / unit : 0.0;
  }
  rep.null_report = validate_params(pair.null_model);
  rep.alt_report = validate_params(pair.alt_model);
  rep.assumptions_ok = rep.null_report.ok() && rep.alt_report.ok();
  return rep;
}

}  // namespace dcmm
