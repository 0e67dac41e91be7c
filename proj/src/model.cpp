#include "dcmm/model.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "dcmm/rng.hpp"
#include "dcmm/spectral.hpp"

namespace dcmm {
namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kSymTol = 1e-12;
constexpr double kUnitDiagTol = 1e-10;
constexpr double kSingularTol = 1e-10;
constexpr double kHRangeTol = 1e-12;
constexpr double kConeTol = 1e-10;

double smallest_singular_value(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().minCoeff();
}

bool is_pure_row(const Eigen::MatrixXd& pi, int i, int k) {
  if (std::abs(pi(i, k) - 1.0) > kRowSumTol) return false;
  for (int j = 0; j < pi.cols(); ++j) {
    if (j != k && std::abs(pi(i, j)) > kRowSumTol) return false;
  }
  return true;
}

}  // namespace

DcmmParams DcmmParams::checked(Eigen::VectorXd theta, Eigen::MatrixXd pi,
                               Eigen::MatrixXd p) {
  const int n = static_cast<int>(theta.size());
  const int k = static_cast<int>(p.rows());
  if (n <= 0 || k <= 0 || pi.rows() != n || pi.cols() != k || p.cols() != k) {
    throw DcmmError(ErrorCode::kShapeMismatch,
                    "theta/pi/p dimensions are inconsistent");
  }
  for (int i = 0; i < n; ++i) {
    if (!(theta(i) > 0.0)) {
      throw DcmmError(ErrorCode::kInvalidArgument,
                      "theta must be strictly positive", i);
    }
    double s = pi.row(i).sum();
    if (std::abs(s - 1.0) > kRowSumTol || pi.row(i).minCoeff() < -kRowSumTol) {
      throw DcmmError(ErrorCode::kInvalidArgument,
                      "pi row is not on the simplex", i);
    }
  }
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > kSymTol) {
    throw DcmmError(ErrorCode::kInvalidArgument, "p is not symmetric");
  }
  for (int a = 0; a < k; ++a) {
    if (std::abs(p(a, a) - 1.0) > kUnitDiagTol) {
      throw DcmmError(ErrorCode::kInvalidArgument,
                      "p diagonal entry is not 1", a);
    }
    p(a, a) = 1.0;
  }
  if (p.minCoeff() < -kSymTol) {
    throw DcmmError(ErrorCode::kInvalidArgument, "p has a negative entry");
  }
  if (smallest_singular_value(p) <= kSingularTol) {
    throw DcmmError(ErrorCode::kInvalidArgument, "p is singular");
  }
  DcmmParams params{n, k, std::move(theta), std::move(pi), std::move(p)};
  Eigen::MatrixXd h = build_h(params);  // throws EntryOutOfRange
  (void)h;
  for (int c = 0; c < k; ++c) {
    bool found = false;
    for (int i = 0; i < n && !found; ++i) found = is_pure_row(params.pi, i, c);
    if (!found) {
      throw DcmmError(ErrorCode::kInvalidArgument,
                      "community has no pure node", c);
    }
  }
  return params;
}

AdjacencyMatrix AdjacencyMatrix::from_matrix(Eigen::MatrixXd m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) {
    throw DcmmError(ErrorCode::kShapeMismatch, "adjacency matrix not square");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double v = m(i, j);
      if (v != 0.0 && v != 1.0) {
        throw DcmmError(ErrorCode::kEntryOutOfRange,
                        "adjacency entries must be 0 or 1", i);
      }
      if (m(i, j) != m(j, i)) {
        throw DcmmError(ErrorCode::kInvalidArgument,
                        "adjacency matrix not symmetric", i);
      }
    }
  }
  return AdjacencyMatrix{std::move(m)};
}

Eigen::MatrixXd build_h(const DcmmParams& params) {
  if (params.pi.rows() != params.n || params.pi.cols() != params.k ||
      params.p.rows() != params.k || params.theta.size() != params.n) {
    throw DcmmError(ErrorCode::kShapeMismatch, "params shapes inconsistent");
  }
  Eigen::MatrixXd tp = params.theta.asDiagonal() * params.pi;  // Theta Pi
  Eigen::MatrixXd h = tp * params.p * tp.transpose();
  double lo = h.minCoeff(), hi = h.maxCoeff();
  if (lo < -kHRangeTol || hi > 1.0 + kHRangeTol) {
    throw DcmmError(ErrorCode::kEntryOutOfRange,
                    "H entry outside [0, 1]: extremes " + std::to_string(lo) +
                        ", " + std::to_string(hi));
  }
  return h;
}

AdjacencyMatrix sample_adjacency(const Eigen::MatrixXd& h, uint64_t seed) {
  const int n = static_cast<int>(h.rows());
  if (h.cols() != n) {
    throw DcmmError(ErrorCode::kShapeMismatch, "h not square");
  }
  Rng rng(seed);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = rng.uniform() < h(i, j) ? 1.0 : 0.0;
      x(i, j) = v;
      x(j, i) = v;
    }
  }
  return AdjacencyMatrix{std::move(x)};
}

ValidationReport validate_params(const DcmmParams& params) {
  const int n = params.n, k = params.k;
  if (params.theta.size() != n || params.pi.rows() != n ||
      params.pi.cols() != k || params.p.rows() != k || params.p.cols() != k) {
    throw DcmmError(ErrorCode::kShapeMismatch, "params shapes inconsistent");
  }
  ValidationReport rep;

  for (int c = 0; c < k; ++c) {
    bool found = false;
    for (int i = 0; i < n && !found; ++i) found = is_pure_row(params.pi, i, c);
    if (!found) rep.missing_pure_communities.push_back(c);
  }
  rep.pure_node_ok = rep.missing_pure_communities.empty();

  for (int i = 0; i < n; ++i) {
    if (!(params.theta(i) > 0.0)) rep.nonpositive_theta.push_back(i);
    double s = params.pi.row(i).sum();
    if (std::abs(s - 1.0) > kRowSumTol ||
        params.pi.row(i).minCoeff() < -kRowSumTol) {
      rep.bad_pi_rows.push_back(i);
    }
  }
  rep.theta_positive_ok = rep.nonpositive_theta.empty();
  rep.pi_rows_ok = rep.bad_pi_rows.empty();

  rep.p_symmetric_ok =
      (params.p - params.p.transpose()).cwiseAbs().maxCoeff() <= kSymTol;
  rep.p_unit_diag_ok = true;
  for (int a = 0; a < k; ++a) {
    if (params.p(a, a) != 1.0) rep.p_unit_diag_ok = false;
  }
  rep.p_nonsingular_ok = smallest_singular_value(params.p) > kSingularTol;
  rep.p_max_entry = params.p.cwiseAbs().maxCoeff();

  rep.theta_min = params.theta.minCoeff();
  rep.theta_max = params.theta.maxCoeff();
  double logn_over_n = std::log(std::max(n, 2)) / n;
  rep.theta_lower_ratio = rep.theta_min / std::sqrt(logn_over_n);

  Eigen::MatrixXd h = params.theta.asDiagonal() * params.pi * params.p *
                      params.pi.transpose() * params.theta.asDiagonal();
  rep.h_in_range_ok =
      h.minCoeff() >= -kHRangeTol && h.maxCoeff() <= 1.0 + kHRangeTol;
  // degree-based diagnostics need positive degrees, which the structural
  // flags guarantee (unit-diagonal P forces H_ii >= theta_i^2 / k)
  if (!rep.theta_positive_ok || !rep.pi_rows_ok || !rep.h_in_range_ok ||
      !rep.p_unit_diag_ok) {
    return rep;
  }

  Eigen::VectorXd d0 = degree_matrix(h);
  Eigen::MatrixXd theta_pi = params.theta.asDiagonal() * params.pi;
  // G = K Pi^T Theta D0^{-1} Theta Pi, a balance measure among communities.
  Eigen::MatrixXd g = static_cast<double>(k) * theta_pi.transpose() *
                      d0.cwiseInverse().asDiagonal() * theta_pi;
  Eigen::JacobiSVD<Eigen::MatrixXd> gsvd(g);
  rep.g_norm = gsvd.singularValues().maxCoeff();
  rep.g_inv_norm = 1.0 / gsvd.singularValues().minCoeff();
  Eigen::MatrixXd f = static_cast<double>(k) /
                      params.theta.squaredNorm() * params.pi.transpose() *
                      params.theta.asDiagonal() * params.theta.asDiagonal() *
                      params.pi;
  Eigen::JacobiSVD<Eigen::MatrixXd> fsvd(f);
  rep.f_norm = fsvd.singularValues().maxCoeff();
  rep.f_inv_norm = 1.0 / fsvd.singularValues().minCoeff();

  SpectralDecomposition dec = top_k_eigen(laplacian(h, d0), k);
  rep.lambda.assign(dec.lambda.data(), dec.lambda.data() + dec.lambda.size());
  double lambda_1 = dec.lambda(0);
  double lambda_k = dec.lambda(k - 1);
  rep.nu_n = std::min(lambda_1 / std::sqrt(static_cast<double>(k)), lambda_k);
  double theta_bar = params.theta.mean();
  rep.lambda_k_noise_ratio =
      lambda_k / std::sqrt(std::log(std::max(n, 2)) / (n * theta_bar * theta_bar));
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int a = 0; a < k; ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < k; ++b) {
      if (a != b) best = std::min(best, std::abs(dec.lambda(a) - dec.lambda(b)));
    }
    if (k > 1) min_ratio = std::min(min_ratio, best / std::abs(dec.lambda(a)));
  }
  rep.min_eigengap_ratio = (k > 1) ? min_ratio : 0.0;
  return rep;
}

DcmmParams reparameterize(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y) {
  const int n = static_cast<int>(z.rows());
  const int k = static_cast<int>(y.rows());
  if (z.cols() != k || y.cols() != k) {
    throw DcmmError(ErrorCode::kShapeMismatch, "z/y dimensions inconsistent");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(y.transpose());
  if (!lu.isInvertible()) {
    throw DcmmError(ErrorCode::kInvalidArgument, "y is singular");
  }
  Eigen::MatrixXd p = y * y.transpose();
  for (int a = 0; a < k; ++a) {
    if (std::abs(p(a, a) - 1.0) > kUnitDiagTol) {
      throw DcmmError(ErrorCode::kInvalidArgument,
                      "y y^T does not have unit diagonal", a);
    }
    p(a, a) = 1.0;
  }
  // c_i = z_i y^{-1}; row i is in the cone iff c_i >= 0
  Eigen::MatrixXd c = lu.solve(z.transpose()).transpose();  // c y = z
  Eigen::VectorXd theta(n);
  Eigen::MatrixXd pi(n, k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      if (c(i, j) < -kConeTol) {
        throw DcmmError(ErrorCode::kNotInCone,
                        "row outside the cone of y rows", i);
      }
      if (c(i, j) < 0.0) c(i, j) = 0.0;
    }
    double t = c.row(i).sum();
    if (t <= 0.0) {
      throw DcmmError(ErrorCode::kZeroRow, "row has zero weight", i);
    }
    theta(i) = t;
    pi.row(i) = c.row(i) / t;
  }
  return DcmmParams{n, k, std::move(theta), std::move(pi), std::move(p)};
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> generate_experiment_pair(
    int n, uint64_t seed) {
  if (n <= 0 || n % 10 != 0) {
    throw DcmmError(ErrorCode::kIndivisibleN,
                    "n must be a positive multiple of 10");
  }
  Rng rng(seed);
  Eigen::VectorXd theta(n);
  for (int i = 0; i < n; ++i) theta(i) = rng.uniform(0.05, 0.8);
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n, 2);
  const int tenth = n / 10;
  for (int i = 0; i < tenth; ++i) pi(i, 0) = 1.0;
  for (int i = tenth; i < 2 * tenth; ++i) pi(i, 1) = 1.0;
  for (int i = 2 * tenth; i < n; ++i) {
    double t = rng.uniform(0.15, 0.85);
    pi(i, 0) = t;
    pi(i, 1) = 1.0 - t;
  }
  return {std::move(theta), std::move(pi)};
}

}  // namespace dcmm
