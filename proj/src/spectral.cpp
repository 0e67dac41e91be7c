#include "dcmm/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dcmm/errors.hpp"

namespace dcmm {
namespace {

constexpr double kGapTol = 1e-10;

// Sign convention: each column gets nonnegative entry sum; a near-zero sum is
// tie-broken by the sign of the first largest-magnitude coordinate.
void fix_signs(Eigen::MatrixXd& xi) {
  const int n = static_cast<int>(xi.rows());
  const double sum_tie = 1e-12 * n;
  for (int j = 0; j < xi.cols(); ++j) {
    double s = xi.col(j).sum();
    double sign;
    if (std::abs(s) > sum_tie) {
      sign = s < 0 ? -1.0 : 1.0;
    } else {
      Eigen::Index imax = 0;
      xi.col(j).cwiseAbs().maxCoeff(&imax);
      sign = xi(imax, j) < 0 ? -1.0 : 1.0;
    }
    if (sign < 0) xi.col(j) = -xi.col(j);
  }
}

}  // namespace

Eigen::VectorXd degree_matrix(const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(x.rows());
  if (x.cols() != n) {
    throw DcmmError(ErrorCode::kShapeMismatch, "matrix not square");
  }
  double total = x.sum();
  Eigen::VectorXd d = x.rowwise().sum().array() + total / n;
  for (int i = 0; i < n; ++i) {
    if (!(d(i) > 0.0)) {
      throw DcmmError(ErrorCode::kNonPositiveDegree,
                      "regularized degree not positive", i);
    }
  }
  return d;
}

Eigen::MatrixXd laplacian(const Eigen::MatrixXd& x, const Eigen::VectorXd& d) {
  const int n = static_cast<int>(x.rows());
  if (x.cols() != n || d.size() != n) {
    throw DcmmError(ErrorCode::kShapeMismatch, "x/d dimensions inconsistent");
  }
  for (int i = 0; i < n; ++i) {
    if (!(d(i) > 0.0)) {
      throw DcmmError(ErrorCode::kNonPositiveDegree, "degree not positive", i);
    }
  }
  Eigen::MatrixXd l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      l(i, j) = x(i, j) / std::sqrt(d(i) * d(j));
    }
  }
  return l;
}

SpectralDecomposition top_k_eigen(const Eigen::MatrixXd& l, int k) {
  const int n = static_cast<int>(l.rows());
  if (l.cols() != n) {
    throw DcmmError(ErrorCode::kShapeMismatch, "matrix not square");
  }
  if (k < 1 || k > n) {
    throw DcmmError(ErrorCode::kInvalidArgument, "k out of range");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
  if (solver.info() != Eigen::Success) {
    throw DcmmError(ErrorCode::kEigenFailure, "eigensolver did not converge");
  }
  const Eigen::VectorXd& w = solver.eigenvalues();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // |lambda| descending; ties put the positive eigenvalue first, then lower
  // original index.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double ma = std::abs(w(a)), mb = std::abs(w(b));
    if (ma != mb) return ma > mb;
    if (w(a) != w(b)) return w(a) > w(b);
    return a < b;
  });

  SpectralDecomposition dec;
  dec.lambda.resize(k);
  dec.xi.resize(n, k);
  for (int j = 0; j < k; ++j) {
    dec.lambda(j) = w(order[j]);
    dec.xi.col(j) = solver.eigenvectors().col(order[j]);
  }
  fix_signs(dec.xi);
  dec.nu_n_hat = std::min(std::abs(dec.lambda(0)) / std::sqrt(double(k)),
                          std::abs(dec.lambda(k - 1)));
  dec.degenerate_gap =
      k < n && std::abs(dec.lambda(k - 1)) - std::abs(w(order[k])) < kGapTol;
  return dec;
}

SpectralDecomposition decompose(const Eigen::MatrixXd& x, int k) {
  Eigen::VectorXd d = degree_matrix(x);
  SpectralDecomposition dec = top_k_eigen(laplacian(x, d), k);
  dec.dhat = std::move(d);
  return dec;
}

ScoreEmbedding score_embedding(const SpectralDecomposition& dec) {
  const int n = static_cast<int>(dec.xi.rows());
  const int k = static_cast<int>(dec.xi.cols());
  if (k < 2) {
    throw DcmmError(ErrorCode::kInvalidArgument,
                    "score embedding needs k >= 2");
  }
  const double eps_div = 1e-12 * dec.xi.col(0).cwiseAbs().maxCoeff();
  ScoreEmbedding emb;
  emb.rows.resize(n, k - 1);
  for (int i = 0; i < n; ++i) {
    double x1 = dec.xi(i, 0);
    if (std::abs(x1) <= eps_div) {
      throw DcmmError(ErrorCode::kFirstEigvecNearZero,
                      "leading eigenvector entry near zero", i);
    }
    for (int j = 1; j < k; ++j) emb.rows(i, j - 1) = dec.xi(i, j) / x1;
  }
  return emb;
}

}  // namespace dcmm
