#pragma once

#include <Eigen/Dense>

namespace dcmm {

// Regularized degrees plus the top-k eigenpairs of the regularized Laplacian,
// eigenvalues ordered by descending magnitude, signs fixed deterministically.
struct SpectralDecomposition {
  Eigen::VectorXd dhat;    // regularized degrees; empty when built from a bare L
  Eigen::VectorXd lambda;  // k values, |lambda_1| >= ... >= |lambda_k|
  Eigen::MatrixXd xi;      // n x k, orthonormal columns
  double nu_n_hat = 0.0;   // min{ |lambda_1|/sqrt(k), |lambda_k| }
  bool degenerate_gap = false;  // |lambda_k| - |lambda_{k+1}| < 1e-10
};

struct ScoreEmbedding {
  Eigen::MatrixXd rows;  // n x (k-1), row i = (xi_2(i)/xi_1(i), ..., xi_k(i)/xi_1(i))
};

// d[i] = row sum + (1/n) * total sum. Throws NonPositiveDegree.
Eigen::VectorXd degree_matrix(const Eigen::MatrixXd& x);

// L[i][j] = x[i][j] / sqrt(d[i] d[j])
Eigen::MatrixXd laplacian(const Eigen::MatrixXd& x, const Eigen::VectorXd& d);

SpectralDecomposition top_k_eigen(const Eigen::MatrixXd& l, int k);

// degree_matrix + laplacian + top_k_eigen, with dhat filled in.
SpectralDecomposition decompose(const Eigen::MatrixXd& x, int k);

ScoreEmbedding score_embedding(const SpectralDecomposition& dec);

}  // namespace dcmm
