#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace dcmm {

// When no radius is given, phi = kDefaultPhiFactor * (min pairwise distance
// among the raw picks).
inline constexpr double kDefaultPhiFactor = 0.1;

inline int default_svs_centers(int k, int n) {
  int l = 10 * k;
  int root = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  return std::max(l, root);
}

struct VertexHuntResult {
  Eigen::MatrixXd vertices;                // k x (k-1), cluster means
  std::vector<std::vector<int>> clusters;  // node indices per vertex
  Eigen::MatrixXd raw_picks;               // k x (k-1), pre-averaging anchors
  double phi = 0.0;                        // radius actually used
  bool overlap = false;                    // clusters intersect (phi too large)
};

// Successive projection with max-norm selection on lifted rows [1, r_i],
// followed by phi-ball clustering and averaging.
VertexHuntResult spa_modified(const Eigen::MatrixXd& rows, int k,
                              std::optional<double> phi = std::nullopt);

// Sketched vertex search: k-means (l centers, seeded ++ init, Lloyd) on the
// lifted rows, successive projection on the centers, then node-level clusters
// re-derived around the resulting vertices and re-averaged.
VertexHuntResult svs(const Eigen::MatrixXd& rows, int k,
                     std::optional<double> phi, int l, uint64_t seed);

// Lloyd k-means used by svs; exposed for tests.
struct KMeansResult {
  Eigen::MatrixXd centers;
  std::vector<int> assignment;
  double inertia = 0.0;
  int iterations = 0;
};
KMeansResult kmeans_lloyd(const Eigen::MatrixXd& points, int k, uint64_t seed);

}  // namespace dcmm
