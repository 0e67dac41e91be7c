#include "dcmm/vertex_hunting.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "dcmm/errors.hpp"
#include "dcmm/rng.hpp"

namespace dcmm {
namespace {

// Lifted points [1, r_i^T] as rows.
Eigen::MatrixXd lift(const Eigen::MatrixXd& rows) {
  Eigen::MatrixXd z(rows.rows(), rows.cols() + 1);
  z.col(0).setOnes();
  z.rightCols(rows.cols()) = rows;
  return z;
}

// Max-norm selection with orthogonal-complement projection; ties on the norm
// go to the lowest index. Returns selected row indices.
std::vector<int> spa_select(const Eigen::MatrixXd& rows, int k) {
  const int n = static_cast<int>(rows.rows());
  Eigen::MatrixXd z = lift(rows);
  std::vector<int> picks;
  picks.reserve(k);
  for (int round = 0; round < k; ++round) {
    int best = 0;
    double best_norm = -1.0;
    for (int i = 0; i < n; ++i) {
      double nm = z.row(i).squaredNorm();
      if (nm > best_norm) {
        best_norm = nm;
        best = i;
      }
    }
    picks.push_back(best);
    Eigen::RowVectorXd u = z.row(best);
    double uu = u.squaredNorm();
    if (uu > 0.0) z -= (z * u.transpose()) * (u / uu);
  }
  return picks;
}

double min_pairwise_distance(const Eigen::MatrixXd& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < pts.rows(); ++a) {
    for (int b = a + 1; b < pts.rows(); ++b) {
      best = std::min(best, (pts.row(a) - pts.row(b)).norm());
    }
  }
  return best;
}

double resolve_phi(std::optional<double> phi, const Eigen::MatrixXd& raw, int k) {
  if (phi) {
    if (!(*phi > 0.0)) {
      throw DcmmError(ErrorCode::kInvalidArgument, "phi must be positive");
    }
    return *phi;
  }
  if (k < 2) {
    throw DcmmError(ErrorCode::kInvalidArgument,
                    "default phi rule needs k >= 2");
  }
  return kDefaultPhiFactor * min_pairwise_distance(raw);
}

// phi-ball clusters around anchors and their means.
void ball_clusters(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& anchors,
                   double phi, std::vector<std::vector<int>>* clusters,
                   Eigen::MatrixXd* means, bool* overlap) {
  const int n = static_cast<int>(rows.rows());
  const int k = static_cast<int>(anchors.rows());
  clusters->assign(k, {});
  means->resize(k, rows.cols());
  std::vector<int> hits(n, 0);
  for (int a = 0; a < k; ++a) {
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(rows.cols());
    for (int i = 0; i < n; ++i) {
      if ((rows.row(i) - anchors.row(a)).norm() <= phi) {
        (*clusters)[a].push_back(i);
        hits[i] += 1;
        sum += rows.row(i);
      }
    }
    if ((*clusters)[a].empty()) {
      throw DcmmError(ErrorCode::kEmptyCluster,
                      "no row within phi of anchor (phi too small)", a);
    }
    means->row(a) = sum / static_cast<double>((*clusters)[a].size());
  }
  *overlap = false;
  for (int i = 0; i < n; ++i) {
    if (hits[i] > 1) {
      *overlap = true;
      break;
    }
  }
}

}  // namespace

VertexHuntResult spa_modified(const Eigen::MatrixXd& rows, int k,
                              std::optional<double> phi) {
  const int n = static_cast<int>(rows.rows());
  if (k < 1 || n < k) {
    throw DcmmError(ErrorCode::kInvalidArgument, "need n >= k >= 1");
  }
  std::vector<int> picks = spa_select(rows, k);
  VertexHuntResult res;
  res.raw_picks.resize(k, rows.cols());
  for (int a = 0; a < k; ++a) res.raw_picks.row(a) = rows.row(picks[a]);
  res.phi = resolve_phi(phi, res.raw_picks, k);
  ball_clusters(rows, res.raw_picks, res.phi, &res.clusters, &res.vertices,
                &res.overlap);
  return res;
}

KMeansResult kmeans_lloyd(const Eigen::MatrixXd& points, int k, uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  const int dim = static_cast<int>(points.cols());
  if (k < 1 || n < k) {
    throw DcmmError(ErrorCode::kInvalidArgument, "need n >= k >= 1");
  }
  Rng rng(seed);
  constexpr int kMaxIters = 300;
  constexpr double kRelTol = 1e-6;

  // ++ init: first center uniform, then D^2-weighted draws.
  KMeansResult res;
  res.centers.resize(k, dim);
  res.centers.row(0) = points.row(rng.index(n));
  Eigen::VectorXd d2 =
      (points.rowwise() - res.centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = d2.sum();
    int pick;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.index(n));
    } else {
      double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    }
    res.centers.row(c) = points.row(pick);
    d2 = d2.cwiseMin(
        (points.rowwise() - res.centers.row(c)).rowwise().squaredNorm());
  }

  res.assignment.assign(n, 0);
  double prev_inertia = -1.0;
  for (int it = 0; it < kMaxIters; ++it) {
    res.iterations = it + 1;
    double inertia = 0.0;
    std::vector<double> dist_to_assigned(n, 0.0);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - res.centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        double d = (points.row(i) - res.centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      res.assignment[i] = best;
      dist_to_assigned[i] = best_d;
      inertia += best_d;
    }
    // means, with empty clusters re-seeded to the farthest point
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(res.assignment[i]) += points.row(i);
      counts[res.assignment[i]] += 1;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        res.centers.row(c) = sums.row(c) / counts[c];
      } else {
        int far = 0;
        for (int i = 1; i < n; ++i) {
          if (dist_to_assigned[i] > dist_to_assigned[far]) far = i;
        }
        res.centers.row(c) = points.row(far);
        dist_to_assigned[far] = 0.0;
      }
    }
    res.inertia = inertia;
    if (prev_inertia >= 0.0) {
      if (prev_inertia <= 0.0) break;
      if ((prev_inertia - inertia) / prev_inertia < kRelTol) break;
    }
    prev_inertia = inertia;
  }
  return res;
}

VertexHuntResult svs(const Eigen::MatrixXd& rows, int k,
                     std::optional<double> phi, int l, uint64_t seed) {
  const int n = static_cast<int>(rows.rows());
  if (l < k) {
    throw DcmmError(ErrorCode::kInvalidArgument, "need l >= k");
  }
  if (n < l) {
    throw DcmmError(ErrorCode::kInvalidArgument, "need n >= l");
  }
  KMeansResult km = kmeans_lloyd(lift(rows), l, seed);
  // centers of lifted points keep 1 in the first coordinate; drop it
  Eigen::MatrixXd center_rows = km.centers.rightCols(rows.cols());

  int distinct = 0;
  for (int a = 0; a < l; ++a) {
    bool dup = false;
    for (int b = 0; b < a && !dup; ++b) {
      dup = (center_rows.row(a) - center_rows.row(b)).norm() <= 1e-12;
    }
    if (!dup) ++distinct;
  }
  if (distinct < k) {
    throw DcmmError(ErrorCode::kKMeansDegenerate,
                    "fewer than k distinct centers");
  }

  VertexHuntResult on_centers = spa_modified(center_rows, k, phi);
  // node-level clusters re-derived around the center-averaged vertices
  VertexHuntResult res;
  res.raw_picks = on_centers.raw_picks;
  res.phi = on_centers.phi;
  ball_clusters(rows, on_centers.vertices, res.phi, &res.clusters,
                &res.vertices, &res.overlap);
  return res;
}

}  // namespace dcmm
