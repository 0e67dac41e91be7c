#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "dcmm/estimation.hpp"
#include "dcmm/model.hpp"
#include "dcmm/rng.hpp"
#include "dcmm/spectral.hpp"
#include "dcmm/vertex_hunting.hpp"
#include "test_support.hpp"

using namespace dcmm;

namespace {

// rows = vertices repeated `copies` times plus interior points with
// barycentric weights bounded into the simplex interior
Eigen::MatrixXd simplex_rows(const Eigen::MatrixXd& verts, int copies,
                             int interior, uint64_t seed,
                             std::vector<std::set<int>>* pure_sets = nullptr) {
  const int k = static_cast<int>(verts.rows());
  Eigen::MatrixXd rows(copies * k + interior, verts.cols());
  if (pure_sets) pure_sets->assign(k, {});
  int at = 0;
  for (int c = 0; c < k; ++c) {
    for (int r = 0; r < copies; ++r) {
      rows.row(at) = verts.row(c);
      if (pure_sets) (*pure_sets)[c].insert(at);
      ++at;
    }
  }
  Rng rng(seed);
  for (int i = 0; i < interior; ++i) {
    Eigen::VectorXd w(k);
    for (int c = 0; c < k; ++c) w(c) = rng.uniform(0.25, 1.0);
    w /= w.sum();
    rows.row(at++) = w.transpose() * verts;
  }
  return rows;
}

double vertex_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  // nearest-match pairing (k is tiny)
  double worst = 0.0;
  for (int a = 0; a < want.rows(); ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < got.rows(); ++b) {
      best = std::min(best, (want.row(a) - got.row(b)).norm());
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("vertex_hunting");

TEST_CASE("spa recovers a noiseless triangle exactly") {
  Eigen::MatrixXd verts(3, 2);
  verts << 0, 0, 1, 0, 0, 1;
  Eigen::MatrixXd rows = simplex_rows(verts, 10, 0, 1);
  VertexHuntResult res = spa_modified(rows, 3, 0.01);
  CHECK(res.vertices.rows() == 3);
  CHECK(vertex_error(res.vertices, verts) == 0.0);
  CHECK(vertex_error(res.raw_picks, verts) == 0.0);
  for (const auto& c : res.clusters) CHECK(c.size() == 10);
  CHECK_FALSE(res.overlap);
}

TEST_CASE("spa on a noisy segment lands within phi of the endpoints") {
  Rng rng(5);
  const int n = 100;
  Eigen::MatrixXd rows(n, 1);
  double v1 = -1.3, v2 = 0.9;
  int at = 0;
  for (; at < n / 5; ++at) rows(at, 0) = v1 + rng.uniform(-0.01, 0.01);
  for (; at < 2 * n / 5; ++at) rows(at, 0) = v2 + rng.uniform(-0.01, 0.01);
  for (; at < n; ++at) rows(at, 0) = rng.uniform(v1 + 0.3, v2 - 0.3);
  double phi = 0.05 * std::abs(v1 - v2);
  VertexHuntResult res = spa_modified(rows, 2, phi);
  Eigen::MatrixXd want(2, 1);
  want << v1, v2;
  CHECK(vertex_error(res.vertices, want) <= phi);
}

TEST_CASE("spa argmax tie goes to the lowest index") {
  Eigen::MatrixXd rows(4, 1);
  rows << 2.0, 2.0, -1.0, 0.5;  // rows 0 and 1 identical max norm
  VertexHuntResult res = spa_modified(rows, 2, 0.1);
  CHECK(res.raw_picks(0, 0) == 2.0);
  // the projection zeroes both copies, so the second pick is row 2
  CHECK(res.raw_picks(1, 0) == -1.0);
}

TEST_CASE("spa exact recovery on randomized noiseless simplices") {
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(1000 + trial);
    int k = 2 + static_cast<int>(rng.index(3));  // 2..4
    Eigen::MatrixXd verts(k, k - 1);
    double delta_r;
    while (true) {
      for (int a = 0; a < k; ++a) {
        for (int j = 0; j < k - 1; ++j) verts(a, j) = rng.uniform(-2.0, 2.0);
      }
      double sep = std::numeric_limits<double>::infinity();
      for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
          sep = std::min(sep, (verts.row(a) - verts.row(b)).norm());
        }
      }
      // affine independence with some margin
      Eigen::MatrixXd edges(k - 1, k - 1);
      for (int a = 1; a < k; ++a) edges.row(a - 1) = verts.row(a) - verts.row(0);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(edges);
      if (sep > 0.5 && svd.singularValues().minCoeff() > 0.3) {
        delta_r = sep;
        break;
      }
    }
    std::vector<std::set<int>> pure;
    Eigen::MatrixXd rows =
        simplex_rows(verts, 3 + static_cast<int>(rng.index(5)), 25,
                     rng.next_u64(), &pure);
    // delta_r = min over communities c and rows outside C_c of the distance
    // to vertex c
    for (int i = 0; i < rows.rows(); ++i) {
      for (int c = 0; c < k; ++c) {
        if (pure[c].count(i)) continue;
        delta_r = std::min(delta_r, (rows.row(i) - verts.row(c)).norm());
      }
    }
    double phi = 0.49 * delta_r;
    VertexHuntResult res = spa_modified(rows, k, phi);
    // clusters must equal the true pure sets, as index sets
    std::vector<std::set<int>> got;
    for (const auto& c : res.clusters) got.emplace_back(c.begin(), c.end());
    std::sort(got.begin(), got.end());
    std::sort(pure.begin(), pure.end());
    if (got != pure) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("spa rotation equivariance") {
  Rng rng(77);
  Eigen::MatrixXd verts(3, 2);
  verts << 0.1, 0.0, 1.2, 0.1, -0.2, 1.1;
  Eigen::MatrixXd rows = simplex_rows(verts, 6, 30, 9);
  double theta = 0.7;
  Eigen::MatrixXd q(2, 2);
  q << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  VertexHuntResult base = spa_modified(rows, 3, 0.05);
  VertexHuntResult rot = spa_modified(rows * q.transpose(), 3, 0.05);
  CHECK(vertex_error(rot.vertices, base.vertices * q.transpose()) < 1e-9);
  std::vector<std::set<int>> a, b;
  for (const auto& c : base.clusters) a.emplace_back(c.begin(), c.end());
  for (const auto& c : rot.clusters) b.emplace_back(c.begin(), c.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
}

TEST_CASE("vertices are exact cluster means") {
  Eigen::MatrixXd verts(2, 1);
  verts << -1.0, 1.0;
  Eigen::MatrixXd rows = simplex_rows(verts, 8, 20, 3);
  VertexHuntResult res = spa_modified(rows, 2, 0.3);
  for (int a = 0; a < 2; ++a) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(1);
    for (int i : res.clusters[a]) mean += rows.row(i);
    mean /= static_cast<double>(res.clusters[a].size());
    CHECK((mean - res.vertices.row(a)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("kmeans on repeated points returns those points") {
  Eigen::MatrixXd pts(12, 2);
  Eigen::MatrixXd distinct(4, 2);
  distinct << 0, 0, 3, 0, 0, 3, 3, 3;
  for (int i = 0; i < 12; ++i) pts.row(i) = distinct.row(i % 4);
  KMeansResult km = kmeans_lloyd(pts, 4, 11);
  CHECK(km.inertia == doctest::Approx(0.0));
  CHECK(vertex_error(km.centers, distinct) == 0.0);
}

TEST_CASE("svs on repeated points equals spa on the distinct points") {
  Eigen::MatrixXd distinct(4, 1);
  distinct << -2.0, -0.5, 0.5, 2.0;
  Eigen::MatrixXd rows(20, 1);
  for (int i = 0; i < 20; ++i) rows.row(i) = distinct.row(i % 4);
  VertexHuntResult via_svs = svs(rows, 2, 0.2, 4, 3);
  VertexHuntResult via_spa = spa_modified(distinct, 2, 0.2);
  CHECK(vertex_error(via_svs.raw_picks, via_spa.raw_picks) < 1e-12);
  CHECK(vertex_error(via_svs.vertices, via_spa.vertices) < 1e-12);
}

TEST_CASE("svs determinism in seed") {
  DcmmParams params = test::random_valid_params(100, 2, 51, 0.2, 0.3, 0.8);
  AdjacencyMatrix x = sample_adjacency(build_h(params), 4);
  SpectralDecomposition dec = decompose(x.x, 2);
  ScoreEmbedding emb = score_embedding(dec);
  VertexHuntResult a = svs(emb.rows, 2, std::nullopt, 20, 9);
  VertexHuntResult b = svs(emb.rows, 2, std::nullopt, 20, 9);
  CHECK((a.vertices - b.vertices).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.clusters == b.clusters);
}

TEST_CASE("svs beats raw spa on noisy instances (paired medians)") {
  // two-community sampled instances; vertex error measured against the
  // population vertices
  Eigen::MatrixXd p(2, 2);
  p << 1.0, 0.5, 0.5, 1.0;
  std::vector<double> err_spa, err_svs;
  for (int rep = 0; rep < 50; ++rep) {
    auto [theta, pi] = generate_experiment_pair(400, derive_seed(600, rep));
    DcmmParams truth = DcmmParams::checked(theta, pi, p);
    Eigen::MatrixXd h = build_h(truth);
    SpectralDecomposition pop = decompose(h, 2);
    ScoreEmbedding pop_emb = score_embedding(pop);
    Eigen::MatrixXd verts(2, 1);
    verts.row(0) = pop_emb.rows.row(0);    // pure community 1
    verts.row(1) = pop_emb.rows.row(40);   // pure community 2
    AdjacencyMatrix x = sample_adjacency(h, derive_seed(601, rep));
    SpectralDecomposition dec = decompose(x.x, 2);
    ScoreEmbedding emb;
    try {
      emb = score_embedding(dec);
    } catch (const DcmmError&) {
      continue;  // disconnected sample
    }
    err_spa.push_back(vertex_error(spa_modified(emb.rows, 2).vertices, verts));
    err_svs.push_back(
        vertex_error(svs(emb.rows, 2, std::nullopt, 20, rep).vertices, verts));
  }
  REQUIRE(err_spa.size() >= 30);
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  CHECK(median(err_svs) < median(err_spa));
}

TEST_CASE("svs degenerate and precondition errors") {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(10, 1);  // all identical
  CHECK_THROWS_WITH_AS(svs(rows, 2, 0.1, 4, 1),
                       doctest::Contains("KMeansDegenerate"), DcmmError);
  CHECK_THROWS_AS(svs(rows, 3, 0.1, 2, 1), DcmmError);  // l < k
}

TEST_CASE("svs empty node cluster when phi is too small") {
  // k-means centers land at +-1.0, between node locations +-0.98/+-1.02; a
  // radius of 0.01 reaches no node from the averaged vertices
  Eigen::MatrixXd rows(12, 1);
  for (int i = 0; i < 3; ++i) {
    rows(4 * i + 0, 0) = -1.02;
    rows(4 * i + 1, 0) = -0.98;
    rows(4 * i + 2, 0) = 0.98;
    rows(4 * i + 3, 0) = 1.02;
  }
  CHECK_THROWS_WITH_AS(svs(rows, 2, 0.01, 2, 1),
                       doctest::Contains("EmptyCluster"), DcmmError);
}

TEST_CASE("overlap flag set when phi is too large") {
  Eigen::MatrixXd verts(2, 1);
  verts << -1.0, 1.0;
  Eigen::MatrixXd rows = simplex_rows(verts, 5, 10, 2);
  VertexHuntResult res = spa_modified(rows, 2, 5.0);
  CHECK(res.overlap);
}

TEST_SUITE_END();
