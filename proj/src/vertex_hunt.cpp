#include "dcmm/vertex_hunt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dcmm/errors.hpp"

namespace dcmm {

namespace {

// The selection loop of Algorithm 1, radius-free. Ties in the argmax go to
// the smallest node index.
std::vector<int> spa_anchor_pass(const Matrix& points, int k) {
  const int n = static_cast<int>(points.rows());
  std::vector<int> anchors;
  anchors.reserve(k);
  Matrix z(n, k);
  z.col(0).setOnes();
  if (k > 1) z.rightCols(k - 1) = points;

  double initial_max = std::sqrt(z.rowwise().squaredNorm().maxCoeff());
  for (int round = 0; round < k; ++round) {
    Vector norms = z.rowwise().norm();
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      if (norms(i) > best) {
        best = norms(i);
        imax = i;
      }
    }
    if (best <= 1e-12 * initial_max)
      throw degeneracy_error(
          "successive_projection: residuals vanished before round " +
          std::to_string(round + 1) + "; points are rank deficient");
    anchors.push_back(imax);
    Vector p = z.row(imax).transpose() / best;
    z.noalias() -= (z * p) * p.transpose();
  }
  return anchors;
}

}  // namespace

VertexHuntResult successive_projection(const Matrix& points, int k, double phi) {
  const int n = static_cast<int>(points.rows());
  if (k < 1) throw validation_error("successive_projection: need K >= 1");
  if (n < k) throw validation_error("successive_projection: need n >= K");
  if (!(phi > 0.0)) throw validation_error("successive_projection: need phi > 0");
  if (k >= 2 && points.cols() != k - 1)
    throw validation_error("successive_projection: points must be n x (K-1)");

  VertexHuntResult res;
  res.radius = phi;
  if (k == 1) {
    res.anchors = {0};
    res.vertex_sets.resize(1);
    res.vertex_sets[0].resize(n);
    std::iota(res.vertex_sets[0].begin(), res.vertex_sets[0].end(), 0);
    res.vertices.resize(1, 0);
    return res;
  }

  res.anchors = spa_anchor_pass(points, k);
  res.vertex_sets.assign(k, {});
  for (int i = 0; i < n; ++i) {
    int best_k = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      double d = (points.row(i) - points.row(res.anchors[c])).norm();
      if (d <= phi && d < best_d) {
        best_d = d;
        best_k = c;
      }
    }
    if (best_k >= 0) res.vertex_sets[best_k].push_back(i);
  }
  res.vertices.resize(k, k - 1);
  for (int c = 0; c < k; ++c) {
    // Nonempty by construction: the anchor is at distance 0 from itself.
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(k - 1);
    for (int i : res.vertex_sets[c]) acc += points.row(i);
    res.vertices.row(c) = acc / static_cast<double>(res.vertex_sets[c].size());
  }
  return res;
}

double default_radius(const Matrix& points, int k) {
  const int n = static_cast<int>(points.rows());
  if (n <= k) throw validation_error("default_radius: need n > K");
  if (k == 1) return 1.0;

  std::vector<int> anchors = spa_anchor_pass(points, k);
  double gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      gap = std::min(gap, (points.row(anchors[a]) - points.row(anchors[b])).norm());
  if (!(gap > 0.0))
    throw degeneracy_error("default_radius: coincident anchors");

  const double eta = 1e-9 * gap;
  double nearest = std::numeric_limits<double>::infinity();
  for (int a = 0; a < k; ++a) {
    for (int i = 0; i < n; ++i) {
      double d = (points.row(i) - points.row(anchors[a])).norm();
      if (d > eta) nearest = std::min(nearest, d);
    }
  }
  if (!std::isfinite(nearest)) return 0.5 * gap;
  return 0.5 * std::min(gap, nearest);
}

std::vector<int> match_permutation(const Matrix& est, const Matrix& truth) {
  const int k = static_cast<int>(est.rows());
  if (truth.rows() != k || truth.cols() != est.cols())
    throw validation_error("match_permutation: shape mismatch");
  if (k > 10)
    throw validation_error("match_permutation: K > 10 not supported");

  Matrix cost(k, k);
  for (int e = 0; e < k; ++e)
    for (int t = 0; t < k; ++t)
      cost(e, t) = (est.row(e) - truth.row(t)).squaredNorm();

  std::vector<int> perm(k), best(k);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int t = 0; t < k; ++t) c += cost(perm[t], t);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace dcmm
