#include "dcmm/inference.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dcmm/errors.hpp"
#include "dcmm/rng.hpp"
#include "dcmm/stats.hpp"

namespace dcmm {

Matrix sigma_matrix(const std::vector<PairIK>& pairs, const InfluenceSet& infl,
                    const InferenceContext& ctx) {
  const int r = static_cast<int>(pairs.size());
  if (r == 0) throw validation_error("sigma_matrix: no pairs");
  std::vector<const Matrix*> mats(r);
  for (int j = 0; j < r; ++j) {
    auto it = infl.cpi.find({pairs[j].node, pairs[j].community});
    if (it == infl.cpi.end())
      throw validation_error("sigma_matrix: influence matrix missing for pair (" +
                             std::to_string(pairs[j].node) + "," +
                             std::to_string(pairs[j].community) + ")");
    mats[j] = &it->second;
  }
  Matrix sigma(r, r);
  for (int j = 0; j < r; ++j) {
    sigma(j, j) = variance_tr(*mats[j], ctx);
    for (int l = j + 1; l < r; ++l) {
      double v = covariance_tr(*mats[j], *mats[l], ctx);
      sigma(j, l) = v;
      sigma(l, j) = v;
    }
  }
  return sigma;
}

TestReport closest_community_test(int node, const MembershipEstimate& est,
                                  const InferenceContext& ctx, double alpha) {
  const int k = ctx.k;
  if (k < 2) throw validation_error("closest_community_test: need K >= 2");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw validation_error("closest_community_test: alpha must lie in (0,1)");
  if (node < 0 || node >= ctx.n)
    throw validation_error("closest_community_test: node out of range");

  std::vector<Matrix> cpis(k);
  for (int c = 0; c < k; ++c) cpis[c] = cpi_dense(ctx, node, c);

  Matrix sd(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      double v = variance_tr(cpis[a] - cpis[b], ctx);
      if (!(v > 0.0))
        throw degeneracy_error("closest_community_test: zero variance for pair (" +
                               std::to_string(a) + "," + std::to_string(b) + ")");
      sd(a, b) = sd(b, a) = std::sqrt(v);
    }
  }

  TestReport rep;
  rep.kind = TestKind::ClosestCommunity;
  rep.alpha = alpha;
  rep.node_i = node;
  rep.margins.assign(k, 0.0);
  double zstar = stats::normal_quantile(1.0 - alpha / (k - 1));
  double best = -std::numeric_limits<double>::infinity();
  int best_k = -1;
  for (int c = 0; c < k; ++c) {
    double margin = std::numeric_limits<double>::infinity();
    for (int l = 0; l < k; ++l) {
      if (l == c) continue;
      double z = (est.pi_hat(node, c) - est.pi_hat(node, l)) / sd(c, l);
      margin = std::min(margin, z);
    }
    rep.margins[c] = margin;
    if (margin > best) {
      best = margin;
      best_k = c;
    }
  }
  rep.statistic = best;
  rep.p_value = std::min(1.0, std::max(0.0, (k - 1) * (1.0 - stats::normal_cdf(best))));
  if (best > zstar) {
    rep.rejected_community = best_k;
    rep.rejected = true;
  }
  return rep;
}

RankInterval rank_ci(int node, int community, const MembershipEstimate& est,
                     const InferenceContext& ctx, int bootstrap_draws, double alpha,
                     std::uint64_t seed) {
  const int n = ctx.n;
  const int k = ctx.k;
  if (n < 2) throw validation_error("rank_ci: need n >= 2");
  if (bootstrap_draws < 50)
    throw validation_error("rank_ci: need at least 50 bootstrap draws");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw validation_error("rank_ci: alpha must lie in (0,1)");
  if (node < 0 || node >= n || community < 0 || community >= k)
    throw validation_error("rank_ci: pair out of range");
  if (ctx.w_hat.rows() != n)
    throw validation_error("rank_ci: plug-in (observed) context required");

  CpiTraces traces(ctx, community);
  Matrix ci = traces.dense(node);

  // Per competitor j: sd_j and the recentering trace tr[D_j W-hat].
  Vector sd = Vector::Zero(n);
  Vector t0 = Vector::Zero(n);
  Vector diff = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (j == node) continue;
    Matrix dj = traces.dense(j) - ci;
    double v = variance_tr(dj, ctx);
    if (!(v > 0.0))
      throw degeneracy_error("rank_ci: nonpositive variance for competitor " +
                             std::to_string(j));
    sd(j) = std::sqrt(v);
    t0(j) = dj.cwiseProduct(ctx.w_hat).sum() / sd(j);
    diff(j) = est.pi_hat(j, community) - est.pi_hat(node, community);
  }

  // Multiplier bootstrap: G symmetric iid standard normal on the upper
  // triangle including the diagonal; entries drawn row-major.
  rng::Engine eng(seed);
  const double pair_count = 0.5 * (static_cast<double>(n) * n + n);
  Matrix g(n, n);
  Matrix m(n, n);
  std::vector<double> gvals(static_cast<std::size_t>(bootstrap_draws));
  for (int b = 0; b < bootstrap_draws; ++b) {
    double gsum = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p; q < n; ++q) {
        double v = eng.normal();
        gsum += v;
        g(p, q) = v;
        g(q, p) = v;
      }
    }
    double gbar = gsum / pair_count;
    m = ctx.w_hat.cwiseProduct(g);
    CpiTraces::Products prod = traces.products(m);
    double ti = traces.trace(node, prod);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == node) continue;
      double val = (traces.trace(j, prod) - ti) / sd(j) - gbar * t0(j);
      worst = std::max(worst, std::abs(val));
    }
    gvals[static_cast<std::size_t>(b)] = worst;
  }
  std::sort(gvals.begin(), gvals.end());
  int idx = static_cast<int>(std::ceil((1.0 - alpha) * bootstrap_draws)) - 1;
  idx = std::min(std::max(idx, 0), bootstrap_draws - 1);
  double c_quantile = gvals[static_cast<std::size_t>(idx)];

  int below = 0;
  int above = 0;
  for (int j = 0; j < n; ++j) {
    if (j == node) continue;
    if (diff(j) - c_quantile * sd(j) > 0.0) ++above;  // pi_j(k) > pi_i(k)
    if (diff(j) + c_quantile * sd(j) < 0.0) ++below;  // pi_j(k) < pi_i(k)
  }

  RankInterval out;
  out.node = node;
  out.community = community;
  out.lower = 1 + above;
  out.upper = n - below;
  out.alpha = alpha;
  out.c_quantile = c_quantile;
  out.b_draws = bootstrap_draws;
  return out;
}

double hotelling_statistic(const Vector& d, const Matrix& s) {
  const int m = static_cast<int>(d.size());
  if (s.rows() != m || s.cols() != m)
    throw validation_error("hotelling_statistic: shape mismatch");
  Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(m - 1);
  if (!(smin > 0.0) || smax / smin >= 1e12)
    throw degeneracy_error("hotelling_statistic: contrast covariance is singular");
  Vector x = svd.solve(d);
  return d.dot(x);
}

TestReport two_node_test(int node_i, int node_j, const MembershipEstimate& est,
                         const InferenceContext& ctx, double alpha) {
  const int k = ctx.k;
  if (node_i == node_j) throw validation_error("two_node_test: need distinct nodes");
  if (k < 2) throw validation_error("two_node_test: need K >= 2");
  if (node_i < 0 || node_i >= ctx.n || node_j < 0 || node_j >= ctx.n)
    throw validation_error("two_node_test: node out of range");

  std::vector<PairIK> pairs;
  for (int c = 0; c < k - 1; ++c) pairs.push_back({node_i, c});
  for (int c = 0; c < k - 1; ++c) pairs.push_back({node_j, c});

  std::vector<Matrix> cpis(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p)
    cpis[p] = cpi_dense(ctx, pairs[p].node, pairs[p].community);
  const int r = static_cast<int>(pairs.size());
  Matrix sigma(r, r);
  for (int a = 0; a < r; ++a) {
    sigma(a, a) = variance_tr(cpis[static_cast<std::size_t>(a)], ctx);
    for (int b = a + 1; b < r; ++b) {
      double v = covariance_tr(cpis[static_cast<std::size_t>(a)],
                               cpis[static_cast<std::size_t>(b)], ctx);
      sigma(a, b) = v;
      sigma(b, a) = v;
    }
  }
  // T = [I, -I]; T Sigma T' in blocks.
  const int m = k - 1;
  Matrix s = sigma.topLeftCorner(m, m) - sigma.topRightCorner(m, m) -
             sigma.bottomLeftCorner(m, m) + sigma.bottomRightCorner(m, m);
  Vector d = (est.pi_hat.row(node_i).head(m) - est.pi_hat.row(node_j).head(m))
                 .transpose();

  TestReport rep;
  rep.kind = TestKind::TwoNode;
  rep.alpha = alpha;
  rep.node_i = node_i;
  rep.node_j = node_j;
  rep.statistic = hotelling_statistic(d, s);
  rep.p_value = stats::chisq_survival(rep.statistic, m);
  rep.rejected = rep.p_value < alpha;
  return rep;
}

double standardized_stat(int node, int community, const MembershipEstimate& est,
                         const InferenceContext& ctx, double truth) {
  Matrix c = cpi_dense(ctx, node, community);
  double v = variance_tr(c, ctx);
  if (!(v > 0.0))
    throw degeneracy_error("standardized_stat: nonpositive plug-in variance");
  return (est.pi_hat(node, community) - truth) / std::sqrt(v);
}

}  // namespace dcmm
