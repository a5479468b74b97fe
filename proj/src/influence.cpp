#include "dcmm/influence.hpp"

#include <Eigen/LU>
#include <cmath>
#include <string>

#include "dcmm/errors.hpp"

namespace dcmm {

namespace {

double guarded_u1(const InferenceContext& ctx, int i) {
  double v = ctx.u(i, 0);
  double scale = ctx.u.col(0).cwiseAbs().maxCoeff();
  if (std::abs(v) <= 1e-12 * scale)
    throw degeneracy_error("influence: vanishing (u1)_i at node " + std::to_string(i));
  return v;
}

double guarded_lambda1(const InferenceContext& ctx) {
  double l1 = ctx.lambdas(0);
  double scale = ctx.lambdas.cwiseAbs().maxCoeff();
  if (std::abs(l1) <= 1e-12 * scale || l1 == 0.0)
    throw degeneracy_error("influence: vanishing lambda_1");
  return l1;
}

double guarded_s(const InferenceContext& ctx, int i) {
  double s = 0.0, abs_s = 0.0;
  for (int m = 0; m < ctx.k; ++m) {
    double term = ctx.a(i, m) / ctx.c(m);
    s += term;
    abs_s += std::abs(term);
  }
  if (std::abs(s) <= 1e-12 * abs_s)
    throw degeneracy_error("influence: vanishing pi normalizer at node " +
                           std::to_string(i));
  return s;
}

void check_c(const InferenceContext& ctx) {
  for (int m = 0; m < ctx.k; ++m)
    if (!(ctx.c(m) > 0.0))
      throw degeneracy_error("influence: nonpositive c_k for community " +
                             std::to_string(m));
}

// C^r_{i,l}: the trace identity (dr_i)_l = tr[C^r W] pins the first two
// coefficients to 1/lambda_{l+2}, the inverse of the Lambda-bar entry.
Matrix cr_dense(const InferenceContext& ctx, int i, int l) {
  const int n = ctx.n;
  double u1i = guarded_u1(ctx, i);
  double l1 = guarded_lambda1(ctx);
  double lbar = ctx.lambdas(l + 1);
  Matrix m = Matrix::Zero(n, n);
  m.row(i) = (1.0 / (lbar * u1i)) * ctx.u.col(l + 1).transpose();
  m.noalias() -= (1.0 / lbar) * ctx.u.col(0) * ctx.n_ubar.col(l).transpose();
  m.noalias() -= (ctx.r(i, l) / (u1i * l1)) * ctx.u.col(0) * ctx.n_mat.row(i);
  return m;
}

// Per-node, per-community coefficient bundle for C^pi assembly/traces.
struct CpiCoeffs {
  Vector coef_a;   // K-1
  double coef_b = 0.0;
  double coef_q = 0.0;
  Vector coef_nu;  // K-1
  Matrix coef_cb;  // K x (K-1)
};

CpiCoeffs cpi_coeffs(const InferenceContext& ctx, int j, int kk) {
  const int k = ctx.k;
  check_c(ctx);
  double u1j = guarded_u1(ctx, j);
  double l1 = guarded_lambda1(ctx);
  double s = guarded_s(ctx, j);
  double inv_s2 = 1.0 / (s * s);

  // Coefficient of C^a_{j,m} inside C^pi_{j,kk}.
  Vector sa = Vector::Zero(k);
  for (int l = 0; l < k; ++l) {
    if (l == kk) continue;
    sa(kk) += inv_s2 * ctx.a(j, l) / (ctx.c(kk) * ctx.c(l));
    sa(l) -= inv_s2 * ctx.a(j, kk) / (ctx.c(kk) * ctx.c(l));
  }
  // Coefficient of C^r_{j,l}.
  Vector cr_coef = Vector::Zero(k - 1);
  for (int l = 0; l < k - 1; ++l)
    for (int m = 0; m < k; ++m) cr_coef(l) += sa(m) * ctx.b_aug_inv(m, l);

  CpiCoeffs co;
  co.coef_a.resize(k - 1);
  co.coef_nu.resize(k - 1);
  co.coef_cb = Matrix::Zero(k, k - 1);
  co.coef_b = 0.0;
  for (int l = 0; l < k - 1; ++l) {
    double lbar = ctx.lambdas(l + 1);
    co.coef_a(l) = cr_coef(l) / (lbar * u1j);
    co.coef_nu(l) = -cr_coef(l) / lbar;
    co.coef_b -= cr_coef(l) * ctx.r(j, l) / (u1j * l1);
    for (int t = 0; t < k; ++t) co.coef_cb(t, l) -= cr_coef(l) * ctx.a(j, t);
  }
  co.coef_q = 0.0;
  for (int l = 0; l < k; ++l) {
    if (l == kk) continue;
    double w = inv_s2 * ctx.a(j, kk) * ctx.a(j, l);
    double g = ctx.c(kk) / (2.0 * ctx.c(l)) - ctx.c(l) / (2.0 * ctx.c(kk));
    co.coef_q += w * g;
    for (int t = 0; t < k - 1; ++t) {
      double lt = ctx.lambdas(t + 1);
      co.coef_cb(kk, t) += w * ctx.vertices(kk, t) * lt * ctx.c(kk) / ctx.c(l);
      co.coef_cb(l, t) -= w * ctx.vertices(l, t) * lt * ctx.c(l) / ctx.c(kk);
    }
  }
  return co;
}

Matrix cpi_dense_from_coeffs(const InferenceContext& ctx, int j, const CpiCoeffs& co) {
  const int n = ctx.n;
  const int k = ctx.k;
  double l1 = guarded_lambda1(ctx);
  Matrix m = Matrix::Zero(n, n);

  Vector right = co.coef_b * ctx.n_mat.col(j);
  right += co.coef_q * (ctx.u.col(0) + 2.0 * ctx.nu1);
  for (int l = 0; l < k - 1; ++l) {
    double coef = co.coef_nu(l);
    for (int t = 0; t < k; ++t)
      coef -= co.coef_cb(t, l) / ctx.lambdas(l + 1);
    right += coef * ctx.n_ubar.col(l);
    for (int t = 0; t < k; ++t)
      right -= (co.coef_cb(t, l) / l1) * ctx.nz[t].col(l);
  }
  m.noalias() += ctx.u.col(0) * right.transpose();

  for (int t = 0; t < k; ++t) {
    Vector rt = Vector::Zero(n);
    for (int l = 0; l < k - 1; ++l)
      rt += (co.coef_cb(t, l) / ctx.lambdas(l + 1)) * ctx.u.col(l + 1);
    m.noalias() += ctx.vbar.col(t) * rt.transpose();
  }
  for (int l = 0; l < k - 1; ++l)
    m.row(j) += co.coef_a(l) * ctx.u.col(l + 1).transpose();
  return m;
}

}  // namespace

InferenceContext make_ground_truth_context(const DcmmParams& params) {
  GroundTruthQuantities gt = ground_truth_quantities(params);
  Matrix h = build_h(params);
  for (int i = 0; i < params.n; ++i)
    for (int j = 0; j < params.n; ++j)
      if (h(i, j) < -1e-12 || h(i, j) > 1.0 + 1e-12)
        throw validation_error("make_ground_truth_context: H entry outside [0,1]");

  InferenceContext ctx;
  ctx.source = SpectralSource::GroundTruth;
  ctx.n = params.n;
  ctx.k = params.k;
  ctx.lambdas = gt.spec.lambdas;
  ctx.u = gt.spec.u;
  PlugInLowRank plug = plug_in_ctx(gt.spec);
  ctx.n_mat = std::move(plug.n_hat);
  ctx.h_var = h.cwiseMax(0.0).cwiseMin(1.0);
  ctx.r = gt.embedding;
  ctx.vertices = gt.b_star;
  ctx.vertex_sets = gt.pure_sets;
  ctx.b_aug = gt.b_aug;
  ctx.b_aug_inv = gt.b_aug.partialPivLu().inverse();
  ctx.a = gt.a_star;
  ctx.c = gt.c_star;
  ctx.self_loop = params.self_loop;
  finalize_context_caches(ctx);
  return ctx;
}

void finalize_context_caches(InferenceContext& ctx) {
  const int n = ctx.n;
  const int k = ctx.k;
  ctx.nu1.noalias() = ctx.n_mat * ctx.u.col(0);
  ctx.n_ubar.resize(n, k - 1);
  for (int l = 0; l < k - 1; ++l)
    ctx.n_ubar.col(l).noalias() = ctx.n_mat * ctx.u.col(l + 1);

  ctx.vbar = Matrix::Zero(n, k);
  ctx.nz.assign(k, Matrix::Zero(n, k - 1));
  for (int t = 0; t < k; ++t) {
    const auto& set = ctx.vertex_sets[t];
    if (set.empty())
      throw validation_error("influence: empty vertex set for community " +
                             std::to_string(t));
    double inv = 1.0 / static_cast<double>(set.size());
    Matrix z = Matrix::Zero(n, k - 1);
    for (int j : set) {
      double u1j = guarded_u1(ctx, j);
      ctx.vbar(j, t) += inv / u1j;
      for (int l = 0; l < k - 1; ++l) z(j, l) = inv * ctx.r(j, l) / u1j;
    }
    ctx.nz[t].noalias() = ctx.n_mat * z;
  }
}

InfluenceSet influence_matrices(const InferenceContext& ctx,
                                const std::vector<PairIK>& pairs) {
  const int k = ctx.k;
  check_c(ctx);
  guarded_lambda1(ctx);
  InfluenceSet out;
  out.pairs = pairs;

  // C^b once per (community, component): literal average of C^r over V_t.
  for (int t = 0; t < k; ++t) {
    const auto& set = ctx.vertex_sets[t];
    for (int l = 0; l < k - 1; ++l) {
      Matrix acc = Matrix::Zero(ctx.n, ctx.n);
      for (int j : set) acc += cr_dense(ctx, j, l);
      out.cb[{t, l}] = acc / static_cast<double>(set.size());
    }
  }

  for (const PairIK& pair : pairs) {
    const int i = pair.node;
    const int kk = pair.community;
    if (i < 0 || i >= ctx.n || kk < 0 || kk >= k)
      throw validation_error("influence_matrices: pair out of range");
    for (int l = 0; l < k - 1; ++l)
      if (!out.cr.count({i, l})) out.cr[{i, l}] = cr_dense(ctx, i, l);
    // C^a for all communities of node i (C^pi mixes them).
    for (int m = 0; m < k; ++m) {
      if (out.ca.count({i, m})) continue;
      Matrix acc = Matrix::Zero(ctx.n, ctx.n);
      for (int l = 0; l < k - 1; ++l) {
        acc += ctx.b_aug_inv(m, l) * out.cr[{i, l}];
        for (int t = 0; t < k; ++t)
          acc -= ctx.b_aug_inv(m, l) * ctx.a(i, t) * out.cb[{t, l}];
      }
      out.ca[{i, m}] = std::move(acc);
    }
    if (out.cpi.count({i, kk})) continue;
    double s = guarded_s(ctx, i);
    Matrix q = ctx.u.col(0) * (ctx.u.col(0) + 2.0 * ctx.nu1).transpose();
    Matrix acc = Matrix::Zero(ctx.n, ctx.n);
    for (int l = 0; l < k; ++l) {
      if (l == kk) continue;
      double w = ctx.a(i, kk) * ctx.a(i, l);
      double g = ctx.c(kk) / (2.0 * ctx.c(l)) - ctx.c(l) / (2.0 * ctx.c(kk));
      acc += (g * w) * q;
      acc += (ctx.a(i, l) * out.ca[{i, kk}] - ctx.a(i, kk) * out.ca[{i, l}]) /
             (ctx.c(kk) * ctx.c(l));
      for (int t = 0; t < k - 1; ++t) {
        double lt = ctx.lambdas(t + 1);
        acc += w * (ctx.vertices(kk, t) * lt * ctx.c(kk) / ctx.c(l)) * out.cb[{kk, t}];
        acc -= w * (ctx.vertices(l, t) * lt * ctx.c(l) / ctx.c(kk)) * out.cb[{l, t}];
      }
    }
    out.cpi[{i, kk}] = acc / (s * s);
  }
  return out;
}

Matrix cpi_dense(const InferenceContext& ctx, int node, int community) {
  if (node < 0 || node >= ctx.n || community < 0 || community >= ctx.k)
    throw validation_error("cpi_dense: pair out of range");
  return cpi_dense_from_coeffs(ctx, node, cpi_coeffs(ctx, node, community));
}

CpiTraces::CpiTraces(const InferenceContext& ctx, int community)
    : ctx_(&ctx), community_(community) {
  const int n = ctx.n;
  const int k = ctx.k;
  if (community < 0 || community >= k)
    throw validation_error("CpiTraces: community out of range");
  coef_a_.resize(n, k - 1);
  coef_b_.resize(n);
  coef_q_.resize(n);
  coef_nu_.resize(n, k - 1);
  coef_cb_.resize(n, k * (k - 1));
  for (int j = 0; j < n; ++j) {
    CpiCoeffs co = cpi_coeffs(ctx, j, community);
    coef_a_.row(j) = co.coef_a.transpose();
    coef_b_(j) = co.coef_b;
    coef_q_(j) = co.coef_q;
    coef_nu_.row(j) = co.coef_nu.transpose();
    for (int t = 0; t < k; ++t)
      for (int l = 0; l < k - 1; ++l)
        coef_cb_(j, t * (k - 1) + l) = co.coef_cb(t, l);
  }
}

CpiTraces::Products CpiTraces::products(const Matrix& m) const {
  const InferenceContext& ctx = *ctx_;
  const int k = ctx.k;
  Products p;
  p.mu.noalias() = m * ctx.u;
  p.nmu1.noalias() = ctx.n_mat * p.mu.col(0);
  p.tr_q = ctx.u.col(0).dot(p.mu.col(0)) + 2.0 * ctx.nu1.dot(p.mu.col(0));
  p.tr_nu.resize(k - 1);
  for (int l = 0; l < k - 1; ++l) p.tr_nu(l) = p.mu.col(0).dot(ctx.n_ubar.col(l));
  p.tr_cb.resize(k, k - 1);
  double l1 = ctx.lambdas(0);
  for (int t = 0; t < k; ++t) {
    for (int l = 0; l < k - 1; ++l) {
      double lbar = ctx.lambdas(l + 1);
      p.tr_cb(t, l) = ctx.vbar.col(t).dot(p.mu.col(l + 1)) / lbar -
                      p.tr_nu(l) / lbar -
                      p.mu.col(0).dot(ctx.nz[t].col(l)) / l1;
    }
  }
  return p;
}

double CpiTraces::trace(int node, const Products& p) const {
  const int k = ctx_->k;
  double val = coef_q_(node) * p.tr_q + coef_b_(node) * p.nmu1(node);
  for (int l = 0; l < k - 1; ++l)
    val += coef_a_(node, l) * p.mu(node, l + 1) + coef_nu_(node, l) * p.tr_nu(l);
  for (int t = 0; t < k; ++t)
    for (int l = 0; l < k - 1; ++l)
      val += coef_cb_(node, t * (k - 1) + l) * p.tr_cb(t, l);
  return val;
}

Matrix CpiTraces::dense(int node) const {
  const int k = ctx_->k;
  CpiCoeffs co;
  co.coef_a = coef_a_.row(node).transpose();
  co.coef_b = coef_b_(node);
  co.coef_q = coef_q_(node);
  co.coef_nu = coef_nu_.row(node).transpose();
  co.coef_cb.resize(k, k - 1);
  for (int t = 0; t < k; ++t)
    for (int l = 0; l < k - 1; ++l)
      co.coef_cb(t, l) = coef_cb_(node, t * (k - 1) + l);
  return cpi_dense_from_coeffs(*ctx_, node, co);
}

Deltas first_order_deltas(const InferenceContext& ctx, const Matrix& w) {
  if (ctx.source != SpectralSource::GroundTruth)
    throw validation_error("first_order_deltas: requires a ground-truth context");
  const int n = ctx.n;
  const int k = ctx.k;
  if (w.rows() != n || w.cols() != n)
    throw validation_error("first_order_deltas: W must be n x n");
  double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw validation_error("first_order_deltas: W must be symmetric");
  check_c(ctx);
  double l1 = guarded_lambda1(ctx);

  Deltas d;
  Vector wu1 = w * ctx.u.col(0);
  Vector nwu1 = ctx.n_mat * wu1;
  Matrix wu = w * ctx.u.rightCols(k - 1);
  Vector t = ctx.u.rightCols(k - 1).transpose() * nwu1;  // t_l = u1' W N ubar_l

  d.dr.resize(n, k - 1);
  for (int i = 0; i < n; ++i) {
    double u1i = guarded_u1(ctx, i);
    for (int l = 0; l < k - 1; ++l) {
      double wi = (wu(i, l) - ctx.u(i, 0) * t(l)) / ctx.lambdas(l + 1);
      d.dr(i, l) = (wi - nwu1(i) * ctx.r(i, l) / l1) / u1i;
    }
  }

  d.db = Matrix::Zero(k, k - 1);
  for (int c = 0; c < k; ++c) {
    for (int i : ctx.vertex_sets[c]) d.db.row(c) += d.dr.row(i);
    d.db.row(c) /= static_cast<double>(ctx.vertex_sets[c].size());
  }

  Matrix delta_b_aug = Matrix::Zero(k, k);  // columns (db_t, 0)
  for (int t2 = 0; t2 < k; ++t2)
    for (int l = 0; l < k - 1; ++l) delta_b_aug(l, t2) = d.db(t2, l);
  Matrix p2 = ctx.b_aug_inv * delta_b_aug;
  d.da.resize(n, k);
  for (int i = 0; i < n; ++i) {
    Vector lhs = ctx.b_aug_inv.leftCols(k - 1) * d.dr.row(i).transpose();
    Vector rhs = p2 * ctx.a.row(i).transpose();
    d.da.row(i) = (lhs - rhs).transpose();
  }

  double tau = ctx.u.col(0).dot(wu1) + 2.0 * ctx.nu1.dot(wu1);
  Vector qv(k);  // b_t' Lambda-bar db_t
  for (int t2 = 0; t2 < k; ++t2) {
    qv(t2) = 0.0;
    for (int l = 0; l < k - 1; ++l)
      qv(t2) += ctx.vertices(t2, l) * ctx.lambdas(l + 1) * d.db(t2, l);
  }

  d.dpi.resize(n, k);
  for (int i = 0; i < n; ++i) {
    double s = guarded_s(ctx, i);
    double inv_s2 = 1.0 / (s * s);
    for (int kk = 0; kk < k; ++kk) {
      double acc = 0.0;
      for (int l = 0; l < k; ++l) {
        if (l == kk) continue;
        double wgt = ctx.a(i, kk) * ctx.a(i, l);
        double g = ctx.c(kk) / (2.0 * ctx.c(l)) - ctx.c(l) / (2.0 * ctx.c(kk));
        acc += tau * g * wgt;
        acc += (d.da(i, kk) * ctx.a(i, l) - d.da(i, l) * ctx.a(i, kk)) /
               (ctx.c(kk) * ctx.c(l));
        acc += (qv(kk) * ctx.c(kk) / ctx.c(l) - qv(l) * ctx.c(l) / ctx.c(kk)) * wgt;
      }
      d.dpi(i, kk) = inv_s2 * acc;
    }
  }
  return d;
}

double variance_tr(const Matrix& m, const InferenceContext& ctx) {
  const int n = ctx.n;
  if (m.rows() != n || m.cols() != n)
    throw validation_error("variance_tr: M must be n x n");
  double v = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double s = m(i, j) + m(j, i);
      double h = ctx.h_var(i, j);
      v += s * s * h * (1.0 - h);
    }
    if (ctx.self_loop) {
      double h = ctx.h_var(i, i);
      v += m(i, i) * m(i, i) * h * (1.0 - h);
    }
  }
  return v;
}

double covariance_tr(const Matrix& m1, const Matrix& m2, const InferenceContext& ctx) {
  const int n = ctx.n;
  if (m1.rows() != n || m1.cols() != n || m2.rows() != n || m2.cols() != n)
    throw validation_error("covariance_tr: matrices must be n x n");
  double v = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double h = ctx.h_var(i, j);
      v += (m1(i, j) + m1(j, i)) * (m2(i, j) + m2(j, i)) * h * (1.0 - h);
    }
    if (ctx.self_loop) {
      double h = ctx.h_var(i, i);
      v += m1(i, i) * m2(i, i) * h * (1.0 - h);
    }
  }
  return v;
}

}  // namespace dcmm
