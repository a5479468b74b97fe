#include "dcmm/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dcmm/errors.hpp"

namespace dcmm {

SpectralContext eigen_topk(const Matrix& m, int k, SpectralSource source) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw validation_error("eigen_topk: matrix must be square");
  if (k < 1) throw validation_error("eigen_topk: need K >= 1");
  if (k > n) throw validation_error("eigen_topk: K exceeds matrix dimension");
  double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw validation_error("eigen_topk: input asymmetric beyond tolerance");

  Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw degeneracy_error("eigen_topk: eigensolver failed to converge");

  const Vector& vals = solver.eigenvalues();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Largest magnitude first; ties at the K-th slot keep the more positive
  // value, then the smaller index.
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    double ma = std::abs(vals(a)), mb = std::abs(vals(b));
    if (ma != mb) return ma > mb;
    if (vals(a) != vals(b)) return vals(a) > vals(b);
    return a < b;
  });
  std::vector<int> sel(idx.begin(), idx.begin() + k);
  std::sort(sel.begin(), sel.end(), [&](int a, int b) {
    if (vals(a) != vals(b)) return vals(a) > vals(b);
    return a < b;
  });

  SpectralContext ctx;
  ctx.n = n;
  ctx.k = k;
  ctx.source = source;
  ctx.lambdas.resize(k);
  ctx.u.resize(n, k);
  for (int j = 0; j < k; ++j) {
    ctx.lambdas(j) = vals(sel[j]);
    ctx.u.col(j) = solver.eigenvectors().col(sel[j]);
  }
  double s = ctx.u.col(0).sum();
  if (s < 0.0) {
    ctx.u.col(0) = -ctx.u.col(0);
  } else if (s == 0.0) {
    for (int i = 0; i < n; ++i) {
      if (ctx.u(i, 0) != 0.0) {
        if (ctx.u(i, 0) < 0.0) ctx.u.col(0) = -ctx.u.col(0);
        break;
      }
    }
  }
  ctx.u1_sign_fixed = true;
  return ctx;
}

PlugInLowRank plug_in_ctx(const SpectralContext& spec) {
  const int n = spec.n;
  const int k = spec.k;
  const double l1 = spec.lambdas(0);
  for (int j = 1; j < k; ++j) {
    double lj = spec.lambdas(j);
    if (std::abs(l1 - lj) <= 1e-12 * (std::abs(l1) + std::abs(lj)))
      throw degeneracy_error("plug_in_ctx: singular gap, lambda_1 ~ lambda_" +
                             std::to_string(j + 1));
  }
  PlugInLowRank out;
  out.h_hat = spec.u * spec.lambdas.asDiagonal() * spec.u.transpose();
  out.n_hat = Matrix::Identity(n, n) - spec.u * spec.u.transpose();
  for (int j = 1; j < k; ++j) {
    double coef = l1 / (l1 - spec.lambdas(j));
    out.n_hat.noalias() += coef * spec.u.col(j) * spec.u.col(j).transpose();
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      out.h_hat(j, i) = out.h_hat(i, j);
      out.n_hat(j, i) = out.n_hat(i, j);
    }
  }
  return out;
}

}  // namespace dcmm
