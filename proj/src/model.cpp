#include "dcmm/model.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numeric>
#include <vector>

#include "dcmm/errors.hpp"
#include "dcmm/rng.hpp"

namespace dcmm {

namespace {
constexpr double kRowSumTol = 1e-12;
constexpr double kPureTol = 1e-12;
}  // namespace

bool is_pure_row(const Matrix& pi, int i, int k) {
  return pi(i, k) >= 1.0 - kPureTol;
}

void validate(const DcmmParams& params) {
  const int n = params.n;
  const int k = params.k;
  if (n < 1 || k < 1) throw validation_error("model: need n >= 1 and k >= 1");
  if (params.theta.size() != n) throw validation_error("model: theta must have length n");
  if (params.pi.rows() != n || params.pi.cols() != k)
    throw validation_error("model: pi must be n x k");
  if (params.p.rows() != k || params.p.cols() != k)
    throw validation_error("model: p must be k x k");

  for (int i = 0; i < n; ++i) {
    if (!(params.theta(i) > 0.0))
      throw validation_error("model: theta must be strictly positive (node " +
                             std::to_string(i) + ")");
    double row_sum = 0.0;
    for (int c = 0; c < k; ++c) {
      if (params.pi(i, c) < 0.0)
        throw validation_error("model: pi rows must be nonnegative (node " +
                               std::to_string(i) + ")");
      row_sum += params.pi(i, c);
    }
    if (std::abs(row_sum - 1.0) > kRowSumTol)
      throw validation_error("model: pi row must sum to 1 (node " + std::to_string(i) + ")");
  }
  for (int c = 0; c < k; ++c) {
    bool has_pure = false;
    for (int i = 0; i < n && !has_pure; ++i) has_pure = is_pure_row(params.pi, i, c);
    if (!has_pure)
      throw validation_error("model: community " + std::to_string(c) +
                             " has no pure node");
  }
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      double v = params.p(a, b);
      if (v < 0.0 || v > 1.0)
        throw validation_error("model: p entries must lie in [0,1]");
      if (std::abs(v - params.p(b, a)) > 1e-12)
        throw validation_error("model: p must be symmetric");
    }
  }
  Eigen::JacobiSVD<Matrix> svd(params.p);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(k - 1);
  if (!(smin > 1e-12 * smax))
    throw validation_error("model: p must be nonsingular");
}

Matrix build_h(const DcmmParams& params) {
  validate(params);
  Matrix scaled = params.theta.asDiagonal() * params.pi;  // Theta Pi
  Matrix h = scaled * params.p * scaled.transpose();
  // Mirror the upper triangle so symmetry is exact, not just to rounding.
  for (int i = 0; i < params.n; ++i)
    for (int j = i + 1; j < params.n; ++j) h(j, i) = h(i, j);
  return h;
}

void validate(const AdjacencyMatrix& adj) {
  if (adj.entries.rows() != adj.n || adj.entries.cols() != adj.n)
    throw validation_error("adjacency: entries must be n x n");
  for (int i = 0; i < adj.n; ++i) {
    for (int j = i; j < adj.n; ++j) {
      double v = adj.entries(i, j);
      if (v != 0.0 && v != 1.0)
        throw validation_error("adjacency: entries must be 0 or 1");
      if (v != adj.entries(j, i))
        throw validation_error("adjacency: matrix must be symmetric");
    }
    if (!adj.self_loop && adj.entries(i, i) != 0.0)
      throw validation_error("adjacency: self-loop at node " + std::to_string(i) +
                             " but self-loop mode is off");
  }
}

AdjacencyMatrix sample_adjacency(const DcmmParams& params, std::uint64_t seed) {
  Matrix h = build_h(params);
  const int n = params.n;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (h(i, j) < -1e-12 || h(i, j) > 1.0 + 1e-12)
        throw validation_error("model: H entry outside [0,1] at (" + std::to_string(i) +
                               "," + std::to_string(j) + "); P or theta too large");
    }
  }
  AdjacencyMatrix adj;
  adj.n = n;
  adj.self_loop = params.self_loop;
  adj.entries = Matrix::Zero(n, n);
  rng::Engine eng(seed);
  // Fixed draw order: row-major over the upper triangle, diagonal included
  // only in self-loop mode.
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (i == j && !params.self_loop) continue;
      double p = std::min(1.0, std::max(0.0, h(i, j)));
      double v = eng.bernoulli(p) ? 1.0 : 0.0;
      adj.entries(i, j) = v;
      adj.entries(j, i) = v;
    }
  }
  return adj;
}

ThetaSetting theta_setting_from_string(const std::string& s) {
  if (s == "const06") return ThetaSetting::Const06;
  if (s == "uniform") return ThetaSetting::Uniform;
  if (s == "const09") return ThetaSetting::Const09;
  throw validation_error("unknown theta setting '" + s +
                         "' (expected const06 | uniform | const09)");
}

std::string to_string(ThetaSetting s) {
  switch (s) {
    case ThetaSetting::Const06: return "const06";
    case ThetaSetting::Uniform: return "uniform";
    case ThetaSetting::Const09: return "const09";
  }
  return "?";
}

DcmmParams synthetic_config(ThetaSetting setting, int n, std::uint64_t seed) {
  if (n < 4) throw validation_error("synthetic_config: need n >= 4");
  const int k = 2;
  rng::Engine eng(seed);

  // Memberships first: rows 0 and 1 are the pure nodes, the rest interior.
  std::vector<double> first(n);
  first[0] = 1.0;
  first[1] = 0.0;
  for (int i = 2; i < n; ++i) first[i] = eng.uniform(0.1, 0.9);
  // Then the row shuffle.
  eng.shuffle(first);
  // Then theta.
  Vector theta(n);
  switch (setting) {
    case ThetaSetting::Const06: theta.setConstant(0.6); break;
    case ThetaSetting::Const09: theta.setConstant(0.9); break;
    case ThetaSetting::Uniform:
      for (int i = 0; i < n; ++i) theta(i) = eng.uniform(0.3, 0.9);
      break;
  }

  DcmmParams params;
  params.n = n;
  params.k = k;
  params.theta = theta;
  params.pi.resize(n, k);
  for (int i = 0; i < n; ++i) {
    params.pi(i, 0) = first[i];
    params.pi(i, 1) = 1.0 - first[i];
  }
  params.p.resize(k, k);
  params.p << 1.0, 0.2, 0.2, 1.0;
  params.self_loop = false;
  validate(params);
  return params;
}

}  // namespace dcmm
