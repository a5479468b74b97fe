#pragma once

#include <vector>

#include "dcmm/model.hpp"
#include "dcmm/rng.hpp"

namespace dcmm::test {

inline Matrix random_symmetric(int n, rng::Engine& eng, double scale = 1.0) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = scale * (2.0 * eng.uniform01() - 1.0);
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

// A valid DCMM instance with pure_per_community pure nodes for every
// community and interior memberships elsewhere.
inline DcmmParams random_params(int n, int k, rng::Engine& eng,
                                int pure_per_community = 2,
                                double theta_lo = 0.4, double theta_hi = 0.9) {
  DcmmParams params;
  params.n = n;
  params.k = k;
  params.pi = Matrix::Zero(n, k);
  int row = 0;
  for (int c = 0; c < k; ++c)
    for (int p = 0; p < pure_per_community; ++p) params.pi(row++, c) = 1.0;
  // Interior rows lean toward a random vertex so the contrast eigenvalues
  // stay well above the sampling-noise spectral radius.
  for (; row < n; ++row) {
    int dominant = static_cast<int>(eng.below(static_cast<std::uint64_t>(k)));
    double beta = eng.uniform(0.3, 0.9);
    for (int c = 0; c < k; ++c)
      params.pi(row, c) = (1.0 - beta) / k + (c == dominant ? beta : 0.0);
  }
  params.theta.resize(n);
  for (int i = 0; i < n; ++i) params.theta(i) = eng.uniform(theta_lo, theta_hi);
  // Unit diagonal (the usual DCMM identifiability normalization; theta
  // carries the scale) with weak off-diagonal connectivity.
  params.p = Matrix::Identity(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      double v = 0.1 + 0.1 * eng.uniform01();
      params.p(a, b) = v;
      params.p(b, a) = v;
    }
  params.self_loop = false;
  return params;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace dcmm::test
