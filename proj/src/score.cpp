#include "dcmm/score.hpp"

#include <cmath>
#include <string>

#include "dcmm/errors.hpp"

namespace dcmm {

Embedding score_embedding(const SpectralContext& spec, double denom_tol) {
  const int n = spec.n;
  const int k = spec.k;
  Embedding emb;
  emb.n = n;
  emb.k = k;
  emb.u1 = spec.u.col(0);
  double max_abs = emb.u1.cwiseAbs().maxCoeff();
  double tol = denom_tol > 0.0 ? denom_tol : 1e-8 * max_abs;
  emb.min_abs_u1 = emb.u1.cwiseAbs().minCoeff();
  // K = 1 forms no ratios, so no denominator can degenerate.
  for (int i = 0; i < n && k > 1; ++i) {
    if (std::abs(emb.u1(i)) <= tol)
      throw degeneracy_error(
          "score_embedding: leading eigenvector entry below tolerance at node " +
          std::to_string(i));
  }
  emb.points.resize(n, k - 1);
  for (int i = 0; i < n; ++i)
    for (int l = 1; l < k; ++l) emb.points(i, l - 1) = spec.u(i, l) / emb.u1(i);
  return emb;
}

}  // namespace dcmm
