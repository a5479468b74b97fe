#pragma once

#include "dcmm/spectral.hpp"

namespace dcmm {

// The (K-1)-dimensional SCORE embedding: row i is
// [u_2(i)/u_1(i), ..., u_K(i)/u_1(i)].
struct Embedding {
  int n = 0;
  int k = 0;
  Matrix points;  // n x (K-1)
  Vector u1;      // n
  double min_abs_u1 = 0.0;
};

// Fails loudly on a small leading-eigenvector entry instead of emitting an
// exploded point; the offending node is named. denom_tol <= 0 selects the
// default rule 1e-8 * max_i |u1(i)|.
Embedding score_embedding(const SpectralContext& spec, double denom_tol = -1.0);

}  // namespace dcmm
