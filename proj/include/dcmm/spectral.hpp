#pragma once

#include "dcmm/model.hpp"

namespace dcmm {

enum class SpectralSource { Observed, GroundTruth };

// Top-K-by-magnitude eigenpairs, re-sorted descending by signed value; the
// leading eigenvector's sign is fixed so its entry sum is nonnegative.
struct SpectralContext {
  int n = 0;
  int k = 0;
  Vector lambdas;  // K
  Matrix u;        // n x K, column j pairs with lambdas(j)
  bool u1_sign_fixed = false;
  SpectralSource source = SpectralSource::Observed;
};

SpectralContext eigen_topk(const Matrix& m, int k,
                           SpectralSource source = SpectralSource::Observed);

// H_hat = sum_j lambda_j u_j u_j^T and the rank-K closure of the N matrix:
// N_hat = (I - sum_{j<=K} u_j u_j^T) + sum_{j=2..K} [l1/(l1-l_j)] u_j u_j^T.
// Eigenvalues past K are treated as 0, so their coefficient is exactly 1;
// this reproduces the full-spectrum N whenever the source matrix has rank K.
struct PlugInLowRank {
  Matrix h_hat;  // n x n
  Matrix n_hat;  // n x n
};

PlugInLowRank plug_in_ctx(const SpectralContext& spec);

}  // namespace dcmm
