#pragma once

#include <vector>

#include "dcmm/score.hpp"
#include "dcmm/vertex_hunt.hpp"

namespace dcmm {

// Coordinates a with sum(a) = 1 and sum_k a_k b_k = point, i.e. the solution
// of B a = (point, 1) with B the augmented vertex matrix.
Vector barycentric_coords(const Vector& point, const Matrix& vertices);

// B = [[b_1 ... b_K], [1 ... 1]] (K x K) for vertices given as K rows.
Matrix augmented_vertex_matrix(const Matrix& vertices);

struct MembershipEstimate {
  Matrix pi_hat;             // n x K, rows sum to 1; negative entries retained
  Matrix a_hat;              // n x K, rows sum to 1
  Vector c_hat;              // K, strictly positive
  Vector lambdas;            // K eigenvalues used
  Matrix b_aug;              // K x K augmented vertex matrix
  Vector raw_negative_mass;  // n, per-node sum of negative pi_hat entries
};

// Barycentric solve, the c_k scaling, and the final normalization. Negative
// entries are kept (the distribution theory needs the raw values);
// clipped_pi gives the flagged clip-and-renormalize variant.
MembershipEstimate reconstruct_pi(const Embedding& emb, const VertexHuntResult& hunt,
                                  const Vector& lambdas);

Matrix clipped_pi(const MembershipEstimate& est);

// Population counterparts used by oracles and influence matrices.
struct GroundTruthQuantities {
  SpectralContext spec;                     // eigenpairs of H
  Matrix embedding;                         // n x (K-1), rows r*_i
  std::vector<std::vector<int>> pure_sets;  // V_k
  Matrix b_star;                            // K x (K-1)
  Matrix b_aug;                             // K x K
  Matrix a_star;                            // n x K
  Vector c_star;                            // K
};

GroundTruthQuantities ground_truth_quantities(const DcmmParams& params);

}  // namespace dcmm
