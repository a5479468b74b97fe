#pragma once

#include <vector>

#include "dcmm/model.hpp"

namespace dcmm {

struct VertexHuntResult {
  std::vector<int> anchors;                   // K node indices picked by SPA
  std::vector<std::vector<int>> vertex_sets;  // K disjoint clusters V_k
  Matrix vertices;                            // K x (K-1), b_k = mean over V_k
  double radius = 0.0;                        // the phi used
};

// Successive projection on augmented vectors Z_i = (1, r_i^T)^T: K rounds of
// argmax-norm selection followed by projection onto the orthogonal complement
// of the selected vector. Clusters are phi-balls around the anchor points on
// the original coordinates; a node within phi of several anchors goes to the
// nearest one. K = 1 skips hunting: single empty-dimensional vertex, V_1 = [n].
VertexHuntResult successive_projection(const Matrix& points, int k, double phi);

// phi heuristic: half of min(anchor gap, distance from an anchor to the
// nearest point that is not a copy of it). The second term keeps the balls
// from swallowing interior points when vertex clusters are tight.
double default_radius(const Matrix& points, int k);

// Min-cost assignment between two point lists (rows are points in R^d),
// minimizing total squared distance; returns perm with est.row(perm[t])
// matched to truth.row(t). Ties resolve to the lexicographically smallest
// permutation.
std::vector<int> match_permutation(const Matrix& est, const Matrix& truth);

}  // namespace dcmm
