#pragma once

#include "dcmm/influence.hpp"

namespace dcmm {

// The full estimation pass on one observed matrix: SCORE embedding, vertex
// hunting, membership reconstruction, and the plug-in inference context.
struct PipelineResult {
  SpectralContext spec;
  Embedding emb;
  VertexHuntResult hunt;
  MembershipEstimate est;
  InferenceContext ctx;
};

// x need not be binary (feeding H itself gives the zero-noise pipeline).
// phi <= 0 selects default_radius.
PipelineResult run_pipeline(const Matrix& x, int k, double phi = -1.0,
                            bool self_loop = false);

PipelineResult run_pipeline(const AdjacencyMatrix& adj, int k, double phi = -1.0);

}  // namespace dcmm
