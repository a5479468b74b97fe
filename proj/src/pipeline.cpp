#include "dcmm/pipeline.hpp"

#include <Eigen/LU>

namespace dcmm {

PipelineResult run_pipeline(const Matrix& x, int k, double phi, bool self_loop) {
  PipelineResult out;
  out.spec = eigen_topk(x, k, SpectralSource::Observed);
  out.emb = score_embedding(out.spec);
  double used_phi = phi > 0.0 ? phi : default_radius(out.emb.points, k);
  out.hunt = successive_projection(out.emb.points, k, used_phi);
  out.est = reconstruct_pi(out.emb, out.hunt, out.spec.lambdas);

  PlugInLowRank plug = plug_in_ctx(out.spec);
  InferenceContext& ctx = out.ctx;
  ctx.source = SpectralSource::Observed;
  ctx.n = out.spec.n;
  ctx.k = k;
  ctx.lambdas = out.spec.lambdas;
  ctx.u = out.spec.u;
  ctx.n_mat = std::move(plug.n_hat);
  ctx.h_var = plug.h_hat.cwiseMax(0.0).cwiseMin(1.0);
  ctx.w_hat = x - plug.h_hat;
  ctx.r = out.emb.points;
  ctx.vertices = out.hunt.vertices;
  ctx.vertex_sets = out.hunt.vertex_sets;
  ctx.b_aug = out.est.b_aug;
  ctx.b_aug_inv = out.est.b_aug.partialPivLu().inverse();
  ctx.a = out.est.a_hat;
  ctx.c = out.est.c_hat;
  ctx.self_loop = self_loop;
  finalize_context_caches(ctx);
  return out;
}

PipelineResult run_pipeline(const AdjacencyMatrix& adj, int k, double phi) {
  return run_pipeline(adj.entries, k, phi, adj.self_loop);
}

}  // namespace dcmm
