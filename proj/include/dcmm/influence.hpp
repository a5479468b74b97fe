#pragma once

#include <map>
#include <utility>
#include <vector>

#include "dcmm/membership.hpp"
#include "dcmm/spectral.hpp"

namespace dcmm {

// Everything the influence-matrix formulas consume, with starred quantities
// for a ground-truth source and hat quantities for an observed one. The
// cached products (N u1, N ubar_l, vbar_t, N z_{t,l}) let C^pi matrices be
// assembled from a handful of rank-one pieces.
struct InferenceContext {
  SpectralSource source = SpectralSource::Observed;
  int n = 0;
  int k = 0;
  Vector lambdas;   // K
  Matrix u;         // n x K
  Matrix n_mat;     // n x n
  Matrix h_var;     // n x n, entries in [0,1]
  Matrix w_hat;     // n x n residual X - H_hat; empty for ground truth
  Matrix r;         // n x (K-1)
  Matrix vertices;  // K x (K-1)
  std::vector<std::vector<int>> vertex_sets;
  Matrix b_aug;      // K x K
  Matrix b_aug_inv;  // K x K
  Matrix a;          // n x K
  Vector c;          // K
  bool self_loop = false;

  // caches
  Vector nu1;              // N u1
  Matrix n_ubar;           // n x (K-1), col l = N u_{l+2}
  Matrix vbar;             // n x K, col t = |V_t|^-1 sum_{j in V_t} e_j / u1_j
  std::vector<Matrix> nz;  // per community t: n x (K-1), col l = N z_{t,l}
};

InferenceContext make_ground_truth_context(const DcmmParams& params);

// Fills nu1 / n_ubar / vbar / nz from the already-set core fields.
void finalize_context_caches(InferenceContext& ctx);

struct PairIK {
  int node = 0;
  int community = 0;
};

struct InfluenceSet {
  std::vector<PairIK> pairs;
  std::map<std::pair<int, int>, Matrix> cr;   // (node, component)
  std::map<std::pair<int, int>, Matrix> cb;   // (community, component)
  std::map<std::pair<int, int>, Matrix> ca;   // (node, community)
  std::map<std::pair<int, int>, Matrix> cpi;  // (node, community)
};

// Reference construction, transcribed term by term; C^b built once per
// (community, component) and reused.
InfluenceSet influence_matrices(const InferenceContext& ctx,
                                const std::vector<PairIK>& pairs);

// Fast dense assembly of a single C^pi_{i,k} from the cached rank-one
// pieces; equals the reference construction to rounding.
Matrix cpi_dense(const InferenceContext& ctx, int node, int community);

// Matrix-free evaluation of tr(C^pi_{j,k} M) for every node j at fixed k.
// products() does the O(n^2 K) work shared across nodes; trace() is O(K^2)
// per node. Backbone of the bootstrap inner loop.
class CpiTraces {
 public:
  CpiTraces(const InferenceContext& ctx, int community);

  struct Products {
    Matrix mu;     // n x K, col j = M u_j
    Vector nmu1;   // N (M u1)
    double tr_q = 0.0;
    Vector tr_nu;  // K-1
    Matrix tr_cb;  // K x (K-1)
  };

  Products products(const Matrix& m) const;
  double trace(int node, const Products& p) const;
  Matrix dense(int node) const;  // same coefficients, materialized

 private:
  const InferenceContext* ctx_;
  int community_;
  Matrix coef_a_;   // n x (K-1)
  Vector coef_b_;   // n
  Vector coef_q_;   // n
  Matrix coef_nu_;  // n x (K-1)
  Matrix coef_cb_;  // n x K(K-1), flattened t*(K-1)+l
};

// Population linearizations: dr (n x (K-1)), db (K x (K-1)), da (n x K),
// dpi (n x K), all linear in W. Requires a ground-truth context.
struct Deltas {
  Matrix dr;
  Matrix db;
  Matrix da;
  Matrix dpi;
};

Deltas first_order_deltas(const InferenceContext& ctx, const Matrix& w);

// V_M and V_{M1,M2} of tr[MW]: off-diagonal terms always, diagonal terms
// only in self-loop mode (without self-loops the diagonal of W is
// deterministic and contributes no variance).
double variance_tr(const Matrix& m, const InferenceContext& ctx);
double covariance_tr(const Matrix& m1, const Matrix& m2, const InferenceContext& ctx);

}  // namespace dcmm
