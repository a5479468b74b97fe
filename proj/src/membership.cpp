#include "dcmm/membership.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <string>

#include "dcmm/errors.hpp"

namespace dcmm {

namespace {

// Throws when the augmented matrix is too ill-conditioned to invert.
void check_condition(const Matrix& b_aug) {
  Eigen::JacobiSVD<Matrix> svd(b_aug);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(b_aug.rows() - 1);
  if (!(smin > 0.0) || smax / smin >= 1e12) {
    double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    throw degeneracy_error("degenerate simplex: augmented vertex matrix condition ~" +
                           std::to_string(cond));
  }
}

}  // namespace

Matrix augmented_vertex_matrix(const Matrix& vertices) {
  const int k = static_cast<int>(vertices.rows());
  if (vertices.cols() != k - 1)
    throw validation_error("augmented_vertex_matrix: vertices must be K x (K-1)");
  Matrix b(k, k);
  if (k > 1) b.topRows(k - 1) = vertices.transpose();
  b.row(k - 1).setOnes();
  return b;
}

Vector barycentric_coords(const Vector& point, const Matrix& vertices) {
  const int k = static_cast<int>(vertices.rows());
  if (point.size() != k - 1)
    throw validation_error("barycentric_coords: point must have dimension K-1");
  Matrix b = augmented_vertex_matrix(vertices);
  check_condition(b);
  Vector rhs(k);
  rhs.head(k - 1) = point;
  rhs(k - 1) = 1.0;
  return b.partialPivLu().solve(rhs);
}

MembershipEstimate reconstruct_pi(const Embedding& emb, const VertexHuntResult& hunt,
                                  const Vector& lambdas) {
  const int n = emb.n;
  const int k = emb.k;
  if (static_cast<int>(hunt.vertices.rows()) != k)
    throw validation_error("reconstruct_pi: vertex count must equal K");
  if (lambdas.size() != k)
    throw validation_error("reconstruct_pi: need K eigenvalues");

  MembershipEstimate est;
  est.lambdas = lambdas;
  est.b_aug = augmented_vertex_matrix(hunt.vertices);
  check_condition(est.b_aug);

  // One factorization for all nodes: B A^T = [r^T; 1^T].
  Matrix rhs(k, n);
  if (k > 1) rhs.topRows(k - 1) = emb.points.transpose();
  rhs.row(k - 1).setOnes();
  est.a_hat = est.b_aug.partialPivLu().solve(rhs).transpose();

  est.c_hat.resize(k);
  for (int c = 0; c < k; ++c) {
    double arg = lambdas(0);
    for (int l = 1; l < k; ++l)
      arg += hunt.vertices(c, l - 1) * lambdas(l) * hunt.vertices(c, l - 1);
    if (!(arg > 0.0))
      throw degeneracy_error("reconstruct_pi: nonpositive c_k argument for community " +
                             std::to_string(c));
    est.c_hat(c) = 1.0 / std::sqrt(arg);
  }

  est.pi_hat.resize(n, k);
  est.raw_negative_mass = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    Vector prime(k);
    double abs_sum = 0.0;
    for (int c = 0; c < k; ++c) {
      prime(c) = est.a_hat(i, c) / est.c_hat(c);
      abs_sum += std::abs(prime(c));
    }
    double norm = prime.sum();
    if (std::abs(norm) <= 1e-12 * abs_sum)
      throw degeneracy_error("reconstruct_pi: vanishing pi normalizer at node " +
                             std::to_string(i));
    est.pi_hat.row(i) = prime.transpose() / norm;
    for (int c = 0; c < k; ++c)
      if (est.pi_hat(i, c) < 0.0) est.raw_negative_mass(i) += est.pi_hat(i, c);
  }
  return est;
}

Matrix clipped_pi(const MembershipEstimate& est) {
  Matrix out = est.pi_hat.cwiseMax(0.0);
  for (int i = 0; i < out.rows(); ++i) {
    double s = out.row(i).sum();
    if (!(s > 0.0))
      throw degeneracy_error("clipped_pi: all entries nonpositive at node " +
                             std::to_string(i));
    out.row(i) /= s;
  }
  return out;
}

GroundTruthQuantities ground_truth_quantities(const DcmmParams& params) {
  GroundTruthQuantities gt;
  Matrix h = build_h(params);
  gt.spec = eigen_topk(h, params.k, SpectralSource::GroundTruth);
  Embedding emb = score_embedding(gt.spec);
  gt.embedding = emb.points;

  const int k = params.k;
  gt.pure_sets.assign(k, {});
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < params.n; ++i)
      if (is_pure_row(params.pi, i, c)) gt.pure_sets[c].push_back(i);

  gt.b_star.resize(k, k - 1);
  for (int c = 0; c < k; ++c) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(k - 1);
    for (int i : gt.pure_sets[c]) acc += gt.embedding.row(i);
    gt.b_star.row(c) = acc / static_cast<double>(gt.pure_sets[c].size());
  }
  gt.b_aug = augmented_vertex_matrix(gt.b_star);
  check_condition(gt.b_aug);

  Matrix rhs(k, params.n);
  if (k > 1) rhs.topRows(k - 1) = gt.embedding.transpose();
  rhs.row(k - 1).setOnes();
  gt.a_star = gt.b_aug.partialPivLu().solve(rhs).transpose();

  gt.c_star.resize(k);
  for (int c = 0; c < k; ++c) {
    double arg = gt.spec.lambdas(0);
    for (int l = 1; l < k; ++l)
      arg += gt.b_star(c, l - 1) * gt.spec.lambdas(l) * gt.b_star(c, l - 1);
    if (!(arg > 0.0))
      throw degeneracy_error("ground_truth_quantities: nonpositive c_k argument");
    gt.c_star(c) = 1.0 / std::sqrt(arg);
  }
  return gt;
}

}  // namespace dcmm
