#include <algorithm>
#include <cmath>
#include <doctest.h>

#include "dcmm/errors.hpp"
#include "dcmm/membership.hpp"
#include "dcmm/pipeline.hpp"
#include "dcmm/vertex_hunt.hpp"
#include "helpers.hpp"

using namespace dcmm;

TEST_SUITE_BEGIN("membership");

TEST_CASE("barycentric coordinates at a vertex and the centroid") {
  Matrix verts(3, 2);
  verts << 0.0, 0.0, 2.0, 0.1, 0.3, 1.7;
  Vector at_vertex = barycentric_coords(verts.row(1).transpose(), verts);
  CHECK(at_vertex(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(at_vertex(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at_vertex(2) == doctest::Approx(0.0).epsilon(1e-12));

  Vector centroid = verts.colwise().mean().transpose();
  Vector at_centroid = barycentric_coords(centroid, verts);
  for (int c = 0; c < 3; ++c) CHECK(at_centroid(c) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("barycentric residual on random interior points") {
  rng::Engine eng(19);
  Matrix verts(4, 3);
  for (int i = 0; i < 4; ++i)
    verts.row(i) << eng.uniform01() * 2.0, eng.uniform01() * 2.0, eng.uniform01() * 2.0;
  Matrix b = augmented_vertex_matrix(verts);
  for (int rep = 0; rep < 10; ++rep) {
    Vector w(4);
    double s = 0.0;
    for (int c = 0; c < 4; ++c) {
      w(c) = eng.uniform01();
      s += w(c);
    }
    w /= s;
    Vector point = verts.transpose() * w;
    Vector a = barycentric_coords(point, verts);
    Vector rhs(4);
    rhs.head(3) = point;
    rhs(3) = 1.0;
    CHECK((b * a - rhs).norm() < 1e-10);
  }
}

TEST_CASE("degenerate simplex raises with a condition estimate") {
  Matrix verts(3, 2);
  verts << 0.0, 0.0, 1.0, 1.0, 2.0, 2.0;  // collinear
  Vector p(2);
  p << 0.5, 0.5;
  CHECK_THROWS_WITH_AS(barycentric_coords(p, verts), doctest::Contains("condition"),
                       degeneracy_error);
}

TEST_CASE("noiseless pipeline recovers pure nodes exactly") {
  rng::Engine eng(33);
  DcmmParams params = test::random_params(60, 3, eng);
  Matrix h = build_h(params);
  PipelineResult pr = run_pipeline(h, 3);
  std::vector<int> perm = match_permutation(pr.est.pi_hat.transpose(), params.pi.transpose());
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < params.n; ++i) {
      if (!is_pure_row(params.pi, i, c)) continue;
      for (int l = 0; l < 3; ++l) {
        double expect = l == c ? 1.0 : 0.0;
        CHECK(std::abs(pr.est.pi_hat(i, perm[static_cast<std::size_t>(l)]) - expect) < 1e-8);
      }
    }
  }
}

TEST_CASE("rows always sum to one") {
  rng::Engine eng(35);
  DcmmParams params = test::random_params(80, 2, eng, 2, 0.5, 0.9);
  AdjacencyMatrix x = sample_adjacency(params, 4);
  PipelineResult pr = run_pipeline(x, 2);
  for (int i = 0; i < params.n; ++i) {
    CHECK(pr.est.pi_hat.row(i).sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pr.est.a_hat.row(i).sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pr.est.raw_negative_mass(i) <= 0.0);
  }
  CHECK(pr.est.c_hat.minCoeff() > 0.0);
  // The augmented identity B a_i = (r_i, 1).
  for (int i = 0; i < params.n; ++i) {
    Vector rhs(2);
    rhs(0) = pr.emb.points(i, 0);
    rhs(1) = 1.0;
    CHECK((pr.est.b_aug * pr.est.a_hat.row(i).transpose() - rhs).norm() < 1e-8);
  }
}

TEST_CASE("noiseless synthetic configuration end to end") {
  DcmmParams params = synthetic_config(ThetaSetting::Uniform, 80, 12);
  Matrix h = build_h(params);
  PipelineResult pr = run_pipeline(h, 2);
  std::vector<int> perm = match_permutation(pr.est.pi_hat.transpose(), params.pi.transpose());
  double worst = 0.0;
  for (int i = 0; i < params.n; ++i)
    for (int c = 0; c < 2; ++c)
      worst = std::max(worst, std::abs(pr.est.pi_hat(i, perm[static_cast<std::size_t>(c)]) -
                                       params.pi(i, c)));
  CHECK(worst < 1e-6);
}

TEST_CASE("clip variant is nonnegative and normalized") {
  rng::Engine eng(89);
  DcmmParams params = test::random_params(90, 2, eng, 2, 0.5, 0.8);
  AdjacencyMatrix x = sample_adjacency(params, 10);
  PipelineResult pr = run_pipeline(x, 2);
  Matrix clipped = clipped_pi(pr.est);
  for (int i = 0; i < params.n; ++i) {
    CHECK(clipped.row(i).minCoeff() >= 0.0);
    CHECK(clipped.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("permutation equivariance of the reconstruction") {
  rng::Engine eng(41);
  DcmmParams params = test::random_params(30, 3, eng);
  Matrix h = build_h(params);
  PipelineResult pr = run_pipeline(h, 3);

  // Re-run the reconstruction with the hunt's vertex order permuted.
  VertexHuntResult hunt = pr.hunt;
  std::vector<int> perm{2, 0, 1};
  VertexHuntResult shuffled = hunt;
  for (int c = 0; c < 3; ++c) {
    shuffled.anchors[static_cast<std::size_t>(c)] =
        hunt.anchors[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])];
    shuffled.vertex_sets[static_cast<std::size_t>(c)] =
        hunt.vertex_sets[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])];
    shuffled.vertices.row(c) = hunt.vertices.row(perm[static_cast<std::size_t>(c)]);
  }
  MembershipEstimate base = reconstruct_pi(pr.emb, hunt, pr.spec.lambdas);
  MembershipEstimate moved = reconstruct_pi(pr.emb, shuffled, pr.spec.lambdas);
  for (int c = 0; c < 3; ++c) {
    CHECK(test::max_abs_diff(moved.pi_hat.col(c),
                             base.pi_hat.col(perm[static_cast<std::size_t>(c)])) < 1e-10);
    CHECK(test::max_abs_diff(moved.a_hat.col(c),
                             base.a_hat.col(perm[static_cast<std::size_t>(c)])) < 1e-10);
  }
  for (int i = 0; i < 30; ++i)
    CHECK(moved.pi_hat.row(i).sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("ground truth quantities") {
  rng::Engine eng(47);
  DcmmParams params = test::random_params(40, 3, eng, 1);  // single pure node each
  GroundTruthQuantities gt = ground_truth_quantities(params);

  for (int c = 0; c < 3; ++c) {
    REQUIRE(gt.pure_sets[static_cast<std::size_t>(c)].size() == 1);
    int j = gt.pure_sets[static_cast<std::size_t>(c)][0];
    // Single pure node: vertex equals that node's embedding point.
    CHECK((gt.b_star.row(c) - gt.embedding.row(j)).norm() < 1e-12);
    // Pure nodes have barycentric coordinates e_k.
    for (int l = 0; l < 3; ++l)
      CHECK(gt.a_star(j, l) == doctest::Approx(l == c ? 1.0 : 0.0).epsilon(1e-9));
  }

  // Inverse-pipeline consistency: reconstructing pi from (a*, c*) recovers Pi.
  for (int i = 0; i < params.n; ++i) {
    Vector prime(3);
    for (int c = 0; c < 3; ++c) prime(c) = gt.a_star(i, c) / gt.c_star(c);
    prime /= prime.sum();
    for (int c = 0; c < 3; ++c)
      CHECK(std::abs(prime(c) - params.pi(i, c)) < 1e-8);
  }
}

TEST_SUITE_END();
