#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dcmm/influence.hpp"
#include "dcmm/membership.hpp"

namespace dcmm {

// Covariance of the first-order errors for the requested (node, community)
// pairs: diagonal V_{C^pi}, off-diagonal V_{C^pi, C^pi}. Exactly PSD up to
// rounding (it is a Gram matrix with weights H(1-H)).
Matrix sigma_matrix(const std::vector<PairIK>& pairs, const InfluenceSet& infl,
                    const InferenceContext& ctx);

enum class TestKind { ClosestCommunity, TwoNode };

struct TestReport {
  TestKind kind = TestKind::ClosestCommunity;
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  // ClosestCommunity: the unique rejected community, if any.
  std::optional<int> rejected_community;
  bool rejected = false;
  int node_i = -1;
  int node_j = -1;
  // ClosestCommunity: min standardized margin per community.
  std::vector<double> margins;
};

// Bonferroni one-sided rule: community k is declared closest when every
// standardized difference (pi_i(k) - pi_i(l)) / sd exceeds
// z_{1 - alpha/(K-1)}. At most one community can win.
TestReport closest_community_test(int node, const MembershipEstimate& est,
                                  const InferenceContext& ctx, double alpha);

struct RankInterval {
  int node = 0;
  int community = 0;
  int lower = 1;
  int upper = 1;
  double alpha = 0.05;
  double c_quantile = 0.0;
  int b_draws = 0;
};

// Multiplier-bootstrap simultaneous CI for the rank of pi_i(k). Requires an
// observed (plug-in) context; W is replaced by the residual X - H_hat.
RankInterval rank_ci(int node, int community, const MembershipEstimate& est,
                     const InferenceContext& ctx, int bootstrap_draws, double alpha,
                     std::uint64_t seed);

// Hotelling-type chi-square test of pi_i = pi_j.
TestReport two_node_test(int node_i, int node_j, const MembershipEstimate& est,
                         const InferenceContext& ctx, double alpha = 0.05);

// d' S^{-1} d with a condition check on S; exposed for its own tests.
double hotelling_statistic(const Vector& d, const Matrix& s);

// (pi_hat_i(k) - truth) / sqrt(V-hat of C^pi_{i,k}).
double standardized_stat(int node, int community, const MembershipEstimate& est,
                         const InferenceContext& ctx, double truth);

}  // namespace dcmm
