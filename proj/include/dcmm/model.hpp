#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace dcmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Ground-truth DCMM model: edge probability H_ij = theta_i theta_j
// sum_{k,l} pi_i(k) pi_j(l) p_kl.
struct DcmmParams {
  int n = 0;
  int k = 0;
  Vector theta;  // n, strictly positive
  Matrix pi;     // n x k, rows nonnegative, each summing to 1
  Matrix p;      // k x k, symmetric, nonsingular, entries in [0,1]
  bool self_loop = false;
};

// Throws validation_error naming the violated invariant.
void validate(const DcmmParams& params);

// H = Theta Pi P Pi^T Theta, exactly symmetric.
Matrix build_h(const DcmmParams& params);

struct AdjacencyMatrix {
  int n = 0;
  Matrix entries;  // symmetric 0/1
  bool self_loop = false;
};

// Checks symmetry, {0,1} entries, and the diagonal mode.
void validate(const AdjacencyMatrix& adj);

// Independent Bernoulli(H_ij) on the upper triangle (diagonal only in
// self-loop mode), mirrored. Same seed, same matrix.
AdjacencyMatrix sample_adjacency(const DcmmParams& params, std::uint64_t seed);

enum class ThetaSetting { Const06, Uniform, Const09 };

ThetaSetting theta_setting_from_string(const std::string& s);
std::string to_string(ThetaSetting s);

// The synthetic two-community configuration: one pure row per community,
// interior memberships Uniform[0.1,0.9], rows shuffled, P = [[1,.2],[.2,1]],
// theta per setting. RNG consumption order is fixed: memberships, then the
// row shuffle, then theta.
DcmmParams synthetic_config(ThetaSetting setting, int n, std::uint64_t seed);

// Nodes whose membership weight on community k is 1 (within 1e-12).
bool is_pure_row(const Matrix& pi, int i, int k);

}  // namespace dcmm
