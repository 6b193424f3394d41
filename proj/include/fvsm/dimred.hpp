#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fvsm/space.hpp"
#include "fvsm/util.hpp"

namespace fvsm {

struct Projection2D {
  std::vector<std::string> ids;
  std::vector<std::array<double, 2>> coords;
  std::string method;  // "pca" or "tsne"
};

struct PcaResult {
  Projection2D projection;
  std::array<double, 2> explained_variance{};        // non-increasing
  std::array<std::vector<double>, 2> components{};   // orthonormal directions
};

/// Projects onto the top-2 principal directions of the mean-centered data.
/// Uses the d x d covariance when d <= n, the n x n Gram matrix otherwise.
/// Sign convention: each component's largest-magnitude entry is positive.
PcaResult pca2(const FeatureSpace& space);

struct TsneConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  double momentum_early = 0.5;
  double momentum_late = 0.8;
  int momentum_switch_iter = 250;
  double exaggeration = 12.0;
  int exaggeration_iters = 250;
  std::uint64_t seed = 1;
};

struct TsneResult {
  Projection2D projection;
  /// KL(P || Q) after every iteration, always against the un-exaggerated P.
  std::vector<double> kl_trace;
};

/// Exact O(n^2) t-SNE to 2 dimensions. Deterministic given cfg.seed.
TsneResult tsne2(const FeatureSpace& space, const TsneConfig& cfg);

struct ConditionalAffinities {
  Matrix p;                        // n x n, row i is p_{j|i}, zero diagonal
  std::vector<double> precisions;  // beta_i of the fitted Gaussians
};

/// Per-point Gaussian bandwidth search: row i of the result is the
/// conditional distribution whose perplexity exp(H) matches the target
/// within 1e-4. Exposed so the search contract is directly testable.
ConditionalAffinities conditional_affinities(const Matrix& squared_distances, double perplexity);

}  // namespace fvsm
