#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fvsm/space.hpp"

namespace fvsm {

struct ClusterConfig {
  int kappa = 2;
  int max_iter = 100;
  int restarts = 10;
  std::uint64_t seed = 1;
  double tol = 1e-8;  // centroid-movement convergence threshold
};

struct ClusterModel {
  std::vector<std::vector<double>> centroids;  // kappa centroids
  std::vector<int> assignments;                // per space row
  double sse = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding, best of cfg.restarts by SSE.
/// Empty clusters are re-seeded from the point farthest from its centroid.
/// SSE is checked to be non-increasing across iterations.
ClusterModel kmeans(const FeatureSpace& space, const ClusterConfig& cfg);

/// (kappa, SSE) over an inclusive range, one kmeans run per kappa under the
/// shared seed policy.
std::vector<std::pair<int, double>> sse_curve(const FeatureSpace& space, int kappa_min,
                                              int kappa_max, const ClusterConfig& cfg);

/// Knee of the SSE curve: interior kappa maximizing the discrete second
/// difference SSE(k-1) - 2 SSE(k) + SSE(k+1); ties go to the smaller kappa.
/// The curve must cover at least 3 consecutive kappa values.
int elbow(const std::vector<std::pair<int, double>>& curve);

/// Mean silhouette coefficient; points in singleton clusters contribute 0.
double mean_silhouette(const FeatureSpace& space, const ClusterModel& model);

}  // namespace fvsm
