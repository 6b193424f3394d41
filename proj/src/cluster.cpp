#include "fvsm/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fvsm/util.hpp"

namespace fvsm {

namespace {

double squared_distance(const std::vector<double>& x, const std::vector<double>& y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return sum;
}

std::vector<std::vector<double>> kmeanspp_seed(const FeatureSpace& space, int kappa, Rng& rng) {
  const int n = space.size();
  std::vector<std::vector<double>> centroids;
  centroids.push_back(space.row(static_cast<int>(rng.below(n))));

  std::vector<double> best_sq(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(centroids.size()) < kappa) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      best_sq[i] = std::min(best_sq[i], squared_distance(space.row(i), centroids.back()));
      total += best_sq[i];
    }
    int chosen = -1;
    if (total <= 0.0) {
      // All points coincide with existing centroids; fall back to uniform.
      chosen = static_cast<int>(rng.below(n));
    } else {
      const double pick = rng.uniform(0.0, total);
      double cumulative = 0.0;
      for (int i = 0; i < n; ++i) {
        cumulative += best_sq[i];
        if (pick < cumulative) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) chosen = n - 1;
    }
    centroids.push_back(space.row(chosen));
  }
  return centroids;
}

ClusterModel lloyd(const FeatureSpace& space, int kappa, const ClusterConfig& cfg, Rng& rng) {
  const int n = space.size();
  ClusterModel model;
  model.centroids = kmeanspp_seed(space, kappa, rng);
  model.assignments.assign(n, -1);

  double previous_sse = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    // Assignment: nearest centroid, ties to the lower index.
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_sq = squared_distance(space.row(i), model.centroids[0]);
      for (int k = 1; k < kappa; ++k) {
        const double sq = squared_distance(space.row(i), model.centroids[k]);
        if (sq < best_sq) {
          best_sq = sq;
          best = k;
        }
      }
      model.assignments[i] = best;
      sse += best_sq;
    }

    if (sse > previous_sse * (1.0 + 1e-12) + 1e-12)
      throw std::logic_error("kmeans: SSE increased across an iteration");
    model.sse = sse;

    // Update: centroids move to their members' mean.
    std::vector<std::vector<double>> sums(kappa, std::vector<double>(space.dim(), 0.0));
    std::vector<int> counts(kappa, 0);
    for (int i = 0; i < n; ++i) {
      const auto& point = space.row(i);
      auto& sum = sums[model.assignments[i]];
      for (int d = 0; d < space.dim(); ++d) sum[d] += point[d];
      ++counts[model.assignments[i]];
    }

    double movement = 0.0;
    for (int k = 0; k < kappa; ++k) {
      if (counts[k] == 0) {
        // Re-seed an empty cluster from the point farthest from its centroid.
        int farthest = 0;
        double farthest_sq = -1.0;
        for (int i = 0; i < n; ++i) {
          const double sq = squared_distance(space.row(i), model.centroids[model.assignments[i]]);
          if (sq > farthest_sq) {
            farthest_sq = sq;
            farthest = i;
          }
        }
        movement = std::max(
            movement, std::sqrt(squared_distance(model.centroids[k], space.row(farthest))));
        model.centroids[k] = space.row(farthest);
        continue;
      }
      std::vector<double> mean(space.dim());
      for (int d = 0; d < space.dim(); ++d) mean[d] = sums[k][d] / counts[k];
      movement = std::max(movement, std::sqrt(squared_distance(model.centroids[k], mean)));
      model.centroids[k] = std::move(mean);
    }

    previous_sse = sse;
    if (movement < cfg.tol) break;
  }

  // Final assignment against the converged centroids.
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_sq = squared_distance(space.row(i), model.centroids[0]);
    for (int k = 1; k < kappa; ++k) {
      const double sq = squared_distance(space.row(i), model.centroids[k]);
      if (sq < best_sq) {
        best_sq = sq;
        best = k;
      }
    }
    model.assignments[i] = best;
    sse += best_sq;
  }
  model.sse = sse;
  return model;
}

}  // namespace

ClusterModel kmeans(const FeatureSpace& space, const ClusterConfig& cfg) {
  require(cfg.kappa >= 1, "kmeans: kappa must be >= 1");
  require(cfg.kappa <= space.size(),
          "kmeans: kappa (" + std::to_string(cfg.kappa) + ") exceeds the number of vectors (" +
              std::to_string(space.size()) + ")");
  require(cfg.max_iter >= 1 && cfg.restarts >= 1, "kmeans: max_iter and restarts must be >= 1");

  Rng base(cfg.seed);
  ClusterModel best;
  best.sse = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng = base.fork(static_cast<std::uint64_t>(restart));
    ClusterModel model = lloyd(space, cfg.kappa, cfg, rng);
    if (model.sse < best.sse) best = std::move(model);
  }
  return best;
}

std::vector<std::pair<int, double>> sse_curve(const FeatureSpace& space, int kappa_min,
                                              int kappa_max, const ClusterConfig& cfg) {
  require(kappa_min >= 1 && kappa_min <= kappa_max, "sse_curve: bad kappa range");
  std::vector<std::pair<int, double>> curve;
  for (int kappa = kappa_min; kappa <= kappa_max; ++kappa) {
    ClusterConfig run_cfg = cfg;
    run_cfg.kappa = kappa;
    curve.emplace_back(kappa, kmeans(space, run_cfg).sse);
  }
  return curve;
}

int elbow(const std::vector<std::pair<int, double>>& curve) {
  require(curve.size() >= 3, "elbow: need at least 3 curve points");
  for (std::size_t i = 1; i < curve.size(); ++i)
    require(curve[i].first == curve[i - 1].first + 1, "elbow: kappa values must be consecutive");

  int best_kappa = curve[1].first;
  double best_curvature = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double curvature = curve[i - 1].second - 2.0 * curve[i].second + curve[i + 1].second;
    if (curvature > best_curvature) {
      best_curvature = curvature;
      best_kappa = curve[i].first;
    }
  }
  return best_kappa;
}

double mean_silhouette(const FeatureSpace& space, const ClusterModel& model) {
  const int n = space.size();
  const int kappa = static_cast<int>(model.centroids.size());
  require(kappa >= 2, "mean_silhouette: need at least 2 clusters");
  require(static_cast<int>(model.assignments.size()) == n,
          "mean_silhouette: assignment count mismatch");

  std::vector<int> sizes(kappa, 0);
  for (int a : model.assignments) ++sizes[a];
  for (int k = 0; k < kappa; ++k)
    require(sizes[k] > 0, "mean_silhouette: cluster " + std::to_string(k) + " is empty");

  double total = 0.0;
  std::vector<double> mean_to_cluster(kappa);
  for (int i = 0; i < n; ++i) {
    const int own = model.assignments[i];
    if (sizes[own] == 1) continue;  // singleton contributes 0

    std::fill(mean_to_cluster.begin(), mean_to_cluster.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      mean_to_cluster[model.assignments[j]] +=
          std::sqrt(squared_distance(space.row(i), space.row(j)));
    }
    const double a = mean_to_cluster[own] / (sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kappa; ++k) {
      if (k == own) continue;
      b = std::min(b, mean_to_cluster[k] / sizes[k]);
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / n;
}

}  // namespace fvsm
