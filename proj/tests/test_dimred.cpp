#include <doctest.h>

#include <cmath>

#include "fvsm/dimred.hpp"
#include "fvsm/util.hpp"

using namespace fvsm;

namespace {

FeatureSpace space_from(const std::vector<std::vector<double>>& points) {
  FeatureSpace space(static_cast<int>(points[0].size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    space.add("p" + std::to_string(i), points[i]);
  return space;
}

FeatureSpace two_far_blobs(int per_cluster, int dim, double separation, std::uint64_t seed) {
  Rng rng(seed);
  FeatureSpace space(dim);
  int id = 0;
  for (int c = 0; c < 2; ++c) {
    for (int p = 0; p < per_cluster; ++p) {
      std::vector<double> point(dim);
      for (double& v : point) v = rng.gaussian();
      point[0] += c == 0 ? 0.0 : separation;
      space.add("p" + std::to_string(id++), point);
    }
  }
  return space;
}

}  // namespace

TEST_CASE("pca on collinear points") {
  const auto space = space_from({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {-1, -1}});
  const auto result = pca2(space);
  // First direction is (1,1)/sqrt(2) with the sign convention making the
  // largest-magnitude entry positive.
  CHECK(result.components[0][0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(result.components[0][1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(result.explained_variance[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(result.explained_variance[0] >= result.explained_variance[1]);
}

TEST_CASE("pca recovers 2-D data up to rotation/reflection") {
  Rng rng(14);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 40; ++i) points.push_back({rng.uniform(-2, 2), rng.uniform(-1, 1)});
  const auto space = space_from(points);
  const auto result = pca2(space);
  for (int i = 0; i < space.size(); ++i) {
    for (int j = i + 1; j < space.size(); ++j) {
      double original = 0, projected = 0;
      for (int d = 0; d < 2; ++d) {
        const double od = points[i][d] - points[j][d];
        original += od * od;
        const double pd = result.projection.coords[i][d] - result.projection.coords[j][d];
        projected += pd * pd;
      }
      CHECK(std::fabs(std::sqrt(original) - std::sqrt(projected)) < 1e-9);
    }
  }
}

TEST_CASE("pca explained variances are near-equal on an isotropic cloud") {
  Rng rng(15);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 4000; ++i)
    points.push_back({rng.gaussian(), rng.gaussian(), rng.gaussian()});
  const auto result = pca2(space_from(points));
  CHECK(result.explained_variance[0] / result.explained_variance[1] < 1.2);
}

TEST_CASE("pca components are orthonormal and reconstruction error is consistent") {
  Rng rng(16);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 30; ++i) {
    std::vector<double> p(6);
    for (double& v : p) v = rng.uniform(-1, 1);
    points.push_back(p);
  }
  const auto space = space_from(points);
  const auto result = pca2(space);

  double n00 = 0, n11 = 0, n01 = 0;
  for (int d = 0; d < 6; ++d) {
    n00 += result.components[0][d] * result.components[0][d];
    n11 += result.components[1][d] * result.components[1][d];
    n01 += result.components[0][d] * result.components[1][d];
  }
  CHECK(std::fabs(n00 - 1.0) < 1e-8);
  CHECK(std::fabs(n11 - 1.0) < 1e-8);
  CHECK(std::fabs(n01) < 1e-8);

  // Mean reconstruction error from the top-2 scores equals total variance
  // minus the top-2 eigenvalues.
  std::vector<double> mean(6, 0.0);
  for (const auto& p : points)
    for (int d = 0; d < 6; ++d) mean[d] += p[d];
  for (double& m : mean) m /= points.size();
  double total_variance = 0;
  for (const auto& p : points)
    for (int d = 0; d < 6; ++d) total_variance += (p[d] - mean[d]) * (p[d] - mean[d]);
  total_variance /= (points.size() - 1);

  double residual = 0;
  for (int i = 0; i < space.size(); ++i) {
    std::vector<double> reconstructed(6, 0.0);
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 6; ++d)
        reconstructed[d] += result.projection.coords[i][c] * result.components[c][d];
    for (int d = 0; d < 6; ++d) {
      const double diff = (points[i][d] - mean[d]) - reconstructed[d];
      residual += diff * diff;
    }
  }
  residual /= (points.size() - 1);
  CHECK(std::fabs(residual - (total_variance - result.explained_variance[0] -
                              result.explained_variance[1])) < 1e-8);
}

TEST_CASE("pca recovers a planted 2-D signal in noise") {
  Rng rng(17);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 200; ++i) {
    const double a = rng.gaussian() * 10.0, b = rng.gaussian() * 5.0;
    std::vector<double> p(8, 0.0);
    p[0] = a; p[1] = b;
    for (int d = 2; d < 8; ++d) p[d] = rng.gaussian() * 0.01;
    points.push_back(p);
  }
  const auto result = pca2(space_from(points));
  double total = 0;
  std::vector<double> mean(8, 0.0);
  for (const auto& p : points)
    for (int d = 0; d < 8; ++d) mean[d] += p[d] / points.size();
  for (const auto& p : points)
    for (int d = 0; d < 8; ++d) total += (p[d] - mean[d]) * (p[d] - mean[d]);
  total /= (points.size() - 1);
  CHECK((result.explained_variance[0] + result.explained_variance[1]) / total >= 0.99);
}

TEST_CASE("pca input validation") {
  FeatureSpace one(3);
  one.add("a", {1, 2, 3});
  CHECK_THROWS_AS(pca2(one), std::invalid_argument);
}

TEST_CASE("bandwidth search hits the target perplexity") {
  // Uniformly spaced points on a line.
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 40; ++i) points.push_back({static_cast<double>(i)});
  const auto space = space_from(points);

  Matrix d2(40, 40, 0.0);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j)
      d2(i, j) = (i - j) * (i - j);

  for (double target : {5.0, 10.0, 25.0}) {
    const auto affinities = conditional_affinities(d2, target);
    for (int i = 0; i < 40; ++i) {
      double row_sum = 0, entropy = 0;
      for (int j = 0; j < 40; ++j) {
        const double p = affinities.p(i, j);
        row_sum += p;
        if (p > 0) entropy -= p * std::log(p);
      }
      CHECK(std::fabs(row_sum - 1.0) < 1e-9);
      CHECK(std::fabs(std::exp(entropy) - target) <= 1e-4);
    }
  }
}

TEST_CASE("achieved perplexity decreases as precision grows") {
  Rng rng(18);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 20; ++i) points.push_back({rng.uniform(-3, 3), rng.uniform(-3, 3)});
  Matrix d2(20, 20, 0.0);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      double s = 0;
      for (int d = 0; d < 2; ++d) s += (points[i][d] - points[j][d]) * (points[i][d] - points[j][d]);
      d2(i, j) = s;
    }

  // Perplexity of row 0's conditional as a function of beta, evaluated on a
  // grid: must be monotone non-increasing (sigma and perplexity move together).
  double previous = std::numeric_limits<double>::infinity();
  for (double beta = 1e-4; beta < 100.0; beta *= 3.0) {
    std::vector<double> row(20, 0.0);
    double sum = 0, entropy_num = 0;
    for (int j = 1; j < 20; ++j) {
      row[j] = std::exp(-beta * d2(0, j));
      sum += row[j];
      entropy_num += beta * d2(0, j) * row[j];
    }
    REQUIRE(sum > 0.0);
    const double entropy = entropy_num / sum + std::log(sum);
    const double perplexity = std::exp(entropy);
    CHECK(perplexity <= previous * (1 + 1e-9));
    previous = perplexity;
  }
}

TEST_CASE("tsne is deterministic for a fixed seed") {
  const auto space = two_far_blobs(10, 5, 30.0, 21);
  TsneConfig cfg;
  cfg.perplexity = 8;
  cfg.iterations = 60;
  cfg.exaggeration_iters = 20;
  cfg.momentum_switch_iter = 20;
  cfg.seed = 5;
  const auto a = tsne2(space, cfg);
  const auto b = tsne2(space, cfg);
  CHECK(a.projection.coords == b.projection.coords);
  CHECK(a.kl_trace == b.kl_trace);

  cfg.seed = 6;
  const auto c = tsne2(space, cfg);
  CHECK(a.projection.coords != c.projection.coords);
}

TEST_CASE("tsne shrinks the KL divergence after exaggeration ends") {
  const auto space = two_far_blobs(15, 8, 25.0, 33);
  TsneConfig cfg;
  cfg.perplexity = 10;
  cfg.iterations = 250;
  cfg.exaggeration_iters = 60;
  cfg.momentum_switch_iter = 60;
  cfg.seed = 9;
  const auto result = tsne2(space, cfg);
  REQUIRE(static_cast<int>(result.kl_trace.size()) == cfg.iterations);
  CHECK(result.kl_trace.back() < result.kl_trace[cfg.exaggeration_iters]);
  for (double kl : result.kl_trace) CHECK(kl >= 0.0);
}

TEST_CASE("tsne separates two planted 10-D clusters in 2-D") {
  const auto space = two_far_blobs(50, 10, 40.0, 77);
  TsneConfig cfg;
  cfg.perplexity = 20;
  cfg.iterations = 400;
  cfg.exaggeration_iters = 100;
  cfg.momentum_switch_iter = 100;
  cfg.seed = 3;
  const auto result = tsne2(space, cfg);

  double max_intra = 0.0, min_inter = std::numeric_limits<double>::infinity();
  const int n = space.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = result.projection.coords[i][0] - result.projection.coords[j][0];
      const double dy = result.projection.coords[i][1] - result.projection.coords[j][1];
      const double dist = std::sqrt(dx * dx + dy * dy);
      const bool same = (i < 50) == (j < 50);
      if (same) max_intra = std::max(max_intra, dist);
      else min_inter = std::min(min_inter, dist);
    }
  }
  CHECK(min_inter > max_intra);
}

TEST_CASE("tsne input validation") {
  const auto space = two_far_blobs(3, 4, 10.0, 2);  // 6 points
  TsneConfig cfg;
  cfg.perplexity = 6;
  CHECK_THROWS_AS(tsne2(space, cfg), std::invalid_argument);

  FeatureSpace tiny(2);
  tiny.add("a", {0, 0});
  tiny.add("b", {1, 0});
  tiny.add("c", {0, 1});
  TsneConfig small_cfg;
  small_cfg.perplexity = 2;
  CHECK_THROWS_AS(tsne2(tiny, small_cfg), std::invalid_argument);
}
