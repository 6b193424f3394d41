#include "fvsm/dimred.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fvsm {

namespace {

// Centered data as an n x d matrix plus the per-column means.
Matrix center(const FeatureSpace& space) {
  const int n = space.size();
  const int d = space.dim();
  std::vector<double> mean(d, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& row = space.row(i);
    for (int j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= n;
  Matrix centered(n, d, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& row = space.row(i);
    for (int j = 0; j < d; ++j) centered(i, j) = row[j] - mean[j];
  }
  return centered;
}

void fix_sign(std::vector<double>& component, std::vector<double>& scores) {
  int argmax = 0;
  for (std::size_t i = 1; i < component.size(); ++i)
    if (std::fabs(component[i]) > std::fabs(component[argmax])) argmax = static_cast<int>(i);
  if (component[argmax] < 0.0) {
    for (double& v : component) v = -v;
    for (double& s : scores) s = -s;
  }
}

}  // namespace

PcaResult pca2(const FeatureSpace& space) {
  const int n = space.size();
  const int d = space.dim();
  require(n >= 2, "pca2: need at least 2 points");
  require(d >= 2, "pca2: need dimension >= 2");

  const Matrix centered = center(space);
  const double denom = static_cast<double>(n - 1);

  std::array<std::vector<double>, 2> components;
  std::array<double, 2> variances{};

  if (d <= n) {
    Matrix cov(d, d, 0.0);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        const double xa = centered(i, a);
        for (int b = a; b < d; ++b) cov(a, b) += xa * centered(i, b);
      }
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        cov(a, b) /= denom;
        cov(b, a) = cov(a, b);
      }
    const auto eig = jacobi_eigendecomposition(cov);
    for (int c = 0; c < 2; ++c) {
      components[c] = eig.vectors[c];
      variances[c] = std::max(eig.values[c], 0.0);
    }
  } else {
    // Wide data: eigenvectors of the n x n Gram matrix lift to components.
    Matrix gram(n, n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double dot = 0.0;
        for (int a = 0; a < d; ++a) dot += centered(i, a) * centered(j, a);
        gram(i, j) = dot / denom;
        gram(j, i) = gram(i, j);
      }
    const auto eig = jacobi_eigendecomposition(gram);
    for (int c = 0; c < 2; ++c) {
      variances[c] = std::max(eig.values[c], 0.0);
      std::vector<double> component(d, 0.0);
      for (int i = 0; i < n; ++i) {
        const double u = eig.vectors[c][i];
        if (u == 0.0) continue;
        for (int a = 0; a < d; ++a) component[a] += u * centered(i, a);
      }
      double norm = 0.0;
      for (double v : component) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 0.0)
        for (double& v : component) v /= norm;
      components[c] = std::move(component);
    }
  }

  PcaResult result;
  result.projection.method = "pca";
  result.projection.ids = space.ids();
  result.projection.coords.resize(n);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> scores(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double dot = 0.0;
      for (int a = 0; a < d; ++a) dot += centered(i, a) * components[c][a];
      scores[i] = dot;
    }
    fix_sign(components[c], scores);
    for (int i = 0; i < n; ++i) result.projection.coords[i][c] = scores[i];
  }
  result.explained_variance = variances;
  result.components = components;
  return result;
}

// ---------------------------------------------------------------------------
// t-SNE

namespace {

Matrix pairwise_squared_distances(const FeatureSpace& space) {
  const int n = space.size();
  Matrix d2(n, n, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& xi = space.row(i);
    for (int j = i + 1; j < n; ++j) {
      const auto& xj = space.row(j);
      double sum = 0.0;
      for (std::size_t a = 0; a < xi.size(); ++a) {
        const double diff = xi[a] - xj[a];
        sum += diff * diff;
      }
      d2(i, j) = sum;
      d2(j, i) = sum;
    }
  }
  return d2;
}

// Shannon entropy (nats) and the conditional row for a given precision.
double gaussian_row(const Matrix& d2, int i, double beta, std::vector<double>& row) {
  const int n = d2.rows;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    row[j] = j == i ? 0.0 : std::exp(-beta * d2(i, j));
    sum += row[j];
  }
  if (sum <= 0.0) sum = std::numeric_limits<double>::min();
  double entropy = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    entropy += beta * d2(i, j) * row[j];
  }
  entropy = entropy / sum + std::log(sum);
  for (int j = 0; j < n; ++j) row[j] /= sum;
  return entropy;
}

}  // namespace

ConditionalAffinities conditional_affinities(const Matrix& squared_distances, double perplexity) {
  const int n = squared_distances.rows;
  require(n >= 2, "conditional_affinities: need at least 2 points");
  require(perplexity > 0.0, "conditional_affinities: perplexity must be positive");
  require(perplexity < n, "conditional_affinities: perplexity must be below the point count");

  const double target_entropy = std::log(perplexity);
  ConditionalAffinities out;
  out.p = Matrix(n, n, 0.0);
  out.precisions.resize(n);

  std::vector<double> row(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double beta = 1.0;
    double beta_min = -std::numeric_limits<double>::infinity();
    double beta_max = std::numeric_limits<double>::infinity();
    double entropy = gaussian_row(squared_distances, i, beta, row);
    // Bisection on the precision; perplexity exp(H) decreases as beta grows.
    for (int iter = 0; iter < 200; ++iter) {
      if (std::fabs(std::exp(entropy) - perplexity) <= 1e-4) break;
      if (entropy > target_entropy) {
        beta_min = beta;
        beta = std::isinf(beta_max) ? beta * 2.0 : (beta + beta_max) / 2.0;
      } else {
        beta_max = beta;
        beta = std::isinf(beta_min) ? beta / 2.0 : (beta + beta_min) / 2.0;
      }
      entropy = gaussian_row(squared_distances, i, beta, row);
    }
    out.precisions[i] = beta;
    for (int j = 0; j < n; ++j) out.p(i, j) = row[j];
  }
  return out;
}

TsneResult tsne2(const FeatureSpace& space, const TsneConfig& cfg) {
  const int n = space.size();
  require(n >= 4, "tsne2: need at least 4 points");
  require(cfg.perplexity < n, "tsne2: perplexity must be below the point count");
  require(cfg.iterations >= 1, "tsne2: iterations must be >= 1");
  require(cfg.learning_rate > 0.0, "tsne2: learning rate must be positive");

  // Symmetrized joint affinities from the fitted conditionals.
  const Matrix d2 = pairwise_squared_distances(space);
  const auto conditional = conditional_affinities(d2, cfg.perplexity);
  Matrix p(n, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      p(i, j) = (conditional.p(i, j) + conditional.p(j, i)) / (2.0 * n);

  Matrix p_current = p;  // exaggerated during the early phase
  const bool exaggerate = cfg.exaggeration_iters > 0 && cfg.exaggeration != 1.0;
  if (exaggerate)
    for (double& v : p_current.data) v *= cfg.exaggeration;

  Rng rng(cfg.seed);
  std::vector<double> y(static_cast<std::size_t>(n) * 2);
  for (double& v : y) v = rng.gaussian() * 1e-4;

  std::vector<double> velocity(y.size(), 0.0);
  std::vector<double> gain(y.size(), 1.0);
  std::vector<double> gradient(y.size(), 0.0);
  Matrix q_unnorm(n, n, 0.0);

  TsneResult result;
  result.projection.method = "tsne";
  result.projection.ids = space.ids();
  result.kl_trace.reserve(cfg.iterations);

  auto student_t_kernel = [&]() {
    double q_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double dx = y[i * 2] - y[j * 2];
        const double dy = y[i * 2 + 1] - y[j * 2 + 1];
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        q_unnorm(i, j) = q;
        q_unnorm(j, i) = q;
        q_sum += 2.0 * q;
      }
    }
    return q_sum;
  };

  auto sign = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };

  double momentum = cfg.momentum_early;
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    double q_sum = student_t_kernel();

    std::fill(gradient.begin(), gradient.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double mult = 4.0 * (p_current(i, j) - q_unnorm(i, j) / q_sum) * q_unnorm(i, j);
        gradient[i * 2] += mult * (y[i * 2] - y[j * 2]);
        gradient[i * 2 + 1] += mult * (y[i * 2 + 1] - y[j * 2 + 1]);
      }
    }

    for (std::size_t k = 0; k < y.size(); ++k) {
      gain[k] = sign(gradient[k]) != sign(velocity[k]) ? gain[k] + 0.2 : gain[k] * 0.8;
      gain[k] = std::max(gain[k], 0.1);
      velocity[k] = momentum * velocity[k] - cfg.learning_rate * gain[k] * gradient[k];
      y[k] += velocity[k];
    }

    // Keep the embedding centered.
    double mean_x = 0.0, mean_y = 0.0;
    for (int i = 0; i < n; ++i) {
      mean_x += y[i * 2];
      mean_y += y[i * 2 + 1];
    }
    mean_x /= n;
    mean_y /= n;
    for (int i = 0; i < n; ++i) {
      y[i * 2] -= mean_x;
      y[i * 2 + 1] -= mean_y;
    }

    if (exaggerate && iter + 1 == cfg.exaggeration_iters) p_current = p;
    if (iter + 1 == cfg.momentum_switch_iter) momentum = cfg.momentum_late;

    // KL(P || Q) of the updated embedding, always against the true P so the
    // trace is comparable across the exaggeration boundary.
    q_sum = student_t_kernel();
    double kl = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double pij = p(i, j);
        if (pij <= 0.0) continue;
        const double qij = std::max(q_unnorm(i, j) / q_sum, std::numeric_limits<double>::min());
        kl += pij * std::log(pij / qij);
      }
    }
    result.kl_trace.push_back(kl);
  }

  result.projection.coords.resize(n);
  for (int i = 0; i < n; ++i) {
    result.projection.coords[i][0] = y[i * 2];
    result.projection.coords[i][1] = y[i * 2 + 1];
  }
  return result;
}

}  // namespace fvsm
