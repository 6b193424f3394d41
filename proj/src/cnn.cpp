#include "fvsm/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace fvsm {

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw std::invalid_argument("unknown activation: " + name);
}

const char* activation_name(Activation activation) {
  switch (activation) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "?";
}

int CnnConfig::max_filter_length() const {
  int max_len = 0;
  for (int len : filter_lengths) max_len = std::max(max_len, len);
  return max_len;
}

void CnnConfig::validate() const {
  require(embedding_dim >= 1, "CnnConfig: embedding_dim must be >= 1");
  require(!filter_lengths.empty(), "CnnConfig: at least one filter length");
  for (int len : filter_lengths) require(len >= 1, "CnnConfig: filter lengths must be >= 1");
  for (std::size_t i = 0; i < filter_lengths.size(); ++i)
    for (std::size_t j = i + 1; j < filter_lengths.size(); ++j)
      require(filter_lengths[i] != filter_lengths[j], "CnnConfig: filter lengths must be distinct");
  require(filters_per_length >= 1, "CnnConfig: filters_per_length must be >= 1");
  require(pool_top >= 1, "CnnConfig: pool_top must be >= 1");
  require(num_classes >= 2, "CnnConfig: num_classes must be >= 2");
}

namespace {

double activate(Activation activation, double x) {
  switch (activation) {
    case Activation::Relu: return x > 0 ? x : 0.0;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return 0.0;
}

double activate_derivative(Activation activation, double pre) {
  switch (activation) {
    case Activation::Relu: return pre > 0 ? 1.0 : 0.0;
    case Activation::Tanh: {
      const double t = std::tanh(pre);
      return 1.0 - t * t;
    }
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-pre));
      return s * (1.0 - s);
    }
  }
  return 0.0;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  double max_logit = logits[0];
  for (double v : logits) max_logit = std::max(max_logit, v);
  std::vector<double> probs(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - max_logit);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

Matrix embed_padded(const EncodedDocument& doc, const Matrix& embedding, int pad_len) {
  const int n = std::max<int>(pad_len, static_cast<int>(doc.indices.size()));
  Matrix x(n, embedding.cols, 0.0);
  for (std::size_t i = 0; i < doc.indices.size(); ++i) {
    const int index = doc.indices[i];
    require(index >= 0 && index < embedding.rows,
            "embed: term index out of range in document " + doc.id);
    if (index == 0) continue;  // padding row stays zero
    const auto source = embedding.row(index);
    std::copy(source.begin(), source.end(), x.row(static_cast<int>(i)).begin());
  }
  return x;
}

// Positions of the omega largest values, ordered by value descending and
// earlier position first on ties.
std::vector<int> kmax_positions(std::span<const double> values, int omega) {
  require(static_cast<int>(values.size()) >= omega,
          "kmax_pool: need at least omega values (have " + std::to_string(values.size()) +
              ", omega " + std::to_string(omega) + ")");
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] > values[b]; });
  order.resize(omega);
  return order;
}

// Everything backward() needs from one example's forward pass.
struct ExampleCache {
  Matrix x;
  std::vector<std::vector<double>> pre;  // per flat filter, pre-activation values
  std::vector<std::vector<int>> picked;  // per flat filter, pooled positions
  std::vector<double> pooled;
  std::vector<double> probabilities;
};

std::vector<double> convolve_pre(const Matrix& x, const ConvFilter& filter) {
  const int n = x.rows;
  const int len = filter.weights.rows;
  require(n >= len, "convolve: document shorter than filter (" + std::to_string(n) + " < " +
                        std::to_string(len) + ")");
  require(x.cols == filter.weights.cols, "convolve: embedding width mismatch");
  std::vector<double> out(static_cast<std::size_t>(n - len + 1));
  for (int start = 0; start + len <= n; ++start) {
    double sum = filter.bias;
    for (int r = 0; r < len; ++r) {
      const auto xrow = x.row(start + r);
      const auto wrow = filter.weights.row(r);
      for (int c = 0; c < x.cols; ++c) sum += xrow[c] * wrow[c];
    }
    out[start] = sum;
  }
  return out;
}

ExampleCache run_forward(const CnnModel& model, const EncodedDocument& doc, int pad_len) {
  const CnnConfig& cfg = model.config;
  ExampleCache cache;
  cache.x = embed_padded(doc, model.params.embedding, pad_len);
  cache.pooled.reserve(cfg.feature_dim());
  for (const auto& group : model.params.filters) {
    for (const auto& filter : group) {
      auto pre = convolve_pre(cache.x, filter);
      std::vector<double> activated(pre.size());
      for (std::size_t i = 0; i < pre.size(); ++i) activated[i] = activate(cfg.activation, pre[i]);
      auto picked = kmax_positions(activated, cfg.pool_top);
      for (int pos : picked) cache.pooled.push_back(activated[pos]);
      cache.pre.push_back(std::move(pre));
      cache.picked.push_back(std::move(picked));
    }
  }

  std::vector<double> logits(cfg.num_classes, 0.0);
  for (int c = 0; c < cfg.num_classes; ++c) {
    double sum = model.params.classifier_bias[c];
    const auto wrow = model.params.classifier_weights.row(c);
    for (int j = 0; j < cfg.feature_dim(); ++j) sum += wrow[j] * cache.pooled[j];
    logits[c] = sum;
  }
  cache.probabilities = softmax(logits);
  return cache;
}

int batch_pad_len(const CnnModel& model, const std::vector<const EncodedDocument*>& batch) {
  int pad = model.config.min_document_length();
  for (const auto* doc : batch) pad = std::max(pad, static_cast<int>(doc->indices.size()));
  return pad;
}

CnnParams zeros_like(const CnnModel& model) {
  CnnParams z;
  z.embedding = Matrix(model.params.embedding.rows, model.params.embedding.cols, 0.0);
  z.filters.resize(model.params.filters.size());
  for (std::size_t g = 0; g < model.params.filters.size(); ++g) {
    for (const auto& filter : model.params.filters[g]) {
      ConvFilter zf;
      zf.weights = Matrix(filter.weights.rows, filter.weights.cols, 0.0);
      zf.bias = 0.0;
      z.filters[g].push_back(std::move(zf));
    }
  }
  z.classifier_weights =
      Matrix(model.params.classifier_weights.rows, model.params.classifier_weights.cols, 0.0);
  z.classifier_bias.assign(model.params.classifier_bias.size(), 0.0);
  return z;
}

// Applies fn(param, gradient, slot_a, slot_b) to every scalar parameter.
template <class Fn>
void for_each_param(CnnParams& params, const CnnGradients& grads, CnnParams& a, CnnParams& b,
                    Fn&& fn) {
  require(params.embedding.data.size() == grads.embedding.data.size() &&
              params.classifier_weights.data.size() == grads.classifier_weights.data.size() &&
              params.classifier_bias.size() == grads.classifier_bias.size() &&
              params.filters.size() == grads.filters.size(),
          "adadelta_step: gradient shape mismatch");
  for (std::size_t i = 0; i < params.embedding.data.size(); ++i)
    fn(params.embedding.data[i], grads.embedding.data[i], a.embedding.data[i],
       b.embedding.data[i]);
  for (std::size_t g = 0; g < params.filters.size(); ++g) {
    require(params.filters[g].size() == grads.filters[g].size(),
            "adadelta_step: filter group shape mismatch");
    for (std::size_t f = 0; f < params.filters[g].size(); ++f) {
      auto& pf = params.filters[g][f];
      const auto& gf = grads.filters[g][f];
      require(pf.weights.data.size() == gf.weights.data.size(),
              "adadelta_step: filter shape mismatch");
      for (std::size_t i = 0; i < pf.weights.data.size(); ++i)
        fn(pf.weights.data[i], gf.weights.data[i], a.filters[g][f].weights.data[i],
           b.filters[g][f].weights.data[i]);
      fn(pf.bias, gf.bias, a.filters[g][f].bias, b.filters[g][f].bias);
    }
  }
  for (std::size_t i = 0; i < params.classifier_weights.data.size(); ++i)
    fn(params.classifier_weights.data[i], grads.classifier_weights.data[i],
       a.classifier_weights.data[i], b.classifier_weights.data[i]);
  for (std::size_t i = 0; i < params.classifier_bias.size(); ++i)
    fn(params.classifier_bias[i], grads.classifier_bias[i], a.classifier_bias[i],
       b.classifier_bias[i]);
}

}  // namespace

CnnModel init_cnn(int lexicon_size, const CnnConfig& config) {
  config.validate();
  require(lexicon_size >= 1, "init_cnn: lexicon is empty");

  CnnModel model;
  model.config = config;
  model.lexicon_size = lexicon_size;

  Rng rng(config.seed);
  const int K = config.embedding_dim;
  model.params.embedding = Matrix(lexicon_size + 1, K, 0.0);
  for (int h = 1; h <= lexicon_size; ++h) {
    auto row = model.params.embedding.row(h);
    for (int c = 0; c < K; ++c) row[c] = rng.uniform(-0.25, 0.25);
  }

  for (int len : config.filter_lengths) {
    std::vector<ConvFilter> group;
    const double bound = std::sqrt(6.0 / (static_cast<double>(len) * K + 1.0));
    for (int f = 0; f < config.filters_per_length; ++f) {
      ConvFilter filter;
      filter.weights = Matrix(len, K, 0.0);
      for (double& w : filter.weights.data) w = rng.uniform(-bound, bound);
      filter.bias = 0.0;
      group.push_back(std::move(filter));
    }
    model.params.filters.push_back(std::move(group));
  }

  const int feature_dim = config.feature_dim();
  const double bound = std::sqrt(6.0 / (feature_dim + config.num_classes));
  model.params.classifier_weights = Matrix(config.num_classes, feature_dim, 0.0);
  for (double& w : model.params.classifier_weights.data) w = rng.uniform(-bound, bound);
  model.params.classifier_bias.assign(config.num_classes, 0.0);
  return model;
}

void load_pretrained_embeddings(CnnModel& model, const std::string& path,
                                const TermLexicon& lexicon) {
  std::ifstream in(path);
  if (!in) throw IoError("embedding file not found: " + path);
  const int K = model.config.embedding_dim;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    const int index = lexicon.index_of(word);
    std::vector<double> values;
    double v;
    while (ss >> v) values.push_back(v);
    if (static_cast<int>(values.size()) != K)
      throw IoError(path + ": line " + std::to_string(line_number) + ": expected " +
                    std::to_string(K) + " values, got " + std::to_string(values.size()));
    if (index == 0) continue;  // word not in lexicon
    auto row = model.params.embedding.row(index);
    std::copy(values.begin(), values.end(), row.begin());
  }
}

Matrix embed(const EncodedDocument& doc, const Matrix& embedding) {
  return embed_padded(doc, embedding, static_cast<int>(doc.indices.size()));
}

std::vector<double> convolve(const Matrix& x, const ConvFilter& filter, Activation activation) {
  auto out = convolve_pre(x, filter);
  for (double& v : out) v = activate(activation, v);
  return out;
}

std::vector<double> kmax_pool(std::span<const double> values, int omega) {
  require(omega >= 1, "kmax_pool: omega must be >= 1");
  const auto positions = kmax_positions(values, omega);
  std::vector<double> out;
  out.reserve(positions.size());
  for (int pos : positions) out.push_back(values[pos]);
  return out;
}

std::vector<double> feature_vector(const EncodedDocument& doc, const CnnModel& model) {
  const auto cache = run_forward(model, doc, static_cast<int>(doc.indices.size()));
  return cache.pooled;
}

std::vector<double> forward(const EncodedDocument& doc, const CnnModel& model) {
  const auto cache = run_forward(model, doc, static_cast<int>(doc.indices.size()));
  return cache.probabilities;
}

double cross_entropy(std::span<const double> probabilities, int label) {
  require(label >= 0 && label < static_cast<int>(probabilities.size()),
          "cross_entropy: label out of range");
  return -std::log(std::max(probabilities[label], 1e-12));
}

BatchGradients backward(const CnnModel& model, const std::vector<const EncodedDocument*>& batch,
                        const std::vector<int>& labels) {
  require(!batch.empty(), "backward: empty batch");
  require(batch.size() == labels.size(), "backward: batch and label sizes differ");
  const CnnConfig& cfg = model.config;
  const int pad_len = batch_pad_len(model, batch);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  BatchGradients out;
  out.gradients = zeros_like(model);

  for (std::size_t e = 0; e < batch.size(); ++e) {
    const EncodedDocument& doc = *batch[e];
    const int label = labels[e];
    require(label >= 0 && label < cfg.num_classes,
            "backward: label out of range for document " + doc.id);

    const ExampleCache cache = run_forward(model, doc, pad_len);
    out.mean_loss += cross_entropy(cache.probabilities, label) * inv_batch;

    // Softmax + cross-entropy: dL/dlogit_c = (p_c - [c == label]) / B.
    std::vector<double> dlogits(cfg.num_classes);
    for (int c = 0; c < cfg.num_classes; ++c)
      dlogits[c] = (cache.probabilities[c] - (c == label ? 1.0 : 0.0)) * inv_batch;

    const int feature_dim = cfg.feature_dim();
    std::vector<double> dpooled(feature_dim, 0.0);
    for (int c = 0; c < cfg.num_classes; ++c) {
      auto grad_row = out.gradients.classifier_weights.row(c);
      const auto weight_row = model.params.classifier_weights.row(c);
      for (int j = 0; j < feature_dim; ++j) {
        grad_row[j] += dlogits[c] * cache.pooled[j];
        dpooled[j] += weight_row[j] * dlogits[c];
      }
      out.gradients.classifier_bias[c] += dlogits[c];
    }

    Matrix dx(cache.x.rows, cache.x.cols, 0.0);
    int flat = 0;
    for (std::size_t g = 0; g < model.params.filters.size(); ++g) {
      for (std::size_t f = 0; f < model.params.filters[g].size(); ++f, ++flat) {
        const ConvFilter& filter = model.params.filters[g][f];
        ConvFilter& dfilter = out.gradients.filters[g][f];
        const auto& pre = cache.pre[flat];
        const auto& picked = cache.picked[flat];
        for (int r = 0; r < cfg.pool_top; ++r) {
          const int pos = picked[r];
          // Pooling routes gradient only to the selected window.
          const double dc = dpooled[flat * cfg.pool_top + r] *
                            activate_derivative(cfg.activation, pre[pos]);
          if (dc == 0.0) continue;
          dfilter.bias += dc;
          for (int row = 0; row < filter.weights.rows; ++row) {
            const auto xrow = cache.x.row(pos + row);
            auto dwrow = dfilter.weights.row(row);
            const auto wrow = filter.weights.row(row);
            auto dxrow = dx.row(pos + row);
            for (int c = 0; c < cache.x.cols; ++c) {
              dwrow[c] += dc * xrow[c];
              dxrow[c] += dc * wrow[c];
            }
          }
        }
      }
    }

    for (int n = 0; n < dx.rows; ++n) {
      const int index = n < static_cast<int>(doc.indices.size()) ? doc.indices[n] : 0;
      if (index == 0) continue;  // padding row is frozen
      auto grad_row = out.gradients.embedding.row(index);
      const auto dxrow = dx.row(n);
      for (int c = 0; c < dx.cols; ++c) grad_row[c] += dxrow[c];
    }
  }
  return out;
}

double batch_mean_loss(const CnnModel& model, const std::vector<const EncodedDocument*>& batch,
                       const std::vector<int>& labels) {
  require(!batch.empty(), "batch_mean_loss: empty batch");
  require(batch.size() == labels.size(), "batch_mean_loss: batch and label sizes differ");
  const int pad_len = batch_pad_len(model, batch);
  double loss = 0.0;
  for (std::size_t e = 0; e < batch.size(); ++e) {
    const ExampleCache cache = run_forward(model, *batch[e], pad_len);
    loss += cross_entropy(cache.probabilities, labels[e]);
  }
  return loss / static_cast<double>(batch.size());
}

void adadelta_step(CnnModel& model, const CnnGradients& gradients, AdadeltaState& state,
                   double rho, double eps) {
  require(rho > 0.0 && rho < 1.0, "adadelta_step: rho must be in (0, 1)");
  require(eps > 0.0, "adadelta_step: eps must be positive");
  if (!state.initialized) {
    state.accumulated_gradient = zeros_like(model);
    state.accumulated_update = zeros_like(model);
    state.initialized = true;
  }
  for_each_param(model.params, gradients, state.accumulated_gradient, state.accumulated_update,
                 [rho, eps](double& param, double grad, double& acc_grad, double& acc_update) {
                   acc_grad = rho * acc_grad + (1.0 - rho) * grad * grad;
                   const double delta =
                       -(std::sqrt(acc_update + eps) / std::sqrt(acc_grad + eps)) * grad;
                   acc_update = rho * acc_update + (1.0 - rho) * delta * delta;
                   param += delta;
                 });
}

std::vector<double> train(CnnModel& model, const std::vector<EncodedDocument>& docs,
                          const std::vector<int>& labels, const TrainConfig& cfg) {
  require(!docs.empty(), "train: empty training set");
  require(docs.size() == labels.size(), "train: document and label counts differ");
  require(cfg.batch_size >= 1, "train: batch_size must be >= 1");
  require(cfg.epochs >= 0, "train: epochs must be >= 0");
  for (std::size_t i = 0; i < labels.size(); ++i)
    require(labels[i] >= 0 && labels[i] < model.config.num_classes,
            "train: label out of range for document " + docs[i].id);

  std::vector<double> epoch_losses;
  AdadeltaState state;
  Rng rng(cfg.seed);
  std::vector<int> order(docs.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<const EncodedDocument*> batch;
      std::vector<int> batch_labels;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&docs[order[i]]);
        batch_labels.push_back(labels[order[i]]);
      }
      auto result = backward(model, batch, batch_labels);
      adadelta_step(model, result.gradients, state, cfg.adadelta_rho, cfg.adadelta_eps);
      loss_sum += result.mean_loss * static_cast<double>(batch.size());
    }
    epoch_losses.push_back(loss_sum / static_cast<double>(docs.size()));
  }
  return epoch_losses;
}

double accuracy(const CnnModel& model, const std::vector<EncodedDocument>& docs,
                const std::vector<int>& labels) {
  require(!docs.empty(), "accuracy: no documents");
  require(docs.size() == labels.size(), "accuracy: document and label counts differ");
  int correct = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto probs = forward(docs[i], model);
    int best = 0;
    for (int c = 1; c < static_cast<int>(probs.size()); ++c)
      if (probs[c] > probs[best]) best = c;
    if (best == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(docs.size());
}

CrossValidationResult cross_validate(const std::vector<EncodedDocument>& docs,
                                     const std::vector<int>& labels, int lexicon_size,
                                     const CnnConfig& cnn_cfg, const TrainConfig& train_cfg,
                                     const PretrainedEmbeddings* pretrained) {
  require(docs.size() == labels.size(), "cross_validate: document and label counts differ");
  require(train_cfg.folds >= 2, "cross_validate: need at least 2 folds");
  require(train_cfg.test_fraction > 0.0 && train_cfg.test_fraction < 1.0,
          "cross_validate: test_fraction must be in (0, 1)");

  const int n = static_cast<int>(docs.size());
  Rng rng(train_cfg.seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  const int test_count = std::max(1, static_cast<int>(std::llround(train_cfg.test_fraction * n)));
  const int remaining = n - test_count;
  if (remaining < train_cfg.folds)
    throw std::invalid_argument("cross_validate: fewer documents than folds after the test split");

  std::vector<int> test_idx(order.begin(), order.begin() + test_count);
  std::vector<int> pool(order.begin() + test_count, order.end());

  auto subset = [&](const std::vector<int>& idx) {
    std::pair<std::vector<EncodedDocument>, std::vector<int>> out;
    for (int i : idx) {
      out.first.push_back(docs[i]);
      out.second.push_back(labels[i]);
    }
    return out;
  };
  const auto [test_docs, test_labels] = subset(test_idx);

  // Split the pool into folds of near-equal size (first folds take the remainder).
  std::vector<std::vector<int>> folds(train_cfg.folds);
  const int base = remaining / train_cfg.folds;
  int extra = remaining % train_cfg.folds;
  std::size_t cursor = 0;
  for (auto& fold : folds) {
    int take = base + (extra > 0 ? 1 : 0);
    if (extra > 0) --extra;
    for (int i = 0; i < take; ++i) fold.push_back(pool[cursor++]);
    require(!fold.empty(), "cross_validate: empty fold");
  }

  CrossValidationResult result;
  double best_test = -1.0;
  for (int f = 0; f < train_cfg.folds; ++f) {
    std::vector<int> train_idx;
    for (int g = 0; g < train_cfg.folds; ++g)
      if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
    const auto [fold_train_docs, fold_train_labels] = subset(train_idx);
    const auto [fold_val_docs, fold_val_labels] = subset(folds[f]);

    CnnConfig fold_cnn_cfg = cnn_cfg;
    fold_cnn_cfg.seed = mix_seed(cnn_cfg.seed, static_cast<std::uint64_t>(f) + 1);
    TrainConfig fold_train_cfg = train_cfg;
    fold_train_cfg.seed = mix_seed(train_cfg.seed, static_cast<std::uint64_t>(f) + 101);

    CnnModel model = init_cnn(lexicon_size, fold_cnn_cfg);
    if (pretrained) {
      require(pretrained->lexicon != nullptr, "cross_validate: pretrained lexicon missing");
      load_pretrained_embeddings(model, pretrained->path, *pretrained->lexicon);
    }
    train(model, fold_train_docs, fold_train_labels, fold_train_cfg);

    FoldScore score;
    score.validation = accuracy(model, fold_val_docs, fold_val_labels);
    score.test = accuracy(model, test_docs, test_labels);
    result.folds.push_back(score);
    result.validation_mean += score.validation;
    result.test_mean += score.test;
    if (score.test > best_test) {
      best_test = score.test;
      result.selected_fold = f;
      result.best_model = std::move(model);
    }
  }
  result.validation_mean /= train_cfg.folds;
  result.test_mean /= train_cfg.folds;
  return result;
}

std::vector<FeatureVector> extract_features(const std::vector<EncodedDocument>& docs,
                                            const CnnModel& model) {
  std::vector<FeatureVector> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) out.push_back({doc.id, feature_vector(doc, model)});
  return out;
}

void save_model(const CnnModel& model, const std::string& path) {
  nlohmann::json j;
  j["format"] = "fvsm-cnn-checkpoint";
  j["version"] = 1;
  j["config"] = {
      {"embedding_dim", model.config.embedding_dim},
      {"filter_lengths", model.config.filter_lengths},
      {"filters_per_length", model.config.filters_per_length},
      {"pool_top", model.config.pool_top},
      {"num_classes", model.config.num_classes},
      {"activation", activation_name(model.config.activation)},
      {"seed", model.config.seed},
  };
  j["lexicon_size"] = model.lexicon_size;
  j["embedding"] = model.params.embedding.data;
  nlohmann::json filters = nlohmann::json::array();
  for (std::size_t g = 0; g < model.params.filters.size(); ++g) {
    for (const auto& filter : model.params.filters[g]) {
      filters.push_back({{"length", filter.weights.rows},
                         {"weights", filter.weights.data},
                         {"bias", filter.bias}});
    }
  }
  j["filters"] = filters;
  j["classifier_weights"] = model.params.classifier_weights.data;
  j["classifier_bias"] = model.params.classifier_bias;
  write_file(path, j.dump(2) + "\n");
}

CnnModel load_model(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("model checkpoint " + path + ": " + e.what());
  }
  if (!j.contains("format") || j["format"] != "fvsm-cnn-checkpoint" || j["version"] != 1)
    throw IoError("model checkpoint " + path + ": unrecognized format");

  CnnModel model;
  const auto& cfg = j["config"];
  model.config.embedding_dim = cfg["embedding_dim"].get<int>();
  model.config.filter_lengths = cfg["filter_lengths"].get<std::vector<int>>();
  model.config.filters_per_length = cfg["filters_per_length"].get<int>();
  model.config.pool_top = cfg["pool_top"].get<int>();
  model.config.num_classes = cfg["num_classes"].get<int>();
  model.config.activation = activation_from_name(cfg["activation"].get<std::string>());
  model.config.seed = cfg["seed"].get<std::uint64_t>();
  model.config.validate();
  model.lexicon_size = j["lexicon_size"].get<int>();

  const int K = model.config.embedding_dim;
  model.params.embedding = Matrix(model.lexicon_size + 1, K, 0.0);
  model.params.embedding.data = j["embedding"].get<std::vector<double>>();
  require(static_cast<int>(model.params.embedding.data.size()) ==
              (model.lexicon_size + 1) * K,
          "model checkpoint: embedding size mismatch");

  auto filter_it = j["filters"].begin();
  for (int len : model.config.filter_lengths) {
    std::vector<ConvFilter> group;
    for (int f = 0; f < model.config.filters_per_length; ++f, ++filter_it) {
      require(filter_it != j["filters"].end(), "model checkpoint: missing filters");
      ConvFilter filter;
      require((*filter_it)["length"].get<int>() == len, "model checkpoint: filter length mismatch");
      filter.weights = Matrix(len, K, 0.0);
      filter.weights.data = (*filter_it)["weights"].get<std::vector<double>>();
      require(static_cast<int>(filter.weights.data.size()) == len * K,
              "model checkpoint: filter size mismatch");
      filter.bias = (*filter_it)["bias"].get<double>();
      group.push_back(std::move(filter));
    }
    model.params.filters.push_back(std::move(group));
  }

  model.params.classifier_weights = Matrix(model.config.num_classes, model.config.feature_dim(), 0.0);
  model.params.classifier_weights.data = j["classifier_weights"].get<std::vector<double>>();
  require(static_cast<int>(model.params.classifier_weights.data.size()) ==
              model.config.num_classes * model.config.feature_dim(),
          "model checkpoint: classifier size mismatch");
  model.params.classifier_bias = j["classifier_bias"].get<std::vector<double>>();
  require(static_cast<int>(model.params.classifier_bias.size()) == model.config.num_classes,
          "model checkpoint: classifier bias size mismatch");
  return model;
}

}  // namespace fvsm
