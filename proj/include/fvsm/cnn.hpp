#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fvsm/corpus.hpp"
#include "fvsm/util.hpp"

namespace fvsm {

enum class Activation { Relu, Tanh, Sigmoid };

Activation activation_from_name(const std::string& name);
const char* activation_name(Activation activation);

struct CnnConfig {
  int embedding_dim = 300;              // K
  std::vector<int> filter_lengths = {3, 4, 5};
  int filters_per_length = 100;         // filters per length
  int pool_top = 1;                     // values kept per filter (1 = max pooling)
  int num_classes = 2;
  Activation activation = Activation::Relu;
  std::uint64_t seed = 1;

  int feature_dim() const {
    return pool_top * static_cast<int>(filter_lengths.size()) * filters_per_length;
  }
  int max_filter_length() const;
  /// Shortest document (after padding) every filter can both convolve and pool.
  int min_document_length() const { return max_filter_length() + pool_top - 1; }
  void validate() const;
};

struct ConvFilter {
  Matrix weights;  // filter_length x embedding_dim
  double bias = 0.0;
};

struct CnnParams {
  Matrix embedding;  // (H+1) x K; row 0 is the padding row, pinned to zero
  std::vector<std::vector<ConvFilter>> filters;  // [length group][filter]
  Matrix classifier_weights;                     // num_classes x feature_dim
  std::vector<double> classifier_bias;           // num_classes
};

struct CnnModel {
  CnnConfig config;
  int lexicon_size = 0;  // H
  CnnParams params;
};

/// Random initialization: embedding rows uniform(-0.25, 0.25), filter and
/// classifier weights uniform over +-sqrt(6 / (fan_in + fan_out)), biases 0.
CnnModel init_cnn(int lexicon_size, const CnnConfig& config);

/// Overrides embedding rows from a plain-text file ("word v_1 ... v_K" per
/// line) for words present in the lexicon. Lines for unknown words are skipped.
void load_pretrained_embeddings(CnnModel& model, const std::string& path,
                                const TermLexicon& lexicon);

/// Embedding lookup: row n of the result is embedding row indices[n].
Matrix embed(const EncodedDocument& doc, const Matrix& embedding);

/// 1-D convolution with stride 1: output length rows(x) - filter_length + 1.
std::vector<double> convolve(const Matrix& x, const ConvFilter& filter, Activation activation);

/// The omega largest values in descending order; ties keep the earlier position.
std::vector<double> kmax_pool(std::span<const double> values, int omega);

/// Pooling-layer activations: kmax over each filter's convolution, filters
/// concatenated group by group. Dimension = config.feature_dim() always.
std::vector<double> feature_vector(const EncodedDocument& doc, const CnnModel& model);

/// Class probabilities (softmax over the linear classifier).
std::vector<double> forward(const EncodedDocument& doc, const CnnModel& model);

/// -ln(probabilities[label]), input clamped at 1e-12.
double cross_entropy(std::span<const double> probabilities, int label);

using CnnGradients = CnnParams;

struct BatchGradients {
  CnnGradients gradients;  // mean gradient of the mean cross-entropy loss
  double mean_loss = 0.0;
};

/// Analytic backpropagation through the full network for one mini-batch.
/// Documents are padded to the batch maximum length; the embedding padding
/// row receives no gradient.
BatchGradients backward(const CnnModel& model,
                        const std::vector<const EncodedDocument*>& batch,
                        const std::vector<int>& labels);

/// Mean cross-entropy of a batch under the same padding rule as backward().
double batch_mean_loss(const CnnModel& model,
                       const std::vector<const EncodedDocument*>& batch,
                       const std::vector<int>& labels);

struct AdadeltaState {
  CnnParams accumulated_gradient;
  CnnParams accumulated_update;
  bool initialized = false;
};

/// One AdaDelta update over every parameter; state starts at zero.
void adadelta_step(CnnModel& model, const CnnGradients& gradients, AdadeltaState& state,
                   double rho, double eps);

struct TrainConfig {
  int batch_size = 50;
  int epochs = 10;
  double adadelta_rho = 0.95;
  double adadelta_eps = 1e-6;
  int folds = 10;
  double test_fraction = 0.1;
  std::uint64_t seed = 1;
};

/// Mini-batch AdaDelta training with a per-epoch reshuffle.
/// Returns the mean loss per epoch.
std::vector<double> train(CnnModel& model, const std::vector<EncodedDocument>& docs,
                          const std::vector<int>& labels, const TrainConfig& cfg);

double accuracy(const CnnModel& model, const std::vector<EncodedDocument>& docs,
                const std::vector<int>& labels);

struct FoldScore {
  double validation = 0.0;
  double test = 0.0;
};

struct CrossValidationResult {
  std::vector<FoldScore> folds;
  double validation_mean = 0.0;
  double test_mean = 0.0;
  int selected_fold = 0;  // fold with the highest test score (0-based)
  CnnModel best_model;
};

/// Optional pretrained-embedding initialization for cross_validate.
struct PretrainedEmbeddings {
  std::string path;
  const TermLexicon* lexicon = nullptr;
};

/// Holds out a seeded test split, trains one model per fold on the remaining
/// folds, scores each on its validation fold and the shared test set, and
/// keeps the model with the best test score. When pretrained embeddings are
/// given, every fold starts from them instead of random embedding rows.
CrossValidationResult cross_validate(const std::vector<EncodedDocument>& docs,
                                     const std::vector<int>& labels, int lexicon_size,
                                     const CnnConfig& cnn_cfg, const TrainConfig& train_cfg,
                                     const PretrainedEmbeddings* pretrained = nullptr);

struct FeatureVector {
  std::string doc_id;
  std::vector<double> values;
};

std::vector<FeatureVector> extract_features(const std::vector<EncodedDocument>& docs,
                                            const CnnModel& model);

/// Versioned JSON checkpoint with the config and all parameter arrays.
void save_model(const CnnModel& model, const std::string& path);
CnnModel load_model(const std::string& path);

}  // namespace fvsm
