// Acceptance suite: one check per release criterion, printing one PASS/FAIL
// line each. Exits non-zero if any criterion fails. Oracles here are
// independent re-derivations (finite differences, exhaustive search, full
// sorts, hand formulas), never calls back into the code paths they check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fvsm/benchmark.hpp"
#include "fvsm/cluster.hpp"
#include "fvsm/cnn.hpp"
#include "fvsm/corpus.hpp"
#include "fvsm/dimred.hpp"
#include "fvsm/lda.hpp"
#include "fvsm/pipeline.hpp"
#include "fvsm/space.hpp"
#include "fvsm/stemmer.hpp"
#include "fvsm/tfidf.hpp"
#include "fvsm/util.hpp"

using namespace fvsm;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
  explicit Failure(const std::string& message) : std::runtime_error(message) {}
};

void expect(bool condition, const std::string& message) {
  if (!condition) throw Failure(message);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// --------------------------------------------------------------------------
// Shared constructions

EncodedDocument make_doc(std::string id, std::vector<int> indices) {
  EncodedDocument doc;
  doc.id = std::move(id);
  for (int i : indices)
    if (i != 0) ++doc.term_count;
  doc.indices = std::move(indices);
  return doc;
}

std::vector<double*> parameter_pointers(CnnParams& params) {
  std::vector<double*> out;
  const int cols = params.embedding.cols;  // skip the pinned padding row
  for (std::size_t i = static_cast<std::size_t>(cols); i < params.embedding.data.size(); ++i)
    out.push_back(&params.embedding.data[i]);
  for (auto& group : params.filters)
    for (auto& filter : group) {
      for (auto& w : filter.weights.data) out.push_back(&w);
      out.push_back(&filter.bias);
    }
  for (auto& w : params.classifier_weights.data) out.push_back(&w);
  for (auto& b : params.classifier_bias) out.push_back(&b);
  return out;
}

FeatureSpace gaussian_blobs(int clusters, int per_cluster, int dim, double separation,
                            std::uint64_t seed) {
  Rng rng(seed);
  FeatureSpace space(dim);
  int id = 0;
  for (int c = 0; c < clusters; ++c) {
    std::vector<double> center(dim, 0.0);
    for (double& v : center) v = rng.uniform(-1, 1);
    center[c % dim] += separation * (1 + c / dim);
    for (int p = 0; p < per_cluster; ++p) {
      std::vector<double> point = center;
      for (double& v : point) v += rng.gaussian();
      space.add("p" + std::to_string(id++), point);
    }
  }
  return space;
}

// --------------------------------------------------------------------------
// Criteria

std::string check_reference_values() {
  // Scores of the original IoT study are documentation constants, never
  // asserted against runs: the corpus and its manual triads are unavailable.
  expect(benchmark::kIotCorpusSize == 8942 && benchmark::kIotTriadCountS1 == 156 &&
             benchmark::kIotTriadCountS2 == 61 && benchmark::kIotSelectedClusterCount == 18,
         "documented corpus constants changed");
  expect(benchmark::kIotCvValidationMean == 0.884 && benchmark::kIotCvTestMean == 0.880 &&
             benchmark::kIotCvBestFoldTest == 0.917,
         "documented cross-validation constants changed");
  expect(benchmark::kIotFeatureSpaceAccuracyS1 == 0.910 &&
             benchmark::kIotFeatureSpaceAccuracyS2 == 0.672 &&
             benchmark::kIotFeatureSpaceAccuracyAll == 0.843 &&
             benchmark::kIotTfidfAccuracyS1 == 0.821 && benchmark::kIotTfidfAccuracyS2 == 0.639 &&
             benchmark::kIotTfidfAccuracyAll == 0.770,
         "documented triad accuracy constants changed");
  return "paper-scale scores recorded as documentation constants only; properties below "
         "substitute for them";
}

std::string check_gradients() {
  const auto start = std::chrono::steady_clock::now();

  CnnConfig cfg;
  cfg.embedding_dim = 8;  // K=8, H=50, N=12, lengths {2,3}, mu=4, omega=2, m=3
  cfg.filter_lengths = {2, 3};
  cfg.filters_per_length = 4;
  cfg.pool_top = 2;
  cfg.num_classes = 3;
  cfg.activation = Activation::Tanh;
  cfg.seed = 1234;
  auto model = init_cnn(50, cfg);

  // Distinct indices per document avoid exact pooling ties, where the loss
  // would not be differentiable and finite differences straddle the kink.
  Rng rng(4321);
  std::vector<EncodedDocument> docs;
  std::vector<int> labels;
  for (int d = 0; d < 4; ++d) {
    std::vector<int> all(50);
    for (int i = 0; i < 50; ++i) all[i] = i + 1;
    rng.shuffle(all);
    docs.push_back(make_doc("d" + std::to_string(d), {all.begin(), all.begin() + 12}));
    labels.push_back(d % 3);
  }
  std::vector<const EncodedDocument*> batch;
  for (const auto& doc : docs) batch.push_back(&doc);

  auto analytic = backward(model, batch, labels);
  const auto params = parameter_pointers(model.params);
  const auto grads = parameter_pointers(analytic.gradients);
  expect(params.size() == grads.size(), "parameter/gradient shape mismatch");

  const double h = 1e-4;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = *params[i];
    *params[i] = saved + h;
    const double plus = batch_mean_loss(model, batch, labels);
    *params[i] = saved - h;
    const double minus = batch_mean_loss(model, batch, labels);
    *params[i] = saved;
    const double numeric = (plus - minus) / (2 * h);
    const double diff = std::fabs(numeric - *grads[i]);
    if (diff > 1e-8)
      max_rel = std::max(max_rel, diff / std::max({std::fabs(numeric), std::fabs(*grads[i]),
                                                   1e-8}));
  }
  const double elapsed = seconds_since(start);
  expect(max_rel < 1e-4, "max relative error " + fmt(max_rel) + " >= 1e-4");
  expect(elapsed < 10.0, "gradient check took " + fmt(elapsed) + " s >= 10 s");
  return std::to_string(params.size()) + " parameters, max relative error " + fmt(max_rel) +
         ", " + fmt(elapsed) + " s";
}

std::string check_dimension_law() {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    CnnConfig cfg;
    cfg.embedding_dim = 1 + static_cast<int>(rng.below(6));
    const int theta = 1 + static_cast<int>(rng.below(3));
    std::vector<int> lengths = {1, 2, 3, 4};
    rng.shuffle(lengths);
    cfg.filter_lengths.assign(lengths.begin(), lengths.begin() + theta);
    cfg.filters_per_length = 1 + static_cast<int>(rng.below(4));
    cfg.pool_top = 1 + static_cast<int>(rng.below(3));
    cfg.num_classes = 2;
    cfg.seed = trial;
    const int H = 8;
    const auto model = init_cnn(H, cfg);

    const int expected = cfg.pool_top * theta * cfg.filters_per_length;
    const int shortest = cfg.min_document_length();
    for (int extra : {0, 9}) {
      std::vector<int> indices;
      for (int i = 0; i < shortest + extra; ++i)
        indices.push_back(1 + static_cast<int>(rng.below(H)));
      const auto fv = feature_vector(make_doc("d", indices), model);
      expect(static_cast<int>(fv.size()) == expected,
             "dimension mismatch: got " + std::to_string(fv.size()) + ", expected " +
                 std::to_string(expected));
    }
  }

  CnnConfig paper;
  paper.embedding_dim = 4;
  paper.filter_lengths = {3, 4, 5};
  paper.filters_per_length = 100;
  paper.pool_top = 1;
  paper.num_classes = 2;
  const auto model = init_cnn(10, paper);
  const auto fv = feature_vector(make_doc("d", {1, 2, 3, 4, 5, 6, 7, 8}), model);
  expect(fv.size() == 300, "reference configuration must give 300 dimensions");
  return "100 random configurations x 2 lengths; reference config gives 300";
}

std::string check_pooling_oracle() {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(40));
    std::vector<double> values(n);
    for (double& v : values)
      v = rng.below(3) == 0 ? static_cast<double>(rng.below(4)) : rng.uniform(-2, 2);
    const int omega = 1 + static_cast<int>(rng.below(n));

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    sorted.resize(omega);
    expect(kmax_pool(values, omega) == sorted, "pooled values differ from the sorted oracle");
  }
  return "1000 random vectors incl. tie-heavy cases match the full-sort oracle";
}

struct FixtureCorpus {
  std::vector<EncodedDocument> docs;
  std::vector<int> labels;
  int lexicon_size = 0;
};

FixtureCorpus load_bundled_fixture(int pad_to) {
  const std::string root = FVSM_SOURCE_DIR;
  const auto records = load_corpus(root + "/data/fixture/corpus.jsonl");
  const auto stopwords = load_stopwords(root + "/data/stopwords_en.txt");
  const auto phrases = load_phrases(root + "/data/fixture/phrases.txt");

  std::vector<TokenizedDocument> tokenized;
  for (const auto& record : records) tokenized.push_back(preprocess(record, stopwords, 3));
  tokenized = filter_by_phrases(tokenized, phrases);
  const auto lexicon = TermLexicon::build(tokenized);

  FixtureCorpus corpus;
  corpus.lexicon_size = lexicon.size();
  for (const auto& doc : tokenized) {
    corpus.docs.push_back(encode(doc, lexicon, pad_to));
    expect(doc.label.has_value(), "fixture document lacks a label: " + doc.id);
    corpus.labels.push_back(*doc.label);
  }
  return corpus;
}

std::string check_end_to_end_learning() {
  const auto start = std::chrono::steady_clock::now();

  CnnConfig cfg;
  cfg.embedding_dim = 16;
  cfg.filter_lengths = {2, 3};
  cfg.filters_per_length = 8;
  cfg.pool_top = 1;
  cfg.num_classes = 3;
  cfg.seed = 71;
  const auto corpus = load_bundled_fixture(cfg.min_document_length());
  expect(corpus.docs.size() >= 200, "fixture should keep about 210 documents");

  TrainConfig train_cfg;
  train_cfg.folds = 2;
  train_cfg.epochs = 20;
  train_cfg.seed = 72;
  const auto cv = cross_validate(corpus.docs, corpus.labels, corpus.lexicon_size, cfg, train_cfg);

  const double elapsed = seconds_since(start);
  for (std::size_t f = 0; f < cv.folds.size(); ++f)
    expect(cv.folds[f].test >= 0.90, "fold " + std::to_string(f + 1) + " test accuracy " +
                                         fmt(cv.folds[f].test) + " < 0.90");
  expect(elapsed < 180.0, "end-to-end run took " + fmt(elapsed) + " s >= 180 s");
  std::string detail = std::to_string(corpus.docs.size()) + " docs, fold test accuracies";
  for (const auto& fold : cv.folds) detail += " " + fmt(fold.test);
  return detail + ", " + fmt(elapsed) + " s";
}

std::string check_triad_protocol() {
  // Part 1: constructed geometry. The positive is an epsilon-perturbation of
  // the base; the negative lives on disjoint coordinates, so all three
  // measures must rank it less similar.
  Rng rng(12);
  FeatureSpace space(12);
  std::vector<Triad> triads;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> base(12, 1e-3);
    for (int i = 0; i < 6; ++i) base[i] = rng.uniform(1.0, 2.0);
    auto positive = base;
    for (double& v : positive) v += rng.uniform(0.0, 1e-2);
    std::vector<double> negative(12, 1e-3);
    for (int i = 6; i < 12; ++i) negative[i] = rng.uniform(10.0, 20.0);
    const std::string tag = std::to_string(t);
    space.add("P" + tag, base);
    space.add("P+" + tag, positive);
    space.add("P-" + tag, negative);
    triads.push_back({"P" + tag, "P+" + tag, "P-" + tag, "S1"});
  }
  for (Measure measure : {Measure::Euclidean, Measure::Cosine, Measure::Jaccard}) {
    const double accuracy = accuracy_rate(space, triads, measure).accuracy;
    expect(accuracy == 1.0, std::string("constructed triads under ") + measure_name(measure) +
                                ": accuracy " + fmt(accuracy) + " != 1.0");
  }

  // Part 2: word order is the only signal. Documents share the same counts of
  // the signature terms; the categories differ in their adjacency order, so a
  // bag-of-words space cannot separate what the convolutional features can.
  const int H = 10;  // terms 1,2 = signature pair; 3..10 = random filler
  Rng order_rng(55);
  std::vector<EncodedDocument> docs;
  std::vector<int> labels;
  for (int category = 0; category < 2; ++category) {
    for (int d = 0; d < 60; ++d) {
      std::vector<int> indices;
      for (int pair = 0; pair < 6; ++pair) {
        if (category == 0) {
          indices.push_back(1);
          indices.push_back(2);
        } else {
          indices.push_back(2);
          indices.push_back(1);
        }
        for (int f = 3; f <= H; ++f)
          if (pair == static_cast<int>(order_rng.below(6)) && order_rng.below(2) == 0)
            indices.push_back(f);
      }
      docs.push_back(make_doc("w" + std::to_string(category) + "_" + std::to_string(d), indices));
      labels.push_back(category);
    }
  }

  CnnConfig cfg;
  cfg.embedding_dim = 8;
  cfg.filter_lengths = {2};
  cfg.filters_per_length = 8;
  cfg.pool_top = 1;
  cfg.num_classes = 2;
  cfg.seed = 81;
  auto model = init_cnn(H, cfg);
  TrainConfig train_cfg;
  train_cfg.epochs = 30;
  train_cfg.seed = 82;
  train(model, docs, labels, train_cfg);

  FeatureSpace feature_space(cfg.feature_dim());
  for (const auto& fv : extract_features(docs, model)) feature_space.add(fv.doc_id, fv.values);

  // TF-IDF over the same documents (token text reconstructed from indices).
  std::vector<TokenizedDocument> tokenized;
  for (const auto& doc : docs) {
    TokenizedDocument t;
    t.id = doc.id;
    for (int index : doc.indices)
      if (index != 0) t.tokens.push_back("term" + std::to_string(index));
    tokenized.push_back(std::move(t));
  }
  const auto lexicon = TermLexicon::build(tokenized);
  const auto tfidf = TfidfModel::fit(tokenized, lexicon);
  FeatureSpace tfidf_space(lexicon.size());
  for (const auto& doc : tokenized) tfidf_space.add(doc.id, tfidf.dense_vector(doc.id));

  std::vector<Triad> order_triads;
  Rng triad_rng(66);
  for (int t = 0; t < 40; ++t) {
    const int category = t % 2;
    const int base = static_cast<int>(triad_rng.below(60));
    int positive = static_cast<int>(triad_rng.below(59));
    if (positive >= base) ++positive;
    const int negative = static_cast<int>(triad_rng.below(60));
    auto name = [&](int cat, int index) {
      return "w" + std::to_string(cat) + "_" + std::to_string(index);
    };
    order_triads.push_back({name(category, base), name(category, positive),
                            name(1 - category, negative), "order"});
  }

  const double feature_accuracy =
      accuracy_rate(feature_space, order_triads, Measure::Euclidean).accuracy;
  const double tfidf_accuracy =
      accuracy_rate(tfidf_space, order_triads, Measure::Euclidean).accuracy;
  expect(feature_accuracy - tfidf_accuracy >= 0.0,
         "feature space accuracy " + fmt(feature_accuracy) + " below TF-IDF " +
             fmt(tfidf_accuracy));
  return "constructed triads 1.0 on all measures; word-order fixture: feature space " +
         fmt(feature_accuracy) + " vs TF-IDF " + fmt(tfidf_accuracy);
}

std::string check_kmeans() {
  // SSE monotonicity is enforced inside every Lloyd iteration (the run throws
  // otherwise); exercise it across random instances.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto space = gaussian_blobs(3, 20, 4, 8.0, 300 + seed);
    ClusterConfig cfg;
    cfg.kappa = 3;
    cfg.restarts = 5;
    cfg.seed = seed;
    kmeans(space, cfg);
  }

  // Exhaustive bipartition oracle on 12-point instances.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    FeatureSpace space(2);
    std::vector<std::vector<double>> points;
    for (int i = 0; i < 12; ++i) {
      points.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
      space.add("p" + std::to_string(i), points.back());
    }
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask + 1 < (1u << 12); ++mask) {
      std::vector<double> sum0(2, 0.0), sum1(2, 0.0);
      int count0 = 0, count1 = 0;
      for (int i = 0; i < 12; ++i) {
        if ((mask >> i) & 1) {
          ++count1;
          sum1[0] += points[i][0];
          sum1[1] += points[i][1];
        } else {
          ++count0;
          sum0[0] += points[i][0];
          sum0[1] += points[i][1];
        }
      }
      double sse = 0;
      for (int i = 0; i < 12; ++i) {
        const auto& mean = ((mask >> i) & 1) ? sum1 : sum0;
        const int count = ((mask >> i) & 1) ? count1 : count0;
        const double dx = points[i][0] - mean[0] / count;
        const double dy = points[i][1] - mean[1] / count;
        sse += dx * dx + dy * dy;
      }
      best = std::min(best, sse);
    }

    ClusterConfig cfg;
    cfg.kappa = 2;
    cfg.restarts = 20;
    cfg.seed = seed * 13;
    const auto model = kmeans(space, cfg);
    expect(std::fabs(model.sse - best) <= 1e-9 * (1 + best),
           "kmeans SSE " + fmt(model.sse) + " differs from the exhaustive optimum " + fmt(best));
  }

  // Elbow recovers the planted count on every seed.
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int planted = 3 + static_cast<int>(seed % 4);
    const auto space = gaussian_blobs(planted, 30, 8, 25.0, 900 + seed);
    ClusterConfig cfg;
    cfg.restarts = 8;
    cfg.seed = seed;
    if (elbow(sse_curve(space, 2, planted + 3, cfg)) == planted) ++hits;
  }
  expect(hits == 10, "elbow found the planted count on only " + std::to_string(hits) + "/10");
  return "monotone SSE enforced; 5/5 exhaustive optima matched; elbow 10/10";
}

std::string check_lda() {
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(500 + seed);
    std::vector<EncodedDocument> docs;
    const int H = 40;
    for (int topic = 0; topic < 2; ++topic) {
      for (int d = 0; d < 30; ++d) {
        std::vector<int> indices;
        for (int i = 0; i < 40; ++i)
          indices.push_back(1 + static_cast<int>(rng.below(20)) + topic * 20);
        docs.push_back(make_doc("t" + std::to_string(topic) + "_" + std::to_string(d), indices));
      }
    }
    LdaConfig cfg;
    cfg.num_topics = 2;
    cfg.iterations = 150;
    cfg.alpha = 0.5;
    cfg.seed = seed;
    cfg.check_invariants = true;  // count bookkeeping verified every sweep
    const auto model = train_lda(docs, H, cfg);

    for (int k = 0; k < model.topic_term.rows; ++k) {
      double sum = 0;
      for (int t = 0; t < model.topic_term.cols; ++t) sum += model.topic_term(k, t);
      expect(std::fabs(sum - 1.0) < 1e-9, "topic_term row not stochastic");
    }
    for (int d = 0; d < model.doc_topic.rows; ++d) {
      double sum = 0;
      for (int k = 0; k < model.doc_topic.cols; ++k) sum += model.doc_topic(d, k);
      expect(std::fabs(sum - 1.0) < 1e-9, "doc_topic row not stochastic");
    }

    double mass0_on_a = 0, mass1_on_a = 0;
    for (int t = 0; t < 20; ++t) {
      mass0_on_a += model.topic_term(0, t);
      mass1_on_a += model.topic_term(1, t);
    }
    const int topic_a = mass0_on_a >= mass1_on_a ? 0 : 1;
    double mass_a = 0, mass_b = 0;
    for (int t = 0; t < 20; ++t) mass_a += model.topic_term(topic_a, t);
    for (int t = 20; t < 40; ++t) mass_b += model.topic_term(1 - topic_a, t);
    if (mass_a >= 0.9 && mass_b >= 0.9) ++recovered;
  }
  expect(recovered >= 9, "planted topics recovered on only " + std::to_string(recovered) + "/10");
  return "invariants on every sweep; rows stochastic; recovery " + std::to_string(recovered) +
         "/10";
}

std::string check_pca() {
  Rng rng(31);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> p(7);
    for (double& v : p) v = rng.uniform(-2, 2);
    points.push_back(p);
  }
  FeatureSpace space(7);
  for (std::size_t i = 0; i < points.size(); ++i) space.add("p" + std::to_string(i), points[i]);
  const auto result = pca2(space);

  double n00 = 0, n11 = 0, n01 = 0;
  for (int d = 0; d < 7; ++d) {
    n00 += result.components[0][d] * result.components[0][d];
    n11 += result.components[1][d] * result.components[1][d];
    n01 += result.components[0][d] * result.components[1][d];
  }
  expect(std::fabs(n00 - 1) < 1e-8 && std::fabs(n11 - 1) < 1e-8 && std::fabs(n01) < 1e-8,
         "components not orthonormal within 1e-8");
  expect(result.explained_variance[0] >= result.explained_variance[1],
         "explained variances out of order");

  FeatureSpace line(2);
  for (int i = 0; i < 12; ++i)
    line.add("l" + std::to_string(i), {0.5 * i - 3.0, 0.5 * i - 3.0});
  const auto rank1 = pca2(line);
  expect(rank1.explained_variance[1] < 1e-10,
         "rank-1 data should have near-zero second variance, got " +
             fmt(rank1.explained_variance[1]));
  return "orthonormal within 1e-8; ordered variances; rank-1 second variance " +
         fmt(rank1.explained_variance[1]);
}

std::string check_tsne() {
  // Per-point perplexity match.
  Rng rng(41);
  const int n = 60;
  Matrix d2(n, n, 0.0);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < n; ++i) points.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5),
                                                rng.uniform(-5, 5)});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int d = 0; d < 3; ++d)
        s += (points[i][d] - points[j][d]) * (points[i][d] - points[j][d]);
      d2(i, j) = s;
    }
  const double target = 17.5;
  const auto affinities = conditional_affinities(d2, target);
  for (int i = 0; i < n; ++i) {
    double entropy = 0;
    for (int j = 0; j < n; ++j) {
      const double p = affinities.p(i, j);
      if (p > 0) entropy -= p * std::log(p);
    }
    expect(std::fabs(std::exp(entropy) - target) <= 1e-4,
           "point " + std::to_string(i) + " perplexity off by " +
               fmt(std::fabs(std::exp(entropy) - target)));
  }

  // KL decreases after exaggeration; planted clusters separate.
  int kl_ok = 0, separated = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng gen(700 + seed);
    FeatureSpace space(10);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> point(10);
      for (double& v : point) v = gen.gaussian();
      if (i >= 50) point[0] += 40.0;
      space.add("p" + std::to_string(i), point);
    }
    TsneConfig cfg;  // published defaults
    cfg.seed = seed;
    const auto result = tsne2(space, cfg);
    if (result.kl_trace.back() < result.kl_trace[cfg.exaggeration_iters]) ++kl_ok;

    double max_intra = 0, min_inter = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i)
      for (int j = i + 1; j < 100; ++j) {
        const double dx = result.projection.coords[i][0] - result.projection.coords[j][0];
        const double dy = result.projection.coords[i][1] - result.projection.coords[j][1];
        const double dist = std::sqrt(dx * dx + dy * dy);
        if ((i < 50) == (j < 50)) max_intra = std::max(max_intra, dist);
        else min_inter = std::min(min_inter, dist);
      }
    if (min_inter > max_intra) ++separated;
  }
  const double elapsed = seconds_since(start);
  expect(kl_ok == 10, "KL decreased on only " + std::to_string(kl_ok) + "/10 runs");
  expect(separated >= 9, "clusters separated on only " + std::to_string(separated) + "/10 runs");
  expect(elapsed / 10.0 < 30.0, "a 100-point run took " + fmt(elapsed / 10.0) + " s >= 30 s");
  return "perplexity within 1e-4; KL " + std::to_string(kl_ok) + "/10; separation " +
         std::to_string(separated) + "/10; " + fmt(elapsed / 10.0) + " s per 100-point run";
}

std::string check_tfidf() {
  const std::vector<TokenizedDocument> docs = {
      {"d1", {"sensor", "network", "sensor", "shared"}, {}},
      {"d2", {"network", "cloud", "shared"}, {}},
      {"d3", {"cloud", "cloud", "gateway", "shared"}, {}},
  };
  const auto lexicon = TermLexicon::build(docs);
  const auto model = TfidfModel::fit(docs, lexicon);

  // Independent brute force with explicit loops.
  for (const auto& doc : docs) {
    for (const auto& term : doc.tokens) {
      int tf = 0;
      for (const auto& token : doc.tokens)
        if (token == term) ++tf;
      int df = 0;
      for (const auto& other : docs) {
        for (const auto& token : other.tokens)
          if (token == term) {
            ++df;
            break;
          }
      }
      const double expected = tf * std::log(3.0 / df);
      double got = 0.0;
      for (const auto& [index, weight] : model.vector_for(doc.id))
        if (index == lexicon.index_of(term)) got = weight;
      expect(std::fabs(got - expected) < 1e-12,
             "weight of \"" + term + "\" in " + doc.id + " off by " +
                 fmt(std::fabs(got - expected)));
    }
    // "shared" appears in all three documents: weight exactly 0, never stored.
    for (const auto& [index, weight] : model.vector_for(doc.id)) {
      (void)weight;
      expect(index != lexicon.index_of("shared"), "all-document term must have weight 0");
    }
  }
  return "matches the brute-force oracle to 1e-12; all-document term weight exactly 0";
}

std::string check_porter() {
  std::ifstream in(FVSM_SOURCE_DIR "/tests/golden/porter_pairs.txt");
  expect(in.good(), "golden file missing");
  std::string line;
  int pairs = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string word, stem;
    ss >> word >> stem;
    expect(porter_stem(word) == stem,
           "golden mismatch: " + word + " -> " + porter_stem(word) + ", expected " + stem);
    ++pairs;
  }
  expect(pairs >= 100, "golden file has only " + std::to_string(pairs) + " pairs");

  expect(porter_stem("appliance") == "applianc", "appliance stem");
  expect(porter_stem("device") == "devic", "device stem");
  expect(porter_stem("computing") == "comput", "computing stem");
  expect(porter_stem("energy") == "energi", "energy stem");
  return std::to_string(pairs) + " golden pairs, 100% agreement; keyword stems reproduced";
}

std::string check_determinism() {
  const std::string root = FVSM_SOURCE_DIR;
  const auto scratch = fs::temp_directory_path() / "fvsm_acceptance_determinism";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  auto run = [&](const std::string& out) {
    Pipeline pipeline;
    pipeline.load_config(root + "/data/fixture/config.cfg");
    pipeline.set("corpus", root + "/data/fixture/corpus.jsonl");
    pipeline.set("stopwords", root + "/data/stopwords_en.txt");
    pipeline.set("phrases", root + "/data/fixture/phrases.txt");
    pipeline.set("triads", root + "/data/fixture/triads.csv");
    pipeline.set("out", out);
    pipeline.run("run-all");
    return nlohmann::json::parse(read_file(out + "/manifest.json"));
  };

  const auto m1 = run((scratch / "run1").string());
  const auto m2 = run((scratch / "run2").string());
  expect(m1["artifacts"].size() == m2["artifacts"].size(), "artifact counts differ");
  expect(m1["artifacts"].size() >= 10, "manifest lists fewer than 10 artifacts");
  int compared = 0;
  for (std::size_t i = 0; i < m1["artifacts"].size(); ++i) {
    expect(m1["artifacts"][i]["path"] == m2["artifacts"][i]["path"], "artifact names differ");
    expect(m1["artifacts"][i]["sha256"] == m2["artifacts"][i]["sha256"],
           "checksum differs for " + m1["artifacts"][i]["path"].get<std::string>());
    ++compared;
  }
  fs::remove_all(scratch);
  return std::to_string(compared) + " artifacts byte-identical across two seeded runs";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"reference-values", check_reference_values},
      {"gradient-check", check_gradients},
      {"dimension-law", check_dimension_law},
      {"pooling-oracle", check_pooling_oracle},
      {"end-to-end-learning", check_end_to_end_learning},
      {"triad-protocol", check_triad_protocol},
      {"kmeans", check_kmeans},
      {"lda", check_lda},
      {"pca", check_pca},
      {"tsne", check_tsne},
      {"tfidf", check_tfidf},
      {"porter-stemmer", check_porter},
      {"determinism", check_determinism},
  };

  int failures = 0;
  for (const auto& [name, run] : criteria) {
    try {
      const std::string detail = run();
      std::printf("[PASS] %-20s %s\n", name.c_str(), detail.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] %-20s %s\n", name.c_str(), e.what());
    }
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  else std::printf("all %zu criteria passed\n", criteria.size());
  return failures == 0 ? 0 : 1;
}
