#include "fvsm/lda.hpp"

#include <algorithm>
#include <cmath>

namespace fvsm {

namespace {

struct GibbsState {
  std::vector<std::vector<int>> tokens;       // non-padding term indices per doc
  std::vector<std::vector<int>> assignments;  // topic of each token
  Matrix doc_topic_counts;                    // D x K
  Matrix topic_term_counts;                   // K x H (term index shifted by -1)
  std::vector<double> topic_counts;           // K

  void check(const std::string& stage) const {
    const int K = doc_topic_counts.cols;
    const int H = topic_term_counts.cols;
    for (int k = 0; k < K; ++k) {
      double sum = 0;
      for (int t = 0; t < H; ++t) sum += topic_term_counts(k, t);
      if (sum != topic_counts[k])
        throw std::logic_error("lda count invariant violated (" + stage +
                               "): topic totals out of sync");
    }
    for (std::size_t d = 0; d < tokens.size(); ++d) {
      double sum = 0;
      for (int k = 0; k < K; ++k) sum += doc_topic_counts(static_cast<int>(d), k);
      if (sum != static_cast<double>(tokens[d].size()))
        throw std::logic_error("lda count invariant violated (" + stage +
                               "): document totals out of sync");
    }
  }
};

}  // namespace

LdaModel train_lda(const std::vector<EncodedDocument>& docs, int lexicon_size,
                   const LdaConfig& cfg) {
  require(!docs.empty(), "train_lda: no documents");
  require(cfg.num_topics >= 1, "train_lda: num_topics must be >= 1");
  require(cfg.iterations >= 1, "train_lda: iterations must be >= 1");
  require(lexicon_size >= 1, "train_lda: lexicon is empty");

  const int K = cfg.num_topics;
  const int H = lexicon_size;
  const int D = static_cast<int>(docs.size());
  const double alpha = cfg.effective_alpha();
  const double beta = cfg.beta;

  GibbsState state;
  state.tokens.resize(docs.size());
  state.assignments.resize(docs.size());
  state.doc_topic_counts = Matrix(D, K, 0.0);
  state.topic_term_counts = Matrix(K, H, 0.0);
  state.topic_counts.assign(K, 0.0);

  Rng rng(cfg.seed);
  for (int d = 0; d < D; ++d) {
    for (int index : docs[d].indices) {
      if (index == 0) continue;
      require(index >= 1 && index <= H, "train_lda: term index out of range in " + docs[d].id);
      state.tokens[d].push_back(index - 1);
    }
    if (state.tokens[d].empty())
      throw std::invalid_argument("train_lda: document has no tokens: " + docs[d].id);
    for (int term : state.tokens[d]) {
      const int topic = static_cast<int>(rng.below(K));
      state.assignments[d].push_back(topic);
      state.doc_topic_counts(d, topic) += 1;
      state.topic_term_counts(topic, term) += 1;
      state.topic_counts[topic] += 1;
    }
  }
  if (cfg.check_invariants) state.check("init");

  std::vector<double> weights(K);
  for (int sweep = 0; sweep < cfg.iterations; ++sweep) {
    for (int d = 0; d < D; ++d) {
      const auto& terms = state.tokens[d];
      auto& topics = state.assignments[d];
      for (std::size_t n = 0; n < terms.size(); ++n) {
        const int term = terms[n];
        const int old_topic = topics[n];
        state.doc_topic_counts(d, old_topic) -= 1;
        state.topic_term_counts(old_topic, term) -= 1;
        state.topic_counts[old_topic] -= 1;

        double total = 0.0;
        for (int k = 0; k < K; ++k) {
          const double w = (state.doc_topic_counts(d, k) + alpha) *
                           (state.topic_term_counts(k, term) + beta) /
                           (state.topic_counts[k] + H * beta);
          total += w;
          weights[k] = total;
        }
        const double pick = rng.uniform(0.0, total);
        int new_topic = K - 1;
        for (int k = 0; k < K; ++k) {
          if (pick < weights[k]) {
            new_topic = k;
            break;
          }
        }

        topics[n] = new_topic;
        state.doc_topic_counts(d, new_topic) += 1;
        state.topic_term_counts(new_topic, term) += 1;
        state.topic_counts[new_topic] += 1;
      }
    }
    if (cfg.check_invariants) state.check("sweep " + std::to_string(sweep + 1));
  }

  LdaModel model;
  model.topic_term = Matrix(K, H, 0.0);
  model.doc_topic = Matrix(D, K, 0.0);
  for (int k = 0; k < K; ++k) {
    const double denom = state.topic_counts[k] + H * beta;
    for (int t = 0; t < H; ++t)
      model.topic_term(k, t) = (state.topic_term_counts(k, t) + beta) / denom;
  }
  for (int d = 0; d < D; ++d) {
    const double denom = static_cast<double>(state.tokens[d].size()) + K * alpha;
    for (int k = 0; k < K; ++k)
      model.doc_topic(d, k) = (state.doc_topic_counts(d, k) + alpha) / denom;
  }
  return model;
}

std::vector<int> label_documents(const LdaModel& model) {
  std::vector<int> labels(model.doc_topic.rows);
  for (int d = 0; d < model.doc_topic.rows; ++d) {
    int best = 0;
    for (int k = 1; k < model.doc_topic.cols; ++k)
      if (model.doc_topic(d, k) > model.doc_topic(d, best)) best = k;
    labels[d] = best;
  }
  return labels;
}

double per_token_log_likelihood(const LdaModel& model, const std::vector<EncodedDocument>& docs) {
  require(static_cast<int>(docs.size()) == model.doc_topic.rows,
          "per_token_log_likelihood: document count mismatch");
  double total = 0.0;
  long tokens = 0;
  for (int d = 0; d < model.doc_topic.rows; ++d) {
    for (int index : docs[d].indices) {
      if (index == 0) continue;
      double p = 0.0;
      for (int k = 0; k < model.doc_topic.cols; ++k)
        p += model.doc_topic(d, k) * model.topic_term(k, index - 1);
      total += std::log(std::max(p, 1e-300));
      ++tokens;
    }
  }
  require(tokens > 0, "per_token_log_likelihood: no tokens");
  return total / tokens;
}

ClusterKeywords cluster_keywords(const std::vector<EncodedDocument>& docs,
                                 const TermLexicon& lexicon, const LdaConfig& cfg,
                                 int top_topics, int top_terms) {
  require(top_topics >= 1 && top_terms >= 1,
          "cluster_keywords: top_topics and top_terms must be >= 1");
  ClusterKeywords out;

  auto push_unique = [&out](const std::string& term) {
    if (std::find(out.keywords.begin(), out.keywords.end(), term) == out.keywords.end())
      out.keywords.push_back(term);
  };

  if (docs.size() < 2) {
    // Too small for topic modeling: rank terms by raw frequency.
    out.frequency_fallback = true;
    std::vector<long> counts(static_cast<std::size_t>(lexicon.size()) + 1, 0);
    for (const auto& doc : docs)
      for (int index : doc.indices)
        if (index != 0) ++counts[index];
    std::vector<int> order;
    for (int t = 1; t <= lexicon.size(); ++t)
      if (counts[t] > 0) order.push_back(t);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return counts[a] > counts[b]; });
    const int want = top_topics * top_terms;
    for (int i = 0; i < static_cast<int>(order.size()) && i < want; ++i)
      push_unique(lexicon.term_at(order[i]));
    return out;
  }

  const LdaModel model = train_lda(docs, lexicon.size(), cfg);
  const int K = cfg.num_topics;

  // Rank topics by total assigned document-topic mass within the cluster.
  std::vector<double> mass(K, 0.0);
  for (int d = 0; d < model.doc_topic.rows; ++d)
    for (int k = 0; k < K; ++k) mass[k] += model.doc_topic(d, k);
  std::vector<int> topic_order(K);
  for (int k = 0; k < K; ++k) topic_order[k] = k;
  std::stable_sort(topic_order.begin(), topic_order.end(),
                   [&](int a, int b) { return mass[a] > mass[b]; });

  for (int i = 0; i < top_topics && i < K; ++i) {
    const int k = topic_order[i];
    std::vector<int> term_order;
    for (int t = 0; t < lexicon.size(); ++t) term_order.push_back(t);
    std::stable_sort(term_order.begin(), term_order.end(), [&](int a, int b) {
      return model.topic_term(k, a) > model.topic_term(k, b);
    });
    for (int j = 0; j < top_terms && j < static_cast<int>(term_order.size()); ++j)
      push_unique(lexicon.term_at(term_order[j] + 1));
  }
  return out;
}

}  // namespace fvsm
