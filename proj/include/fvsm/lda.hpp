#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fvsm/corpus.hpp"
#include "fvsm/util.hpp"

namespace fvsm {

struct LdaConfig {
  int num_topics = 8;
  double alpha = 0.0;  // document-topic prior; 0 selects 50 / num_topics
  double beta = 0.01;  // topic-term prior
  int iterations = 200;
  std::uint64_t seed = 1;
  /// Re-check the Gibbs count bookkeeping after every sweep (throws on
  /// violation). Cheap enough for tests, off by default.
  bool check_invariants = false;

  double effective_alpha() const { return alpha > 0 ? alpha : 50.0 / num_topics; }
};

struct LdaModel {
  Matrix topic_term;  // num_topics x H, rows sum to 1
  Matrix doc_topic;   // D x num_topics, rows sum to 1
};

/// Collapsed Gibbs sampling over the non-padding tokens of each document.
/// Deterministic given cfg.seed. Throws if any document has no tokens.
LdaModel train_lda(const std::vector<EncodedDocument>& docs, int lexicon_size,
                   const LdaConfig& cfg);

/// Highest-probability topic per document; ties break to the lower topic index.
std::vector<int> label_documents(const LdaModel& model);

/// Mean per-token log-likelihood under the doc_topic x topic_term mixture.
double per_token_log_likelihood(const LdaModel& model, const std::vector<EncodedDocument>& docs);

struct ClusterKeywords {
  std::vector<std::string> keywords;
  /// True when the cluster was too small for topic modeling and keywords fall
  /// back to raw frequency ranking.
  bool frequency_fallback = false;
};

/// Trains a fresh LDA on one cluster's documents, ranks topics by total
/// document-topic mass, and returns the top_terms most probable terms from
/// each of the top_topics topics (deduplicated, first occurrence kept).
/// Clusters with fewer than 2 documents use frequency ranking instead.
ClusterKeywords cluster_keywords(const std::vector<EncodedDocument>& docs,
                                 const TermLexicon& lexicon, const LdaConfig& cfg,
                                 int top_topics, int top_terms);

}  // namespace fvsm
