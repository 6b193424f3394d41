#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fvsm/corpus.hpp"

namespace fvsm {

/// TF-IDF weighted vector space baseline.
///
/// weight(t, doc) = tf(t, doc) * ln(D / df(t)), with raw in-document counts
/// and natural log. Zero weights are never stored.
class TfidfModel {
 public:
  static TfidfModel fit(const std::vector<TokenizedDocument>& docs, const TermLexicon& lexicon);

  /// Sparse weight vector, sorted by term index. Throws on unknown id.
  const std::vector<std::pair<int, double>>& vector_for(const std::string& doc_id) const;

  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  int lexicon_size() const { return lexicon_size_; }

  /// Dense copy of a document's weights, dimension H.
  std::vector<double> dense_vector(const std::string& doc_id) const;

  /// Dense copy with an explicit dimension. Needed for models reloaded from
  /// CSV, where terms that weigh zero everywhere leave no trace of H.
  std::vector<double> dense_vector(const std::string& doc_id, int dim) const;

  std::string to_csv() const;
  static TfidfModel from_csv(const std::string& contents);

 private:
  std::vector<std::string> doc_ids_;
  std::vector<std::vector<std::pair<int, double>>> weights_;  // parallel to doc_ids_
  int lexicon_size_ = 0;
  int row_of(const std::string& doc_id) const;
};

}  // namespace fvsm
