#include "fvsm/tfidf.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "fvsm/util.hpp"

namespace fvsm {

TfidfModel TfidfModel::fit(const std::vector<TokenizedDocument>& docs, const TermLexicon& lexicon) {
  require(!docs.empty(), "TfidfModel::fit: empty corpus");

  const int H = lexicon.size();
  const double doc_count = static_cast<double>(docs.size());

  // Raw term counts per document, then document frequencies.
  std::vector<std::map<int, int>> counts(docs.size());
  std::vector<int> df(static_cast<std::size_t>(H) + 1, 0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& token : docs[d].tokens) {
      const int index = lexicon.index_of(token);
      require(index != 0, "TfidfModel::fit: token not in lexicon: " + token);
      ++counts[d][index];
    }
    for (const auto& [index, count] : counts[d]) {
      (void)count;
      ++df[index];
    }
  }

  TfidfModel model;
  model.lexicon_size_ = H;
  model.doc_ids_.reserve(docs.size());
  model.weights_.resize(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    model.doc_ids_.push_back(docs[d].id);
    for (const auto& [index, count] : counts[d]) {
      const double weight = count * std::log(doc_count / df[index]);
      if (weight != 0.0) model.weights_[d].emplace_back(index, weight);
    }
  }
  return model;
}

int TfidfModel::row_of(const std::string& doc_id) const {
  for (std::size_t i = 0; i < doc_ids_.size(); ++i)
    if (doc_ids_[i] == doc_id) return static_cast<int>(i);
  throw std::invalid_argument("TfidfModel: unknown document id: " + doc_id);
}

const std::vector<std::pair<int, double>>& TfidfModel::vector_for(const std::string& doc_id) const {
  return weights_[row_of(doc_id)];
}

std::vector<double> TfidfModel::dense_vector(const std::string& doc_id) const {
  return dense_vector(doc_id, lexicon_size_);
}

std::vector<double> TfidfModel::dense_vector(const std::string& doc_id, int dim) const {
  require(dim >= lexicon_size_, "TfidfModel::dense_vector: dimension below the stored indices");
  std::vector<double> dense(dim, 0.0);
  for (const auto& [index, weight] : vector_for(doc_id)) dense[index - 1] = weight;
  return dense;
}

std::string TfidfModel::to_csv() const {
  std::string out = "doc_id,term_index,weight\n";
  for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
    for (const auto& [index, weight] : weights_[d]) {
      out += csv_escape(doc_ids_[d]) + "," + std::to_string(index) + "," +
             format_double(weight) + "\n";
    }
  }
  return out;
}

TfidfModel TfidfModel::from_csv(const std::string& contents) {
  TfidfModel model;
  std::istringstream in(contents);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = csv_split(line);
    require(fields.size() == 3, "tfidf CSV: expected 3 fields: " + line);
    const int index = std::stoi(fields[1]);
    const double weight = std::stod(fields[2]);
    if (model.doc_ids_.empty() || model.doc_ids_.back() != fields[0]) {
      model.doc_ids_.push_back(fields[0]);
      model.weights_.emplace_back();
    }
    model.weights_.back().emplace_back(index, weight);
    model.lexicon_size_ = std::max(model.lexicon_size_, index);
  }
  return model;
}

}  // namespace fvsm
