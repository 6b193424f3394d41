#pragma once

#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace fvsm {

struct PatentRecord {
  std::string id;
  std::string title;
  std::string abstract;
  std::optional<int> label;
};

struct TokenizedDocument {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<int> label;
};

/// Bijection between unique stemmed terms and indices 1..H.
/// Index 0 is reserved for padding and maps to no term.
class TermLexicon {
 public:
  /// Assigns indices in first-appearance order. Throws if every document is empty.
  static TermLexicon build(const std::vector<TokenizedDocument>& docs);

  int size() const { return static_cast<int>(terms_.size()); }  // H
  /// Index of a term, or 0 if absent.
  int index_of(const std::string& term) const;
  /// Term at index in 1..H.
  const std::string& term_at(int index) const;

  std::string to_csv() const;
  static TermLexicon from_csv(const std::string& contents);

 private:
  std::vector<std::string> terms_;  // terms_[i] has index i+1
  std::unordered_map<std::string, int> index_;
};

struct EncodedDocument {
  std::string id;
  std::vector<int> indices;  // lexicon indices, 0 = padding / unknown
  int term_count = 0;        // tokens found in the lexicon, before padding
  std::optional<int> label;
};

struct KeywordPhrase {
  std::vector<std::string> stems;  // already stemmed, lowercase
};

/// Parses a JSON-lines corpus file: one object per line with fields
/// id, title, abstract and an optional non-negative integer label.
std::vector<PatentRecord> load_corpus(const std::string& path);

/// One lowercase word per line; blank lines ignored.
std::set<std::string> load_stopwords(const std::string& path);

/// One phrase per line, comma-separated stems; single quotes around stems are
/// tolerated so keyword tables can be pasted directly.
std::vector<KeywordPhrase> load_phrases(const std::string& path);

/// Lowercases title then abstract, replaces punctuation with spaces, drops
/// stopwords and tokens shorter than min_len, then Porter-stems the
/// survivors. Tokens containing digits are kept verbatim (the stemmer is
/// defined on alphabetic words only).
TokenizedDocument preprocess(const PatentRecord& record,
                             const std::set<std::string>& stopwords,
                             int min_len);

/// Maps tokens to lexicon indices (unknown terms to 0) and pads with trailing
/// zeros to at least pad_to entries. term_count counts tokens found in the
/// lexicon.
EncodedDocument encode(const TokenizedDocument& doc, const TermLexicon& lexicon, int pad_to);

/// Keeps documents containing at least one phrase as a consecutive token run.
std::vector<TokenizedDocument> filter_by_phrases(const std::vector<TokenizedDocument>& docs,
                                                 const std::vector<KeywordPhrase>& phrases);

}  // namespace fvsm
