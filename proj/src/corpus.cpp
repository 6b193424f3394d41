#include "fvsm/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "fvsm/stemmer.hpp"
#include "fvsm/util.hpp"

namespace fvsm {

std::vector<PatentRecord> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("corpus file not found: " + path);

  std::vector<PatentRecord> records;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ": line " + std::to_string(line_number) +
                    ": malformed JSON: " + e.what());
    }

    auto fail = [&](const std::string& what) -> IoError {
      return IoError(path + ": line " + std::to_string(line_number) + ": " + what);
    };
    if (!parsed.is_object() || !parsed.contains("id") || !parsed["id"].is_string())
      throw fail("record must be an object with a string \"id\"");

    PatentRecord record;
    record.id = parsed["id"].get<std::string>();
    if (record.id.empty()) throw fail("empty id");
    if (!seen_ids.insert(record.id).second) throw fail("duplicate id \"" + record.id + "\"");

    if (parsed.contains("title")) {
      if (!parsed["title"].is_string()) throw fail("\"title\" must be a string");
      record.title = parsed["title"].get<std::string>();
    }
    if (parsed.contains("abstract")) {
      if (!parsed["abstract"].is_string()) throw fail("\"abstract\" must be a string");
      record.abstract = parsed["abstract"].get<std::string>();
    }
    if (record.title.empty() && record.abstract.empty())
      throw fail("record \"" + record.id + "\" has neither title nor abstract text");

    if (parsed.contains("label") && !parsed["label"].is_null()) {
      if (!parsed["label"].is_number_integer() || parsed["label"].get<int>() < 0)
        throw fail("\"label\" must be a non-negative integer");
      record.label = parsed["label"].get<int>();
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::set<std::string> words;
  for (const std::string& line : read_lines(path)) {
    if (!line.empty()) words.insert(line);
  }
  return words;
}

std::vector<KeywordPhrase> load_phrases(const std::string& path) {
  std::vector<KeywordPhrase> phrases;
  for (const std::string& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    KeywordPhrase phrase;
    std::istringstream ss(line);
    std::string part;
    while (std::getline(ss, part, ',')) {
      std::string stem;
      for (char c : part) {
        if (c == '\'' || c == ' ' || c == '\t') continue;
        stem += c;
      }
      if (!stem.empty()) phrase.stems.push_back(stem);
    }
    if (!phrase.stems.empty()) phrases.push_back(std::move(phrase));
  }
  if (phrases.empty()) throw IoError("phrase file has no phrases: " + path);
  return phrases;
}

namespace {

bool all_alphabetic(const std::string& token) {
  for (char c : token)
    if (c < 'a' || c > 'z') return false;
  return true;
}

}  // namespace

TokenizedDocument preprocess(const PatentRecord& record,
                             const std::set<std::string>& stopwords,
                             int min_len) {
  require(min_len >= 1, "preprocess: min_len must be >= 1");

  std::string text = record.title + " " + record.abstract;
  // Lowercase ASCII letters; anything that is not a letter or digit separates
  // tokens, so "802.15.4" splits into "802", "15", "4".
  for (char& c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    else if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) c = ' ';
  }

  TokenizedDocument doc;
  doc.id = record.id;
  doc.label = record.label;
  std::istringstream ss(text);
  std::string token;
  while (ss >> token) {
    if (static_cast<int>(token.size()) < min_len) continue;
    if (stopwords.count(token)) continue;
    doc.tokens.push_back(all_alphabetic(token) ? porter_stem(token) : token);
  }
  return doc;
}

TermLexicon TermLexicon::build(const std::vector<TokenizedDocument>& docs) {
  require(!docs.empty(), "TermLexicon::build: no documents");
  TermLexicon lexicon;
  for (const auto& doc : docs) {
    for (const auto& token : doc.tokens) {
      if (lexicon.index_.emplace(token, static_cast<int>(lexicon.terms_.size()) + 1).second)
        lexicon.terms_.push_back(token);
    }
  }
  if (lexicon.terms_.empty())
    throw std::invalid_argument("TermLexicon::build: all documents are empty");
  return lexicon;
}

int TermLexicon::index_of(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? 0 : it->second;
}

const std::string& TermLexicon::term_at(int index) const {
  require(index >= 1 && index <= size(), "TermLexicon::term_at: index out of range");
  return terms_[static_cast<std::size_t>(index) - 1];
}

std::string TermLexicon::to_csv() const {
  std::string out = "index,term\n";
  for (int i = 1; i <= size(); ++i)
    out += std::to_string(i) + "," + csv_escape(term_at(i)) + "\n";
  return out;
}

TermLexicon TermLexicon::from_csv(const std::string& contents) {
  TermLexicon lexicon;
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
    require(fields.size() == 2, "lexicon CSV: expected 2 fields: " + line);
    const int index = std::stoi(fields[0]);
    require(index == static_cast<int>(lexicon.terms_.size()) + 1,
            "lexicon CSV: indices must be 1..H in order");
    lexicon.index_.emplace(fields[1], index);
    lexicon.terms_.push_back(fields[1]);
  }
  require(!lexicon.terms_.empty(), "lexicon CSV: no terms");
  return lexicon;
}

EncodedDocument encode(const TokenizedDocument& doc, const TermLexicon& lexicon, int pad_to) {
  require(pad_to >= 0, "encode: pad_to must be non-negative");
  EncodedDocument encoded;
  encoded.id = doc.id;
  encoded.label = doc.label;
  encoded.indices.reserve(std::max<std::size_t>(doc.tokens.size(), pad_to));
  for (const auto& token : doc.tokens) {
    const int index = lexicon.index_of(token);
    encoded.indices.push_back(index);
    if (index != 0) ++encoded.term_count;
  }
  while (static_cast<int>(encoded.indices.size()) < pad_to) encoded.indices.push_back(0);
  return encoded;
}

std::vector<TokenizedDocument> filter_by_phrases(const std::vector<TokenizedDocument>& docs,
                                                 const std::vector<KeywordPhrase>& phrases) {
  require(!phrases.empty(), "filter_by_phrases: phrase list is empty");

  auto contains_phrase = [](const TokenizedDocument& doc, const KeywordPhrase& phrase) {
    const std::size_t m = phrase.stems.size();
    if (m == 0 || doc.tokens.size() < m) return false;
    for (std::size_t start = 0; start + m <= doc.tokens.size(); ++start) {
      bool match = true;
      for (std::size_t i = 0; i < m; ++i) {
        if (doc.tokens[start + i] != phrase.stems[i]) {
          match = false;
          break;
        }
      }
      if (match) return true;
    }
    return false;
  };

  std::vector<TokenizedDocument> kept;
  for (const auto& doc : docs) {
    for (const auto& phrase : phrases) {
      if (contains_phrase(doc, phrase)) {
        kept.push_back(doc);
        break;
      }
    }
  }
  return kept;
}

}  // namespace fvsm
