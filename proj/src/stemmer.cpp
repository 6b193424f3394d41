#include "fvsm/stemmer.hpp"

#include <span>
#include <stdexcept>
#include <string_view>

namespace fvsm {
namespace {

bool is_vowel(const std::string& w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return true;
    case 'y':
      // y acts as a vowel when it follows a consonant ("sky"), as a
      // consonant when it follows a vowel ("toy") or starts the word.
      return i == 0 ? false : !is_vowel(w, i - 1);
    default:
      return false;
  }
}

// Number of vowel-to-consonant transitions in w[0..len): the m of [C](VC)^m[V].
int measure(const std::string& w, std::size_t len) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < len; ++i) {
    const bool v = is_vowel(w, i);
    if (prev_vowel && !v) ++m;
    prev_vowel = v;
  }
  return m;
}

bool has_vowel(const std::string& w, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i)
    if (is_vowel(w, i)) return true;
  return false;
}

bool ends_double_consonant(const std::string& w) {
  const std::size_t n = w.size();
  if (n < 2 || w[n - 1] != w[n - 2]) return false;
  return !is_vowel(w, n - 1);
}

// consonant-vowel-consonant ending at index i, final consonant not w/x/y;
// detects short stems like "hop" that restore a trailing e.
bool cvc_at(const std::string& w, std::size_t i) {
  if (i < 2) return false;
  if (is_vowel(w, i) || !is_vowel(w, i - 1) || is_vowel(w, i - 2)) return false;
  const char c = w[i];
  return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, std::string_view suffix) {
  return w.size() >= suffix.size() &&
         w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void replace_suffix(std::string& w, std::size_t suffix_len, std::string_view replacement) {
  w.resize(w.size() - suffix_len);
  w.append(replacement);
}

void step1ab(std::string& w) {
  if (w.back() == 's') {
    if (ends_with(w, "sses")) {
      w.resize(w.size() - 2);
    } else if (ends_with(w, "ies")) {
      replace_suffix(w, 3, "i");
    } else if (w[w.size() - 2] != 's') {
      w.pop_back();
    }
  }
  if (ends_with(w, "eed")) {
    if (measure(w, w.size() - 3) > 0) w.pop_back();
    return;
  }
  std::size_t drop = 0;
  if (ends_with(w, "ed") && has_vowel(w, w.size() - 2)) drop = 2;
  else if (ends_with(w, "ing") && has_vowel(w, w.size() - 3)) drop = 3;
  if (drop == 0) return;
  w.resize(w.size() - drop);
  if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
    w.push_back('e');
  } else if (ends_double_consonant(w)) {
    const char c = w.back();
    if (c != 'l' && c != 's' && c != 'z') w.pop_back();
  } else if (measure(w, w.size()) == 1 && cvc_at(w, w.size() - 1)) {
    w.push_back('e');
  }
}

void step1c(std::string& w) {
  if (w.back() == 'y' && has_vowel(w, w.size() - 1)) w.back() = 'i';
}

struct SuffixRule {
  std::string_view suffix;
  std::string_view replacement;
};

// First matching suffix stops the scan; the replacement applies only when the
// remaining stem has measure > min_measure.
bool apply_rules(std::string& w, std::span<const SuffixRule> rules, int min_measure) {
  for (const auto& rule : rules) {
    if (!ends_with(w, rule.suffix)) continue;
    if (measure(w, w.size() - rule.suffix.size()) > min_measure)
      replace_suffix(w, rule.suffix.size(), rule.replacement);
    return true;
  }
  return false;
}

void step2(std::string& w) {
  static constexpr SuffixRule rules[] = {
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
      {"izer", "ize"},    {"bli", "ble"},     {"alli", "al"},   {"entli", "ent"},
      {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
      {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
      {"logi", "log"},
  };
  apply_rules(w, rules, 0);
}

void step3(std::string& w) {
  static constexpr SuffixRule rules[] = {
      {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
      {"ical", "ic"},  {"ful", ""},   {"ness", ""},
  };
  apply_rules(w, rules, 0);
}

void step4(std::string& w) {
  static constexpr std::string_view plain[] = {
      "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
      "ment", "ent", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
  };
  // "ion" is deleted only after s or t; checked before the plain list since
  // a failed match must not fall through to an unrelated suffix.
  if (ends_with(w, "ion")) {
    const std::size_t stem = w.size() - 3;
    if (stem >= 1 && (w[stem - 1] == 's' || w[stem - 1] == 't') && measure(w, stem) > 1)
      w.resize(stem);
    return;
  }
  for (std::string_view suffix : plain) {
    if (!ends_with(w, suffix)) continue;
    if (measure(w, w.size() - suffix.size()) > 1) w.resize(w.size() - suffix.size());
    return;
  }
}

void step5(std::string& w) {
  if (w.back() == 'e') {
    const int m = measure(w, w.size());
    if (m > 1 || (m == 1 && !cvc_at(w, w.size() - 2))) w.pop_back();
  }
  if (w.back() == 'l' && ends_double_consonant(w) && measure(w, w.size()) > 1)
    w.pop_back();
}

}  // namespace

std::string porter_stem(const std::string& word) {
  if (word.empty()) throw std::invalid_argument("porter_stem: empty word");
  for (char c : word) {
    if (c < 'a' || c > 'z')
      throw std::invalid_argument("porter_stem: word must be lowercase ASCII letters: " + word);
  }
  if (word.size() <= 2) return word;

  std::string w = word;
  step1ab(w);
  step1c(w);
  step2(w);
  step3(w);
  step4(w);
  step5(w);
  return w;
}

}  // namespace fvsm
