#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fvsm {

enum class Measure { Euclidean, Cosine, Jaccard };

Measure measure_from_name(const std::string& name);
const char* measure_name(Measure measure);
/// Cosine and Jaccard are similarities; Euclidean is a distance.
bool larger_is_more_similar(Measure measure);

double euclidean_distance(std::span<const double> x, std::span<const double> y);
/// Throws if either vector is all-zero (undefined angle).
double cosine_similarity(std::span<const double> x, std::span<const double> y);
/// Weighted (Ruzicka) Jaccard: sum(min) / sum(max). Requires non-negative
/// entries; J(0, 0) is defined as 1.
double jaccard_similarity(std::span<const double> x, std::span<const double> y);
double measure_value(Measure measure, std::span<const double> x, std::span<const double> y);

/// Fixed-dimension vector space over document ids, insertion-ordered.
class FeatureSpace {
 public:
  explicit FeatureSpace(int dim);

  void add(const std::string& id, std::vector<double> values);
  const std::vector<double>& vector_of(const std::string& id) const;
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& row(int i) const { return vectors_[i]; }

  /// CSV with header doc_id, f_0 ... f_{dim-1}.
  std::string to_csv() const;
  static FeatureSpace from_csv(const std::string& contents);

 private:
  int dim_;
  std::vector<std::string> ids_;
  std::vector<std::vector<double>> vectors_;
  std::unordered_map<std::string, int> index_;
};

struct Triad {
  std::string base;      // P
  std::string positive;  // annotated as more similar to P
  std::string negative;
  std::string set_tag;   // e.g. S1 / S2
};

enum class Verdict { PositiveMoreSimilar, NegativeMoreSimilar, Tie };

const char* verdict_name(Verdict verdict);

/// Compares measure(base, positive) against measure(base, negative) under the
/// measure's orientation. Exact equality is a tie.
Verdict discriminate(const FeatureSpace& space, const Triad& triad, Measure measure);

struct TriadOutcome {
  Triad triad;
  double value_positive = 0.0;
  double value_negative = 0.0;
  Verdict verdict = Verdict::Tie;
};

struct AccuracyReport {
  double accuracy = 0.0;  // ties count as incorrect
  std::vector<TriadOutcome> outcomes;
};

AccuracyReport accuracy_rate(const FeatureSpace& space, const std::vector<Triad>& triads,
                             Measure measure);

/// CSV with header base_id, positive_id, negative_id, set_tag.
std::vector<Triad> load_triads(const std::string& path);

}  // namespace fvsm
