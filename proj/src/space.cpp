#include "fvsm/space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fvsm/util.hpp"

namespace fvsm {

Measure measure_from_name(const std::string& name) {
  if (name == "euclidean") return Measure::Euclidean;
  if (name == "cosine") return Measure::Cosine;
  if (name == "jaccard") return Measure::Jaccard;
  throw std::invalid_argument("unknown similarity measure: " + name);
}

const char* measure_name(Measure measure) {
  switch (measure) {
    case Measure::Euclidean: return "euclidean";
    case Measure::Cosine: return "cosine";
    case Measure::Jaccard: return "jaccard";
  }
  return "?";
}

bool larger_is_more_similar(Measure measure) { return measure != Measure::Euclidean; }

static void check_dims(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "similarity: vector dimensions differ (" +
                                    std::to_string(x.size()) + " vs " + std::to_string(y.size()) +
                                    ")");
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  check_dims(x, y);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double cosine_similarity(std::span<const double> x, std::span<const double> y) {
  check_dims(x, y);
  double dot = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (xx == 0.0 || yy == 0.0)
    throw std::invalid_argument("cosine_similarity: undefined for an all-zero vector");
  return dot / (std::sqrt(xx) * std::sqrt(yy));
}

double jaccard_similarity(std::span<const double> x, std::span<const double> y) {
  check_dims(x, y);
  double min_sum = 0.0, max_sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0 || y[i] < 0.0)
      throw std::invalid_argument(
          "jaccard_similarity: negative entry; weighted Jaccard needs non-negative vectors "
          "(use relu features)");
    min_sum += std::min(x[i], y[i]);
    max_sum += std::max(x[i], y[i]);
  }
  if (max_sum == 0.0) return 1.0;  // both all-zero
  return min_sum / max_sum;
}

double measure_value(Measure measure, std::span<const double> x, std::span<const double> y) {
  switch (measure) {
    case Measure::Euclidean: return euclidean_distance(x, y);
    case Measure::Cosine: return cosine_similarity(x, y);
    case Measure::Jaccard: return jaccard_similarity(x, y);
  }
  return 0.0;
}

FeatureSpace::FeatureSpace(int dim) : dim_(dim) {
  require(dim >= 1, "FeatureSpace: dimension must be >= 1");
}

void FeatureSpace::add(const std::string& id, std::vector<double> values) {
  require(static_cast<int>(values.size()) == dim_,
          "FeatureSpace::add: wrong dimension for " + id);
  require(index_.emplace(id, static_cast<int>(ids_.size())).second,
          "FeatureSpace::add: duplicate id " + id);
  ids_.push_back(id);
  vectors_.push_back(std::move(values));
}

const std::vector<double>& FeatureSpace::vector_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw std::invalid_argument("FeatureSpace: unknown document id: " + id);
  return vectors_[it->second];
}

std::string FeatureSpace::to_csv() const {
  std::string out = "doc_id";
  for (int j = 0; j < dim_; ++j) out += ",f_" + std::to_string(j);
  out += "\n";
  for (int i = 0; i < size(); ++i) {
    out += csv_escape(ids_[i]);
    for (double v : vectors_[i]) {
      out += ',';
      out += format_double(v);
    }
    out += "\n";
  }
  return out;
}

FeatureSpace FeatureSpace::from_csv(const std::string& contents) {
  std::istringstream in(contents);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "feature space CSV: empty file");
  const auto header = csv_split(line);
  require(header.size() >= 2 && header[0] == "doc_id", "feature space CSV: bad header");

  FeatureSpace space(static_cast<int>(header.size()) - 1);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = csv_split(line);
    require(fields.size() == header.size(), "feature space CSV: field count mismatch: " + line);
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) values.push_back(std::stod(fields[i]));
    space.add(fields[0], std::move(values));
  }
  return space;
}

const char* verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::PositiveMoreSimilar: return "positive_more_similar";
    case Verdict::NegativeMoreSimilar: return "negative_more_similar";
    case Verdict::Tie: return "tie";
  }
  return "?";
}

static TriadOutcome evaluate_triad(const FeatureSpace& space, const Triad& triad,
                                   Measure measure) {
  TriadOutcome outcome;
  outcome.triad = triad;
  const auto& base = space.vector_of(triad.base);
  outcome.value_positive = measure_value(measure, base, space.vector_of(triad.positive));
  outcome.value_negative = measure_value(measure, base, space.vector_of(triad.negative));
  if (outcome.value_positive == outcome.value_negative) {
    outcome.verdict = Verdict::Tie;
  } else {
    const bool positive_wins = larger_is_more_similar(measure)
                                   ? outcome.value_positive > outcome.value_negative
                                   : outcome.value_positive < outcome.value_negative;
    outcome.verdict = positive_wins ? Verdict::PositiveMoreSimilar : Verdict::NegativeMoreSimilar;
  }
  return outcome;
}

Verdict discriminate(const FeatureSpace& space, const Triad& triad, Measure measure) {
  return evaluate_triad(space, triad, measure).verdict;
}

AccuracyReport accuracy_rate(const FeatureSpace& space, const std::vector<Triad>& triads,
                             Measure measure) {
  require(!triads.empty(), "accuracy_rate: no triads");
  AccuracyReport report;
  int correct = 0;
  for (const auto& triad : triads) {
    TriadOutcome outcome = evaluate_triad(space, triad, measure);
    if (outcome.verdict == Verdict::PositiveMoreSimilar) ++correct;
    report.outcomes.push_back(std::move(outcome));
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(triads.size());
  return report;
}

std::vector<Triad> load_triads(const std::string& path) {
  const auto lines = read_lines(path);
  require(!lines.empty(), "triad file is empty: " + path);
  std::vector<Triad> triads;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    if (i == 0 && lines[i].rfind("base_id", 0) == 0) continue;  // header
    const auto fields = csv_split(lines[i]);
    if (fields.size() != 4)
      throw IoError(path + ": line " + std::to_string(i + 1) +
                    ": expected base_id,positive_id,negative_id,set_tag");
    Triad triad{fields[0], fields[1], fields[2], fields[3]};
    if (triad.base == triad.positive || triad.base == triad.negative ||
        triad.positive == triad.negative)
      throw IoError(path + ": line " + std::to_string(i + 1) + ": triad ids must be distinct");
    triads.push_back(std::move(triad));
  }
  require(!triads.empty(), "triad file has no triads: " + path);
  return triads;
}

}  // namespace fvsm
