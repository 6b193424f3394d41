#include "fvsm/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "fvsm/cluster.hpp"
#include "fvsm/cnn.hpp"
#include "fvsm/corpus.hpp"
#include "fvsm/dimred.hpp"
#include "fvsm/lda.hpp"
#include "fvsm/space.hpp"
#include "fvsm/tfidf.hpp"
#include "fvsm/util.hpp"

namespace fs = std::filesystem;

namespace fvsm {

namespace {

const std::map<std::string, std::string>& default_options() {
  static const std::map<std::string, std::string> defaults = {
      {"corpus", ""},
      {"stopwords", ""},
      {"phrases", ""},
      {"triads", ""},
      {"out", "out"},
      {"seed", "1"},
      {"force", "false"},
      {"min_len", "3"},
      {"label.source", "lda"},  // lda | external
      {"lda.topics", "8"},
      {"lda.alpha", "0"},  // 0 selects 50 / topics
      {"lda.beta", "0.01"},
      {"lda.iterations", "200"},
      {"cnn.embedding_dim", "300"},
      {"cnn.filter_lengths", "3,4,5"},
      {"cnn.filters_per_length", "100"},
      {"cnn.pool_top", "1"},
      {"cnn.classes", "0"},  // 0 infers from the labels artifact
      {"cnn.activation", "relu"},
      {"cnn.embeddings", ""},  // optional pretrained embedding file
      {"train.batch_size", "50"},
      {"train.epochs", "10"},
      {"train.folds", "10"},
      {"train.test_fraction", "0.1"},
      {"cluster.kappa", "0"},  // 0 selects via the scan
      {"cluster.kappa_min", "2"},
      {"cluster.kappa_max", "10"},
      {"cluster.restarts", "10"},
      {"cluster.max_iter", "100"},
      {"cluster.tol", "1e-8"},
      {"cluster.select", "elbow"},  // elbow | silhouette
      {"cluster.keyword_topics", "2"},
      {"cluster.keyword_terms", "5"},
      {"tsne.perplexity", "30"},
      {"tsne.iterations", "1000"},
      {"tsne.learning_rate", "200"},
      {"tsne.momentum_early", "0.5"},
      {"tsne.momentum_late", "0.8"},
      {"tsne.momentum_switch", "250"},
      {"tsne.exaggeration", "12"},
      {"tsne.exaggeration_iters", "250"},
  };
  return defaults;
}

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

// Artifact file names.
constexpr const char* kTokenized = "tokenized.csv";
constexpr const char* kLexicon = "lexicon.csv";
constexpr const char* kFilterReport = "filter_report.json";
constexpr const char* kTfidf = "tfidf.csv";
constexpr const char* kLabels = "labels.csv";
constexpr const char* kLdaDocTopic = "lda_doc_topic.csv";
constexpr const char* kLdaTopicTerm = "lda_topic_term.csv";
constexpr const char* kModel = "model.json";
constexpr const char* kCvReport = "cv_report.csv";
constexpr const char* kFvsm = "fvsm.csv";
constexpr const char* kTriadReport = "triad_report.csv";
constexpr const char* kTriadSummary = "triad_summary.csv";
constexpr const char* kClusters = "clusters.csv";
constexpr const char* kSseCurve = "sse_curve.csv";
constexpr const char* kClusterKeywords = "cluster_keywords.csv";
constexpr const char* kClusterSummary = "cluster_summary.json";
constexpr const char* kPcaCoords = "pca.csv";
constexpr const char* kTsneCoords = "tsne.csv";
constexpr const char* kPcaMap = "map_pca.svg";
constexpr const char* kTsneMap = "map_tsne.svg";
constexpr const char* kManifest = "manifest.json";

// Holds <out>/.lock for the duration of a run.
class OutputLock {
 public:
  OutputLock(const std::string& out_dir, bool force) : path_(out_dir + "/.lock") {
    if (force && fs::exists(path_)) fs::remove(path_);
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f)
      throw IoError("output directory is locked by another run (" + path_ +
                    " exists; remove it or pass --force)");
    std::fclose(f);
  }
  ~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::string path_;
};

std::vector<TokenizedDocument> load_tokenized_artifact(const std::string& path) {
  const auto lines = read_lines(path);
  require(!lines.empty() && lines[0] == "doc_id,label,tokens",
          "tokenized artifact has an unexpected header: " + path);
  std::vector<TokenizedDocument> docs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = csv_split(lines[i]);
    require(fields.size() == 3, path + ": line " + std::to_string(i + 1) + ": expected 3 fields");
    TokenizedDocument doc;
    doc.id = fields[0];
    if (!fields[1].empty()) doc.label = std::stoi(fields[1]);
    std::istringstream ss(fields[2]);
    std::string token;
    while (ss >> token) doc.tokens.push_back(token);
    docs.push_back(std::move(doc));
  }
  require(!docs.empty(), "tokenized artifact is empty: " + path);
  return docs;
}

std::vector<std::pair<std::string, int>> load_labels_artifact(const std::string& path) {
  const auto lines = read_lines(path);
  require(!lines.empty() && lines[0] == "doc_id,label",
          "labels artifact has an unexpected header: " + path);
  std::vector<std::pair<std::string, int>> labels;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = csv_split(lines[i]);
    require(fields.size() == 2, path + ": line " + std::to_string(i + 1) + ": expected 2 fields");
    labels.emplace_back(fields[0], std::stoi(fields[1]));
  }
  require(!labels.empty(), "labels artifact is empty: " + path);
  return labels;
}

std::vector<std::pair<std::string, int>> load_clusters_artifact(const std::string& path) {
  const auto lines = read_lines(path);
  require(!lines.empty() && lines[0] == "doc_id,cluster",
          "cluster artifact has an unexpected header: " + path);
  std::vector<std::pair<std::string, int>> assignments;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = csv_split(lines[i]);
    require(fields.size() == 2, path + ": line " + std::to_string(i + 1) + ": expected 2 fields");
    assignments.emplace_back(fields[0], std::stoi(fields[1]));
  }
  return assignments;
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string hsl_to_hex(double hue, double saturation, double lightness) {
  const double c = (1.0 - std::fabs(2.0 * lightness - 1.0)) * saturation;
  const double hp = hue / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = lightness - c / 2.0;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround((r + m) * 255)),
                static_cast<int>(std::lround((g + m) * 255)),
                static_cast<int>(std::lround((b + m) * 255)));
  return buf;
}

std::vector<std::string> cluster_palette(int kappa) {
  std::vector<std::string> palette;
  for (int k = 0; k < kappa; ++k)
    palette.push_back(hsl_to_hex(360.0 * k / kappa, 0.65, 0.45));
  return palette;
}

std::string svg_scatter(const std::string& title, const Projection2D& projection,
                        const std::vector<int>& clusters, int kappa,
                        const std::vector<std::string>& legend_labels) {
  const int width = 960, height = 640;
  const double plot_left = 50, plot_right = 690, plot_top = 60, plot_bottom = 600;

  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (std::size_t i = 0; i < projection.coords.size(); ++i) {
    const auto& c = projection.coords[i];
    if (i == 0) {
      min_x = max_x = c[0];
      min_y = max_y = c[1];
    } else {
      min_x = std::min(min_x, c[0]);
      max_x = std::max(max_x, c[0]);
      min_y = std::min(min_y, c[1]);
      max_y = std::max(max_y, c[1]);
    }
  }
  const double pad_x = (max_x - min_x) * 0.04 + 1e-12;
  const double pad_y = (max_y - min_y) * 0.04 + 1e-12;
  min_x -= pad_x; max_x += pad_x;
  min_y -= pad_y; max_y += pad_y;

  auto scale_x = [&](double v) {
    return plot_left + (v - min_x) / (max_x - min_x) * (plot_right - plot_left);
  };
  auto scale_y = [&](double v) {
    return plot_bottom - (v - min_y) / (max_y - min_y) * (plot_bottom - plot_top);
  };

  const auto palette = cluster_palette(kappa);
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"50\" y=\"32\" font-family=\"sans-serif\" font-size=\"18\">" + title +
         "</text>\n";
  for (std::size_t i = 0; i < projection.coords.size(); ++i) {
    svg += "<circle cx=\"" + format_fixed(scale_x(projection.coords[i][0]), 2) + "\" cy=\"" +
           format_fixed(scale_y(projection.coords[i][1]), 2) + "\" r=\"3\" fill=\"" +
           palette[clusters[i]] + "\" fill-opacity=\"0.75\"/>\n";
  }
  for (int k = 0; k < kappa; ++k) {
    const double y = 60.0 + 22.0 * k;
    svg += "<rect x=\"710\" y=\"" + format_fixed(y - 11, 2) +
           "\" width=\"12\" height=\"12\" fill=\"" + palette[k] + "\"/>\n";
    std::string label = k < static_cast<int>(legend_labels.size()) ? legend_labels[k]
                                                                   : std::to_string(k);
    if (label.size() > 34) label = label.substr(0, 31) + "...";
    svg += "<text x=\"728\" y=\"" + format_fixed(y, 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

// ---------------------------------------------------------------------------
// PipelineOptions

PipelineOptions::PipelineOptions() : values_(default_options()) {}

void PipelineOptions::load_file(const std::string& path) {
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError(path + ": line " + std::to_string(i + 1) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set(key, value);
    } catch (const std::exception& e) {
      throw IoError(path + ": line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

void PipelineOptions::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown configuration key: " + key);
  it->second = value;
}

const std::string& PipelineOptions::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown configuration key: " + key);
  return it->second;
}

int PipelineOptions::get_int(const std::string& key) const {
  try {
    return std::stoi(get(key));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("configuration key " + key + " is not an integer: " + get(key));
  }
}

double PipelineOptions::get_double(const std::string& key) const {
  try {
    return std::stod(get(key));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("configuration key " + key + " is not a number: " + get(key));
  }
}

bool PipelineOptions::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("configuration key " + key + " is not a boolean: " + v);
}

std::uint64_t PipelineOptions::get_seed() const {
  return static_cast<std::uint64_t>(std::stoull(get("seed")));
}

std::vector<int> PipelineOptions::get_int_list(const std::string& key) const {
  std::vector<int> out;
  std::istringstream ss(get(key));
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(std::stoi(part));
  }
  require(!out.empty(), "configuration key " + key + " is empty");
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

std::string Pipeline::out_path(const std::string& name) const {
  return options_.get("out") + "/" + name;
}

void Pipeline::write_artifact(const std::string& name, const std::string& contents) {
  write_file(out_path(name), contents);
  written_.push_back(name);
}

void Pipeline::guard_outputs(const std::vector<std::string>& names) const {
  if (options_.get_bool("force")) return;
  for (const auto& name : names) {
    if (fs::exists(out_path(name)))
      throw IoError("artifact already exists (pass --force to overwrite): " + out_path(name));
  }
}

void Pipeline::require_artifact(const std::string& name) const {
  if (!fs::exists(out_path(name)))
    throw IoError("missing artifact " + out_path(name) + "; run the earlier stages first");
}

void Pipeline::run(const std::string& stage) {
  const std::string out_dir = options_.get("out");
  require(!out_dir.empty(), "output directory is not set");
  fs::create_directories(out_dir);
  OutputLock lock(out_dir, options_.get_bool("force"));

  if (stage == "ingest") cmd_ingest();
  else if (stage == "label") cmd_label();
  else if (stage == "train") cmd_train();
  else if (stage == "extract") cmd_extract();
  else if (stage == "triads") cmd_triads();
  else if (stage == "cluster") cmd_cluster();
  else if (stage == "map") cmd_map();
  else if (stage == "run-all") cmd_run_all();
  else throw std::invalid_argument("unknown stage: " + stage);
}

void Pipeline::cmd_ingest() {
  guard_outputs({kTokenized, kLexicon, kFilterReport, kTfidf});

  const std::string corpus_path = options_.get("corpus");
  require(!corpus_path.empty(), "config: corpus path is not set");
  const auto records = load_corpus(corpus_path);

  std::set<std::string> stopwords;
  if (!options_.get("stopwords").empty()) stopwords = load_stopwords(options_.get("stopwords"));

  const int min_len = options_.get_int("min_len");
  std::vector<TokenizedDocument> docs;
  docs.reserve(records.size());
  for (const auto& record : records) docs.push_back(preprocess(record, stopwords, min_len));

  const std::size_t input_count = docs.size();
  std::size_t phrase_count = 0;
  if (!options_.get("phrases").empty()) {
    const auto phrases = load_phrases(options_.get("phrases"));
    phrase_count = phrases.size();
    docs = filter_by_phrases(docs, phrases);
  }
  require(!docs.empty(), "ingest: no documents left after filtering");

  const TermLexicon lexicon = TermLexicon::build(docs);
  const TfidfModel tfidf = TfidfModel::fit(docs, lexicon);

  std::string tokenized_csv = "doc_id,label,tokens\n";
  for (const auto& doc : docs) {
    std::string tokens;
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i) tokens += ' ';
      tokens += doc.tokens[i];
    }
    tokenized_csv += csv_escape(doc.id) + "," +
                     (doc.label ? std::to_string(*doc.label) : std::string()) + "," +
                     csv_escape(tokens) + "\n";
  }

  nlohmann::json report = {
      {"input_documents", input_count},
      {"kept", docs.size()},
      {"dropped", input_count - docs.size()},
      {"phrases", phrase_count},
  };

  write_artifact(kTokenized, tokenized_csv);
  write_artifact(kLexicon, lexicon.to_csv());
  write_artifact(kFilterReport, report.dump(2) + "\n");
  write_artifact(kTfidf, tfidf.to_csv());
}

void Pipeline::cmd_label() {
  guard_outputs({kLabels});
  require_artifact(kTokenized);
  const auto docs = load_tokenized_artifact(out_path(kTokenized));

  std::string labels_csv = "doc_id,label\n";
  const std::string source = options_.get("label.source");
  if (source == "external") {
    for (const auto& doc : docs) {
      if (!doc.label)
        throw IoError("label.source = external but document has no label: " + doc.id);
      labels_csv += csv_escape(doc.id) + "," + std::to_string(*doc.label) + "\n";
    }
    write_artifact(kLabels, labels_csv);
    return;
  }
  require(source == "lda", "config: label.source must be lda or external");

  guard_outputs({kLdaDocTopic, kLdaTopicTerm});
  require_artifact(kLexicon);
  const auto lexicon = TermLexicon::from_csv(read_file(out_path(kLexicon)));

  std::vector<EncodedDocument> encoded;
  encoded.reserve(docs.size());
  for (const auto& doc : docs) encoded.push_back(encode(doc, lexicon, 0));

  LdaConfig cfg;
  cfg.num_topics = options_.get_int("lda.topics");
  cfg.alpha = options_.get_double("lda.alpha");
  cfg.beta = options_.get_double("lda.beta");
  cfg.iterations = options_.get_int("lda.iterations");
  cfg.seed = mix_seed(options_.get_seed(), hash_string("label"));
  const LdaModel model = train_lda(encoded, lexicon.size(), cfg);
  const auto labels = label_documents(model);

  for (std::size_t d = 0; d < docs.size(); ++d)
    labels_csv += csv_escape(docs[d].id) + "," + std::to_string(labels[d]) + "\n";

  std::string doc_topic_csv = "doc_id,topic,prob\n";
  for (int d = 0; d < model.doc_topic.rows; ++d)
    for (int k = 0; k < model.doc_topic.cols; ++k)
      doc_topic_csv += csv_escape(docs[d].id) + "," + std::to_string(k) + "," +
                       format_double(model.doc_topic(d, k)) + "\n";
  std::string topic_term_csv = "topic,term_index,prob\n";
  for (int k = 0; k < model.topic_term.rows; ++k)
    for (int t = 0; t < model.topic_term.cols; ++t)
      topic_term_csv += std::to_string(k) + "," + std::to_string(t + 1) + "," +
                        format_double(model.topic_term(k, t)) + "\n";

  write_artifact(kLabels, labels_csv);
  write_artifact(kLdaDocTopic, doc_topic_csv);
  write_artifact(kLdaTopicTerm, topic_term_csv);
}

namespace {

CnnConfig cnn_config_from(const PipelineOptions& options, int num_classes) {
  CnnConfig cfg;
  cfg.embedding_dim = options.get_int("cnn.embedding_dim");
  cfg.filter_lengths = options.get_int_list("cnn.filter_lengths");
  cfg.filters_per_length = options.get_int("cnn.filters_per_length");
  cfg.pool_top = options.get_int("cnn.pool_top");
  cfg.num_classes = num_classes;
  cfg.activation = activation_from_name(options.get("cnn.activation"));
  cfg.seed = mix_seed(options.get_seed(), hash_string("cnn-init"));
  cfg.validate();
  return cfg;
}

}  // namespace

void Pipeline::cmd_train() {
  guard_outputs({kModel, kCvReport});
  require_artifact(kTokenized);
  require_artifact(kLexicon);
  require_artifact(kLabels);

  const auto docs = load_tokenized_artifact(out_path(kTokenized));
  const auto lexicon = TermLexicon::from_csv(read_file(out_path(kLexicon)));
  const auto label_rows = load_labels_artifact(out_path(kLabels));
  require(label_rows.size() == docs.size(), "labels artifact does not cover the corpus");

  std::vector<int> labels;
  int max_label = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    require(label_rows[i].first == docs[i].id,
            "labels artifact is out of sync with the tokenized corpus at " + docs[i].id);
    labels.push_back(label_rows[i].second);
    max_label = std::max(max_label, label_rows[i].second);
  }

  int num_classes = options_.get_int("cnn.classes");
  if (num_classes == 0) num_classes = max_label + 1;
  require(num_classes >= 2, "training needs at least 2 label classes");

  const CnnConfig cnn_cfg = cnn_config_from(options_, num_classes);
  std::vector<EncodedDocument> encoded;
  encoded.reserve(docs.size());
  for (const auto& doc : docs)
    encoded.push_back(encode(doc, lexicon, cnn_cfg.min_document_length()));

  TrainConfig train_cfg;
  train_cfg.batch_size = options_.get_int("train.batch_size");
  train_cfg.epochs = options_.get_int("train.epochs");
  train_cfg.folds = options_.get_int("train.folds");
  train_cfg.test_fraction = options_.get_double("train.test_fraction");
  train_cfg.seed = mix_seed(options_.get_seed(), hash_string("train"));

  PretrainedEmbeddings pretrained;
  const PretrainedEmbeddings* pretrained_ptr = nullptr;
  if (!options_.get("cnn.embeddings").empty()) {
    pretrained.path = options_.get("cnn.embeddings");
    pretrained.lexicon = &lexicon;
    pretrained_ptr = &pretrained;
  }
  auto result = cross_validate(encoded, labels, lexicon.size(), cnn_cfg, train_cfg, pretrained_ptr);

  std::string report = "fold,validation_score,test_score,selected\n";
  for (std::size_t f = 0; f < result.folds.size(); ++f) {
    report += std::to_string(f + 1) + "," + format_double(result.folds[f].validation) + "," +
              format_double(result.folds[f].test) + "," +
              (static_cast<int>(f) == result.selected_fold ? "1" : "0") + "\n";
  }
  report += "average," + format_double(result.validation_mean) + "," +
            format_double(result.test_mean) + ",\n";

  save_model(result.best_model, out_path(kModel));
  written_.push_back(kModel);
  write_artifact(kCvReport, report);
}

void Pipeline::cmd_extract() {
  guard_outputs({kFvsm});
  require_artifact(kTokenized);
  require_artifact(kLexicon);
  require_artifact(kModel);

  const auto docs = load_tokenized_artifact(out_path(kTokenized));
  const auto lexicon = TermLexicon::from_csv(read_file(out_path(kLexicon)));
  const CnnModel model = load_model(out_path(kModel));

  std::vector<EncodedDocument> encoded;
  encoded.reserve(docs.size());
  for (const auto& doc : docs)
    encoded.push_back(encode(doc, lexicon, model.config.min_document_length()));

  const auto features = extract_features(encoded, model);
  FeatureSpace space(model.config.feature_dim());
  for (const auto& fv : features) space.add(fv.doc_id, fv.values);
  write_artifact(kFvsm, space.to_csv());
}

void Pipeline::cmd_triads() {
  guard_outputs({kTriadReport, kTriadSummary});
  require_artifact(kFvsm);
  require_artifact(kTfidf);
  require_artifact(kTokenized);
  require_artifact(kLexicon);
  const std::string triad_path = options_.get("triads");
  require(!triad_path.empty(), "config: triads path is not set");

  const auto triads = load_triads(triad_path);
  const FeatureSpace feature_space = FeatureSpace::from_csv(read_file(out_path(kFvsm)));

  // TF-IDF vectors densified over the full lexicon; documents whose every
  // weight is zero appear as zero vectors.
  const auto docs = load_tokenized_artifact(out_path(kTokenized));
  const auto lexicon = TermLexicon::from_csv(read_file(out_path(kLexicon)));
  const TfidfModel tfidf = TfidfModel::from_csv(read_file(out_path(kTfidf)));
  FeatureSpace tfidf_space(lexicon.size());
  for (const auto& doc : docs) {
    std::vector<double> dense(lexicon.size(), 0.0);
    try {
      dense = tfidf.dense_vector(doc.id, lexicon.size());
    } catch (const std::invalid_argument&) {
      // no stored weights: all-zero vector
    }
    tfidf_space.add(doc.id, std::move(dense));
  }

  const std::vector<std::pair<std::string, const FeatureSpace*>> spaces = {
      {"fvsm", &feature_space}, {"tfidf", &tfidf_space}};
  const Measure measures[] = {Measure::Euclidean, Measure::Cosine, Measure::Jaccard};

  // Distinct set tags in file order, then the union row.
  std::vector<std::string> tags;
  for (const auto& triad : triads)
    if (std::find(tags.begin(), tags.end(), triad.set_tag) == tags.end())
      tags.push_back(triad.set_tag);

  std::string report =
      "base_id,positive_id,negative_id,set_tag,space,measure,value_positive,value_negative,"
      "verdict\n";
  std::string summary = "set_tag,space,measure,triads,accuracy\n";
  for (const auto& [space_name, space] : spaces) {
    for (Measure measure : measures) {
      const auto full = accuracy_rate(*space, triads, measure);
      for (const auto& outcome : full.outcomes) {
        report += csv_escape(outcome.triad.base) + "," + csv_escape(outcome.triad.positive) +
                  "," + csv_escape(outcome.triad.negative) + "," +
                  csv_escape(outcome.triad.set_tag) + "," + space_name + "," +
                  measure_name(measure) + "," + format_double(outcome.value_positive) + "," +
                  format_double(outcome.value_negative) + "," + verdict_name(outcome.verdict) +
                  "\n";
      }
      for (const auto& tag : tags) {
        std::vector<Triad> subset;
        for (const auto& triad : triads)
          if (triad.set_tag == tag) subset.push_back(triad);
        const auto part = accuracy_rate(*space, subset, measure);
        summary += csv_escape(tag) + "," + space_name + "," + measure_name(measure) + "," +
                   std::to_string(subset.size()) + "," + format_double(part.accuracy) + "\n";
      }
      summary += "all," + std::string(space_name) + "," + measure_name(measure) + "," +
                 std::to_string(triads.size()) + "," + format_double(full.accuracy) + "\n";
    }
  }

  write_artifact(kTriadReport, report);
  write_artifact(kTriadSummary, summary);
}

void Pipeline::cmd_cluster() {
  guard_outputs({kClusters, kSseCurve, kClusterKeywords, kClusterSummary});
  require_artifact(kFvsm);
  require_artifact(kTokenized);
  require_artifact(kLexicon);

  const FeatureSpace space = FeatureSpace::from_csv(read_file(out_path(kFvsm)));

  ClusterConfig cfg;
  cfg.max_iter = options_.get_int("cluster.max_iter");
  cfg.restarts = options_.get_int("cluster.restarts");
  cfg.tol = options_.get_double("cluster.tol");
  cfg.seed = mix_seed(options_.get_seed(), hash_string("cluster"));

  const int kappa_min = std::max(1, options_.get_int("cluster.kappa_min"));
  const int kappa_max = std::min(options_.get_int("cluster.kappa_max"), space.size());
  require(kappa_min <= kappa_max, "cluster: empty kappa scan range");

  const auto curve = sse_curve(space, kappa_min, kappa_max, cfg);
  std::string curve_csv = "kappa,sse\n";
  for (const auto& [kappa, sse] : curve)
    curve_csv += std::to_string(kappa) + "," + format_double(sse) + "\n";

  int kappa_elbow = 0;
  if (curve.size() >= 3) kappa_elbow = elbow(curve);

  auto has_empty_cluster = [](const ClusterModel& model) {
    std::vector<int> counts(model.centroids.size(), 0);
    for (int a : model.assignments) ++counts[a];
    for (int count : counts)
      if (count == 0) return true;
    return false;
  };

  int kappa_silhouette = 0;
  double best_silhouette = -2.0;
  for (const auto& [kappa, sse] : curve) {
    (void)sse;
    if (kappa < 2) continue;
    ClusterConfig run_cfg = cfg;
    run_cfg.kappa = kappa;
    const ClusterModel scan_model = kmeans(space, run_cfg);
    // Fewer distinct points than centroids leaves clusters empty; such a
    // kappa cannot be scored.
    if (has_empty_cluster(scan_model)) continue;
    const double s = mean_silhouette(space, scan_model);
    if (s > best_silhouette) {
      best_silhouette = s;
      kappa_silhouette = kappa;
    }
  }

  int kappa_selected = options_.get_int("cluster.kappa");
  std::string selection = "configured";
  if (kappa_selected <= 0) {
    selection = options_.get("cluster.select");
    if (selection == "elbow") {
      require(kappa_elbow > 0, "cluster: elbow selection needs a scan of at least 3 kappas");
      kappa_selected = kappa_elbow;
    } else if (selection == "silhouette") {
      require(kappa_silhouette > 0, "cluster: silhouette selection needs kappa >= 2 in range");
      kappa_selected = kappa_silhouette;
    } else {
      throw std::invalid_argument("config: cluster.select must be elbow or silhouette");
    }
  }

  ClusterConfig final_cfg = cfg;
  final_cfg.kappa = kappa_selected;
  const ClusterModel model = kmeans(space, final_cfg);
  const double final_silhouette =
      kappa_selected >= 2 && !has_empty_cluster(model) ? mean_silhouette(space, model) : 0.0;

  std::string clusters_csv = "doc_id,cluster\n";
  for (int i = 0; i < space.size(); ++i)
    clusters_csv += csv_escape(space.ids()[i]) + "," + std::to_string(model.assignments[i]) + "\n";

  // Representative keywords per cluster, LDA inside each cluster.
  const auto docs = load_tokenized_artifact(out_path(kTokenized));
  const auto lexicon = TermLexicon::from_csv(read_file(out_path(kLexicon)));
  require(docs.size() == static_cast<std::size_t>(space.size()),
          "cluster: tokenized corpus and feature space are out of sync");

  LdaConfig keyword_cfg;
  keyword_cfg.num_topics = options_.get_int("lda.topics");
  keyword_cfg.alpha = options_.get_double("lda.alpha");
  keyword_cfg.beta = options_.get_double("lda.beta");
  keyword_cfg.iterations = options_.get_int("lda.iterations");
  const int keyword_topics = options_.get_int("cluster.keyword_topics");
  const int keyword_terms = options_.get_int("cluster.keyword_terms");

  std::vector<int> sizes(kappa_selected, 0);
  for (int a : model.assignments) ++sizes[a];

  std::string keywords_csv = "cluster,size,source";
  for (int j = 1; j <= keyword_topics * keyword_terms; ++j)
    keywords_csv += ",word" + std::to_string(j);
  keywords_csv += "\n";

  nlohmann::json keywords_json = nlohmann::json::array();
  for (int k = 0; k < kappa_selected; ++k) {
    std::vector<EncodedDocument> members;
    for (int i = 0; i < space.size(); ++i)
      if (model.assignments[i] == k) members.push_back(encode(docs[i], lexicon, 0));

    LdaConfig member_cfg = keyword_cfg;
    member_cfg.num_topics = std::max(2, std::min(keyword_cfg.num_topics,
                                                 static_cast<int>(members.size())));
    member_cfg.seed = mix_seed(options_.get_seed(),
                               hash_string("cluster-keywords-" + std::to_string(k)));
    const auto kw = cluster_keywords(members, lexicon, member_cfg, keyword_topics, keyword_terms);

    keywords_csv += std::to_string(k) + "," + std::to_string(sizes[k]) + "," +
                    (kw.frequency_fallback ? "frequency" : "lda");
    for (int j = 0; j < keyword_topics * keyword_terms; ++j)
      keywords_csv +=
          "," + (j < static_cast<int>(kw.keywords.size()) ? csv_escape(kw.keywords[j]) : "");
    keywords_csv += "\n";
    keywords_json.push_back(kw.keywords);
  }

  nlohmann::json summary = {
      {"kappa_elbow", kappa_elbow},
      {"kappa_silhouette", kappa_silhouette},
      {"kappa_selected", kappa_selected},
      {"selection", selection},
      {"silhouette", final_silhouette},
      {"cluster_sizes", sizes},
      {"keywords", keywords_json},
  };

  write_artifact(kClusters, clusters_csv);
  write_artifact(kSseCurve, curve_csv);
  write_artifact(kClusterKeywords, keywords_csv);
  write_artifact(kClusterSummary, summary.dump(2) + "\n");
}

void Pipeline::cmd_map() {
  guard_outputs({kPcaCoords, kTsneCoords, kPcaMap, kTsneMap});
  require_artifact(kFvsm);
  require_artifact(kClusters);
  require_artifact(kClusterSummary);

  const FeatureSpace space = FeatureSpace::from_csv(read_file(out_path(kFvsm)));
  const auto assignments = load_clusters_artifact(out_path(kClusters));
  require(assignments.size() == static_cast<std::size_t>(space.size()),
          "map: cluster artifact does not cover the feature space");

  std::vector<int> clusters(space.size());
  int kappa = 0;
  for (int i = 0; i < space.size(); ++i) {
    require(assignments[i].first == space.ids()[i],
            "map: cluster artifact is out of sync with the feature space at " +
                assignments[i].first);
    clusters[i] = assignments[i].second;
    kappa = std::max(kappa, clusters[i] + 1);
  }

  std::vector<std::string> legend_labels(kappa);
  const auto summary = nlohmann::json::parse(read_file(out_path(kClusterSummary)));
  for (int k = 0; k < kappa; ++k) {
    std::string label = std::to_string(k);
    if (summary.contains("keywords") && k < static_cast<int>(summary["keywords"].size())) {
      label += ":";
      int added = 0;
      for (const auto& word : summary["keywords"][k]) {
        if (added++ == 3) break;
        label += " " + word.get<std::string>();
      }
    }
    legend_labels[k] = label;
  }

  auto coords_csv = [&](const Projection2D& projection) {
    std::string csv = "doc_id,x,y,cluster\n";
    for (int i = 0; i < space.size(); ++i)
      csv += csv_escape(projection.ids[i]) + "," + format_double(projection.coords[i][0]) + "," +
             format_double(projection.coords[i][1]) + "," + std::to_string(clusters[i]) + "\n";
    return csv;
  };

  const PcaResult pca = pca2(space);
  write_artifact(kPcaCoords, coords_csv(pca.projection));
  write_artifact(kPcaMap, svg_scatter("Patent map (PCA projection)", pca.projection, clusters,
                                      kappa, legend_labels));

  TsneConfig tsne_cfg;
  tsne_cfg.perplexity = options_.get_double("tsne.perplexity");
  tsne_cfg.iterations = options_.get_int("tsne.iterations");
  tsne_cfg.learning_rate = options_.get_double("tsne.learning_rate");
  tsne_cfg.momentum_early = options_.get_double("tsne.momentum_early");
  tsne_cfg.momentum_late = options_.get_double("tsne.momentum_late");
  tsne_cfg.momentum_switch_iter = options_.get_int("tsne.momentum_switch");
  tsne_cfg.exaggeration = options_.get_double("tsne.exaggeration");
  tsne_cfg.exaggeration_iters = options_.get_int("tsne.exaggeration_iters");
  tsne_cfg.seed = mix_seed(options_.get_seed(), hash_string("tsne"));
  require(tsne_cfg.perplexity < space.size(),
          "map: tsne.perplexity must be below the document count");

  const TsneResult tsne = tsne2(space, tsne_cfg);
  write_artifact(kTsneCoords, coords_csv(tsne.projection));
  write_artifact(kTsneMap, svg_scatter("Patent map (t-SNE embedding)", tsne.projection, clusters,
                                       kappa, legend_labels));
}

void Pipeline::cmd_run_all() {
  using clock = std::chrono::steady_clock;
  written_.clear();

  struct StageTiming {
    std::string name;
    double seconds;
  };
  std::vector<StageTiming> timings;

  const std::vector<std::pair<std::string, void (Pipeline::*)()>> stages = {
      {"ingest", &Pipeline::cmd_ingest},   {"label", &Pipeline::cmd_label},
      {"train", &Pipeline::cmd_train},     {"extract", &Pipeline::cmd_extract},
      {"triads", &Pipeline::cmd_triads},   {"cluster", &Pipeline::cmd_cluster},
      {"map", &Pipeline::cmd_map},
  };
  for (const auto& [name, fn] : stages) {
    const auto start = clock::now();
    try {
      (this->*fn)();
    } catch (const std::exception& e) {
      throw IoError("stage " + name + " failed: " + e.what());
    }
    timings.push_back({name, std::chrono::duration<double>(clock::now() - start).count()});
  }

  nlohmann::json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["config"] = options_.values();
  nlohmann::json stage_json = nlohmann::json::array();
  for (const auto& timing : timings)
    stage_json.push_back({{"name", timing.name}, {"seconds", timing.seconds}});
  manifest["stages"] = stage_json;

  std::vector<std::string> names = written_;
  std::sort(names.begin(), names.end());
  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& name : names)
    artifacts.push_back({{"path", name}, {"sha256", sha256_file(out_path(name))}});
  manifest["artifacts"] = artifacts;

  write_file(out_path(kManifest), manifest.dump(2) + "\n");
}

}  // namespace fvsm
