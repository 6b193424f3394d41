#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fvsm {

inline constexpr const char* kToolVersion = "0.1.0";

/// Run configuration: built-in defaults, overridden by a config file,
/// overridden again by explicit set() calls (CLI flags). Keys outside the
/// schema are rejected.
class PipelineOptions {
 public:
  PipelineOptions();

  /// Parses "key = value" lines; '#' starts a comment.
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::uint64_t get_seed() const;
  std::vector<int> get_int_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// End-to-end run orchestration. Stages read their inputs from the output
/// directory of earlier stages, so each stage is independently rerunnable.
///
/// Stage names: ingest, label, train, extract, triads, cluster, map, run-all.
class Pipeline {
 public:
  void load_config(const std::string& path) { options_.load_file(path); }
  void set(const std::string& key, const std::string& value) { options_.set(key, value); }
  const std::string& get(const std::string& key) const { return options_.get(key); }

  void run(const std::string& stage);

  PipelineOptions& options() { return options_; }

 private:
  PipelineOptions options_;
  std::vector<std::string> written_;  // artifact file names, in write order

  std::string out_path(const std::string& name) const;
  void write_artifact(const std::string& name, const std::string& contents);
  void guard_outputs(const std::vector<std::string>& names) const;
  void require_artifact(const std::string& name) const;

  void cmd_ingest();
  void cmd_label();
  void cmd_train();
  void cmd_extract();
  void cmd_triads();
  void cmd_cluster();
  void cmd_map();
  void cmd_run_all();
};

}  // namespace fvsm
