// Command-line front end for the fvsm pipeline. Talks to the shared library
// exclusively through the C API in fvsm.h.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fvsm.h"

namespace {

struct PipelineDeleter {
  void operator()(fvsm_pipeline* p) const { fvsm_pipeline_free(p); }
};
using PipelineHandle = std::unique_ptr<fvsm_pipeline, PipelineDeleter>;

struct CommonFlags {
  std::string config;
  std::string out;
  std::string seed;
  bool force = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Run configuration file (key = value lines)");
  cmd->add_option("--out", flags.out, "Output directory for artifacts");
  cmd->add_option("--seed", flags.seed, "Global random seed");
  cmd->add_flag("--force", flags.force, "Overwrite existing artifacts and stale locks");
}

int run_stage(const std::string& stage, const CommonFlags& flags,
              const std::vector<std::string>& overrides) {
  fvsm_pipeline* raw = nullptr;
  if (fvsm_pipeline_new(&raw) != FVSM_OK) {
    std::fprintf(stderr, "error: failed to allocate pipeline\n");
    return 1;
  }
  PipelineHandle pipeline(raw);

  auto check = [&](fvsm_status status) {
    if (status == FVSM_OK) return true;
    std::fprintf(stderr, "error (%s): %s\n", fvsm_status_name(status),
                 fvsm_pipeline_last_error(pipeline.get()));
    return false;
  };

  if (!flags.config.empty() &&
      !check(fvsm_pipeline_load_config(pipeline.get(), flags.config.c_str())))
    return 1;
  if (!flags.out.empty() && !check(fvsm_pipeline_set(pipeline.get(), "out", flags.out.c_str())))
    return 1;
  if (!flags.seed.empty() &&
      !check(fvsm_pipeline_set(pipeline.get(), "seed", flags.seed.c_str())))
    return 1;
  if (flags.force && !check(fvsm_pipeline_set(pipeline.get(), "force", "true"))) return 1;

  for (const auto& override_kv : overrides) {
    const auto eq = override_kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --option expects key=value, got \"%s\"\n",
                   override_kv.c_str());
      return 1;
    }
    if (!check(fvsm_pipeline_set(pipeline.get(), override_kv.substr(0, eq).c_str(),
                                 override_kv.substr(eq + 1).c_str())))
      return 1;
  }

  if (!check(fvsm_pipeline_run(pipeline.get(), stage.c_str()))) return 1;

  char out_dir[4096];
  if (fvsm_pipeline_get(pipeline.get(), "out", out_dir, sizeof(out_dir), nullptr) == FVSM_OK)
    std::printf("%s: artifacts written to %s\n", stage.c_str(), out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("fvsm ") + fvsm_version() +
               " — patent analytics over CNN feature vectors"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> stages = {
      {"ingest", "Tokenize, stem, filter the corpus; build the lexicon and TF-IDF baseline"},
      {"label", "Label documents by LDA topic (or copy external labels)"},
      {"train", "Cross-validate the CNN classifier and keep the best fold"},
      {"extract", "Write the pooling-layer feature vector of every document"},
      {"triads", "Score triad similarity discrimination for both vector spaces"},
      {"cluster", "Scan cluster counts, k-means at the selected count, name clusters"},
      {"map", "Project features to 2-D (PCA and t-SNE) and draw the patent maps"},
      {"run-all", "Run every stage in order and write the run manifest"},
  };

  struct StageCommand {
    CommonFlags flags;
    std::vector<std::string> overrides;
  };
  std::vector<std::unique_ptr<StageCommand>> commands;
  for (const auto& [name, description] : stages) {
    auto stage_cmd = std::make_unique<StageCommand>();
    CLI::App* cmd = app.add_subcommand(name, description);
    add_common_flags(cmd, stage_cmd->flags);
    cmd->add_option("--option", stage_cmd->overrides,
                    "Extra key=value configuration override (repeatable)");
    commands.push_back(std::move(stage_cmd));
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (app.get_subcommands().at(0)->get_name() == stages[i].first)
      return run_stage(stages[i].first, commands[i]->flags, commands[i]->overrides);
  }
  std::fprintf(stderr, "error: no stage selected\n");
  return 1;
}
