#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsir/baselines.hpp"
#include "dsir/document.hpp"
#include "dsir/featurizer.hpp"
#include "dsir/quality_filter.hpp"

namespace dsir {

// Everything the two-pass pipeline needs. The config digest covers only
// the fields that determine artifact content (featurizer, smoothing,
// quality, caps); seed, workers, and method are execution parameters
// recorded in their own artifact fields, so rerunning with a different
// worker count or selection seed does not invalidate earlier stages.
struct PipelineConfig {
  FeaturizerConfig featurizer;
  double smoothing_alpha = 1.0;
  QualityConfig quality;
  uint64_t sample_cap = 100000;  // fit/report estimation cap per dataset
  uint64_t seed = 0;
  uint32_t workers = 1;
  bool filter_target = false;  // quality-filter the target side too

  void validate() const;
  std::string canonical_json() const;
  std::string digest() const;
};

// DSIR_WORKERS overrides the configured worker count when set.
uint32_t effective_workers(const PipelineConfig& config);

struct StageSummary {
  std::string stage;
  std::map<std::string, uint64_t> counters;
  std::map<std::string, std::string> outputs;
  std::string to_json() const;
};

// Fits the target and raw bag-of-ngrams models on (up to) sample_cap
// quality-passing documents per side and writes both model files.
// The sample is chosen by per-document hash keys, so the result does
// not depend on shard order or worker count.
StageSummary run_fit(const std::vector<std::string>& raw_paths,
                     const std::vector<std::string>& target_paths,
                     const PipelineConfig& config,
                     const std::string& raw_model_out,
                     const std::string& target_model_out);

// Streams every quality-passing raw document and writes the log
// importance weight table in canonical corpus order (shard basename,
// then ordinal). Refuses models whose digests do not match the config.
StageSummary run_weights(const std::vector<std::string>& raw_paths,
                         const std::string& target_model_path,
                         const std::string& raw_model_path,
                         const PipelineConfig& config,
                         const std::string& table_out);

struct SelectOptions {
  uint64_t k = 0;                 // ignored by method heuristic
  std::optional<uint64_t> seed;   // default: the table header's seed
  SelectionMethod method = SelectionMethod::dsir;
  ParetoConfig pareto;
};

// Streams a persisted table (log weights or scores) and writes the
// selection manifest. Memory is O(k), not O(table).
StageSummary run_select(const std::string& table_path,
                        const SelectOptions& options,
                        const std::string& manifest_out);

StageSummary run_extract(const std::vector<std::string>& raw_paths,
                         const std::string& manifest_path,
                         const std::string& subset_out);

// Applies the quality filter; drop_log_out (when nonempty) receives one
// {"id", "reason"} JSON line per rejected document.
StageSummary run_filter(const std::vector<std::string>& paths,
                        const PipelineConfig& config,
                        const std::string& passing_out,
                        const std::string& drop_log_out);

struct TrainClassifierStageOptions {
  ClassifierTrainOptions train;
  double calibrate_frac = 0.0;  // held-out fraction for Platt fitting
};

StageSummary run_train_classifier(const std::vector<std::string>& target_paths,
                                  const std::vector<std::string>& raw_paths,
                                  const PipelineConfig& config,
                                  const TrainClassifierStageOptions& options,
                                  const std::string& classifier_out);

// Scores every quality-passing document with the classifier and writes
// a (id, f) score table in canonical corpus order.
StageSummary run_score(const std::vector<std::string>& raw_paths,
                       const std::string& classifier_path,
                       const PipelineConfig& config,
                       const std::string& table_out);

struct LabeledDataset {
  std::string label;
  std::vector<std::string> paths;
};

// Estimates target/raw/selected feature distributions (up to sample_cap
// documents each) and writes one CSV row per selected set:
// target,selected,kl_target_raw,kl_target_selected,kl_reduction
StageSummary run_kl_report(const std::vector<std::string>& target_paths,
                           const std::vector<std::string>& raw_paths,
                           const std::vector<LabeledDataset>& selected,
                           const PipelineConfig& config,
                           const std::string& csv_out);

}  // namespace dsir
