// dsir: select a subset of a large JSONL corpus whose hashed n-gram
// feature distribution matches a small target dataset, via importance
// resampling, plus the baseline selection methods and the KL-reduction
// report for comparing them.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsir/corpus_io.hpp"
#include "dsir/pipeline.hpp"

namespace {

struct CommonFlags {
  dsir::PipelineConfig config;
  std::vector<uint32_t> orders = {1, 2};
  bool no_lowercase = false;
  bool no_quality_filter = false;
};

void add_config_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--buckets", flags.config.featurizer.num_buckets,
                  "Number of hash buckets (default 10000)");
  cmd->add_option("--orders", flags.orders,
                  "N-gram orders, e.g. --orders 1 2 (default 1 2)");
  cmd->add_flag("--no-lowercase", flags.no_lowercase,
                "Keep the original letter case");
  cmd->add_option("--hash-seed", flags.config.featurizer.hash_seed,
                  "Seed mixed into the feature hash");
  cmd->add_option("--alpha", flags.config.smoothing_alpha,
                  "Additive smoothing pseudo-count per bucket (default 1.0)");
  cmd->add_option("--sample-cap", flags.config.sample_cap,
                  "Max documents per dataset for model estimation "
                  "(default 100000)");
  cmd->add_option("--seed", flags.config.seed, "Pipeline seed");
  cmd->add_option("--workers", flags.config.workers,
                  "Shard-parallel worker count (env DSIR_WORKERS overrides)");
  cmd->add_option("--min-words", flags.config.quality.min_words,
                  "Quality filter: minimum token count (default 40)");
  cmd->add_option("--max-top-token-frac",
                  flags.config.quality.max_top_token_frac,
                  "Quality filter: max share of the most frequent token "
                  "(default 0.2)");
  cmd->add_option("--min-distinct-frac", flags.config.quality.min_distinct_frac,
                  "Quality filter: min distinct-token fraction (default 0.3)");
  cmd->add_flag("--no-quality-filter", flags.no_quality_filter,
                "Disable the quality filter");
  cmd->add_flag("--filter-target", flags.config.filter_target,
                "Apply the quality filter to the target side too");
}

dsir::PipelineConfig finalize(CommonFlags& flags) {
  flags.config.featurizer.orders = flags.orders;
  flags.config.featurizer.lowercase = !flags.no_lowercase;
  flags.config.quality.enabled = !flags.no_quality_filter;
  flags.config.validate();
  return flags.config;
}

void print_summary(const dsir::StageSummary& summary) {
  std::cout << summary.to_json() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dsir: data selection for text corpora via importance resampling "
      "on hashed n-gram features"};
  app.require_subcommand(1);

  // fit
  auto fit_flags = std::make_shared<CommonFlags>();
  CLI::App* fit = app.add_subcommand(
      "fit", "Fit target and raw bag-of-ngrams models from samples");
  std::vector<std::string> fit_raw, fit_target;
  std::string fit_raw_model = "raw.model", fit_target_model = "target.model";
  fit->add_option("--raw", fit_raw, "Raw corpus shards (JSONL or JSONL.gz)")
      ->required();
  fit->add_option("--target", fit_target, "Target dataset shards")->required();
  fit->add_option("--out-raw-model", fit_raw_model, "Raw model output path");
  fit->add_option("--out-target-model", fit_target_model,
                  "Target model output path");
  add_config_flags(fit, *fit_flags);
  fit->callback([&, fit_flags] {
    print_summary(dsir::run_fit(fit_raw, fit_target, finalize(*fit_flags),
                                fit_raw_model, fit_target_model));
  });

  // weights
  auto weights_flags = std::make_shared<CommonFlags>();
  CLI::App* weights = app.add_subcommand(
      "weights", "Compute per-document log importance weights");
  std::vector<std::string> weights_raw;
  std::string weights_target_model, weights_raw_model, weights_out = "weights.tsv";
  weights->add_option("--raw", weights_raw, "Raw corpus shards")->required();
  weights->add_option("--target-model", weights_target_model)->required();
  weights->add_option("--raw-model", weights_raw_model)->required();
  weights->add_option("--out", weights_out, "Weight table output (TSV)");
  add_config_flags(weights, *weights_flags);
  weights->callback([&, weights_flags] {
    print_summary(dsir::run_weights(weights_raw, weights_target_model,
                                    weights_raw_model, finalize(*weights_flags),
                                    weights_out));
  });

  // select
  CLI::App* select = app.add_subcommand(
      "select", "Select documents from a weight or score table");
  std::string select_table, select_method = "dsir", select_out = "manifest.json";
  uint64_t select_k = 0;
  int64_t select_seed = -1;
  double select_pareto_alpha = 9.0;
  select->add_option("--table", select_table, "Weight/score table path")
      ->required();
  select->add_option("--k", select_k, "Number of documents to select");
  select->add_option("--method", select_method,
                     "dsir | random | heuristic | topk_heuristic | classifier_ir");
  select->add_option("--seed", select_seed,
                     "Selection seed (default: the table's seed)");
  select->add_option("--pareto-alpha", select_pareto_alpha,
                     "Pareto shape for method heuristic (default 9)");
  select->add_option("--out", select_out, "Manifest output path");
  select->callback([&] {
    dsir::SelectOptions options;
    options.k = select_k;
    options.method = dsir::parse_method(select_method);
    options.pareto.shape_alpha = select_pareto_alpha;
    if (select_seed >= 0) options.seed = static_cast<uint64_t>(select_seed);
    print_summary(dsir::run_select(select_table, options, select_out));
  });

  // extract
  CLI::App* extract = app.add_subcommand(
      "extract", "Write the selected documents as JSONL in manifest order");
  std::vector<std::string> extract_raw;
  std::string extract_manifest, extract_out = "subset.jsonl";
  extract->add_option("--raw", extract_raw, "Raw corpus shards")->required();
  extract->add_option("--manifest", extract_manifest)->required();
  extract->add_option("--out", extract_out, "Subset output path");
  extract->callback([&] {
    print_summary(dsir::run_extract(extract_raw, extract_manifest, extract_out));
  });

  // kl-report
  auto report_flags = std::make_shared<CommonFlags>();
  CLI::App* report = app.add_subcommand(
      "kl-report",
      "Report KL(target||raw) - KL(target||selected) per selected set");
  std::vector<std::string> report_target, report_raw, report_selected;
  std::string report_out = "kl_report.csv";
  report->add_option("--target", report_target)->required();
  report->add_option("--raw", report_raw)->required();
  report
      ->add_option("--selected", report_selected,
                   "Selected subset JSONL (repeatable)")
      ->required();
  report->add_option("--out", report_out, "CSV output path");
  add_config_flags(report, *report_flags);
  report->callback([&, report_flags] {
    std::vector<dsir::LabeledDataset> selected;
    for (const std::string& path : report_selected) {
      std::string label = std::filesystem::path(path).stem().string();
      selected.push_back({label, {path}});
    }
    print_summary(dsir::run_kl_report(report_target, report_raw, selected,
                                      finalize(*report_flags), report_out));
  });

  // train-classifier
  auto train_flags = std::make_shared<CommonFlags>();
  CLI::App* train = app.add_subcommand(
      "train-classifier",
      "Train the binary target-vs-raw logistic classifier");
  std::vector<std::string> train_target, train_raw;
  std::string train_out = "classifier.model";
  dsir::TrainClassifierStageOptions train_options;
  train->add_option("--target", train_target)->required();
  train->add_option("--raw", train_raw)->required();
  train->add_option("--out", train_out, "Classifier output path");
  train->add_option("--epochs", train_options.train.epochs);
  train->add_option("--learning-rate", train_options.train.learning_rate);
  train->add_option("--l2", train_options.train.l2);
  train->add_option("--batch-size", train_options.train.batch_size);
  train->add_option("--calibrate-frac", train_options.calibrate_frac,
                    "Held-out fraction for Platt calibration (default 0: off)");
  add_config_flags(train, *train_flags);
  train->callback([&, train_flags] {
    print_summary(dsir::run_train_classifier(
        train_target, train_raw, finalize(*train_flags), train_options,
        train_out));
  });

  // score
  auto score_flags = std::make_shared<CommonFlags>();
  CLI::App* score = app.add_subcommand(
      "score", "Score documents with a trained classifier");
  std::vector<std::string> score_raw;
  std::string score_classifier, score_out = "scores.tsv";
  score->add_option("--raw", score_raw, "Raw corpus shards")->required();
  score->add_option("--classifier", score_classifier)->required();
  score->add_option("--out", score_out, "Score table output (TSV)");
  add_config_flags(score, *score_flags);
  score->callback([&, score_flags] {
    print_summary(dsir::run_score(score_raw, score_classifier,
                                  finalize(*score_flags), score_out));
  });

  // filter
  auto filter_flags = std::make_shared<CommonFlags>();
  CLI::App* filter = app.add_subcommand(
      "filter", "Apply the quality filter and write passing documents");
  std::vector<std::string> filter_input;
  std::string filter_out = "passing.jsonl", filter_drop_log;
  filter->add_option("--input", filter_input, "Corpus shards")->required();
  filter->add_option("--out", filter_out, "Passing documents output");
  filter->add_option("--drop-log", filter_drop_log,
                     "Optional JSONL log of {id, reason} per dropped document");
  add_config_flags(filter, *filter_flags);
  filter->callback([&, filter_flags] {
    print_summary(dsir::run_filter(filter_input, finalize(*filter_flags),
                                   filter_out, filter_drop_log));
  });

  // run-all
  auto all_flags = std::make_shared<CommonFlags>();
  CLI::App* all = app.add_subcommand(
      "run-all", "fit -> weights -> select -> extract in one invocation");
  std::vector<std::string> all_raw, all_target;
  std::string all_outdir = ".", all_method = "dsir";
  uint64_t all_k = 0;
  all->add_option("--raw", all_raw, "Raw corpus shards")->required();
  all->add_option("--target", all_target, "Target dataset shards")->required();
  all->add_option("--k", all_k, "Number of documents to select")->required();
  all->add_option("--method", all_method, "dsir | random");
  all->add_option("--outdir", all_outdir, "Directory for all artifacts");
  add_config_flags(all, *all_flags);
  all->callback([&, all_flags] {
    dsir::PipelineConfig config = finalize(*all_flags);
    std::filesystem::create_directories(all_outdir);
    auto in_dir = [&](const char* name) {
      return (std::filesystem::path(all_outdir) / name).string();
    };
    print_summary(dsir::run_fit(all_raw, all_target, config,
                                in_dir("raw.model"), in_dir("target.model")));
    print_summary(dsir::run_weights(all_raw, in_dir("target.model"),
                                    in_dir("raw.model"), config,
                                    in_dir("weights.tsv")));
    dsir::SelectOptions options;
    options.k = all_k;
    options.method = dsir::parse_method(all_method);
    print_summary(dsir::run_select(in_dir("weights.tsv"), options,
                                   in_dir("manifest.json")));
    print_summary(dsir::run_extract(all_raw, in_dir("manifest.json"),
                                    in_dir("subset.jsonl")));
  });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
