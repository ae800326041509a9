#include "dsir/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "dsir/corpus_io.hpp"
#include "dsir/hashing.hpp"
#include "dsir/kl_metric.hpp"
#include "dsir/ngram_model.hpp"
#include "dsir/resampler.hpp"

namespace dsir {

using nlohmann::json;

void PipelineConfig::validate() const {
  featurizer.validate();
  quality.validate();
  if (!(smoothing_alpha > 0.0))
    throw std::invalid_argument("smoothing_alpha must be > 0");
  if (sample_cap == 0) throw std::invalid_argument("sample_cap must be >= 1");
  if (workers == 0) throw std::invalid_argument("workers must be >= 1");
}

std::string PipelineConfig::canonical_json() const {
  json j;
  j["featurizer"] = json::parse(featurizer.canonical_json());
  j["filter_target"] = filter_target;
  j["quality"] = {{"enabled", quality.enabled},
                  {"max_top_token_frac", quality.max_top_token_frac},
                  {"min_distinct_frac", quality.min_distinct_frac},
                  {"min_words", quality.min_words}};
  j["sample_cap"] = sample_cap;
  j["smoothing_alpha"] = smoothing_alpha;
  return j.dump();
}

std::string PipelineConfig::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash64(canonical_json())));
  return std::string(buf);
}

uint32_t effective_workers(const PipelineConfig& config) {
  if (const char* env = std::getenv("DSIR_WORKERS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<uint32_t>(n);
  }
  return config.workers;
}

std::string StageSummary::to_json() const {
  json j;
  j["stage"] = stage;
  for (const auto& [key, value] : counters) j[key] = value;
  if (!outputs.empty()) j["outputs"] = outputs;
  return j.dump();
}

namespace {

// Runs fn(shard_index, shard) across a pool. Results must be merged
// commutatively or written per shard; completion order is unspecified.
void parallel_over_shards(
    const std::vector<Shard>& shards, uint32_t workers,
    const std::function<void(size_t, const Shard&)>& fn) {
  workers = std::min<uint32_t>(workers, static_cast<uint32_t>(shards.size()));
  if (workers <= 1) {
    for (size_t i = 0; i < shards.size(); ++i) fn(i, shards[i]);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (uint32_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= shards.size()) return;
        try {
          fn(i, shards[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Keeps the cap smallest (key, id) pairs; ties resolved by id. Used to
// draw the fit/training sample in a way that ignores shard order.
class BottomKIds {
 public:
  explicit BottomKIds(size_t cap) : cap_(cap) {}

  void add(uint64_t key, std::string id) {
    if (heap_.size() < cap_) {
      heap_.emplace_back(key, std::move(id));
      std::push_heap(heap_.begin(), heap_.end());
      return;
    }
    std::pair<uint64_t, std::string> cand(key, std::move(id));
    if (cand < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = std::move(cand);
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  void merge(BottomKIds&& other) {
    for (auto& e : other.heap_) add(e.first, std::move(e.second));
    other.heap_.clear();
  }

  std::unordered_set<std::string> finish_set() {
    std::unordered_set<std::string> ids;
    ids.reserve(heap_.size());
    for (auto& e : heap_) ids.insert(std::move(e.second));
    return ids;
  }

 private:
  size_t cap_;
  std::vector<std::pair<uint64_t, std::string>> heap_;  // max-heap
};

uint64_t sample_key(uint64_t side_seed, const std::string& id) {
  return counter_rand(side_seed, hash64(id), 0);
}

struct SideCounts {
  std::vector<uint64_t> counts;
  uint64_t docs_seen = 0;
  uint64_t sampled = 0;
  uint64_t skipped_lines = 0;
  QualityCounters quality;
};

// Two streaming passes: pick the sample by per-document keys, then
// accumulate dense n-gram counts for the picked ids.
SideCounts accumulate_side(const std::vector<std::string>& paths,
                           const PipelineConfig& config, bool apply_quality,
                           uint64_t side_seed, uint32_t workers) {
  std::vector<Shard> shards = canonical_shards(paths);

  BottomKIds sample(config.sample_cap);
  std::atomic<uint64_t> docs_seen{0};
  std::atomic<uint64_t> skipped{0};
  std::mutex merge_mutex;
  QualityCounters quality;

  parallel_over_shards(shards, workers, [&](size_t, const Shard& shard) {
    BottomKIds local(config.sample_cap);
    QualityCounters local_quality;
    ShardReader reader(shard);
    while (std::optional<Document> doc = reader.next()) {
      docs_seen.fetch_add(1, std::memory_order_relaxed);
      if (apply_quality) {
        QualityVerdict v = check_quality(doc->text, config.quality);
        local_quality.record(v);
        if (v != QualityVerdict::pass) continue;
      }
      local.add(sample_key(side_seed, doc->id), std::move(doc->id));
    }
    skipped.fetch_add(reader.skipped_lines(), std::memory_order_relaxed);
    std::lock_guard<std::mutex> lock(merge_mutex);
    sample.merge(std::move(local));
    quality += local_quality;
  });

  std::unordered_set<std::string> picked = sample.finish_set();

  SideCounts side;
  side.counts.assign(config.featurizer.num_buckets, 0);
  side.docs_seen = docs_seen.load();
  side.sampled = picked.size();
  side.skipped_lines = skipped.load();
  side.quality = quality;

  std::mutex counts_mutex;
  parallel_over_shards(shards, workers, [&](size_t, const Shard& shard) {
    std::vector<uint64_t> local(config.featurizer.num_buckets, 0);
    ShardReader reader(shard);
    while (std::optional<Document> doc = reader.next()) {
      if (picked.count(doc->id) == 0) continue;
      accumulate_counts(doc->text, config.featurizer, local);
    }
    std::lock_guard<std::mutex> lock(counts_mutex);
    for (size_t j = 0; j < local.size(); ++j) side.counts[j] += local[j];
  });
  return side;
}

void check_model_digests(const BagOfNgramsModel& model,
                         const PipelineConfig& config, const std::string& role) {
  if (model.featurizer_digest != config.featurizer.digest())
    throw std::runtime_error(role +
                             " model featurizer digest does not match the "
                             "current featurizer config");
  if (model.config_digest != config.digest())
    throw std::runtime_error(
        role + " model config digest does not match the current config");
  if (model.num_buckets != config.featurizer.num_buckets)
    throw std::runtime_error(role + " model num_buckets mismatch");
}

void format_row(std::string& out, const std::string& id, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  out += id;
  out += '\t';
  out += buf;
  out += '\n';
}

// Scores every quality-passing document shard by shard into temp files,
// then concatenates them in canonical order. Per-worker memory stays
// O(num_buckets) regardless of corpus size.
StageSummary run_table_stage(const std::vector<std::string>& paths,
                             const PipelineConfig& config,
                             const std::string& table_out,
                             const std::string& stage_name,
                             const std::string& kind,
                             const std::function<double(const FeatureVector&)>& score) {
  std::vector<Shard> shards = canonical_shards(paths);
  uint32_t workers = effective_workers(config);

  std::vector<std::string> tmp_paths(shards.size());
  for (size_t i = 0; i < shards.size(); ++i)
    tmp_paths[i] = table_out + ".tmp" + std::to_string(i);

  std::atomic<uint64_t> docs_seen{0}, rows{0}, skipped{0};
  std::mutex merge_mutex;
  QualityCounters quality;

  parallel_over_shards(shards, workers, [&](size_t i, const Shard& shard) {
    std::ofstream out(tmp_paths[i], std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open temp file for write: " + tmp_paths[i]);
    QualityCounters local_quality;
    std::string buffer;
    ShardReader reader(shard);
    while (std::optional<Document> doc = reader.next()) {
      docs_seen.fetch_add(1, std::memory_order_relaxed);
      QualityVerdict v = check_quality(doc->text, config.quality);
      local_quality.record(v);
      if (v != QualityVerdict::pass) continue;
      format_row(buffer, doc->id, score(featurize(doc->text, config.featurizer)));
      rows.fetch_add(1, std::memory_order_relaxed);
      if (buffer.size() > (1u << 16)) {
        out << buffer;
        buffer.clear();
      }
    }
    out << buffer;
    if (!out) throw std::runtime_error("write failed: " + tmp_paths[i]);
    skipped.fetch_add(reader.skipped_lines(), std::memory_order_relaxed);
    std::lock_guard<std::mutex> lock(merge_mutex);
    quality += local_quality;
  });

  std::ofstream out(table_out, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot open table for write: " + table_out);
  out << "#dsir-table\tv=1\tkind=" << kind << "\tseed=" << config.seed
      << "\tconfig_digest=" << config.digest() << "\n";
  for (const std::string& tmp : tmp_paths) {
    std::ifstream in(tmp, std::ios::binary);
    if (!in) throw std::runtime_error("missing temp file: " + tmp);
    out << in.rdbuf();
    if (!out && in.peek() != std::ifstream::traits_type::eof())
      throw std::runtime_error("write failed: " + table_out);
    in.close();
    std::filesystem::remove(tmp);
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + table_out);

  StageSummary summary;
  summary.stage = stage_name;
  summary.counters["docs"] = docs_seen.load();
  summary.counters["rows"] = rows.load();
  summary.counters["skipped_lines"] = skipped.load();
  summary.counters["dropped_too_short"] = quality.too_short;
  summary.counters["dropped_repetitive_top_token"] = quality.repetitive_top_token;
  summary.counters["dropped_repetitive_low_diversity"] =
      quality.repetitive_low_diversity;
  summary.outputs["table"] = table_out;
  return summary;
}

struct TableHeader {
  std::string kind;
  uint64_t seed = 0;
  std::string config_digest;
};

TableHeader parse_table_header(const std::string& line, const std::string& path) {
  if (line.rfind("#dsir-table", 0) != 0)
    throw std::runtime_error("missing table header: " + path);
  TableHeader header;
  size_t kp = line.find("kind=");
  if (kp != std::string::npos) {
    std::string rest = line.substr(kp + 5);
    header.kind = rest.substr(0, rest.find('\t'));
  }
  size_t sp = line.find("seed=");
  if (sp != std::string::npos)
    header.seed = std::strtoull(line.c_str() + sp + 5, nullptr, 10);
  size_t dp = line.find("config_digest=");
  if (dp != std::string::npos) {
    std::string rest = line.substr(dp + 14);
    header.config_digest = rest.substr(0, rest.find('\t'));
  }
  return header;
}

std::vector<uint64_t> counts_for_report(const std::vector<std::string>& paths,
                                        const PipelineConfig& config,
                                        uint64_t* docs_used) {
  DocumentStream stream(paths);
  std::vector<uint64_t> counts(config.featurizer.num_buckets, 0);
  uint64_t used = 0;
  while (used < config.sample_cap) {
    std::optional<Document> doc = stream.next();
    if (!doc) break;
    accumulate_counts(doc->text, config.featurizer, counts);
    ++used;
  }
  if (used == 0) throw std::runtime_error("empty dataset: " + paths.front());
  *docs_used = used;
  return counts;
}

}  // namespace

StageSummary run_fit(const std::vector<std::string>& raw_paths,
                     const std::vector<std::string>& target_paths,
                     const PipelineConfig& config,
                     const std::string& raw_model_out,
                     const std::string& target_model_out) {
  config.validate();
  uint32_t workers = effective_workers(config);
  uint64_t raw_seed = mix64(config.seed ^ hash64("fit/raw"));
  uint64_t target_seed = mix64(config.seed ^ hash64("fit/target"));

  SideCounts raw =
      accumulate_side(raw_paths, config, /*apply_quality=*/true, raw_seed, workers);
  SideCounts target = accumulate_side(target_paths, config, config.filter_target,
                                      target_seed, workers);

  uint64_t raw_total = 0, target_total = 0;
  for (uint64_t c : raw.counts) raw_total += c;
  for (uint64_t c : target.counts) target_total += c;
  if (raw.sampled == 0 || raw_total == 0)
    throw std::runtime_error("no raw documents survived filtering; cannot fit");
  if (target.sampled == 0 || target_total == 0)
    throw std::runtime_error("no target documents survived filtering; cannot fit");

  std::string feat_digest = config.featurizer.digest();
  std::string cfg_digest = config.digest();
  save_model(fit_bag_of_ngrams(raw.counts, config.smoothing_alpha, feat_digest,
                               cfg_digest),
             raw_model_out);
  save_model(fit_bag_of_ngrams(target.counts, config.smoothing_alpha, feat_digest,
                               cfg_digest),
             target_model_out);

  StageSummary summary;
  summary.stage = "fit";
  summary.counters["raw_docs"] = raw.docs_seen;
  summary.counters["raw_sampled"] = raw.sampled;
  summary.counters["raw_skipped_lines"] = raw.skipped_lines;
  summary.counters["raw_dropped"] = raw.quality.dropped();
  summary.counters["target_docs"] = target.docs_seen;
  summary.counters["target_sampled"] = target.sampled;
  summary.counters["target_skipped_lines"] = target.skipped_lines;
  summary.counters["target_dropped"] = target.quality.dropped();
  summary.outputs["raw_model"] = raw_model_out;
  summary.outputs["target_model"] = target_model_out;
  return summary;
}

StageSummary run_weights(const std::vector<std::string>& raw_paths,
                         const std::string& target_model_path,
                         const std::string& raw_model_path,
                         const PipelineConfig& config,
                         const std::string& table_out) {
  config.validate();
  BagOfNgramsModel target = load_model(target_model_path);
  BagOfNgramsModel raw = load_model(raw_model_path);
  check_model_digests(target, config, "target");
  check_model_digests(raw, config, "raw");

  StageSummary summary = run_table_stage(
      raw_paths, config, table_out, "weights", "log_weight",
      [&](const FeatureVector& z) {
        return log_importance_weight(target, raw, z);
      });
  return summary;
}

StageSummary run_select(const std::string& table_path,
                        const SelectOptions& options,
                        const std::string& manifest_out) {
  std::ifstream in(table_path);
  if (!in) throw std::runtime_error("cannot open table: " + table_path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty table file: " + table_path);
  TableHeader header = parse_table_header(line, table_path);
  uint64_t seed = options.seed.value_or(header.seed);

  bool wants_scores = options.method == SelectionMethod::heuristic ||
                      options.method == SelectionMethod::topk_heuristic ||
                      options.method == SelectionMethod::classifier_ir;
  if (wants_scores && header.kind != "score")
    throw std::runtime_error(to_string(options.method) +
                             " needs a score table (kind=score), got kind=" +
                             header.kind);
  if (options.method == SelectionMethod::dsir && header.kind != "log_weight")
    throw std::runtime_error("dsir needs a log-weight table, got kind=" +
                             header.kind);

  TopKAccumulator top(options.k);
  SelectionManifest manifest;
  manifest.method = options.method;
  manifest.seed = seed;
  manifest.config_digest = header.config_digest;
  uint64_t rows = 0;
  std::unordered_set<std::string> seen;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("malformed table row: " + line);
    std::string id = line.substr(0, tab);
    double value = std::strtod(line.c_str() + tab + 1, nullptr);
    if (!seen.insert(id).second)
      throw std::runtime_error("duplicate id in table: " + id);
    ++rows;

    switch (options.method) {
      case SelectionMethod::dsir:
        if (!std::isfinite(value))
          throw std::runtime_error("non-finite log weight for id " + id);
        top.add(gumbel_key(id, value, seed), std::move(id));
        break;
      case SelectionMethod::random:
        top.add(gumbel_key(id, 0.0, seed), std::move(id));
        break;
      case SelectionMethod::classifier_ir: {
        if (!(value > 0.0 && value < 1.0))
          throw std::runtime_error("score out of (0,1) for id " + id);
        double lw = std::log(value) - std::log1p(-value);
        top.add(gumbel_key(id, lw, seed), std::move(id));
        break;
      }
      case SelectionMethod::topk_heuristic:
        top.add(value, std::move(id));
        break;
      case SelectionMethod::heuristic: {
        if (!(value > 0.0 && value < 1.0))
          throw std::runtime_error("score out of (0,1) for id " + id);
        double u = uniform_open01(counter_rand(seed, hash64(id), 0));
        double beta = std::pow(u, -1.0 / options.pareto.shape_alpha) - 1.0;
        if (value > 1.0 - beta) manifest.selected_ids.push_back(std::move(id));
        break;
      }
    }
  }

  if (options.method == SelectionMethod::heuristic) {
    manifest.k = manifest.selected_ids.size();
  } else {
    std::vector<ScoredId> picked = top.finish();
    manifest.k = options.k;
    manifest.pool_exhausted = picked.size() < options.k;
    for (ScoredId& s : picked) manifest.selected_ids.push_back(std::move(s.id));
  }
  manifest.created_at = current_timestamp();
  write_manifest(manifest, manifest_out);

  StageSummary summary;
  summary.stage = "select";
  summary.counters["rows"] = rows;
  summary.counters["selected"] = manifest.selected_ids.size();
  summary.counters["pool_exhausted"] = manifest.pool_exhausted ? 1 : 0;
  summary.outputs["manifest"] = manifest_out;
  return summary;
}

StageSummary run_extract(const std::vector<std::string>& raw_paths,
                         const std::string& manifest_path,
                         const std::string& subset_out) {
  SelectionManifest manifest = read_manifest(manifest_path);
  uint64_t written = extract_subset(raw_paths, manifest, subset_out);

  StageSummary summary;
  summary.stage = "extract";
  summary.counters["written"] = written;
  summary.outputs["subset"] = subset_out;
  return summary;
}

StageSummary run_filter(const std::vector<std::string>& paths,
                        const PipelineConfig& config,
                        const std::string& passing_out,
                        const std::string& drop_log_out) {
  config.validate();
  std::ofstream out(passing_out, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output for write: " + passing_out);
  std::ofstream drop_log;
  if (!drop_log_out.empty()) {
    drop_log.open(drop_log_out, std::ios::trunc);
    if (!drop_log)
      throw std::runtime_error("cannot open drop log for write: " + drop_log_out);
  }

  QualityCounters counters;
  DocumentStream stream(paths);
  while (std::optional<Document> doc = stream.next()) {
    QualityVerdict v = check_quality(doc->text, config.quality);
    counters.record(v);
    if (v == QualityVerdict::pass) {
      append_document_jsonl(out, *doc);
    } else if (drop_log.is_open()) {
      json j;
      j["id"] = doc->id;
      j["reason"] = to_string(v);
      drop_log << j.dump() << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed: " + passing_out);

  StageSummary summary;
  summary.stage = "filter";
  summary.counters["passed"] = counters.passed;
  summary.counters["dropped_too_short"] = counters.too_short;
  summary.counters["dropped_repetitive_top_token"] = counters.repetitive_top_token;
  summary.counters["dropped_repetitive_low_diversity"] =
      counters.repetitive_low_diversity;
  summary.counters["skipped_lines"] = stream.skipped_lines();
  summary.outputs["passing"] = passing_out;
  if (!drop_log_out.empty()) summary.outputs["drop_log"] = drop_log_out;
  return summary;
}

namespace {

// Feature vectors for (up to) sample_cap quality-passing documents,
// in canonical corpus order.
std::vector<FeatureVector> collect_features(const std::vector<std::string>& paths,
                                            const PipelineConfig& config,
                                            bool apply_quality,
                                            uint64_t side_seed) {
  std::vector<Shard> shards = canonical_shards(paths);
  uint32_t workers = effective_workers(config);

  BottomKIds sample(config.sample_cap);
  std::mutex merge_mutex;
  parallel_over_shards(shards, workers, [&](size_t, const Shard& shard) {
    BottomKIds local(config.sample_cap);
    ShardReader reader(shard);
    while (std::optional<Document> doc = reader.next()) {
      if (apply_quality &&
          check_quality(doc->text, config.quality) != QualityVerdict::pass)
        continue;
      local.add(sample_key(side_seed, doc->id), std::move(doc->id));
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    sample.merge(std::move(local));
  });
  std::unordered_set<std::string> picked = sample.finish_set();

  std::vector<std::vector<FeatureVector>> per_shard(shards.size());
  parallel_over_shards(shards, workers, [&](size_t i, const Shard& shard) {
    ShardReader reader(shard);
    while (std::optional<Document> doc = reader.next()) {
      if (picked.count(doc->id) == 0) continue;
      per_shard[i].push_back(featurize(doc->text, config.featurizer));
    }
  });

  std::vector<FeatureVector> features;
  features.reserve(picked.size());
  for (std::vector<FeatureVector>& v : per_shard)
    for (FeatureVector& z : v) features.push_back(std::move(z));
  return features;
}

}  // namespace

StageSummary run_train_classifier(const std::vector<std::string>& target_paths,
                                  const std::vector<std::string>& raw_paths,
                                  const PipelineConfig& config,
                                  const TrainClassifierStageOptions& options,
                                  const std::string& classifier_out) {
  config.validate();
  if (options.calibrate_frac < 0.0 || options.calibrate_frac >= 1.0)
    throw std::invalid_argument("calibrate_frac must be in [0,1)");

  std::vector<FeatureVector> target = collect_features(
      target_paths, config, config.filter_target,
      mix64(config.seed ^ hash64("train/target")));
  std::vector<FeatureVector> raw =
      collect_features(raw_paths, config, /*apply_quality=*/true,
                       mix64(config.seed ^ hash64("train/raw")));
  if (target.empty() || raw.empty())
    throw std::runtime_error("no documents survived filtering; cannot train");

  // Held-out split before training so calibration never sees train data.
  std::mt19937_64 rng(mix64(config.seed ^ hash64("train/split")));
  std::shuffle(target.begin(), target.end(), rng);
  std::shuffle(raw.begin(), raw.end(), rng);
  size_t target_held = static_cast<size_t>(
      std::floor(options.calibrate_frac * static_cast<double>(target.size())));
  size_t raw_held = static_cast<size_t>(
      std::floor(options.calibrate_frac * static_cast<double>(raw.size())));

  ClassifierTrainOptions train_options = options.train;
  train_options.num_buckets = config.featurizer.num_buckets;
  train_options.seed = config.seed;

  std::span<const FeatureVector> target_train(target.data(),
                                              target.size() - target_held);
  std::span<const FeatureVector> raw_train(raw.data(), raw.size() - raw_held);
  LinearClassifier clf = train_classifier(target_train, raw_train, train_options);
  clf.featurizer_digest = config.featurizer.digest();

  if (options.calibrate_frac > 0.0) {
    if (target_held == 0 || raw_held == 0)
      throw std::runtime_error("held-out calibration split is empty");
    std::vector<FeatureVector> held;
    std::vector<int> labels;
    for (size_t i = target.size() - target_held; i < target.size(); ++i) {
      held.push_back(target[i]);
      labels.push_back(1);
    }
    for (size_t i = raw.size() - raw_held; i < raw.size(); ++i) {
      held.push_back(raw[i]);
      labels.push_back(0);
    }
    clf = platt_calibrate(clf, held, labels);
  }
  save_classifier(clf, classifier_out);

  StageSummary summary;
  summary.stage = "train-classifier";
  summary.counters["target_examples"] = target.size();
  summary.counters["raw_examples"] = raw.size();
  summary.counters["calibration_examples"] = target_held + raw_held;
  summary.counters["calibrated"] = clf.calibration ? 1 : 0;
  summary.outputs["classifier"] = classifier_out;
  return summary;
}

StageSummary run_score(const std::vector<std::string>& raw_paths,
                       const std::string& classifier_path,
                       const PipelineConfig& config,
                       const std::string& table_out) {
  config.validate();
  LinearClassifier clf = load_classifier(classifier_path);
  if (clf.featurizer_digest != config.featurizer.digest())
    throw std::runtime_error(
        "classifier featurizer digest does not match the current config");
  return run_table_stage(raw_paths, config, table_out, "score", "score",
                         [&](const FeatureVector& z) {
                           return predict_prob(clf, z);
                         });
}

StageSummary run_kl_report(const std::vector<std::string>& target_paths,
                           const std::vector<std::string>& raw_paths,
                           const std::vector<LabeledDataset>& selected,
                           const PipelineConfig& config,
                           const std::string& csv_out) {
  config.validate();
  if (selected.empty()) throw std::invalid_argument("no selected datasets given");

  uint64_t target_docs = 0, raw_docs = 0;
  EmpiricalFeatureDistribution target_dist = distribution_from_counts(
      counts_for_report(target_paths, config, &target_docs),
      config.smoothing_alpha, target_docs);
  EmpiricalFeatureDistribution raw_dist = distribution_from_counts(
      counts_for_report(raw_paths, config, &raw_docs), config.smoothing_alpha,
      raw_docs);
  double kl_target_raw = kl_divergence(target_dist, raw_dist);

  std::ofstream out(csv_out, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open report for write: " + csv_out);
  out << "target,selected,kl_target_raw,kl_target_selected,kl_reduction\n";

  std::string target_label =
      std::filesystem::path(target_paths.front()).stem().string();
  char buf[3 * 32];
  StageSummary summary;
  summary.stage = "kl-report";
  for (const LabeledDataset& dataset : selected) {
    uint64_t docs = 0;
    EmpiricalFeatureDistribution dist = distribution_from_counts(
        counts_for_report(dataset.paths, config, &docs), config.smoothing_alpha,
        docs);
    double kl_target_selected = kl_divergence(target_dist, dist);
    double reduction = kl_target_raw - kl_target_selected;
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g", kl_target_raw,
                  kl_target_selected, reduction);
    out << target_label << ',' << dataset.label << ',' << buf << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + csv_out);

  summary.counters["target_docs"] = target_docs;
  summary.counters["raw_docs"] = raw_docs;
  summary.counters["selected_sets"] = selected.size();
  summary.outputs["report"] = csv_out;
  return summary;
}

}  // namespace dsir
