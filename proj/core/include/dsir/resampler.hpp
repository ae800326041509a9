#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dsir/document.hpp"

namespace dsir {

struct WeightEntry {
  std::string id;
  double log_weight = 0.0;
};

// Per-document log importance weights; the resampler's input. Persists
// as a two-column TSV with one header line.
struct WeightTable {
  std::vector<WeightEntry> entries;
  uint64_t seed = 0;
  std::string config_digest;
};

// log_weight plus a Gumbel(0,1) variate drawn from the counter RNG
// keyed by (seed, hash64(id)). A pure function of its arguments, so the
// key is the same no matter which worker computes it.
double gumbel_key(std::string_view doc_id, double log_weight, uint64_t seed);

struct ScoredId {
  double key;
  std::string id;
};

// Bounded top-k over a stream of (key, id). Order of add() calls does
// not affect the result. Ties on key fall back to lexicographic id,
// smaller id winning.
class TopKAccumulator {
 public:
  explicit TopKAccumulator(size_t k);
  void add(double key, std::string id);
  void merge(TopKAccumulator&& other);
  // Entries sorted by descending key (tie: ascending id). Consumes state.
  std::vector<ScoredId> finish();
  size_t k() const { return k_; }

 private:
  size_t k_;
  std::vector<ScoredId> heap_;  // min-heap, worst entry at front
};

// The k largest Gumbel keys over the table, without replacement. When
// k exceeds the pool every id is selected and pool_exhausted is set.
SelectionManifest select_top_k(const WeightTable& table, uint64_t k);

// Repeated categorical draws with removal and renormalization. Small-N
// reference for validating the Gumbel path; the two samplers are
// distributionally identical. Throws if k > weights.size().
std::vector<size_t> sequential_sample_without_replacement(
    const std::vector<double>& weights, size_t k, uint64_t seed);

void save_weight_table(const WeightTable& table, const std::string& path);
WeightTable load_weight_table(const std::string& path);

}  // namespace dsir
