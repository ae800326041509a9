#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsir/hashing.hpp"

namespace dsir {

struct FeaturizerConfig {
  uint32_t num_buckets = 10000;
  std::vector<uint32_t> orders = {1, 2};  // ascending, nonempty
  bool lowercase = true;
  uint64_t hash_seed = 0;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
  // Key-sorted JSON; the digest below is hash64 of this string.
  std::string canonical_json() const;
  std::string digest() const;
};

// Sparse n-gram counts for one document. `counts` is sorted by bucket
// index with no duplicate buckets; `total` is the number of n-grams.
struct FeatureVector {
  std::vector<std::pair<uint32_t, uint32_t>> counts;
  uint64_t total = 0;

  bool operator==(const FeatureVector&) const = default;
};

FeatureVector operator+(const FeatureVector& a, const FeatureVector& b);

// Splits on Unicode whitespace, strips leading/trailing punctuation
// code points from each token, lowercases (single-code-point mapping)
// when configured, and drops tokens that end up empty. Bytes that are
// not valid UTF-8 are passed through untouched.
std::vector<std::string> tokenize(std::string_view text,
                                  const FeaturizerConfig& config);

// All contiguous windows per order, ascending order, tokens joined by
// a single space: t tokens yield t unigrams then max(t-1,0) bigrams.
std::vector<std::string> ngram_list(const std::vector<std::string>& tokens,
                                    const std::vector<uint32_t>& orders);

inline uint32_t hash_bucket(std::string_view gram,
                            const FeaturizerConfig& config) {
  return static_cast<uint32_t>(hash64(gram, config.hash_seed) %
                               config.num_buckets);
}

FeatureVector featurize(std::string_view text, const FeaturizerConfig& config);

// Adds this document's bucket counts into a dense corpus accumulator of
// length config.num_buckets. Returns the number of n-grams added.
uint64_t accumulate_counts(std::string_view text,
                           const FeaturizerConfig& config,
                           std::vector<uint64_t>& dense_counts);

}  // namespace dsir
