#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dsir {

// Pre-selection filter for extremely short or repetitive documents.
// Word-level checks on a fixed tokenization (whitespace split, strip
// punctuation, lowercase) so verdicts do not depend on the pipeline's
// featurizer settings.
struct QualityConfig {
  uint32_t min_words = 40;
  double max_top_token_frac = 0.2;   // most frequent token's share
  double min_distinct_frac = 0.3;    // distinct tokens / total tokens
  bool enabled = true;

  void validate() const;
};

enum class QualityVerdict {
  pass,
  too_short,
  repetitive_top_token,
  repetitive_low_diversity,
};

const char* to_string(QualityVerdict v);

// Checks run in the order declared above; the first failure wins.
// A document with zero tokens has top-token share 0 and distinct
// fraction 1, so only the length check can reject it.
QualityVerdict check_quality(std::string_view text, const QualityConfig& config);

struct QualityCounters {
  uint64_t passed = 0;
  uint64_t too_short = 0;
  uint64_t repetitive_top_token = 0;
  uint64_t repetitive_low_diversity = 0;

  void record(QualityVerdict v);
  uint64_t dropped() const {
    return too_short + repetitive_top_token + repetitive_low_diversity;
  }
  QualityCounters& operator+=(const QualityCounters& other);
};

}  // namespace dsir
