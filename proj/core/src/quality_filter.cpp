#include "dsir/quality_filter.hpp"

#include <stdexcept>
#include <unordered_map>

#include "dsir/featurizer.hpp"

namespace dsir {

void QualityConfig::validate() const {
  if (!(max_top_token_frac > 0.0 && max_top_token_frac <= 1.0))
    throw std::invalid_argument("max_top_token_frac must be in (0,1]");
  if (!(min_distinct_frac >= 0.0 && min_distinct_frac <= 1.0))
    throw std::invalid_argument("min_distinct_frac must be in [0,1]");
}

const char* to_string(QualityVerdict v) {
  switch (v) {
    case QualityVerdict::pass: return "pass";
    case QualityVerdict::too_short: return "too_short";
    case QualityVerdict::repetitive_top_token: return "repetitive_top_token";
    case QualityVerdict::repetitive_low_diversity: return "repetitive_low_diversity";
  }
  throw std::logic_error("unreachable");
}

QualityVerdict check_quality(std::string_view text, const QualityConfig& config) {
  if (!config.enabled) return QualityVerdict::pass;

  static const FeaturizerConfig kTokenizerConfig{};  // fixed word tokenization
  std::vector<std::string> tokens = tokenize(text, kTokenizerConfig);

  if (tokens.size() < config.min_words) return QualityVerdict::too_short;

  if (!tokens.empty()) {
    std::unordered_map<std::string, uint64_t> freq;
    uint64_t top = 0;
    for (const std::string& t : tokens) top = std::max(top, ++freq[t]);

    double top_frac = static_cast<double>(top) / tokens.size();
    if (top_frac > config.max_top_token_frac)
      return QualityVerdict::repetitive_top_token;

    double distinct_frac = static_cast<double>(freq.size()) / tokens.size();
    if (distinct_frac < config.min_distinct_frac)
      return QualityVerdict::repetitive_low_diversity;
  }
  return QualityVerdict::pass;
}

void QualityCounters::record(QualityVerdict v) {
  switch (v) {
    case QualityVerdict::pass: ++passed; break;
    case QualityVerdict::too_short: ++too_short; break;
    case QualityVerdict::repetitive_top_token: ++repetitive_top_token; break;
    case QualityVerdict::repetitive_low_diversity: ++repetitive_low_diversity; break;
  }
}

QualityCounters& QualityCounters::operator+=(const QualityCounters& other) {
  passed += other.passed;
  too_short += other.too_short;
  repetitive_top_token += other.repetitive_top_token;
  repetitive_low_diversity += other.repetitive_low_diversity;
  return *this;
}

}  // namespace dsir
