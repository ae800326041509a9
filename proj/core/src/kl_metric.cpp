#include "dsir/kl_metric.hpp"

#include <cmath>
#include <stdexcept>

namespace dsir {

EmpiricalFeatureDistribution distribution_from_counts(
    const std::vector<uint64_t>& counts, double smoothing_alpha,
    uint64_t sample_count) {
  if (!(smoothing_alpha > 0.0))
    throw std::invalid_argument("smoothing_alpha must be > 0");
  if (counts.empty()) throw std::invalid_argument("empty count accumulator");
  uint64_t total = 0;
  for (uint64_t c : counts) total += c;
  if (total == 0)
    throw std::runtime_error("no n-grams accumulated; distribution undefined");

  EmpiricalFeatureDistribution dist;
  dist.smoothing_alpha = smoothing_alpha;
  dist.sample_count = sample_count;
  const double denom =
      static_cast<double>(total) + smoothing_alpha * counts.size();
  dist.probs.resize(counts.size());
  for (size_t j = 0; j < counts.size(); ++j)
    dist.probs[j] = (static_cast<double>(counts[j]) + smoothing_alpha) / denom;
  return dist;
}

EmpiricalFeatureDistribution accumulate_distribution(
    std::span<const Document> docs, const FeaturizerConfig& config,
    double smoothing_alpha) {
  if (docs.empty())
    throw std::runtime_error("cannot estimate a distribution from zero documents");
  std::vector<uint64_t> counts(config.num_buckets, 0);
  for (const Document& doc : docs) accumulate_counts(doc.text, config, counts);
  return distribution_from_counts(counts, smoothing_alpha, docs.size());
}

double kl_divergence(const EmpiricalFeatureDistribution& p,
                     const EmpiricalFeatureDistribution& q) {
  if (p.probs.size() != q.probs.size())
    throw std::runtime_error("distributions disagree on num_buckets");
  double kl = 0.0;
  for (size_t j = 0; j < p.probs.size(); ++j)
    kl += p.probs[j] * (std::log(p.probs[j]) - std::log(q.probs[j]));
  return kl;
}

double kl_reduction(const EmpiricalFeatureDistribution& target,
                    const EmpiricalFeatureDistribution& raw,
                    const EmpiricalFeatureDistribution& selected) {
  return kl_divergence(target, raw) - kl_divergence(target, selected);
}

}  // namespace dsir
