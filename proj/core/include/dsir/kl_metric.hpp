#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dsir/document.hpp"
#include "dsir/featurizer.hpp"

namespace dsir {

// Smoothed empirical feature distribution: probs sums to 1 and every
// entry is strictly positive.
struct EmpiricalFeatureDistribution {
  std::vector<double> probs;
  double smoothing_alpha = 1.0;
  uint64_t sample_count = 0;  // documents consumed
};

// (c_j + alpha) / (C + alpha * B). Throws when C == 0: a distribution
// estimated from zero n-grams is undefined.
EmpiricalFeatureDistribution distribution_from_counts(
    const std::vector<uint64_t>& counts, double smoothing_alpha,
    uint64_t sample_count);

// Pools n-gram counts over the documents, smooths, normalizes. Throws
// on an empty document sequence or when no document yields any n-gram.
EmpiricalFeatureDistribution accumulate_distribution(
    std::span<const Document> docs, const FeaturizerConfig& config,
    double smoothing_alpha);

// Sum over j of p_j * (log p_j - log q_j), in nats. Nonnegative; zero
// iff p == q. Throws on bucket-count mismatch.
double kl_divergence(const EmpiricalFeatureDistribution& p,
                     const EmpiricalFeatureDistribution& q);

// KL(target || raw) - KL(target || selected): how much closer to the
// target the selected set sits compared with the raw pool.
double kl_reduction(const EmpiricalFeatureDistribution& target,
                    const EmpiricalFeatureDistribution& raw,
                    const EmpiricalFeatureDistribution& selected);

}  // namespace dsir
