#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsir/featurizer.hpp"

namespace dsir {

// Bag-of-ngrams model over hash buckets: a smoothed probability simplex
// stored in log space. exp(log_gamma) sums to 1.
struct BagOfNgramsModel {
  std::vector<double> log_gamma;
  double smoothing_alpha = 1.0;
  uint32_t num_buckets = 0;
  uint64_t total_count = 0;       // training n-grams seen
  std::string featurizer_digest;  // digest of the FeaturizerConfig used
  std::string config_digest;      // digest of the pipeline config
};

// gamma_j = (c_j + alpha) / (C + alpha * B). alpha must be > 0 so every
// bucket keeps finite log probability.
BagOfNgramsModel fit_bag_of_ngrams(const std::vector<uint64_t>& counts,
                                   double smoothing_alpha,
                                   std::string featurizer_digest = {},
                                   std::string config_digest = {});

// Sum of z_j * log_gamma_j; 0 for the empty vector.
double log_prob(const BagOfNgramsModel& model, const FeatureVector& z);

// log p_target(z) - log p_raw(z). Throws on bucket-count mismatch.
double log_importance_weight(const BagOfNgramsModel& target,
                             const BagOfNgramsModel& raw,
                             const FeatureVector& z);

// Binary model file: magic, version, header fields, then the log_gamma
// array as little-endian doubles.
void save_model(const BagOfNgramsModel& model, const std::string& path);
BagOfNgramsModel load_model(const std::string& path);

}  // namespace dsir
