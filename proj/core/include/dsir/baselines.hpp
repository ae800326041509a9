#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dsir/document.hpp"
#include "dsir/featurizer.hpp"

namespace dsir {

struct PlattCalibration {
  double a = 1.0;  // kept strictly positive so ranking is preserved
  double b = 0.0;
};

// Logistic regression over hashed n-gram counts. predict_prob applies
// the Platt transform when calibration is set.
struct LinearClassifier {
  std::vector<double> weights;
  double bias = 0.0;
  std::optional<PlattCalibration> calibration;
  uint32_t num_buckets = 0;
  std::string featurizer_digest;
};

struct ClassifierTrainOptions {
  double l2 = 1e-4;
  uint32_t epochs = 5;
  double learning_rate = 0.1;
  uint64_t seed = 0;
  uint32_t batch_size = 32;
  uint32_t num_buckets = 0;  // 0: derive from the largest bucket seen
};

// Mini-batch SGD on the binary task (target = 1, raw = 0) with L2
// regularization. The larger class is subsampled to match the smaller
// so f stays a meaningful probability. Deterministic given the seed.
LinearClassifier train_classifier(std::span<const FeatureVector> target_feats,
                                  std::span<const FeatureVector> raw_feats,
                                  const ClassifierTrainOptions& options);

// sigmoid(w.z + bias), Platt-transformed if calibration is set; output
// clamped to the open interval (0,1).
double predict_prob(const LinearClassifier& classifier, const FeatureVector& z);

// logit(predict_prob): log f - log(1-f). Feeds the same Gumbel top-k
// resampler as the generative weights.
double classifier_log_importance_weight(const LinearClassifier& classifier,
                                        const FeatureVector& z);

// Fits (a, b) by minimizing held-out log-loss of sigmoid(a*s + b) where
// s is the raw decision value. Requires both labels present; enforces
// a > 0. Returns the refitted classifier with calibration set.
LinearClassifier platt_calibrate(const LinearClassifier& classifier,
                                 std::span<const FeatureVector> held_out_feats,
                                 std::span<const int> held_out_labels);

struct ParetoConfig {
  double shape_alpha = 9.0;
};

// Keep id i iff f_i > 1 - beta_i with beta_i drawn per id from a
// Lomax(shape_alpha, scale 1) via the counter RNG: beta = u^(-1/alpha)-1,
// so P(beta > x) = (1+x)^(-alpha). The number kept is not fixed; the
// manifest records it as k.
SelectionManifest heuristic_select(
    const std::vector<std::pair<std::string, double>>& scores,
    const ParetoConfig& pareto, uint64_t seed);

// Ids of the k largest scores, descending, ties by lexicographic id.
SelectionManifest topk_select(
    const std::vector<std::pair<std::string, double>>& scores, uint64_t k);

// Uniform sample without replacement: Gumbel top-k over all-zero log
// weights, so it is bit-identical to select_top_k on a zero table.
SelectionManifest random_select(const std::vector<std::string>& ids, uint64_t k,
                                uint64_t seed);

void save_classifier(const LinearClassifier& classifier, const std::string& path);
LinearClassifier load_classifier(const std::string& path);

}  // namespace dsir
