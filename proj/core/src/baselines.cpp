#include "dsir/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "binio.hpp"
#include "dsir/hashing.hpp"
#include "dsir/resampler.hpp"

namespace dsir {
namespace {

constexpr char kMagic[8] = {'D', 'S', 'I', 'R', 'C', 'L', 'S', '1'};
constexpr uint32_t kFormatVersion = 1;

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

double dot(const std::vector<double>& w, const FeatureVector& z) {
  double s = 0.0;
  for (const auto& [bucket, count] : z.counts) {
    if (bucket >= w.size())
      throw std::out_of_range("feature bucket exceeds classifier num_buckets");
    s += static_cast<double>(count) * w[bucket];
  }
  return s;
}

constexpr double kProbFloor = 1e-12;  // keeps outputs inside (0,1)

}  // namespace

LinearClassifier train_classifier(std::span<const FeatureVector> target_feats,
                                  std::span<const FeatureVector> raw_feats,
                                  const ClassifierTrainOptions& options) {
  if (target_feats.empty() || raw_feats.empty())
    throw std::invalid_argument("both classes must be nonempty");

  uint32_t num_buckets = options.num_buckets;
  if (num_buckets == 0)
    for (auto feats : {target_feats, raw_feats})
      for (const FeatureVector& z : feats)
        for (const auto& [bucket, count] : z.counts)
          num_buckets = std::max(num_buckets, bucket + 1);

  std::mt19937_64 rng(options.seed);

  // Balance classes by subsampling the larger side.
  size_t per_class = std::min(target_feats.size(), raw_feats.size());
  auto pick = [&](std::span<const FeatureVector> feats) {
    std::vector<size_t> idx(feats.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(per_class);
    return idx;
  };
  std::vector<size_t> target_idx = pick(target_feats);
  std::vector<size_t> raw_idx = pick(raw_feats);

  struct Example {
    const FeatureVector* z;
    double y;
  };
  std::vector<Example> examples;
  examples.reserve(2 * per_class);
  for (size_t i : target_idx) examples.push_back({&target_feats[i], 1.0});
  for (size_t i : raw_idx) examples.push_back({&raw_feats[i], 0.0});

  LinearClassifier clf;
  clf.num_buckets = num_buckets;
  clf.weights.assign(num_buckets, 0.0);

  std::vector<double> grad(num_buckets, 0.0);
  std::vector<uint32_t> touched;
  for (uint32_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(examples.begin(), examples.end(), rng);
    for (size_t start = 0; start < examples.size(); start += options.batch_size) {
      size_t end = std::min(examples.size(),
                            start + static_cast<size_t>(options.batch_size));
      double batch = static_cast<double>(end - start);
      double grad_bias = 0.0;
      touched.clear();
      for (size_t i = start; i < end; ++i) {
        const Example& ex = examples[i];
        double err = sigmoid(dot(clf.weights, *ex.z) + clf.bias) - ex.y;
        grad_bias += err;
        for (const auto& [bucket, count] : ex.z->counts) {
          if (grad[bucket] == 0.0) touched.push_back(bucket);
          grad[bucket] += err * static_cast<double>(count);
        }
      }
      double scale = options.learning_rate / batch;
      for (uint32_t bucket : touched) {
        clf.weights[bucket] -= scale * grad[bucket];
        grad[bucket] = 0.0;
      }
      clf.bias -= scale * grad_bias;
      if (options.l2 > 0.0) {
        double shrink = 1.0 - options.learning_rate * options.l2;
        if (shrink < 0.0) shrink = 0.0;
        for (double& w : clf.weights) w *= shrink;
      }
    }
  }
  return clf;
}

double predict_prob(const LinearClassifier& classifier, const FeatureVector& z) {
  double t = dot(classifier.weights, z) + classifier.bias;
  if (classifier.calibration)
    t = classifier.calibration->a * t + classifier.calibration->b;
  double p = sigmoid(t);
  return std::clamp(p, kProbFloor, 1.0 - kProbFloor);
}

double classifier_log_importance_weight(const LinearClassifier& classifier,
                                        const FeatureVector& z) {
  double f = predict_prob(classifier, z);
  return std::log(f) - std::log1p(-f);
}

LinearClassifier platt_calibrate(const LinearClassifier& classifier,
                                 std::span<const FeatureVector> held_out_feats,
                                 std::span<const int> held_out_labels) {
  if (held_out_feats.size() != held_out_labels.size())
    throw std::invalid_argument("held-out features/labels size mismatch");
  bool has_pos = false, has_neg = false;
  for (int y : held_out_labels) (y != 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw std::runtime_error("held-out set must contain both labels");

  std::vector<double> s(held_out_feats.size());
  for (size_t i = 0; i < held_out_feats.size(); ++i)
    s[i] = dot(classifier.weights, held_out_feats[i]) + classifier.bias;

  // Newton iterations on the two-parameter log-loss, damped by halving
  // until the objective stops increasing.
  double a = 1.0, b = 0.0;
  auto loss = [&](double aa, double bb) {
    double l = 0.0;
    for (size_t i = 0; i < s.size(); ++i) {
      double t = aa * s[i] + bb;
      // log(1 + exp(-|t|)) + max(0, -yt) form, numerically stable
      double yt = held_out_labels[i] != 0 ? t : -t;
      l += yt >= 0 ? std::log1p(std::exp(-yt)) : -yt + std::log1p(std::exp(yt));
    }
    return l;
  };
  double current = loss(a, b);
  for (int iter = 0; iter < 50; ++iter) {
    double g_a = 0.0, g_b = 0.0, h_aa = 0.0, h_ab = 0.0, h_bb = 0.0;
    for (size_t i = 0; i < s.size(); ++i) {
      double p = sigmoid(a * s[i] + b);
      double y = held_out_labels[i] != 0 ? 1.0 : 0.0;
      double err = p - y;
      double w = std::max(p * (1.0 - p), 1e-12);
      g_a += err * s[i];
      g_b += err;
      h_aa += w * s[i] * s[i];
      h_ab += w * s[i];
      h_bb += w;
    }
    double det = h_aa * h_bb - h_ab * h_ab;
    if (std::abs(det) < 1e-12) break;
    double da = (h_bb * g_a - h_ab * g_b) / det;
    double db = (h_aa * g_b - h_ab * g_a) / det;
    double step = 1.0;
    double next = loss(a - da, b - db);
    while (next > current && step > 1e-8) {
      step *= 0.5;
      next = loss(a - step * da, b - step * db);
    }
    a -= step * da;
    b -= step * db;
    if (std::abs(current - next) < 1e-12 * (1.0 + std::abs(current))) {
      current = next;
      break;
    }
    current = next;
  }
  if (a < 1e-6) a = 1e-6;

  LinearClassifier out = classifier;
  out.calibration = PlattCalibration{a, b};
  return out;
}

SelectionManifest heuristic_select(
    const std::vector<std::pair<std::string, double>>& scores,
    const ParetoConfig& pareto, uint64_t seed) {
  if (!(pareto.shape_alpha > 0.0))
    throw std::invalid_argument("pareto shape_alpha must be > 0");
  SelectionManifest manifest;
  manifest.method = SelectionMethod::heuristic;
  manifest.seed = seed;
  manifest.created_at = current_timestamp();
  for (const auto& [id, f] : scores) {
    double u = uniform_open01(counter_rand(seed, hash64(id), 0));
    double beta = std::pow(u, -1.0 / pareto.shape_alpha) - 1.0;
    if (f > 1.0 - beta) manifest.selected_ids.push_back(id);
  }
  manifest.k = manifest.selected_ids.size();
  manifest.validate();
  return manifest;
}

SelectionManifest topk_select(
    const std::vector<std::pair<std::string, double>>& scores, uint64_t k) {
  TopKAccumulator acc(k);
  for (const auto& [id, f] : scores) acc.add(f, id);
  std::vector<ScoredId> top = acc.finish();

  SelectionManifest manifest;
  manifest.method = SelectionMethod::topk_heuristic;
  manifest.k = k;
  manifest.created_at = current_timestamp();
  manifest.pool_exhausted = top.size() < k;
  for (ScoredId& t : top) manifest.selected_ids.push_back(std::move(t.id));
  manifest.validate();
  return manifest;
}

SelectionManifest random_select(const std::vector<std::string>& ids, uint64_t k,
                                uint64_t seed) {
  WeightTable table;
  table.seed = seed;
  table.entries.reserve(ids.size());
  for (const std::string& id : ids) table.entries.push_back({id, 0.0});
  SelectionManifest manifest = select_top_k(table, k);
  manifest.method = SelectionMethod::random;
  return manifest;
}

void save_classifier(const LinearClassifier& classifier, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open classifier file for write: " + path);
  out.write(kMagic, sizeof kMagic);
  binio::put_u32(out, kFormatVersion);
  binio::put_u64(out, classifier.num_buckets);
  binio::put_string(out, classifier.featurizer_digest);
  binio::put_u32(out, classifier.calibration ? 1 : 0);
  binio::put_f64(out, classifier.calibration ? classifier.calibration->a : 1.0);
  binio::put_f64(out, classifier.calibration ? classifier.calibration->b : 0.0);
  binio::put_f64(out, classifier.bias);
  for (double w : classifier.weights) binio::put_f64(out, w);
  if (!out) throw std::runtime_error("write failed: " + path);
}

LinearClassifier load_classifier(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open classifier file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a classifier file: " + path);
  uint32_t version = binio::get_u32(in);
  if (version != kFormatVersion)
    throw std::runtime_error("unsupported classifier format version in " + path);

  LinearClassifier clf;
  clf.num_buckets = static_cast<uint32_t>(binio::get_u64(in));
  clf.featurizer_digest = binio::get_string(in);
  bool has_cal = binio::get_u32(in) != 0;
  double a = binio::get_f64(in);
  double b = binio::get_f64(in);
  if (has_cal) clf.calibration = PlattCalibration{a, b};
  clf.bias = binio::get_f64(in);
  clf.weights.resize(clf.num_buckets);
  for (uint32_t j = 0; j < clf.num_buckets; ++j)
    clf.weights[j] = binio::get_f64(in);
  return clf;
}

}  // namespace dsir
