#include "dsir/ngram_model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "binio.hpp"

namespace dsir {

namespace {
constexpr char kMagic[8] = {'D', 'S', 'I', 'R', 'B', 'N', 'G', '1'};
constexpr uint32_t kFormatVersion = 1;
}  // namespace

BagOfNgramsModel fit_bag_of_ngrams(const std::vector<uint64_t>& counts,
                                   double smoothing_alpha,
                                   std::string featurizer_digest,
                                   std::string config_digest) {
  if (!(smoothing_alpha > 0.0))
    throw std::invalid_argument("smoothing_alpha must be > 0");
  if (counts.empty()) throw std::invalid_argument("empty count accumulator");

  BagOfNgramsModel model;
  model.num_buckets = static_cast<uint32_t>(counts.size());
  model.smoothing_alpha = smoothing_alpha;
  model.featurizer_digest = std::move(featurizer_digest);
  model.config_digest = std::move(config_digest);

  uint64_t total = 0;
  for (uint64_t c : counts) total += c;
  model.total_count = total;

  const double denom =
      std::log(static_cast<double>(total) + smoothing_alpha * counts.size());
  model.log_gamma.resize(counts.size());
  for (size_t j = 0; j < counts.size(); ++j)
    model.log_gamma[j] =
        std::log(static_cast<double>(counts[j]) + smoothing_alpha) - denom;
  return model;
}

double log_prob(const BagOfNgramsModel& model, const FeatureVector& z) {
  double lp = 0.0;
  for (const auto& [bucket, count] : z.counts) {
    if (bucket >= model.num_buckets)
      throw std::out_of_range("feature bucket exceeds model num_buckets");
    lp += static_cast<double>(count) * model.log_gamma[bucket];
  }
  return lp;
}

double log_importance_weight(const BagOfNgramsModel& target,
                             const BagOfNgramsModel& raw,
                             const FeatureVector& z) {
  if (target.num_buckets != raw.num_buckets)
    throw std::runtime_error("target/raw models disagree on num_buckets");
  return log_prob(target, z) - log_prob(raw, z);
}

void save_model(const BagOfNgramsModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open model file for write: " + path);
  out.write(kMagic, sizeof kMagic);
  binio::put_u32(out, kFormatVersion);
  binio::put_u64(out, model.num_buckets);
  binio::put_f64(out, model.smoothing_alpha);
  binio::put_u64(out, model.total_count);
  binio::put_string(out, model.featurizer_digest);
  binio::put_string(out, model.config_digest);
  for (double lg : model.log_gamma) binio::put_f64(out, lg);
  if (!out) throw std::runtime_error("write failed: " + path);
}

BagOfNgramsModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a bag-of-ngrams model file: " + path);
  uint32_t version = binio::get_u32(in);
  if (version != kFormatVersion)
    throw std::runtime_error("unsupported model format version in " + path);

  BagOfNgramsModel model;
  model.num_buckets = static_cast<uint32_t>(binio::get_u64(in));
  model.smoothing_alpha = binio::get_f64(in);
  model.total_count = binio::get_u64(in);
  model.featurizer_digest = binio::get_string(in);
  model.config_digest = binio::get_string(in);
  model.log_gamma.resize(model.num_buckets);
  for (uint32_t j = 0; j < model.num_buckets; ++j)
    model.log_gamma[j] = binio::get_f64(in);
  return model;
}

}  // namespace dsir
