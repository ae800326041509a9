#include "dsir/resampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "dsir/hashing.hpp"

namespace dsir {

double gumbel_key(std::string_view doc_id, double log_weight, uint64_t seed) {
  double u = uniform_open01(counter_rand(seed, hash64(doc_id), 0));
  return log_weight + (-std::log(-std::log(u)));
}

namespace {

// True when a outranks b.
bool better(const ScoredId& a, const ScoredId& b) {
  if (a.key != b.key) return a.key > b.key;
  return a.id < b.id;
}

// Min-heap comparator: the worst entry surfaces at heap_.front().
bool heap_cmp(const ScoredId& a, const ScoredId& b) { return better(a, b); }

}  // namespace

TopKAccumulator::TopKAccumulator(size_t k) : k_(k) { heap_.reserve(k ? k : 1); }

void TopKAccumulator::add(double key, std::string id) {
  if (k_ == 0) return;
  if (heap_.size() < k_) {
    heap_.push_back({key, std::move(id)});
    std::push_heap(heap_.begin(), heap_.end(), heap_cmp);
    return;
  }
  ScoredId candidate{key, std::move(id)};
  if (better(candidate, heap_.front())) {
    std::pop_heap(heap_.begin(), heap_.end(), heap_cmp);
    heap_.back() = std::move(candidate);
    std::push_heap(heap_.begin(), heap_.end(), heap_cmp);
  }
}

void TopKAccumulator::merge(TopKAccumulator&& other) {
  for (ScoredId& e : other.heap_) add(e.key, std::move(e.id));
  other.heap_.clear();
}

std::vector<ScoredId> TopKAccumulator::finish() {
  std::sort(heap_.begin(), heap_.end(), better);
  return std::move(heap_);
}

SelectionManifest select_top_k(const WeightTable& table, uint64_t k) {
  TopKAccumulator acc(k);
  for (const WeightEntry& e : table.entries) {
    if (!std::isfinite(e.log_weight))
      throw std::runtime_error("non-finite log weight for id " + e.id);
    acc.add(gumbel_key(e.id, e.log_weight, table.seed), e.id);
  }
  std::vector<ScoredId> top = acc.finish();

  SelectionManifest manifest;
  manifest.k = k;
  manifest.seed = table.seed;
  manifest.config_digest = table.config_digest;
  manifest.created_at = current_timestamp();
  manifest.pool_exhausted = top.size() < k;
  manifest.selected_ids.reserve(top.size());
  for (ScoredId& s : top) manifest.selected_ids.push_back(std::move(s.id));
  manifest.validate();
  return manifest;
}

std::vector<size_t> sequential_sample_without_replacement(
    const std::vector<double>& weights, size_t k, uint64_t seed) {
  if (k > weights.size())
    throw std::invalid_argument("k exceeds the number of weights");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");

  std::mt19937_64 rng(seed);
  std::vector<double> remaining = weights;
  std::vector<size_t> alive(weights.size());
  for (size_t i = 0; i < alive.size(); ++i) alive[i] = i;

  std::vector<size_t> picked;
  picked.reserve(k);
  for (size_t draw = 0; draw < k; ++draw) {
    double total = 0.0;
    for (double w : remaining) total += w;
    double u = uniform_open01(rng()) * total;
    size_t idx = 0;
    double cum = remaining[0];
    while (idx + 1 < remaining.size() && u > cum) cum += remaining[++idx];
    picked.push_back(alive[idx]);
    remaining.erase(remaining.begin() + static_cast<ptrdiff_t>(idx));
    alive.erase(alive.begin() + static_cast<ptrdiff_t>(idx));
  }
  return picked;
}

void save_weight_table(const WeightTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open weight table for write: " + path);
  out << "#dsir-table\tv=1\tkind=log_weight\tseed=" << table.seed
      << "\tconfig_digest=" << table.config_digest << "\n";
  char buf[64];
  for (const WeightEntry& e : table.entries) {
    std::snprintf(buf, sizeof buf, "%.17g", e.log_weight);
    out << e.id << '\t' << buf << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

WeightTable load_weight_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight table: " + path);
  WeightTable table;
  std::string line;
  if (!std::getline(in, line) || line.rfind("#dsir-table", 0) != 0)
    throw std::runtime_error("missing weight table header: " + path);
  size_t sp = line.find("seed=");
  if (sp != std::string::npos)
    table.seed = std::strtoull(line.c_str() + sp + 5, nullptr, 10);
  size_t dp = line.find("config_digest=");
  if (dp != std::string::npos) {
    std::string rest = line.substr(dp + 14);
    table.config_digest = rest.substr(0, rest.find('\t'));
  }

  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("malformed weight table row: " + line);
    WeightEntry e;
    e.id = line.substr(0, tab);
    e.log_weight = std::strtod(line.c_str() + tab + 1, nullptr);
    if (!seen.insert(e.id).second)
      throw std::runtime_error("duplicate id in weight table: " + e.id);
    table.entries.push_back(std::move(e));
  }
  return table;
}

}  // namespace dsir
