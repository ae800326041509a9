#include "dsir/featurizer.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "unicode_tables.hpp"

namespace dsir {
namespace {

// Decodes one code point starting at `i`. On malformed input consumes a
// single byte and reports it as-is (cp = byte value, valid = false) so
// the original bytes can be copied through verbatim.
struct Decoded {
  uint32_t cp;
  uint32_t len;
  bool valid;
};

Decoded decode_utf8(std::string_view s, size_t i) {
  unsigned char b0 = s[i];
  if (b0 < 0x80) return {b0, 1, true};
  uint32_t need = 0, cp = 0, min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    need = 1; cp = b0 & 0x1F; min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    need = 2; cp = b0 & 0x0F; min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    need = 3; cp = b0 & 0x07; min = 0x10000;
  } else {
    return {b0, 1, false};
  }
  if (i + need >= s.size()) return {b0, 1, false};
  for (uint32_t k = 1; k <= need; ++k) {
    unsigned char b = s[i + k];
    if ((b & 0xC0) != 0x80) return {b0, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
    return {b0, 1, false};
  return {cp, need + 1, true};
}

void encode_utf8(uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct Cp {
  uint32_t cp;
  uint32_t offset;
  uint32_t len;
  bool valid;
};

// Emits the token for run [begin,end) after punctuation stripping.
void emit_token(std::string_view text, const std::vector<Cp>& run,
                bool lowercase, std::vector<std::string>& out) {
  size_t b = 0, e = run.size();
  while (b < e && run[b].valid && unicode::is_punctuation(run[b].cp)) ++b;
  while (e > b && run[e - 1].valid && unicode::is_punctuation(run[e - 1].cp)) --e;
  if (b == e) return;
  std::string tok;
  for (size_t k = b; k < e; ++k) {
    const Cp& c = run[k];
    if (c.valid && lowercase) {
      encode_utf8(unicode::to_lower(c.cp), tok);
    } else {
      tok.append(text.substr(c.offset, c.len));
    }
  }
  out.push_back(std::move(tok));
}

}  // namespace

void FeaturizerConfig::validate() const {
  if (num_buckets < 2) throw std::invalid_argument("num_buckets must be >= 2");
  if (orders.empty()) throw std::invalid_argument("orders must be nonempty");
  for (uint32_t o : orders)
    if (o < 1) throw std::invalid_argument("every n-gram order must be >= 1");
  if (!std::is_sorted(orders.begin(), orders.end()))
    throw std::invalid_argument("orders must be ascending");
}

std::string FeaturizerConfig::canonical_json() const {
  nlohmann::json j;
  j["hash_seed"] = hash_seed;
  j["lowercase"] = lowercase;
  j["num_buckets"] = num_buckets;
  j["orders"] = orders;
  return j.dump();
}

std::string FeaturizerConfig::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash64(canonical_json())));
  return std::string(buf);
}

std::vector<std::string> tokenize(std::string_view text,
                                  const FeaturizerConfig& config) {
  std::vector<std::string> tokens;
  std::vector<Cp> run;
  size_t i = 0;
  while (i < text.size()) {
    Decoded d = decode_utf8(text, i);
    bool ws = d.valid && unicode::is_whitespace(d.cp);
    if (ws) {
      if (!run.empty()) {
        emit_token(text, run, config.lowercase, tokens);
        run.clear();
      }
    } else {
      run.push_back({d.cp, static_cast<uint32_t>(i), d.len, d.valid});
    }
    i += d.len;
  }
  if (!run.empty()) emit_token(text, run, config.lowercase, tokens);
  return tokens;
}

std::vector<std::string> ngram_list(const std::vector<std::string>& tokens,
                                    const std::vector<uint32_t>& orders) {
  std::vector<std::string> grams;
  for (uint32_t order : orders) {
    if (tokens.size() < order) continue;
    for (size_t i = 0; i + order <= tokens.size(); ++i) {
      if (order == 1) {
        grams.push_back(tokens[i]);
        continue;
      }
      std::string g = tokens[i];
      for (size_t k = 1; k < order; ++k) {
        g.push_back(' ');
        g.append(tokens[i + k]);
      }
      grams.push_back(std::move(g));
    }
  }
  return grams;
}

FeatureVector featurize(std::string_view text, const FeaturizerConfig& config) {
  std::vector<std::string> tokens = tokenize(text, config);
  std::vector<std::string> grams = ngram_list(tokens, config.orders);
  std::vector<uint32_t> buckets;
  buckets.reserve(grams.size());
  for (const std::string& g : grams) buckets.push_back(hash_bucket(g, config));
  std::sort(buckets.begin(), buckets.end());

  FeatureVector z;
  z.total = buckets.size();
  for (size_t i = 0; i < buckets.size();) {
    size_t j = i;
    while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
    z.counts.emplace_back(buckets[i], static_cast<uint32_t>(j - i));
    i = j;
  }
  return z;
}

FeatureVector operator+(const FeatureVector& a, const FeatureVector& b) {
  FeatureVector out;
  out.total = a.total + b.total;
  size_t i = 0, j = 0;
  while (i < a.counts.size() || j < b.counts.size()) {
    if (j == b.counts.size() ||
        (i < a.counts.size() && a.counts[i].first < b.counts[j].first)) {
      out.counts.push_back(a.counts[i++]);
    } else if (i == a.counts.size() || b.counts[j].first < a.counts[i].first) {
      out.counts.push_back(b.counts[j++]);
    } else {
      out.counts.emplace_back(a.counts[i].first,
                              a.counts[i].second + b.counts[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

uint64_t accumulate_counts(std::string_view text,
                           const FeaturizerConfig& config,
                           std::vector<uint64_t>& dense_counts) {
  std::vector<std::string> grams = ngram_list(tokenize(text, config), config.orders);
  for (const std::string& g : grams) dense_counts[hash_bucket(g, config)] += 1;
  return grams.size();
}

}  // namespace dsir
