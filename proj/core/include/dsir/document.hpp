#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsir {

// One raw or target text example. `id` is "<shard-basename>:<ordinal>"
// unless the input line carried an explicit "id" field.
struct Document {
  std::string id;
  std::string text;
  std::string source;  // optional label, empty if absent
  std::string shard;   // origin file basename
  uint64_t ordinal = 0;
};

enum class SelectionMethod { dsir, random, heuristic, topk_heuristic, classifier_ir };

std::string to_string(SelectionMethod m);
SelectionMethod parse_method(const std::string& name);

// Ordered record of the selected document ids plus provenance.
// `pool_exhausted` is set when fewer than k candidates existed.
struct SelectionManifest {
  std::vector<std::string> selected_ids;
  uint64_t k = 0;
  uint64_t seed = 0;
  SelectionMethod method = SelectionMethod::dsir;
  std::string config_digest;
  std::string created_at;  // ISO-8601 UTC
  bool pool_exhausted = false;

  // Throws std::runtime_error on duplicate ids or a k/size mismatch.
  void validate() const;
};

// Current wall clock, or $SOURCE_DATE_EPOCH when set so that reruns can
// produce byte-identical artifacts.
std::string current_timestamp();

}  // namespace dsir
