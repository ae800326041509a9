#pragma once

#include <cstddef>
#include <cstdint>

namespace dsir::unicode {

struct CodepointRange {
  uint32_t lo;
  uint32_t hi;  // inclusive
};

struct LowerPair {
  uint32_t cp;
  uint32_t lower;
};

extern const uint32_t kWhitespace[];
extern const size_t kWhitespaceCount;
extern const CodepointRange kPunctRanges[];
extern const size_t kPunctRangeCount;
extern const LowerPair kLowerPairs[];
extern const size_t kLowerPairCount;

bool is_whitespace(uint32_t cp);
bool is_punctuation(uint32_t cp);
// Identity for code points without a single-code-point lowercase form.
uint32_t to_lower(uint32_t cp);

}  // namespace dsir::unicode
