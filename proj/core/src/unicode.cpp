#include "unicode_tables.hpp"

#include <algorithm>

namespace dsir::unicode {

bool is_whitespace(uint32_t cp) {
  const uint32_t* end = kWhitespace + kWhitespaceCount;
  return std::binary_search(kWhitespace, end, cp);
}

bool is_punctuation(uint32_t cp) {
  const CodepointRange* end = kPunctRanges + kPunctRangeCount;
  const CodepointRange* it = std::upper_bound(
      kPunctRanges, end, cp,
      [](uint32_t v, const CodepointRange& r) { return v < r.lo; });
  return it != kPunctRanges && cp <= (it - 1)->hi;
}

uint32_t to_lower(uint32_t cp) {
  const LowerPair* end = kLowerPairs + kLowerPairCount;
  const LowerPair* it = std::lower_bound(
      kLowerPairs, end, cp,
      [](const LowerPair& p, uint32_t v) { return p.cp < v; });
  if (it != end && it->cp == cp) return it->lower;
  return cp;
}

}  // namespace dsir::unicode
