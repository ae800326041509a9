#!/usr/bin/env python3
"""Regenerates core/src/unicode_tables.cpp from Python's unicodedata.

The tokenizer needs three classification tables that must be identical on
every platform: the White_Space code points, the category-P (punctuation)
ranges, and the simple one-to-one lowercase map. Run from the repo root:

    python3 tools/gen_unicode_tables.py > core/src/unicode_tables.cpp
"""

import sys
import unicodedata


def punct_ranges():
    ranges = []
    start = prev = None
    for cp in range(0x110000):
        if unicodedata.category(chr(cp)).startswith("P"):
            if start is None:
                start = cp
            prev = cp
        elif start is not None:
            ranges.append((start, prev))
            start = None
    if start is not None:
        ranges.append((start, prev))
    return ranges


def lower_pairs():
    pairs = []
    for cp in range(0x110000):
        c = chr(cp)
        low = c.lower()
        if len(low) == 1 and low != c:
            pairs.append((cp, ord(low)))
    return pairs


def whitespace():
    return [cp for cp in range(0x110000) if chr(cp).isspace()]


def main():
    out = sys.stdout
    out.write("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n"
              % unicodedata.unidata_version)
    out.write('#include "unicode_tables.hpp"\n\n')
    out.write("namespace dsir::unicode {\n\n")

    ws = whitespace()
    out.write("const uint32_t kWhitespace[] = {\n    ")
    out.write(", ".join("0x%04X" % cp for cp in ws))
    out.write("\n};\n")
    out.write("const size_t kWhitespaceCount = %d;\n\n" % len(ws))

    pr = punct_ranges()
    out.write("const CodepointRange kPunctRanges[] = {\n")
    for lo, hi in pr:
        out.write("    {0x%04X, 0x%04X},\n" % (lo, hi))
    out.write("};\n")
    out.write("const size_t kPunctRangeCount = %d;\n\n" % len(pr))

    lp = lower_pairs()
    out.write("const LowerPair kLowerPairs[] = {\n")
    for i in range(0, len(lp), 4):
        row = lp[i:i + 4]
        out.write("    " + " ".join("{0x%04X, 0x%04X}," % p for p in row) + "\n")
    out.write("};\n")
    out.write("const size_t kLowerPairCount = %d;\n\n" % len(lp))

    out.write("}  // namespace dsir::unicode\n")


if __name__ == "__main__":
    main()
