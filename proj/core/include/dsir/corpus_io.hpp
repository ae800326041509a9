#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dsir/document.hpp"

namespace dsir {

// A corpus shard: one JSONL file (optionally gzip-compressed). Document
// ids are built from the basename, so basenames must be unique within a
// run and files may move between directories without changing ids.
struct Shard {
  std::string path;
  std::string basename;
};

// Sorts by basename so every stage sees the same shard order no matter
// how the caller enumerated the paths. Throws on duplicate basenames.
std::vector<Shard> canonical_shards(const std::vector<std::string>& paths);

// Streams one shard. Lines must be JSON objects with a "text" field;
// optional "source" and "id" fields are honored (an explicit "id"
// overrides the synthesized "<basename>:<ordinal>"). Malformed lines
// are counted, not fatal. An unreadable file throws.
class ShardReader {
 public:
  explicit ShardReader(const Shard& shard);
  ~ShardReader();
  ShardReader(ShardReader&&) noexcept;
  ShardReader& operator=(ShardReader&&) noexcept;

  std::optional<Document> next();
  uint64_t skipped_lines() const { return skipped_; }

 private:
  struct LineSource;
  std::unique_ptr<LineSource> source_;
  std::string shard_name_;
  uint64_t ordinal_ = 0;
  uint64_t skipped_ = 0;
};

// Streams shards back to back in canonical order.
class DocumentStream {
 public:
  explicit DocumentStream(const std::vector<std::string>& paths);
  std::optional<Document> next();
  uint64_t skipped_lines() const;

 private:
  std::vector<Shard> shards_;
  size_t index_ = 0;
  std::optional<ShardReader> reader_;
  uint64_t skipped_done_ = 0;
};

void write_manifest(const SelectionManifest& manifest, const std::string& path);
SelectionManifest read_manifest(const std::string& path);

// Second streaming pass: writes the selected documents as JSONL in
// manifest order. Throws if any manifest id is missing from the corpus.
// Returns the number of documents written.
uint64_t extract_subset(const std::vector<std::string>& paths,
                        const SelectionManifest& manifest,
                        const std::string& out_path);

// One document per line: {"text": ..., "id": ..., "source": ...}.
void append_document_jsonl(std::ostream& out, const Document& doc);

}  // namespace dsir
