#include "dsir/corpus_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace dsir {

using nlohmann::json;

std::string to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::dsir: return "dsir";
    case SelectionMethod::random: return "random";
    case SelectionMethod::heuristic: return "heuristic";
    case SelectionMethod::topk_heuristic: return "topk_heuristic";
    case SelectionMethod::classifier_ir: return "classifier_ir";
  }
  throw std::logic_error("unreachable");
}

SelectionMethod parse_method(const std::string& name) {
  if (name == "dsir") return SelectionMethod::dsir;
  if (name == "random") return SelectionMethod::random;
  if (name == "heuristic") return SelectionMethod::heuristic;
  if (name == "topk_heuristic") return SelectionMethod::topk_heuristic;
  if (name == "classifier_ir") return SelectionMethod::classifier_ir;
  throw std::runtime_error("unknown selection method: " + name);
}

void SelectionManifest::validate() const {
  std::unordered_set<std::string> seen;
  for (const std::string& id : selected_ids)
    if (!seen.insert(id).second)
      throw std::runtime_error("manifest contains duplicate id: " + id);
  if (!pool_exhausted && selected_ids.size() != k)
    throw std::runtime_error("manifest size does not match k");
  if (pool_exhausted && selected_ids.size() >= k)
    throw std::runtime_error("pool_exhausted set but manifest is not short");
}

std::string current_timestamp() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::time(nullptr);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<Shard> canonical_shards(const std::vector<std::string>& paths) {
  if (paths.empty()) throw std::runtime_error("no corpus paths given");
  std::vector<Shard> shards;
  shards.reserve(paths.size());
  for (const std::string& p : paths)
    shards.push_back({p, std::filesystem::path(p).filename().string()});
  std::sort(shards.begin(), shards.end(),
            [](const Shard& a, const Shard& b) { return a.basename < b.basename; });
  for (size_t i = 1; i < shards.size(); ++i)
    if (shards[i].basename == shards[i - 1].basename)
      throw std::runtime_error("duplicate shard basename: " + shards[i].basename);
  return shards;
}

// Plain or gzip line source. zlib's gzFile API reads uncompressed files
// too, but we keep the plain path on ifstream to avoid surprises with
// very long lines and error reporting.
struct ShardReader::LineSource {
  std::ifstream plain;
  gzFile gz = nullptr;
  bool is_gz = false;
  std::string pending;

  explicit LineSource(const std::string& path) {
    is_gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
    if (is_gz) {
      gz = gzopen(path.c_str(), "rb");
      if (gz == nullptr) throw std::runtime_error("cannot open shard: " + path);
    } else {
      plain.open(path, std::ios::binary);
      if (!plain) throw std::runtime_error("cannot open shard: " + path);
    }
  }

  ~LineSource() {
    if (gz != nullptr) gzclose(gz);
  }

  bool getline(std::string& out) {
    if (!is_gz) {
      if (!std::getline(plain, out)) return false;
    } else {
      out.clear();
      char buf[1 << 16];
      bool any = false;
      for (;;) {
        if (gzgets(gz, buf, sizeof buf) == nullptr) return any;
        any = true;
        size_t n = std::strlen(buf);
        if (n > 0 && buf[n - 1] == '\n') {
          out.append(buf, n - 1);
          break;
        }
        out.append(buf, n);
      }
    }
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return true;
  }
};

ShardReader::ShardReader(const Shard& shard)
    : source_(std::make_unique<LineSource>(shard.path)),
      shard_name_(shard.basename) {}

ShardReader::~ShardReader() = default;
ShardReader::ShardReader(ShardReader&&) noexcept = default;
ShardReader& ShardReader::operator=(ShardReader&&) noexcept = default;

std::optional<Document> ShardReader::next() {
  std::string line;
  while (source_->getline(line)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text") ||
        !j["text"].is_string()) {
      ++skipped_;
      continue;
    }
    Document doc;
    doc.shard = shard_name_;
    doc.ordinal = ordinal_++;
    doc.text = j["text"].get<std::string>();
    if (j.contains("source") && j["source"].is_string())
      doc.source = j["source"].get<std::string>();
    if (j.contains("id") && j["id"].is_string() && !j["id"].get<std::string>().empty()) {
      doc.id = j["id"].get<std::string>();
    } else {
      doc.id = shard_name_ + ":" + std::to_string(doc.ordinal);
    }
    return doc;
  }
  return std::nullopt;
}

DocumentStream::DocumentStream(const std::vector<std::string>& paths)
    : shards_(canonical_shards(paths)) {}

std::optional<Document> DocumentStream::next() {
  for (;;) {
    if (!reader_) {
      if (index_ >= shards_.size()) return std::nullopt;
      reader_.emplace(shards_[index_++]);
    }
    std::optional<Document> doc = reader_->next();
    if (doc) return doc;
    skipped_done_ += reader_->skipped_lines();
    reader_.reset();
  }
}

uint64_t DocumentStream::skipped_lines() const {
  return skipped_done_ + (reader_ ? reader_->skipped_lines() : 0);
}

void write_manifest(const SelectionManifest& manifest, const std::string& path) {
  manifest.validate();
  json j;
  j["selected_ids"] = manifest.selected_ids;
  j["k"] = manifest.k;
  j["seed"] = manifest.seed;
  j["method"] = to_string(manifest.method);
  j["config_digest"] = manifest.config_digest;
  j["created_at"] = manifest.created_at;
  j["pool_exhausted"] = manifest.pool_exhausted;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open manifest for write: " + path);
  out << j.dump() << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

SelectionManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  json j = json::parse(in);
  SelectionManifest m;
  m.selected_ids = j.at("selected_ids").get<std::vector<std::string>>();
  m.k = j.at("k").get<uint64_t>();
  m.seed = j.at("seed").get<uint64_t>();
  m.method = parse_method(j.at("method").get<std::string>());
  m.config_digest = j.at("config_digest").get<std::string>();
  m.created_at = j.at("created_at").get<std::string>();
  m.pool_exhausted = j.at("pool_exhausted").get<bool>();
  m.validate();
  return m;
}

void append_document_jsonl(std::ostream& out, const Document& doc) {
  json j;
  j["id"] = doc.id;
  j["text"] = doc.text;
  if (!doc.source.empty()) j["source"] = doc.source;
  out << j.dump() << "\n";
}

uint64_t extract_subset(const std::vector<std::string>& paths,
                        const SelectionManifest& manifest,
                        const std::string& out_path) {
  std::unordered_set<std::string> wanted(manifest.selected_ids.begin(),
                                         manifest.selected_ids.end());
  // Matched documents are held in memory so the output can follow
  // manifest order; the corpus itself is only streamed.
  std::unordered_map<std::string, Document> found;
  found.reserve(wanted.size());

  DocumentStream stream(paths);
  while (std::optional<Document> doc = stream.next()) {
    if (wanted.count(doc->id) != 0) found.emplace(doc->id, std::move(*doc));
    if (found.size() == wanted.size()) break;
  }
  for (const std::string& id : manifest.selected_ids)
    if (found.find(id) == found.end())
      throw std::runtime_error("manifest id not found in corpus: " + id);

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output for write: " + out_path);
  for (const std::string& id : manifest.selected_ids)
    append_document_jsonl(out, found.at(id));
  if (!out) throw std::runtime_error("write failed: " + out_path);
  return manifest.selected_ids.size();
}

}  // namespace dsir
