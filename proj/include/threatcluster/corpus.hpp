#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "threatcluster/error.hpp"

namespace tc {

/// Reserved class for documents whose label occurred only once.
inline constexpr std::string_view kUnlabeled = "__unlabeled__";

struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> label;

  bool operator==(const Document&) const = default;
};

/// Ordered, immutable collection of documents with unique ids.
class LabeledCorpus {
 public:
  LabeledCorpus() = default;

  explicit LabeledCorpus(std::vector<Document> documents)
      : documents_(std::move(documents)) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(documents_.size());
    for (const auto& doc : documents_) {
      if (doc.id.empty()) throw InputError("document with empty id");
      if (!seen.insert(doc.id).second)
        throw InputError("duplicate document id \"" + doc.id + "\"");
      if (doc.label) {
        if (doc.label->empty())
          throw InputError("document \"" + doc.id + "\" has an empty label");
        label_set_.insert(*doc.label);
      }
    }
  }

  const std::vector<Document>& documents() const { return documents_; }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const std::set<std::string>& label_set() const { return label_set_; }

  auto begin() const { return documents_.begin(); }
  auto end() const { return documents_.end(); }

  bool operator==(const LabeledCorpus& other) const {
    return documents_ == other.documents_;
  }

 private:
  std::vector<Document> documents_;
  std::set<std::string> label_set_;
};

/// Character statistics over raw document text. Length fields are absent
/// for an empty corpus.
struct CorpusStats {
  std::size_t size = 0;
  std::optional<double> mean_len;
  std::optional<double> median_len;
  std::optional<std::size_t> min_len;
  std::optional<std::size_t> max_len;
  std::size_t n_classes = 0;

  bool operator==(const CorpusStats&) const = default;
};

/// Number of unicode scalar values in a UTF-8 string (counts lead bytes).
inline std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(
      text.begin(), text.end(),
      [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

/// Parses a JSONL corpus: one object per line with string "id", string
/// "text" and optional string "label". Blank lines are skipped.
inline LabeledCorpus parse_jsonl(std::istream& in,
                                 const std::string& source = "<stream>") {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw InputError(source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) fail("expected a JSON object");

    Document doc;
    auto id = obj.find("id");
    if (id == obj.end() || !id->is_string()) fail("missing string field \"id\"");
    doc.id = id->get<std::string>();
    auto text = obj.find("text");
    if (text == obj.end() || !text->is_string())
      fail("missing string field \"text\"");
    doc.text = text->get<std::string>();
    if (auto label = obj.find("label"); label != obj.end() && !label->is_null()) {
      if (!label->is_string()) fail("field \"label\" must be a string");
      doc.label = label->get<std::string>();
    }
    docs.push_back(std::move(doc));
  }
  try {
    return LabeledCorpus(std::move(docs));
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
}

inline LabeledCorpus load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open corpus file " + path.string());
  return parse_jsonl(in, path.string());
}

inline CorpusStats corpus_stats(const LabeledCorpus& corpus) {
  CorpusStats stats;
  stats.size = corpus.size();
  stats.n_classes = corpus.label_set().size() -
                    corpus.label_set().count(std::string(kUnlabeled));
  if (corpus.empty()) return stats;

  std::vector<std::size_t> lengths;
  lengths.reserve(corpus.size());
  for (const auto& doc : corpus) lengths.push_back(utf8_length(doc.text));
  std::sort(lengths.begin(), lengths.end());

  double total = 0;
  for (auto len : lengths) total += static_cast<double>(len);
  stats.mean_len = total / static_cast<double>(lengths.size());
  const std::size_t mid = lengths.size() / 2;
  stats.median_len = lengths.size() % 2 == 1
                         ? static_cast<double>(lengths[mid])
                         : (static_cast<double>(lengths[mid - 1]) +
                            static_cast<double>(lengths[mid])) / 2.0;
  stats.min_len = lengths.front();
  stats.max_len = lengths.back();
  return stats;
}

/// Moves every label held by exactly one document to kUnlabeled.
inline LabeledCorpus singletons_to_unlabeled(const LabeledCorpus& corpus) {
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus)
    if (doc.label) ++counts[*doc.label];

  std::vector<Document> docs = corpus.documents();
  for (auto& doc : docs)
    if (doc.label && counts[*doc.label] == 1) doc.label = std::string(kUnlabeled);
  return LabeledCorpus(std::move(docs));
}

/// Ground truth per document; unlabeled documents fall into kUnlabeled.
inline std::vector<std::string> truth_labels(const LabeledCorpus& corpus) {
  std::vector<std::string> labels;
  labels.reserve(corpus.size());
  for (const auto& doc : corpus)
    labels.push_back(doc.label ? *doc.label : std::string(kUnlabeled));
  return labels;
}

/// Deterministic resample of n documents. Without replacement when
/// n <= |corpus|, otherwise with replacement; repeated documents get
/// "#<k>" id suffixes so ids stay unique.
inline LabeledCorpus subsample(const LabeledCorpus& corpus, std::size_t n,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> picks;
  picks.reserve(n);
  if (n <= corpus.size()) {
    std::vector<std::size_t> pool(corpus.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      picks.push_back(pool[i]);
    }
  } else {
    if (corpus.empty())
      throw std::invalid_argument("cannot resample from an empty corpus");
    std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
    for (std::size_t i = 0; i < n; ++i) picks.push_back(pick(rng));
  }

  std::unordered_set<std::string> used;
  std::unordered_map<std::size_t, std::size_t> copies;
  for (const auto& doc : corpus) used.insert(doc.id);
  std::vector<Document> docs;
  docs.reserve(n);
  for (std::size_t src : picks) {
    Document doc = corpus[src];
    if (std::size_t k = copies[src]++; k > 0) {
      std::string fresh;
      do {
        fresh = doc.id + "#" + std::to_string(k++);
      } while (used.count(fresh));
      copies[src] = k;
      used.insert(fresh);
      doc.id = std::move(fresh);
    }
    docs.push_back(std::move(doc));
  }
  return LabeledCorpus(std::move(docs));
}

}  // namespace tc
