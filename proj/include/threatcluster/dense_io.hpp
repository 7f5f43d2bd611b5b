#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <unistd.h>

#include "threatcluster/corpus.hpp"
#include "threatcluster/embedding.hpp"
#include "threatcluster/error.hpp"

// Exchange format between the core and the embedding sidecar:
//
//   #threatcluster-vectors v1 dim=<d> kind=<k> model=<name> count=<n>
//   <id>\t<v1>,<v2>,...,<vd>        (n lines)
//
// Floats use '.' as decimal separator and are written with 9 significant
// digits. <k> is one of doc2vec, sbert_h, sbert_t, sbert_ht. <name> may
// contain spaces but no tab or newline; ids contain neither tab nor newline.

namespace tc {

struct VectorFileHeader {
  std::size_t dim = 0;
  EmbeddingKind kind = EmbeddingKind::sbert_h;
  std::string model_name;
  std::size_t count = 0;

  bool operator==(const VectorFileHeader&) const = default;
};

struct VectorRow {
  std::string id;
  std::vector<double> values;

  bool operator==(const VectorRow&) const = default;
};

struct VectorFile {
  VectorFileHeader header;
  std::vector<VectorRow> rows;
};

inline constexpr std::string_view kVectorMagic = "#threatcluster-vectors v1";

namespace detail {

inline void format_float(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  out.append(buf, res.ptr);
}

inline std::string header_line(const VectorFileHeader& h) {
  std::string line(kVectorMagic);
  line += " dim=" + std::to_string(h.dim);
  line += " kind=" + std::string(to_string(h.kind));
  line += " model=" + h.model_name;
  line += " count=" + std::to_string(h.count);
  return line;
}

inline std::optional<std::size_t> parse_count(std::string_view s) {
  std::size_t value = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

inline VectorFileHeader parse_header(std::string_view line, const std::string& source) {
  auto fail = [&](const std::string& what) -> VectorFileHeader {
    throw InputError(source + ":1: " + what);
  };
  if (line.substr(0, kVectorMagic.size()) != kVectorMagic) return fail("missing vector file magic");
  line.remove_prefix(kVectorMagic.size());

  VectorFileHeader h;
  auto take = [&](std::string_view key, bool to_last) -> std::string_view {
    if (line.substr(0, key.size()) != key) fail("expected \"" + std::string(key) + "\"");
    line.remove_prefix(key.size());
    // model names may contain spaces, so it runs up to the last " count="
    const auto end = to_last ? line.rfind(" count=") : line.find(' ');
    if (to_last && end == std::string_view::npos) fail("missing count field");
    auto value = line.substr(0, end);
    line.remove_prefix(end == std::string_view::npos ? line.size() : end);
    return value;
  };
  auto dim = parse_count(take(" dim=", false));
  if (!dim || *dim == 0) fail("dim must be a positive integer");
  h.dim = *dim;
  auto kind_text = take(" kind=", false);
  auto kind = parse_embedding_kind(kind_text);
  if (!kind || is_tfidf(*kind)) fail("unsupported kind \"" + std::string(kind_text) + "\"");
  h.kind = *kind;
  h.model_name = std::string(take(" model=", true));
  auto count = parse_count(take(" count=", false));
  if (!count) fail("count must be a non-negative integer");
  h.count = *count;
  if (!line.empty()) fail("trailing content in header");
  return h;
}

}  // namespace detail

/// Writes the exchange file and fsyncs it before returning.
inline void write_vectors(const std::filesystem::path& path, const VectorFileHeader& header,
                          std::span<const VectorRow> rows) {
  if (header.dim == 0) throw std::invalid_argument("vector dim must be positive");
  if (is_tfidf(header.kind)) throw std::invalid_argument("exchange files carry dense kinds only");
  if (header.model_name.find_first_of("\t\n\r") != std::string::npos)
    throw std::invalid_argument("model name contains a control character");
  std::unordered_set<std::string_view> seen;
  std::string out = detail::header_line({header.dim, header.kind, header.model_name, rows.size()});
  out.push_back('\n');
  for (const auto& row : rows) {
    if (row.id.empty() || row.id.find_first_of("\t\n\r") != std::string::npos)
      throw std::invalid_argument("invalid vector id \"" + row.id + "\"");
    if (!seen.insert(row.id).second)
      throw std::invalid_argument("duplicate vector id \"" + row.id + "\"");
    if (row.values.size() != header.dim)
      throw std::invalid_argument("vector \"" + row.id + "\" has dimension " +
                                  std::to_string(row.values.size()) + ", expected " +
                                  std::to_string(header.dim));
    out += row.id;
    out.push_back('\t');
    for (std::size_t j = 0; j < row.values.size(); ++j) {
      if (!std::isfinite(row.values[j]))
        throw std::invalid_argument("vector \"" + row.id + "\" has a non-finite value");
      if (j) out.push_back(',');
      detail::format_float(out, row.values[j]);
    }
    out.push_back('\n');
  }

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw InputError("cannot write vector file " + path.string());
  const bool ok = std::fwrite(out.data(), 1, out.size(), f) == out.size() && std::fflush(f) == 0 &&
                  ::fsync(::fileno(f)) == 0;
  const bool closed = std::fclose(f) == 0;
  if (!ok || !closed) throw InputError("failed writing vector file " + path.string());
}

/// Parses an exchange file without reference to a corpus.
inline VectorFile read_vector_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open vector file " + path.string());
  const std::string source = path.string();

  std::string line;
  if (!std::getline(in, line)) throw InputError(source + ": empty vector file");
  VectorFile file;
  file.header = detail::parse_header(line, source);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw InputError(where() + "expected <id>\\t<values>");
    VectorRow row{line.substr(0, tab), {}};
    row.values.reserve(file.header.dim);
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (true) {
      double v = 0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc{})
        throw InputError(where() + "malformed value in row \"" + row.id + "\"");
      if (!std::isfinite(v))
        throw InputError(where() + "non-finite value in row \"" + row.id + "\"");
      row.values.push_back(v);
      p = res.ptr;
      if (p == end) break;
      if (*p != ',') throw InputError(where() + "malformed value in row \"" + row.id + "\"");
      ++p;
    }
    if (row.values.size() != file.header.dim)
      throw InputError(where() + "row \"" + row.id + "\" has dimension " +
                       std::to_string(row.values.size()) + ", expected " +
                       std::to_string(file.header.dim));
    file.rows.push_back(std::move(row));
  }
  if (file.rows.size() != file.header.count)
    throw InputError(source + ": header count " + std::to_string(file.header.count) +
                     " but " + std::to_string(file.rows.size()) + " rows");
  return file;
}

/// Loads vectors and reorders them to corpus order. Ids must match the
/// corpus exactly (no missing, no extra, no duplicates).
inline EmbeddingMatrix read_vectors(const std::filesystem::path& path,
                                    const LabeledCorpus& corpus) {
  VectorFile file = read_vector_file(path);
  std::unordered_map<std::string_view, std::size_t> by_id;
  for (std::size_t r = 0; r < file.rows.size(); ++r)
    if (!by_id.emplace(file.rows[r].id, r).second)
      throw InputError(path.string() + ": duplicate id \"" + file.rows[r].id + "\"");

  const std::size_t dim = file.header.dim;
  std::vector<double> values;
  values.reserve(corpus.size() * dim);
  for (const auto& doc : corpus) {
    auto it = by_id.find(doc.id);
    if (it == by_id.end())
      throw InputError(path.string() + ": no vector for document \"" + doc.id + "\"");
    const auto& v = file.rows[it->second].values;
    values.insert(values.end(), v.begin(), v.end());
  }
  if (file.rows.size() != corpus.size()) {
    std::unordered_set<std::string_view> ids;
    for (const auto& doc : corpus) ids.insert(doc.id);
    for (const auto& row : file.rows)
      if (!ids.count(row.id))
        throw InputError(path.string() + ": vector \"" + row.id + "\" is not in the corpus");
  }
  return EmbeddingMatrix::dense(file.header.kind, corpus.size(), dim, std::move(values));
}

}  // namespace tc
