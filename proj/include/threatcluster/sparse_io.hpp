#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "threatcluster/corpus.hpp"
#include "threatcluster/dense_io.hpp"
#include "threatcluster/embedding.hpp"
#include "threatcluster/error.hpp"
#include "threatcluster/tfidf.hpp"

// Text dump of a TF-IDF matrix:
//   #threatcluster-sparse v1 dim=<d> kind=<tfidfN> count=<n>
//   <id>\t<col>:<value> <col>:<value> ...
// and a companion "<path>.vocab" with one "<term>\t<df>" line per column.

namespace tc {

inline constexpr std::string_view kSparseMagic = "#threatcluster-sparse v1";

struct SparseFile {
  std::vector<std::string> ids;
  EmbeddingMatrix matrix;
};

inline std::filesystem::path vocab_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".vocab";
  return p;
}

inline void write_sparse(const std::filesystem::path& path, const LabeledCorpus& corpus,
                         const EmbeddingMatrix& matrix, const Vocabulary& vocab) {
  if (!matrix.is_sparse() || matrix.rows() != corpus.size() || matrix.dim() != vocab.size())
    throw std::invalid_argument("write_sparse: matrix does not match corpus or vocabulary");
  std::string out(kSparseMagic);
  out += " dim=" + std::to_string(matrix.dim()) + " kind=" + std::string(to_string(matrix.kind())) +
         " count=" + std::to_string(matrix.rows()) + "\n";
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    out += corpus[r].id;
    out.push_back('\t');
    bool first = true;
    matrix.row(r).for_each([&](std::uint32_t j, double v) {
      if (!first) out.push_back(' ');
      first = false;
      out += std::to_string(j);
      out.push_back(':');
      detail::format_float(out, v);
    });
    out.push_back('\n');
  }
  std::string voc;
  for (std::size_t j = 0; j < vocab.size(); ++j)
    voc += vocab.terms[j] + "\t" + std::to_string(vocab.document_frequency[j]) + "\n";

  for (const auto& [p, text] : {std::pair{path, &out}, std::pair{vocab_path(path), &voc}}) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << *text;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + p.string());
  }
}

inline SparseFile read_sparse(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open sparse file " + path.string());
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kSparseMagic))
    throw InputError(source + ":1: missing sparse file magic");

  std::size_t dim = 0, count = 0;
  EmbeddingKind kind = EmbeddingKind::tfidf1;
  {
    std::string_view rest = std::string_view(line).substr(kSparseMagic.size());
    auto field = [&](std::string_view key) {
      if (!rest.starts_with(key)) throw InputError(source + ":1: expected \"" + std::string(key) + "\"");
      rest.remove_prefix(key.size());
      const auto end = rest.find(' ');
      const auto v = rest.substr(0, end);
      rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
      return v;
    };
    const auto d = detail::parse_count(field(" dim="));
    const auto k = parse_embedding_kind(field(" kind="));
    const auto c = detail::parse_count(field(" count="));
    if (!d || !k || !c || !is_tfidf(*k) || !rest.empty()) throw InputError(source + ":1: bad header");
    dim = *d;
    kind = *k;
    count = *c;
  }

  SparseFile out;
  std::vector<std::size_t> indptr{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw InputError(where + "expected <id>\\t<entries>");
    out.ids.push_back(line.substr(0, tab));
    std::string_view rest = std::string_view(line).substr(tab + 1);
    while (!rest.empty()) {
      const auto sp = rest.find(' ');
      const auto entry = rest.substr(0, sp);
      rest.remove_prefix(sp == std::string_view::npos ? rest.size() : sp + 1);
      const auto colon = entry.find(':');
      if (colon == std::string_view::npos) throw InputError(where + "bad entry \"" + std::string(entry) + "\"");
      std::uint32_t col = 0;
      double v = 0;
      const auto r1 = std::from_chars(entry.data(), entry.data() + colon, col);
      const auto r2 = std::from_chars(entry.data() + colon + 1, entry.data() + entry.size(), v);
      if (r1.ec != std::errc() || r1.ptr != entry.data() + colon || r2.ec != std::errc() ||
          r2.ptr != entry.data() + entry.size())
        throw InputError(where + "bad entry \"" + std::string(entry) + "\"");
      indices.push_back(col);
      values.push_back(v);
    }
    indptr.push_back(indices.size());
  }
  if (out.ids.size() != count)
    throw InputError(source + ": header count " + std::to_string(count) + " but " +
                     std::to_string(out.ids.size()) + " rows");
  try {
    out.matrix = EmbeddingMatrix::sparse(kind, dim, std::move(indptr), std::move(indices), std::move(values));
  } catch (const std::invalid_argument& e) {
    throw InputError(source + ": " + e.what());
  }
  return out;
}

}  // namespace tc
