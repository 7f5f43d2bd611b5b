#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "threatcluster/error.hpp"
#include "threatcluster/harness.hpp"

// Flat run configuration: one `key = value` per line, `#` starts a comment.
// List values are comma separated; `all` selects every value of an axis.
//
//   corpus = reports.jsonl
//   embeddings = tfidf1, sbert_h
//   metrics = all
//   clusterers = dbscan, optics
//   vectors.sbert_h = reports.sbert_h.vec
//   threshold = 0.4

namespace tc {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <class T, std::size_t N, class Parse>
std::vector<T> parse_axis(std::string_view value, const std::array<T, N>& all, Parse parse,
                          const std::string& where) {
  const auto items = split_list(value);
  if (items.size() == 1 && items[0] == "all") return {all.begin(), all.end()};
  std::vector<T> out;
  for (const auto& item : items) {
    const auto v = parse(item);
    if (!v) throw InputError(where + "unknown value \"" + item + "\"");
    if (std::find(out.begin(), out.end(), *v) != out.end())
      throw InputError(where + "duplicate value \"" + item + "\"");
    out.push_back(*v);
  }
  if (out.empty()) throw InputError(where + "empty list");
  return out;
}

template <class T>
T parse_number(std::string_view s, const std::string& where) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw InputError(where + "not a number: \"" + std::string(s) + "\"");
  return v;
}

inline bool parse_bool(std::string_view s, const std::string& where) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InputError(where + "expected true or false, got \"" + std::string(s) + "\"");
}

}  // namespace detail

/// Relative paths resolve against `base_dir`.
inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir,
                              const std::string& source = "<config>") {
  RunConfig cfg;
  bool have_corpus = false;
  std::set<std::string> seen;
  auto resolve = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return p.is_absolute() ? p : base_dir / p;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = detail::trim(text);
    if (text.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw InputError(where + "expected key = value");
    const std::string key{detail::trim(text.substr(0, eq))};
    const std::string_view value = detail::trim(text.substr(eq + 1));
    if (!seen.insert(key).second) throw InputError(where + "duplicate key \"" + key + "\"");
    if (value.empty()) throw InputError(where + "empty value for \"" + key + "\"");

    if (key == "corpus") {
      cfg.corpus = resolve(value);
      have_corpus = true;
    } else if (key == "out_dir") {
      cfg.out_dir = resolve(value);
    } else if (key == "embeddings") {
      cfg.embeddings = detail::parse_axis(value, kAllEmbeddings, parse_embedding_kind, where);
    } else if (key == "metrics") {
      cfg.metrics = detail::parse_axis(value, kAllMetrics, parse_metric, where);
    } else if (key == "clusterers") {
      cfg.clusterers = detail::parse_axis(value, kAllClusterers, parse_clusterer, where);
    } else if (key == "beta") {
      cfg.beta = detail::parse_number<double>(value, where);
    } else if (key == "seed") {
      cfg.seed = detail::parse_number<std::uint64_t>(value, where);
    } else if (key == "threshold") {
      cfg.threshold = detail::parse_number<double>(value, where);
    } else if (key == "workers") {
      cfg.workers = detail::parse_number<unsigned>(value, where);
    } else if (key == "stopwords") {
      cfg.stopwords = resolve(value);
    } else if (key == "singletons_to_unlabeled") {
      cfg.singletons_to_unlabeled = detail::parse_bool(value, where);
    } else if (key == "optics_min_samples") {
      cfg.optics_min_samples = detail::parse_number<std::size_t>(value, where);
    } else if (key.starts_with("vectors.")) {
      const auto kind = parse_embedding_kind(std::string_view(key).substr(8));
      if (!kind || is_tfidf(*kind)) throw InputError(where + "unknown key \"" + key + "\"");
      cfg.vectors[*kind] = resolve(value);
    } else {
      throw InputError(where + "unknown key \"" + key + "\"");
    }
  }
  if (!have_corpus) throw InputError(source + ": missing required key \"corpus\"");
  validate(cfg);
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  return parse_config(in, path.parent_path(), path.string());
}

inline RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  std::istringstream in{std::string(text)};
  return parse_config(in, base_dir);
}

/// "250:5000:250" -> 250, 500, ..., 5000; a single number is one size;
/// "a,b,c" lists sizes explicitly.
inline std::vector<std::size_t> parse_sizes(std::string_view spec) {
  const std::string where = "sizes \"" + std::string(spec) + "\": ";
  std::vector<std::size_t> out;
  if (spec.find(':') != std::string_view::npos) {
    std::vector<std::string> parts;
    std::string_view rest = spec;
    while (true) {
      const auto colon = rest.find(':');
      parts.emplace_back(detail::trim(rest.substr(0, colon)));
      if (colon == std::string_view::npos) break;
      rest.remove_prefix(colon + 1);
    }
    if (parts.size() != 3) throw InputError(where + "expected start:stop:step");
    const auto start = detail::parse_number<std::size_t>(parts[0], where);
    const auto stop = detail::parse_number<std::size_t>(parts[1], where);
    const auto step = detail::parse_number<std::size_t>(parts[2], where);
    if (start == 0 || step == 0 || stop < start)
      throw InputError(where + "need 0 < start <= stop and step > 0");
    for (std::size_t s = start; s <= stop; s += step) out.push_back(s);
  } else {
    for (const auto& item : detail::split_list(spec)) {
      const auto v = detail::parse_number<std::size_t>(item, where);
      if (v == 0) throw InputError(where + "sizes must be >= 1");
      out.push_back(v);
    }
  }
  if (out.empty()) throw InputError(where + "no sizes");
  return out;
}

}  // namespace tc
