#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "threatcluster/corpus.hpp"
#include "threatcluster/error.hpp"
#include "threatcluster/harness.hpp"

namespace tc {

inline constexpr std::string_view kReportColumns[] = {"rank", "clusterer", "embedding", "distance",
                                                      "H",    "C",         "V",         "#C",
                                                      "Red%"};
inline constexpr std::string_view kCsvExtraColumns[] = {"t_embed", "t_cluster", "error"};

enum class ReportFormat { markdown, csv };

namespace detail {

inline std::string fixed2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

// RFC 4180 records; quoted fields may contain separators and newlines.
inline std::vector<std::vector<std::string>> parse_csv_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < text.size()) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field += ch;
      }
      ++i;
      continue;
    }
    if (ch == '"' && !field_started && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      ++i;
    } else if (ch == '\n') {
      end_record();
    } else {
      field += ch;
      field_started = true;
    }
    ++i;
  }
  if (quoted) throw InputError("csv: unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

inline double parse_double(const std::string& s, std::string_view what) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw InputError("csv: bad " + std::string(what) + " value \"" + s + "\"");
  return v;
}

inline std::size_t parse_size(const std::string& s, std::string_view what) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw InputError("csv: bad " + std::string(what) + " value \"" + s + "\"");
  return v;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace detail

/// Human table: 2-decimal H, C, V and Red%, display names.
inline std::string render_markdown(std::span<const EvalRow> rows) {
  std::string out = "|";
  for (auto col : kReportColumns) out += " " + std::string(col) + " |";
  out += "\n|---:|---|---|---|---:|---:|---:|---:|---:|\n";
  for (const auto& r : rows) {
    out += "| " + std::to_string(r.rank) + " | " + std::string(display_name(r.clusterer)) + " | " +
           std::string(display_name(r.embedding)) + " | " + std::string(display_name(r.metric)) +
           " | " + detail::fixed2(r.h) + " | " + detail::fixed2(r.c) + " | " +
           detail::fixed2(r.v) + " | " + std::to_string(r.n_clusters) + " | " +
           detail::fixed2(r.reduction_percent) + " |\n";
  }
  return out;
}

/// Machine table: report columns plus timings and error, machine tags,
/// round-trip precision.
inline std::string render_csv(std::span<const EvalRow> rows) {
  std::string out;
  bool first = true;
  for (auto col : kReportColumns) {
    out += (first ? "" : ",") + std::string(col);
    first = false;
  }
  for (auto col : kCsvExtraColumns) out += "," + std::string(col);
  out += "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.rank) + "," + std::string(to_string(r.clusterer)) + "," +
           std::string(to_string(r.embedding)) + "," + std::string(to_string(r.metric)) + "," +
           detail::full(r.h) + "," + detail::full(r.c) + "," + detail::full(r.v) + "," +
           std::to_string(r.n_clusters) + "," + detail::full(r.reduction_percent) + "," +
           detail::full(r.t_embed) + "," + detail::full(r.t_cluster) + "," +
           detail::csv_field(r.error) + "\n";
  }
  return out;
}

inline std::string render_report(std::span<const EvalRow> rows, ReportFormat format) {
  return format == ReportFormat::markdown ? render_markdown(rows) : render_csv(rows);
}

inline std::vector<EvalRow> parse_csv(std::string_view text) {
  const auto records = detail::parse_csv_records(text);
  if (records.empty()) throw InputError("csv: missing header");
  const std::size_t width = std::size(kReportColumns) + std::size(kCsvExtraColumns);
  if (records[0].size() != width) throw InputError("csv: unexpected header");
  for (std::size_t k = 0; k < std::size(kReportColumns); ++k)
    if (records[0][k] != kReportColumns[k]) throw InputError("csv: unexpected header");

  std::vector<EvalRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != width)
      throw InputError("csv: record " + std::to_string(i) + " has " + std::to_string(f.size()) +
                       " fields");
    EvalRow r;
    r.rank = detail::parse_size(f[0], "rank");
    const auto ck = parse_clusterer(f[1]);
    const auto ek = parse_embedding_kind(f[2]);
    const auto mk = parse_metric(f[3]);
    if (!ck || !ek || !mk) throw InputError("csv: unknown tag in record " + std::to_string(i));
    r.clusterer = *ck;
    r.embedding = *ek;
    r.metric = *mk;
    r.h = detail::parse_double(f[4], "H");
    r.c = detail::parse_double(f[5], "C");
    r.v = detail::parse_double(f[6], "V");
    r.n_clusters = detail::parse_size(f[7], "#C");
    r.reduction_percent = detail::parse_double(f[8], "Red%");
    r.t_embed = detail::parse_double(f[9], "t_embed");
    r.t_cluster = detail::parse_double(f[10], "t_cluster");
    r.error = f[11];
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string assignment_file_name(const EvalRow& r) {
  return std::string(to_string(r.clusterer)) + "_" + std::string(to_string(r.embedding)) + "_" +
         std::string(to_string(r.metric)) + ".csv";
}

/// doc_id,cluster_id with noise written as -1.
inline std::string render_assignments(const LabeledCorpus& corpus, const Clustering& clustering) {
  if (clustering.size() != corpus.size())
    throw std::invalid_argument("render_assignments: size mismatch");
  std::string out = "doc_id,cluster_id\n";
  for (std::size_t i = 0; i < corpus.size(); ++i)
    out += detail::csv_field(corpus[i].id) + "," + std::to_string(clustering.assignment[i]) + "\n";
  return out;
}

inline std::string render_benchmark_csv(std::span<const BenchmarkRecord> records) {
  std::string out = "corpus_size,clusterer,t_embed,t_cluster,t_sum,n_clusters\n";
  for (const auto& r : records)
    out += std::to_string(r.corpus_size) + "," + std::string(to_string(r.clusterer)) + "," +
           detail::full(r.t_embed) + "," + detail::full(r.t_cluster) + "," +
           detail::full(r.t_sum) + "," + std::to_string(r.n_clusters) + "\n";
  return out;
}

/// report.md (filtered by threshold), report.csv (all rows) and one
/// assignment file per successful combination under out_dir.
inline void write_reports(const std::filesystem::path& out_dir, const LabeledCorpus& corpus,
                          std::span<const CombinationResult> results, double threshold) {
  std::filesystem::create_directories(out_dir / "assignments");
  const auto shown = report_rows(results, threshold);
  const auto all = all_rows(results);
  detail::write_text(out_dir / "report.md", render_markdown(shown));
  detail::write_text(out_dir / "report.csv", render_csv(all));
  for (const auto& r : results)
    if (r.row.ok())
      detail::write_text(out_dir / "assignments" / assignment_file_name(r.row),
                         render_assignments(corpus, r.clustering));
}

}  // namespace tc
