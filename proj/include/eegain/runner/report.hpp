#pragma once

// Text and CSV renderings of a run summary: one row per fold, then the
// mean ± std row.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eegain/error.hpp"
#include "eegain/metrics.hpp"
#include "eegain/runner/runner.hpp"

namespace eegain {

enum class ReportFormat { table, csv };

inline nlohmann::json load_summary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, path.string() + ": cannot open summary");
  try {
    auto j = nlohmann::json::parse(in);
    require(j.value("schema_version", 0) == 1, "unsupported summary schema_version",
            ErrorKind::data);
    return j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::data, path.string() + ": " + e.what());
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

struct ReportData {
  std::string title;
  std::vector<std::string> metric_names;
  std::vector<int> fold_indices;
  std::vector<std::vector<double>> fold_values;  // [fold][metric]
  std::vector<MeanStd> summary;                  // recomputed from the folds
};

/// Reads per-fold metrics from a summary and recomputes mean and std.
inline ReportData report_data(const nlohmann::json& summary) {
  try {
    ReportData d;
    const auto& cfg = summary.at("config");
    d.title = summary.at("dataset").at("name").get<std::string>() + " | " +
              cfg.at("model").at("kind").get<std::string>() + " | " +
              cfg.at("split").at("kind").get<std::string>();
    std::vector<MetricReport> reports;
    for (const auto& f : summary.at("folds")) {
      d.fold_indices.push_back(f.at("fold_index").get<int>());
      reports.push_back(f.at("metrics").get<MetricReport>());
    }
    const auto agg = aggregate(reports);
    for (const auto& [name, v] : agg.metrics) {
      d.metric_names.push_back(name);
      d.summary.push_back(v);
    }
    for (const auto& r : reports) {
      std::vector<double> row;
      for (const auto& [_, v] : r.scalars()) row.push_back(v);
      d.fold_values.push_back(std::move(row));
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::data, std::string("malformed summary: ") + e.what());
  }
}

inline std::string render_report(const nlohmann::json& summary, ReportFormat format) {
  const auto d = report_data(summary);
  std::ostringstream out;
  char buf[64];
  if (format == ReportFormat::csv) {
    out << "row";
    for (const auto& n : d.metric_names) out << "," << n;
    out << "\n";
    for (std::size_t f = 0; f < d.fold_values.size(); ++f) {
      out << "fold_" << d.fold_indices[f];
      for (double v : d.fold_values[f]) {
        out << "," << detail::format_double(v);
      }
      out << "\n";
    }
    out << "mean";
    for (const auto& m : d.summary) {
      out << "," << detail::format_double(m.mean);
    }
    out << "\nstd";
    for (const auto& m : d.summary) {
      out << "," << detail::format_double(m.std);
    }
    out << "\n";
    return out.str();
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"fold"};
  header.insert(header.end(), d.metric_names.begin(), d.metric_names.end());
  rows.push_back(header);
  for (std::size_t f = 0; f < d.fold_values.size(); ++f) {
    std::vector<std::string> row{std::to_string(d.fold_indices[f])};
    for (double v : d.fold_values[f]) {
      std::snprintf(buf, sizeof buf, "%.4f", v);
      row.emplace_back(buf);
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::string> last{"mean ± std"};
  for (const auto& m : d.summary) {
    std::snprintf(buf, sizeof buf, "%.4f ± %.4f", m.mean, m.std);
    last.emplace_back(buf);
  }
  rows.push_back(std::move(last));

  // Column widths in code points; "±" is two bytes in UTF-8.
  auto width = [](const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
  };
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], width(row[c]));

  out << d.title << "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c) out << "  ";
      const auto pad = widths[c] - width(rows[r][c]);
      if (c == 0) {
        out << rows[r][c] << std::string(pad, ' ');
      } else {
        out << std::string(pad, ' ') << rows[r][c];
      }
    }
    out << "\n";
    if (r == 0 || r + 2 == rows.size()) {
      std::size_t total = 0;
      for (auto w : widths) total += w;
      out << std::string(total + 2 * (widths.size() - 1), '-') << "\n";
    }
  }
  return out.str();
}

}  // namespace eegain
