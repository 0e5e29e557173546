#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tmsat/sweep.hpp"

namespace tmsat {

inline constexpr const char* kResultsSchemaVersion = "1.0";

enum class ReportFormat { Csv, Json, PlotData };

ReportFormat parse_report_format(const std::string& name);

// Numbers use 17 significant digits; missing values are empty cells.
std::string csv_text(const std::vector<ResultRow>& rows);

// {"schema_version": ..., "rows": [...]}; missing values are null.
std::string json_text(const std::vector<ResultRow>& rows);

/// Long format: figure, panel_h0, panel_r_a, series_d, encoding,
/// compensation, x_eta1, metric, y. Detection rows feed figure "error-probability"
/// (metric p_e), key-rate rows feed figure "key-rate" (metric k).
std::string plot_data_text(const std::vector<ResultRow>& rows);

// Writes one format; refuses an empty table unless allow_empty.
void write_report(const std::vector<ResultRow>& rows, ReportFormat format, const std::filesystem::path& path,
                  bool allow_empty = false);

// Reads rows back from a CSV produced by csv_text.
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

}  // namespace tmsat
