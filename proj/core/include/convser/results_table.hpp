#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convser/training.hpp"

namespace convser {

inline constexpr std::array<std::string_view, 8> kResultsColumns = {
    "Model",      "Filters",     "Kernel Size",   "LSTM Neurons",
    "Ø Accuracy", "Ø Precision", "Ø Sensitivity", "Ø F1-Score"};

// One row of a results table. Percent values are stored as fractions;
// empty means "n/a". A failed cell carries failed = true and no values.
struct ResultRow {
  std::string model;
  int filters = 0;
  int kernel_size = 0;
  int lstm_units = 0;
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> sensitivity;
  std::optional<double> f1;
  bool failed = false;
};

ResultRow result_row(const RunReport& report);
std::vector<ResultRow> result_rows(const std::vector<RunReport>& reports);

// Percentages with two decimals ("98.91%"), "n/a" or "failed".
std::string format_results_csv(const std::vector<ResultRow>& rows);
// Creates missing parent directories.
void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
// Throws FormatError on a header that differs from kResultsColumns.
std::vector<ResultRow> parse_results_csv(std::string_view text);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

// |f1 - 2PR/(P+R)| as a fraction; empty when any of the three is n/a.
std::optional<double> harmonic_mean_gap(const ResultRow& row);

// Column-aligned text with a footer explaining n/a handling.
std::string render_text_table(const std::vector<ResultRow>& rows, std::string_view title);

// Horizontal bar chart of mean accuracy, one bar per row.
std::string render_accuracy_svg(const std::vector<ResultRow>& rows, std::string_view title);

}  // namespace convser
