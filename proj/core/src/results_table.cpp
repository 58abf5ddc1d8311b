#include "convser/results_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "convser/errors.hpp"

namespace convser {

ResultRow result_row(const RunReport& report) {
  ResultRow row;
  row.model = report.model_id;
  row.filters = report.model_config.filters;
  row.kernel_size = report.model_config.kernel_size;
  row.lstm_units = report.model_config.lstm_units;
  row.failed = report.failed;
  if (!report.failed) {
    row.accuracy = report.averaged.accuracy;
    row.precision = report.averaged.precision;
    row.sensitivity = report.averaged.sensitivity;
    row.f1 = report.averaged.f1;
  }
  return row;
}

std::vector<ResultRow> result_rows(const std::vector<RunReport>& reports) {
  std::vector<ResultRow> rows;
  rows.reserve(reports.size());
  for (const auto& r : reports) rows.push_back(result_row(r));
  return rows;
}

namespace {

std::string percent(const std::optional<double>& v, bool failed) {
  if (failed) return "failed";
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", *v * 100.0);
  return buf;
}

std::optional<double> parse_percent(std::string_view cell, bool& failed) {
  if (cell == "failed") {
    failed = true;
    return std::nullopt;
  }
  if (cell == "n/a") return std::nullopt;
  std::string text(cell);
  if (!text.empty() && text.back() == '%') text.pop_back();
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw FormatError("results table: bad percentage '" + std::string(cell) + "'");
  }
  if (used != text.size()) throw FormatError("results table: bad percentage '" + std::string(cell) + "'");
  return value / 100.0;
}

int parse_int(std::string_view cell) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(std::string(cell), &used);
    if (used == cell.size()) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("results table: bad integer '" + std::string(cell) + "'");
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(cell);
  return cells;
}

// Terminal columns occupied by a UTF-8 string (no wide glyphs expected).
std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::vector<std::string> row_cells(const ResultRow& r) {
  return {r.model,
          std::to_string(r.filters),
          std::to_string(r.kernel_size),
          std::to_string(r.lstm_units),
          percent(r.accuracy, r.failed),
          percent(r.precision, r.failed),
          percent(r.sensitivity, r.failed),
          percent(r.f1, r.failed)};
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string format_results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < kResultsColumns.size(); ++i)
    out << (i ? "," : "") << kResultsColumns[i];
  out << '\n';
  for (const auto& r : rows) {
    const auto cells = row_cells(r);
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  }
  return out.str();
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_results_csv(rows);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<ResultRow> parse_results_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (header) {
      if (cells.size() != kResultsColumns.size() ||
          !std::equal(cells.begin(), cells.end(), kResultsColumns.begin()))
        throw FormatError("results table: header does not match the expected schema");
      header = false;
      continue;
    }
    if (cells.size() != kResultsColumns.size())
      throw FormatError("results table: line " + std::to_string(line_no) + " has " +
                        std::to_string(cells.size()) + " cells");
    ResultRow r;
    r.model = cells[0];
    r.filters = parse_int(cells[1]);
    r.kernel_size = parse_int(cells[2]);
    r.lstm_units = parse_int(cells[3]);
    r.accuracy = parse_percent(cells[4], r.failed);
    r.precision = parse_percent(cells[5], r.failed);
    r.sensitivity = parse_percent(cells[6], r.failed);
    r.f1 = parse_percent(cells[7], r.failed);
    rows.push_back(std::move(r));
  }
  if (header) throw FormatError("results table: empty input");
  return rows;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_results_csv(buf.str());
}

std::optional<double> harmonic_mean_gap(const ResultRow& row) {
  if (!row.precision || !row.sensitivity || !row.f1) return std::nullopt;
  const double p = *row.precision, s = *row.sensitivity;
  const double h = (p + s) > 0.0 ? 2.0 * p * s / (p + s) : 0.0;
  return std::abs(*row.f1 - h);
}

std::string render_text_table(const std::vector<ResultRow>& rows, std::string_view title) {
  std::vector<std::vector<std::string>> table;
  table.emplace_back(kResultsColumns.begin(), kResultsColumns.end());
  for (const auto& r : rows) table.push_back(row_cells(r));

  std::vector<std::size_t> widths(kResultsColumns.size(), 0);
  for (const auto& cells : table)
    for (std::size_t i = 0; i < cells.size(); ++i) widths[i] = std::max(widths[i], display_width(cells[i]));

  std::ostringstream out;
  if (!title.empty()) out << title << '\n';
  bool any_na = false;
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t i = 0; i < table[r].size(); ++i) {
      const auto& cell = table[r][i];
      const std::string pad(widths[i] - display_width(cell), ' ');
      // Model name left-aligned, numbers right-aligned.
      if (i == 0) out << cell << pad;
      else out << "  " << pad << cell;
      any_na = any_na || cell == "n/a";
    }
    out << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : widths) total += w + 2;
      out << std::string(total - 2, '-') << '\n';
    }
  }
  if (any_na)
    out << "n/a: undefined in every shuffle (zero denominator). Averages skip undefined "
           "shuffles.\n";
  return out.str();
}

std::string render_accuracy_svg(const std::vector<ResultRow>& rows, std::string_view title) {
  const int bar_h = 22, gap = 8, left = 90, chart_w = 400, top = 40;
  const int height = top + static_cast<int>(rows.size()) * (bar_h + gap) + 20;
  std::ostringstream out;
  out << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << left + chart_w + 80
      << R"(" height=")" << height << R"(" font-family="sans-serif" font-size="12">)" << '\n';
  out << R"(  <text x="10" y="22" font-size="14">)" << xml_escape(title) << "</text>\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const int y = top + static_cast<int>(i) * (bar_h + gap);
    const double acc = r.accuracy.value_or(0.0);
    const int w = static_cast<int>(std::lround(acc * chart_w));
    out << R"(  <text x="10" y=")" << y + 15 << R"(">)" << xml_escape(r.model) << "</text>\n";
    out << R"(  <rect x=")" << left << R"(" y=")" << y << R"(" width=")" << w << R"(" height=")"
        << bar_h << R"(" fill="#4a7ab5"/>)" << '\n';
    out << R"(  <text x=")" << left + w + 6 << R"(" y=")" << y + 15 << R"(">)"
        << xml_escape(percent(r.accuracy, r.failed)) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace convser
