#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "convser/errors.hpp"
#include "convser/results_table.hpp"
#include "test_support.hpp"

using namespace convser;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::filesystem::path kFixtures = CONVSER_FIXTURE_DIR;

}  // namespace

class FixtureTable : public ::testing::TestWithParam<const char*> {};

TEST_P(FixtureTable, ParseSerializeIsByteIdentical) {
  const std::string text = slurp(kFixtures / GetParam());
  const auto rows = parse_results_csv(text);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(format_results_csv(rows), text);
  testing_support::TempDir dir;
  write_results_csv(rows, dir / "out.csv");
  EXPECT_EQ(slurp(dir / "out.csv"), text);
}

TEST_P(FixtureTable, GridOrder) {
  const auto rows = read_results_csv(kFixtures / GetParam());
  const int filters[] = {16, 32, 16, 32, 16, 32, 16, 32};
  const int kernels[] = {5, 5, 20, 20, 5, 5, 20, 20};
  const int units[] = {20, 20, 20, 20, 40, 40, 40, 40};
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(rows[i].model.substr(0, 2), "M" + std::to_string(i + 1));
    EXPECT_EQ(rows[i].filters, filters[i]);
    EXPECT_EQ(rows[i].kernel_size, kernels[i]);
    EXPECT_EQ(rows[i].lstm_units, units[i]);
  }
}

INSTANTIATE_TEST_SUITE_P(Tables, FixtureTable, ::testing::Values("published_13.csv", "published_40.csv"));

TEST(ResultsTable, BestStaticCellIsHarmonicallyConsistent) {
  const auto rows = read_results_csv(kFixtures / "published_40.csv");
  const auto& m8 = rows[7];
  EXPECT_EQ(m8.model, "M8-40");
  EXPECT_NEAR(*m8.accuracy, 0.9891, 1e-12);
  const auto gap = harmonic_mean_gap(m8);
  ASSERT_TRUE(gap);
  EXPECT_LE(*gap, 0.005);
}

TEST(ResultsTable, HeaderMismatchThrows) {
  EXPECT_THROW(parse_results_csv("Model,Filters\nM1-13,16\n"), FormatError);
  EXPECT_THROW(parse_results_csv(""), FormatError);
}

TEST(ResultsTable, UndefinedAndFailedCells) {
  std::vector<ResultRow> rows(2);
  rows[0] = {"M1-13", 16, 5, 20, 0.5, std::nullopt, 0.0, std::nullopt, false};
  rows[1] = {"M2-13", 32, 5, 20, {}, {}, {}, {}, true};
  const std::string csv = format_results_csv(rows);
  EXPECT_NE(csv.find("M1-13,16,5,20,50.00%,n/a,0.00%,n/a\n"), std::string::npos);
  EXPECT_NE(csv.find("M2-13,32,5,20,failed,failed,failed,failed\n"), std::string::npos);
  const auto back = parse_results_csv(csv);
  EXPECT_FALSE(back[0].precision);
  EXPECT_TRUE(back[1].failed);
  EXPECT_FALSE(harmonic_mean_gap(back[0]));
  const std::string text = render_text_table(back, "demo");
  EXPECT_NE(text.find("demo"), std::string::npos);
  EXPECT_NE(text.find("n/a"), std::string::npos);
}

TEST(ResultsTable, SvgHasOneBarPerRow) {
  const auto rows = read_results_csv(kFixtures / "published_40.csv");
  const std::string svg = render_accuracy_svg(rows, "static 40");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t bars = 0;
  for (std::size_t p = svg.find("<rect"); p != std::string::npos; p = svg.find("<rect", p + 1)) ++bars;
  EXPECT_GE(bars, 8u);
  EXPECT_NE(svg.find("98.91%"), std::string::npos);
}
