#include <sstream>

#include "gtest/gtest.h"
#include "stratsel/error.hpp"
#include "stratsel/frame.hpp"
#include "stratsel/table.hpp"

namespace stratsel {
namespace {

Table parse(const std::string& text, CsvOptions options = {}) {
  std::istringstream in(text);
  return read_csv(in, options);
}

TEST(CsvTest, ReadsHeaderQuotesAndMissingTokens) {
  const Table t = parse("a,b,\"c,d\"\n1,NA,\"x \"\"y\"\"\"\n2,,z\n");
  ASSERT_EQ(t.cols(), 3u);
  ASSERT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.columns()[2].name, "c,d");
  EXPECT_EQ(t.column("b").cells[0], "");
  EXPECT_EQ(t.column("b").cells[1], "");
  EXPECT_EQ(t.column("c,d").cells[0], "x \"y\"");
}

TEST(CsvTest, CustomSentinelAndCrLf) {
  CsvOptions options;
  options.missing_tokens = {"?"};
  const Table t = parse("a,b\r\n1,?\r\nNA,2\r\n", options);
  EXPECT_EQ(t.column("b").cells[0], "");
  EXPECT_EQ(t.column("a").cells[1], "NA");
}

TEST(CsvTest, RaggedRowIsRejected) {
  EXPECT_THROW(parse("a,b\n1\n"), Error);
}

TEST(CsvTest, WriteThenReadPreservesCells) {
  const Table t = parse("name,v\n\"a,b\",1.5\nplain,-2\n");
  std::ostringstream out;
  write_csv(out, t);
  const Table back = parse(out.str());
  EXPECT_EQ(back.columns()[0].cells, t.columns()[0].cells);
  EXPECT_EQ(back.columns()[1].cells, t.columns()[1].cells);
}

TEST(NumberTest, ParseAndShortestFormatRoundTrip) {
  EXPECT_EQ(parse_number("1.25"), 1.25);
  EXPECT_EQ(parse_number(" -3e2 "), -300.0);
  EXPECT_FALSE(parse_number("abc").has_value());
  EXPECT_FALSE(parse_number("").has_value());
  EXPECT_FALSE(parse_number("1.0x").has_value());
  EXPECT_FALSE(parse_number("inf").has_value());
  const double v = 0.1 + 0.2;
  EXPECT_EQ(parse_number(format_number(v)), v);
}

TEST(BuildFrameTest, PackagesRequestedColumnsInOrder) {
  const Table t = parse("x1,y,x2\n1,10,4\n2,20,5\n3,30,6\n");
  const PopulationFrame f = build_frame(t, "y", {"x2", "x1"});
  EXPECT_EQ(f.rows(), 3u);
  EXPECT_EQ(f.cols(), 2u);
  EXPECT_EQ(f.covariate_names(), (std::vector<std::string>{"x2", "x1"}));
  EXPECT_EQ(f.covariate(0, 0), 4.0);
  EXPECT_EQ(f.covariate(2, 1), 3.0);
  EXPECT_EQ(f.outcome()[1], 20.0);
}

TEST(BuildFrameTest, Errors) {
  const Table t = parse("x1,label,y\n1,a,10\n2,b,20\n");
  try {
    build_frame(t, "missing", {"x1"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownColumn);
  }
  try {
    build_frame(t, "y", {"label"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonNumericColumn);
  }
  try {
    build_frame(parse("x1,y\n"), "y", {"x1"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTable);
  }
}

TEST(PreprocessTest, OneHotKeepsAllLevels) {
  const Table t = parse("season,v\n1,0.5\n2,1\n3,2\n4,3\n2,4\n");
  const Table out = preprocess(t, {"season"}, true);
  ASSERT_EQ(out.cols(), 5u);
  EXPECT_EQ(out.columns()[0].name, "season=1");
  EXPECT_EQ(out.columns()[3].name, "season=4");
  EXPECT_EQ(out.column("season=2").cells, (std::vector<std::string>{"0", "1", "0", "0", "1"}));
  EXPECT_EQ(expand_encoded_names(out, {"season", "v"}, {"season"}),
            (std::vector<std::string>{"season=1", "season=2", "season=3", "season=4", "v"}));
}

TEST(PreprocessTest, IdentityWithoutCategoricalsOrMissing) {
  const Table t = parse("a,b\n1,2\n3,4\n");
  const Table out = preprocess(t, {}, true);
  ASSERT_EQ(out.cols(), t.cols());
  for (std::size_t j = 0; j < t.cols(); ++j) EXPECT_EQ(out.columns()[j].cells, t.columns()[j].cells);
  // Idempotent on already-encoded complete tables.
  const Table encoded = preprocess(parse("c,v\nx,1\ny,2\n"), {"c"}, true);
  const Table again = preprocess(encoded, {}, true);
  for (std::size_t j = 0; j < encoded.cols(); ++j)
    EXPECT_EQ(again.columns()[j].cells, encoded.columns()[j].cells);
}

TEST(PreprocessTest, DropsRowsWithMissingCells) {
  std::string text = "a,b\n";
  for (int i = 0; i < 10; ++i) text += (i == 3 ? "" : std::to_string(i)) + "," + (i == 7 ? "NA" : "1") + "\n";
  const Table t = parse(text);
  EXPECT_EQ(preprocess(t, {}, true).rows(), 8u);
  EXPECT_EQ(preprocess(t, {}, false).rows(), 10u);
}

TEST(FilterTest, NumericAndStringComparisons) {
  const Table t = parse("year,city\n2014,a\n2015,b\n2014.0,c\n,d\n");
  EXPECT_EQ(evaluate_filter(t, "year == 2014"), (std::vector<bool>{true, false, true, false}));
  EXPECT_EQ(evaluate_filter(t, "year>=2015"), (std::vector<bool>{false, true, false, false}));
  EXPECT_EQ(evaluate_filter(t, "city != 'b'"), (std::vector<bool>{true, false, true, true}));
  EXPECT_THROW(evaluate_filter(t, "year 2014"), Error);
  EXPECT_THROW(evaluate_filter(t, "nope == 1"), Error);
}

}  // namespace
}  // namespace stratsel
