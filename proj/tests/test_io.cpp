#include <gtest/gtest.h>

#include <sstream>

#include "teichtrop/io.hpp"

using namespace teichtrop;

TEST(Csv, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(io::csv_field("a1b1"), "a1b1");
  EXPECT_EQ(io::csv_field("x,y"), "\"x,y\"");
  EXPECT_EQ(io::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(io::csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, WriterOutputParsesBack) {
  std::ostringstream s;
  io::CsvWriter csv(s);
  csv.row({"name", "value"});
  csv.field("a,b").field(0.1).end_row();
  csv.field("q\"uote").field(-3).end_row();
  const auto rows = io::parse_csv(s.str());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "a,b");
  EXPECT_EQ(std::stod(rows[1][1]), 0.1);
  EXPECT_EQ(rows[2][0], "q\"uote");
  EXPECT_EQ(rows[2][1], "-3");
}

TEST(Csv, DoublesRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23}) EXPECT_EQ(std::stod(io::format_double(x)), x);
}

TEST(Config, ParsesKeysValuesAndComments) {
  std::istringstream in("# comment\nlengths = 1 2 3  # trailing\nname = demo\npoint = 1 2 3 4 5 6\npoint = 6 5 4 3 2 1\n");
  const io::Config c = io::Config::parse(in);
  EXPECT_EQ(c.get_doubles("lengths", {}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(c.get("name", ""), "demo");
  EXPECT_EQ(c.all("point").size(), 2u);
  EXPECT_THROW(c.get("point", ""), Error);
  EXPECT_EQ(c.get_double("missing", 4.5), 4.5);
}

TEST(Config, RejectsMalformedValues) {
  std::istringstream bad_line("just words\n");
  EXPECT_THROW(io::Config::parse(bad_line), Error);
  std::istringstream bad_number("x = 1.5q\ny = 2.5\nflag = maybe\n");
  const io::Config c = io::Config::parse(bad_number);
  EXPECT_THROW(c.get_double("x", 0), Error);
  EXPECT_THROW(c.get_long("y", 0), Error);
  EXPECT_THROW(c.get_bool("flag", false), Error);
}

TEST(Svg, ProducesAWellFormedDocument) {
  io::SvgDisk svg(200, "a < b");
  svg.point(0.5, 0.5, "red");
  svg.polyline({{0, 0}, {0.5, 0.5}}, "blue");
  const std::string s = svg.str();
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("a &lt; b"), std::string::npos);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
}
