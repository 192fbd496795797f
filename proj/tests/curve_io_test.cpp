#include <gtest/gtest.h>

#include <clocale>
#include <sstream>

#include "ebcap/curve_io.hpp"

namespace ebcap {
namespace {

YieldCurve sample(const std::string& method, double scale) {
  YieldCurve c;
  c.method = method;
  c.metadata["n"] = "4";
  for (double p : Grid{0.5, 1.0, 0.25}.points()) c.points.push_back({p, scale * p / 3.0, {}});
  return c;
}

TEST(FormatNumber, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1.5e-7), "1.5e-07");
}

TEST(FormatNumber, IgnoresGlobalLocale) {
  const char* prev = std::setlocale(LC_ALL, nullptr);
  const std::string saved = prev ? prev : "C";
  if (std::setlocale(LC_ALL, "de_DE.UTF-8")) {
    EXPECT_EQ(format_number(0.5), "0.5");
  }
  std::setlocale(LC_ALL, saved.c_str());
}

TEST(Csv, SingleCurveHeaderAndRows) {
  const auto text = to_csv({sample("cat4", 1.0)});
  EXPECT_EQ(text, "p,yield\n0.5,0.166666666667\n0.75,0.25\n1,0.333333333333\n");
}

TEST(Csv, WideRoundTrip) {
  const std::vector<YieldCurve> curves{sample("a", 1.0), sample("b", 0.5)};
  const auto text = to_csv(curves);
  EXPECT_EQ(text.substr(0, text.find('\n')), "p,a,b");
  std::istringstream in(text);
  const auto back = read_csv(in, "unused");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].method, "b");
  for (std::size_t i = 0; i < back[0].points.size(); ++i) {
    EXPECT_NEAR(back[0].points[i].yield, curves[0].points[i].yield, 1e-12);
  }
}

TEST(Csv, ReadSingleUsesFallbackName) {
  std::istringstream in("p,yield\r\n0.5,0.1\r\n1,0.2\r\n");
  const auto c = read_csv(in, "file.csv");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].method, "file.csv");
  EXPECT_EQ(c[0].points.size(), 2u);
}

TEST(Csv, ReadErrors) {
  std::istringstream bad_header("q,yield\n");
  EXPECT_THROW(read_csv(bad_header, "x"), std::invalid_argument);
  std::istringstream bad_cell("p,yield\n0.5,abc\n");
  EXPECT_THROW(read_csv(bad_cell, "x"), std::invalid_argument);
  std::istringstream short_row("p,yield\n0.5\n");
  EXPECT_THROW(read_csv(short_row, "x"), std::invalid_argument);
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty, "x"), std::invalid_argument);
}

TEST(Json, RoundTripWithSchema) {
  auto env = sample("a", 1.0);
  env.points[1].winner = "cat4";
  const auto doc = to_json({env});
  EXPECT_EQ(doc["schema"], kJsonSchema);
  const auto back = from_json(doc);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].metadata.at("n"), "4");
  EXPECT_EQ(back[0].points[1].winner, "cat4");
  EXPECT_EQ(back[0].points[2].yield, env.points[2].yield);

  auto wrong = doc;
  wrong["schema"] = "other/9";
  EXPECT_THROW(from_json(wrong), std::invalid_argument);
}

}  // namespace
}  // namespace ebcap
