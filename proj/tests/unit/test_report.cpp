#include <gtest/gtest.h>

#include <clocale>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stack>

#include <nlohmann/json.hpp>

#include "ntklab/report.hpp"

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Balanced open/close tags, ignoring the prolog, comments and self-closing tags.
bool tags_balanced(const std::string& xml) {
  std::stack<std::string> open;
  std::size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    const std::size_t end = xml.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = xml.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag.rfind("!--", 0) == 0 || tag.back() == '/') continue;
    if (tag[0] == '/') {
      if (open.empty() || open.top() != tag.substr(1)) return false;
      open.pop();
      continue;
    }
    open.push(tag.substr(0, tag.find(' ')));
  }
  return open.empty();
}

ntk::Report sample_report() {
  ntk::Report r;
  r.name = "sample";
  r.table.header = {"m", "rate", "note"};
  r.table.add_row({"16", ntk::format_number(0.125), "a,b"});
  r.table.add_row({"64", ntk::format_number(1.0 / 3.0), "say \"hi\""});
  r.charts.push_back({{"rate vs m", "m", "rate", true, false},
                      {{"trial <1>", {16, 64, 256}, {0.5, 0.25, 0.125}}}});
  return r;
}

TEST(Format, ShortestRoundTripWithDot) {
  EXPECT_EQ(ntk::format_number(0.1), "0.1");
  EXPECT_EQ(ntk::format_number(-2.5e-20), "-2.5e-20");
  EXPECT_EQ(std::stod(ntk::format_number(1.0 / 3.0)), 1.0 / 3.0);
  std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
  EXPECT_EQ(ntk::format_number(1.5), "1.5");
  std::setlocale(LC_NUMERIC, "C");
}

TEST(Csv, EmptyTableIsHeaderOnly) {
  ntk::Table t;
  t.header = {"a", "b"};
  EXPECT_EQ(ntk::to_csv(t), "a,b\n");
  EXPECT_THROW(t.add_row({"1"}), std::invalid_argument);
}

TEST(Csv, QuotesSpecialCells) {
  const auto csv = ntk::to_csv(sample_report().table, {"seed 3"});
  EXPECT_EQ(csv, "# seed 3\nm,rate,note\n16,0.125,\"a,b\"\n64,0.3333333333333333,\"say \"\"hi\"\"\"\n");
}

TEST(Emit, DeterministicBytesAndEmbeddedProvenance) {
  const auto base = std::filesystem::temp_directory_path() / "ntklab_report_test";
  std::filesystem::remove_all(base);
  const nlohmann::json cfg = {{"experiment", "demo"}, {"n", 8}};
  const auto a = ntk::emit_report(base / "a", sample_report(), cfg, 42);
  const auto b = ntk::emit_report(base / "b", sample_report(), cfg, 42);
  ASSERT_EQ(a.size(), 2u);
  ASSERT_EQ(b.size(), 2u);
  const std::string hash = ntk::config_hash(cfg);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto body = slurp(a[k]);
    EXPECT_EQ(body, slurp(b[k]));
    EXPECT_NE(body.find(hash), std::string::npos);
    EXPECT_NE(body.find("seed 42"), std::string::npos);
  }
  EXPECT_TRUE(tags_balanced(slurp(a[1])));
  EXPECT_NE(slurp(a[1]).find("trial &lt;1&gt;"), std::string::npos);
  std::filesystem::remove_all(base);
}

TEST(Svg, WellFormedEvenWithDegenerateData) {
  EXPECT_TRUE(tags_balanced(ntk::svg_line_chart({"t", "x", "y"}, {})));
  EXPECT_TRUE(tags_balanced(ntk::svg_line_chart({"t", "x", "y", true, true}, {{"s", {1, 1}, {0, 0}}})));
  EXPECT_TRUE(tags_balanced(ntk::svg_line_chart({"t", "x", "y"}, {{"s", {1, 2}, {3, 3}}, {"u", {0, 5}, {1, 2}}})));
  EXPECT_THROW(ntk::svg_line_chart({"t", "x", "y"}, {{"s", {1}, {}}}), std::invalid_argument);
}

TEST(ConfigHash, SensitiveToContent) {
  EXPECT_EQ(ntk::config_hash({{"a", 1}}), ntk::config_hash({{"a", 1}}));
  EXPECT_NE(ntk::config_hash({{"a", 1}}), ntk::config_hash({{"a", 2}}));
  EXPECT_EQ(ntk::config_hash({{"a", 1}}).size(), 16u);
}

}  // namespace
