#include <catch2/catch_amalgamated.hpp>

#include <stancekit/svg.hpp>

using namespace stancekit;

namespace {

Quarter q(int idx) { return Quarter::from_index(8056 + idx); }

TimeSeries mk(std::initializer_list<std::optional<double>> vals) {
  TimeSeries s;
  int i = 0;
  for (const auto& v : vals) s.push(q(i++), v);
  return s;
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("gaps split a line into separate segments") {
  auto s = mk({1.0, 2.0, std::nullopt, 3.0, 4.0});
  const std::string svg = svg_line_chart({{"overall", s}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(count_of(svg, "<polyline") == 2);
  CHECK(count_of(svg, "<circle") == 0);
  CHECK(svg.find("overall") != std::string::npos);
  CHECK(svg.find("2014Q1") != std::string::npos);
  CHECK(svg.find("2015Q1") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("an isolated point is drawn as a dot") {
  auto s = mk({std::nullopt, 1.0, std::nullopt, 2.0, 3.0});
  const std::string svg = svg_line_chart({{"sparse", s}});
  CHECK(count_of(svg, "<polyline") == 1);
  CHECK(count_of(svg, "<circle") == 1);
}

TEST_CASE("multiple series get distinct colors and labels") {
  auto a = mk({1.0, 2.0, 3.0});
  auto b = mk({3.0, 2.0, 1.0});
  const std::string svg = svg_line_chart({{"first", a}, {"second", b}});
  CHECK(count_of(svg, "<polyline") == 2);
  CHECK(svg.find("first") != std::string::npos);
  CHECK(svg.find("second") != std::string::npos);

  const auto p1 = svg.find("stroke=\"#");
  const auto p2 = svg.find("stroke=\"#", p1 + 1);
  REQUIRE(p2 != std::string::npos);
  CHECK(svg.substr(p1, 16) != svg.substr(p2, 16));
}

TEST_CASE("line chart rejects empty input") {
  CHECK_THROWS_AS(svg_line_chart({}), ContractViolation);
  CHECK_THROWS_AS(svg_line_chart({{"gaps", mk({std::nullopt, std::nullopt})}}),
                  ContractViolation);
}

TEST_CASE("constant series still renders") {
  const std::string svg = svg_line_chart({{"flat", mk({2.0, 2.0, 2.0})}});
  CHECK(count_of(svg, "<polyline") == 1);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(svg.find("inf") == std::string::npos);
}

TEST_CASE("labels are xml-escaped") {
  auto s = mk({1.0, 2.0});
  const std::string svg = svg_line_chart({{"a<b>&\"c\"", s}});
  CHECK(svg.find("a&lt;b&gt;&amp;&quot;c&quot;") != std::string::npos);
  CHECK(svg.find("a<b>") == std::string::npos);
}

TEST_CASE("stacked bars draw one rect per positive share") {
  std::vector<Quarter> quarters{q(0), q(1), q(2)};
  std::vector<std::pair<std::string, std::vector<double>>> shares{
      {"left", {0.5, 0.25, 0.0}},
      {"right", {0.5, 0.75, 1.0}},
  };
  const std::string svg = svg_stacked_bars(quarters, shares);
  // background rect + 5 positive shares
  CHECK(count_of(svg, "<rect") == 6);
  CHECK(svg.find("left") != std::string::npos);
  CHECK(svg.find("2014Q1") != std::string::npos);
  CHECK(svg.find("2014Q3") != std::string::npos);

  CHECK_THROWS_AS(svg_stacked_bars({}, shares), ContractViolation);
  CHECK_THROWS_AS(svg_stacked_bars(quarters, {{"bad", {1.0}}}), ContractViolation);
}
