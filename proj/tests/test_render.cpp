#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <regex>

#include "fixtures.hpp"
#include "overwatch/render.hpp"

using namespace overwatch;
using namespace overwatch::render;

namespace {

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("heatmap: one rect per cell, crosses on no-go cells, fort boxes") {
  auto grid = fixture::flat_grid(3, 4, 0.5, 1.0);
  grid.stats[5].nogo = true;
  grid.stats[6].nogo = true;
  std::string svg = heatmap_svg(grid, Layer::Traversability, {{"f1", {0, 3}}});
  CHECK(svg.rfind("<svg ", 0) == 0);
  CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
  CHECK(count(svg, "fill=\"rgb(") == 12);
  CHECK(count(svg, "rgb(128,128,128)") == 12);
  CHECK(count(svg, "<line ") == 4);
  CHECK(count(svg, ">f1</text>") == 1);
  CHECK(count(heatmap_svg(grid, Layer::LineOfSight, {}), "rgb(255,255,255)") == 12);
}

TEST_CASE("paths: polyline through cell centers, repeats collapsed") {
  auto grid = fixture::flat_grid(2, 2);
  Style st;
  st.cell_px = 10;
  std::string svg = paths_svg(grid, Layer::Traversability, {}, {{"team 1", "#ff0000", {{0, 0}, {0, 1}, {0, 1}, {1, 1}}}}, st);
  CHECK(svg.find("points=\"5.0,5.0 15.0,5.0 15.0,15.0\"") != std::string::npos);
  CHECK(svg.find(">team 1</text>") != std::string::npos);
  CHECK(svg == paths_svg(grid, Layer::Traversability, {}, {{"team 1", "#ff0000", {{0, 0}, {0, 1}, {0, 1}, {1, 1}}}}, st));
}

TEST_CASE("trajectory: one polyline per robot in world-to-pixel scale") {
  auto grid = fixture::flat_grid(1, 2);  // 2 m cells
  plan::Plan p;
  p.cells = {{0, 0}, {0, 1}};
  p.beliefs = {{0.5, 0.0}, {0.6, 0.0}};
  std::vector<sim::TeamPlan> plans{sim::team_plan(p, grid, 4)};
  auto log = sim::run_sim(plans, grid, 1.0, 0.5);
  Style st;
  st.cell_px = 10;
  std::string svg = trajectory_svg(grid, {{"f", {0, 1}}}, log, st);
  CHECK(count(svg, "<polyline") == 2);
  CHECK(count(svg, "stroke-dasharray") == 1);
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex("points=\"([^\"]*)\"")));
  CHECK(m[1].str().rfind("5.00,5.00", 0) == 0);
  CHECK(m[1].str().substr(m[1].str().size() - 10) == "15.00,5.00");
}

TEST_CASE("labels are escaped") {
  auto grid = fixture::flat_grid(1, 1);
  std::string svg = paths_svg(grid, Layer::Traversability, {{"a<b", {0, 0}}}, {{"x & y", "red", {{0, 0}}}});
  CHECK(svg.find("a&lt;b") != std::string::npos);
  CHECK(svg.find("x &amp; y") != std::string::npos);
}
