#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "overwatch/error.hpp"
#include "overwatch/terrain.hpp"

using namespace overwatch;
using namespace overwatch::terrain;

namespace {

Heightmap parse(const std::string& text, double res = 1.0) {
  return load_heightmap(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()), res);
}

Heightmap uniform(int w, int h, std::uint16_t k) {
  Heightmap m;
  m.width = w;
  m.height = h;
  m.samples.assign(static_cast<std::size_t>(w * h), k);
  return m;
}

Heightmap random_map(std::mt19937_64& rng, int w, int h) {
  Heightmap m = uniform(w, h, 0);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& s : m.samples) s = static_cast<std::uint16_t>(d(rng));
  return m;
}

}  // namespace

TEST_CASE("load_heightmap: minimal P2") {
  Heightmap m = parse("P2\n2 2\n255\n0 255 255 0\n");
  CHECK(m.width == 2);
  CHECK(m.height == 2);
  CHECK(m.samples == std::vector<std::uint16_t>{0, 255, 255, 0});
}

TEST_CASE("load_heightmap: comments in the header") {
  Heightmap m = parse("P2\n# made by hand\n3 1 # width height\n255\n1 2 3\n");
  CHECK(m.samples == std::vector<std::uint16_t>{1, 2, 3});
}

TEST_CASE("load_heightmap: P5 twin of a P2 map is identical") {
  std::mt19937_64 rng(5);
  Heightmap m = random_map(rng, 7, 5);
  CHECK(parse(encode_pgm(m, true)).samples == m.samples);
  CHECK(parse(encode_pgm(m, false)).samples == m.samples);

  Heightmap wide = uniform(3, 2, 0);
  wide.maxval = 65535;
  wide.samples = {0, 1, 256, 65535, 4660, 300};
  Heightmap back = parse(encode_pgm(wide, true));
  CHECK(back.maxval == 65535);
  CHECK(back.samples == wide.samples);
}

TEST_CASE("load_heightmap: 16-bit samples are big-endian") {
  std::string bytes = "P5 1 1 65535\n";
  bytes += '\x12';
  bytes += '\x34';
  CHECK(parse(bytes).samples.front() == 0x1234);
}

TEST_CASE("load_heightmap: rejects malformed input") {
  CHECK_THROWS_AS(parse("P3\n1 1\n255\n0\n"), ValidationError);
  CHECK_THROWS_AS(parse("P2\n2 2\n255\n0 1 2\n"), ValidationError);
  CHECK_THROWS_AS(parse("P2\n1 1\n100\n0\n"), ValidationError);
  CHECK_THROWS_AS(parse("P2\n1 1\n255\n300\n"), ValidationError);
  CHECK_THROWS_AS(parse("P5\n2 2\n255\nab"), ValidationError);
  CHECK_THROWS_AS(load_heightmap_file("/nonexistent/map.pgm", 1.0), IoError);
}

TEST_CASE("discretize: uniform map") {
  Heightmap m = uniform(12, 8, 51);
  CellGrid g = discretize(m, {.cell_size = 4, .sensing_radius = 3});
  CHECK(g.rows == 2);
  CHECK(g.cols == 3);
  for (const auto& s : g.stats) {
    CHECK(s.g_mean == doctest::Approx(1.0 - 51.0 / 255.0).epsilon(1e-12));
    CHECK(s.g_var == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.los_mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.los_var == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("discretize: checkerboard") {
  Heightmap m = uniform(8, 8, 0);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) m.samples[static_cast<std::size_t>(r * 8 + c)] = ((r + c) % 2) ? 255 : 0;
  CellGrid g = discretize(m, {.cell_size = 2, .sensing_radius = 1});
  for (const auto& s : g.stats) {
    CHECK(s.g_mean == doctest::Approx(0.5));
    CHECK(s.g_var == doctest::Approx(0.25 / 4));
    CHECK(s.los_mean == doctest::Approx(0.0));
  }
}

TEST_CASE("discretize: nogo flag and argument checks") {
  Heightmap m = uniform(8, 4, 0);
  for (int r = 0; r < 4; ++r)
    for (int c = 4; c < 8; ++c) m.samples[static_cast<std::size_t>(r * 8 + c)] = 230;
  CellGrid g = discretize(m, {.cell_size = 4, .sensing_radius = 2, .g_min = 0.3});
  CHECK_FALSE(g.at({0, 0}).nogo);
  CHECK(g.at({0, 1}).nogo);
  CHECK_FALSE(g.traversable({0, 1}));
  CHECK_THROWS_AS(discretize(m, {.cell_size = 5, .sensing_radius = 3}), ValidationError);
  CHECK_THROWS_AS(discretize(m, {.cell_size = 1, .sensing_radius = 1}), ValidationError);
  CHECK_THROWS_AS(discretize(m, {.cell_size = 4, .sensing_radius = 1}), ValidationError);
}

TEST_CASE("discretize: texture hook is off by default") {
  std::mt19937_64 rng(1);
  Heightmap m = random_map(rng, 8, 8);
  DiscretizeOptions plain{.cell_size = 4, .sensing_radius = 2};
  DiscretizeOptions hooked = plain;
  hooked.texture_cost = [](int, int) { return 0.1; };
  CellGrid a = discretize(m, plain);
  CellGrid b = discretize(m, hooked);
  CHECK(b.at({0, 0}).g_mean <= a.at({0, 0}).g_mean);
}

TEST_CASE("discretize properties on random maps") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    Heightmap m = random_map(rng, 16, 12);
    DiscretizeOptions opt{.cell_size = 4, .sensing_radius = 3, .g_min = 0.4};
    CellGrid g = discretize(m, opt);
    for (const auto& s : g.stats) {
      CHECK(s.g_mean >= 0.0);
      CHECK(s.g_mean <= 1.0);
      CHECK(s.los_mean >= 0.0);
      CHECK(s.los_mean <= 1.0);
      CHECK(s.g_var >= 0.0);
      CHECK(s.los_var >= 0.0);
      CHECK(s.nogo == (s.g_mean < opt.g_min));
    }
    CHECK(to_csv(discretize(m, opt)) == to_csv(g));

    // raising a pixel never increases its cell's traversability
    std::uniform_int_distribution<int> pick(0, 16 * 12 - 1);
    const int p = pick(rng);
    Heightmap brighter = m;
    brighter.samples[static_cast<std::size_t>(p)] = 255;
    Cell c{(p / 16) / 4, (p % 16) / 4};
    CHECK(discretize(brighter, opt).at(c).g_mean <= g.at(c).g_mean);
  }
}

TEST_CASE("to_csv header and row count") {
  CellGrid g = discretize(uniform(8, 8, 0), {.cell_size = 4, .sensing_radius = 2});
  std::string csv = to_csv(g);
  CHECK(csv.rfind("row,col,g_mean,g_var,los_mean,los_var,nogo\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
