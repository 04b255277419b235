#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "fixtures.hpp"
#include "overwatch/error.hpp"
#include "overwatch/sim.hpp"

using namespace overwatch;
using namespace overwatch::sim;
using terrain::Cell;

namespace {

plan::Plan straight(std::vector<Cell> cells) {
  plan::Plan p;
  p.cells = std::move(cells);
  for (std::size_t k = 0; k < p.cells.size(); ++k) p.beliefs.push_back({0.5 + 0.01 * static_cast<double>(k), 0.001});
  return p;
}

plan::Plan random_walk(std::mt19937_64& rng, const terrain::CellGrid& grid, int steps) {
  std::uniform_int_distribution<int> d(-1, 1), r(0, grid.rows - 1), c(0, grid.cols - 1);
  std::vector<Cell> cells{{r(rng), c(rng)}};
  while (static_cast<int>(cells.size()) < steps) {
    Cell n{cells.back().row + d(rng), cells.back().col + d(rng)};
    if (grid.in_bounds(n)) cells.push_back(n);
  }
  return straight(cells);
}

double polyline(const TeamPlan& t) {
  double total = 0.0;
  for (std::size_t k = 1; k < t.points.size(); ++k)
    total += std::hypot(t.points[k][0] - t.points[k - 1][0], t.points[k][1] - t.points[k - 1][1]);
  return total;
}

}  // namespace

TEST_CASE("one step: bounder arrives at 2 s, overwatcher at 4 s") {
  auto grid = fixture::flat_grid(1, 2);  // 2 m cells
  std::vector<TeamPlan> plans{team_plan(straight({{0, 0}, {0, 1}}), grid, 1)};
  SimLog log = run_sim(plans, grid, 1.0, 0.1);
  double bounder_arrival = -1, overwatcher_arrival = -1;
  for (const auto& r : log.records) {
    if (r.robot == Robot::Bounder && r.path_index == 1 && bounder_arrival < 0) bounder_arrival = r.t;
    if (r.robot == Robot::Overwatcher && r.path_index == 1 && overwatcher_arrival < 0) overwatcher_arrival = r.t;
  }
  CHECK(bounder_arrival == doctest::Approx(2.0));
  CHECK(overwatcher_arrival == doctest::Approx(4.0));
  const auto& last = log.records.back();
  CHECK(last.x == doctest::Approx(3.0));
  CHECK(last.y == doctest::Approx(1.0));
  REQUIRE(log.teams.size() == 1);
  CHECK(log.teams[0].completed);
  CHECK(log.teams[0].finish_time == doctest::Approx(4.0));
  CHECK(to_csv(log).rfind("t,team,robot,x,y,path_index,trust_mean,trust_var\n0.000,1,bounder,1.000000,1.000000,0,", 0) == 0);
}

TEST_CASE("trust steps on overwatcher arrival and follows the plan beliefs") {
  auto grid = fixture::flat_grid(3, 3);
  plan::Plan p = straight({{0, 0}, {1, 1}, {1, 1}, {2, 1}});
  std::vector<TeamPlan> plans{team_plan(p, grid, 7)};
  SimLog log = run_sim(plans, grid, 1.5, 0.1);
  std::vector<trust::TrustBelief> series;
  int last_index = -1;
  for (const auto& r : log.records)
    if (r.robot == Robot::Overwatcher && r.path_index != last_index) {
      last_index = r.path_index;
      series.push_back({r.trust_mean, r.trust_var});
    }
  CHECK(series == p.beliefs);
}

TEST_CASE("empty and single-point plans finish at once") {
  auto grid = fixture::flat_grid(2, 2);
  std::vector<TeamPlan> plans{team_plan(straight({{1, 1}}), grid, 2), TeamPlan{3, {}, {}}};
  SimLog log = run_sim(plans, grid, 1.0, 0.1);
  CHECK(log.records.size() == 2);
  CHECK(log.teams[0].completed);
  CHECK_FALSE(log.teams[1].completed);
  CHECK_THROWS_AS(run_sim(plans, grid, 0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(run_sim(plans, grid, 1.0, -0.1), ValidationError);
}

TEST_CASE("random plans: adjacency, distance, timing and determinism") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> speed(0.3, 3.0), dt(0.02, 0.5);
  for (int trial = 0; trial < 40; ++trial) {
    auto grid = fixture::flat_grid(6, 6);
    std::vector<TeamPlan> plans{team_plan(random_walk(rng, grid, 12), grid, 2),
                                team_plan(random_walk(rng, grid, 7), grid, 1)};
    const double v = speed(rng), h = dt(rng);
    SimLog log = run_sim(plans, grid, v, h);
    CHECK(max_team_separation(log, grid) <= 1);
    CHECK(to_csv(log) == to_csv(run_sim(plans, grid, v, h)));

    std::map<std::pair<int, int>, std::vector<const Record*>> by_robot;
    for (const auto& r : log.records) by_robot[{r.team, static_cast<int>(r.robot)}].push_back(&r);
    for (const auto& tp : plans) {
      for (int robot = 0; robot < 2; ++robot) {
        const auto& recs = by_robot[{tp.team, robot}];
        REQUIRE_FALSE(recs.empty());
        double dist = 0.0;
        for (std::size_t k = 1; k < recs.size(); ++k) {
          CHECK(recs[k]->t > recs[k - 1]->t);
          dist += std::hypot(recs[k]->x - recs[k - 1]->x, recs[k]->y - recs[k - 1]->y);
        }
        const double segments = static_cast<double>(tp.points.size() - 1);
        CHECK(std::abs(dist - polyline(tp)) <= segments * v * h + 1e-9);
        CHECK(recs.back()->x == doctest::Approx(tp.points.back()[0]));
        CHECK(recs.back()->y == doctest::Approx(tp.points.back()[1]));
      }
    }
    // teams are logged in id order within each tick
    for (std::size_t k = 1; k < log.records.size(); ++k)
      if (log.records[k].t == log.records[k - 1].t) CHECK(log.records[k].team >= log.records[k - 1].team);
  }
}
