#pragma once
// Shared small instances for the MDP, planning and simulation tests.

#include <json.hpp>
#include <map>
#include <optional>
#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "overwatch/mdp.hpp"
#include "overwatch/terrain.hpp"

namespace fixture {

using nlohmann::json;

// Fig. 3 style team: explore p1/p2/p3, roam, or fail.
inline json fig3_capability(double success = 0.9) {
  std::vector<std::string> states{"s1", "s2", "s3", "s_eps", "s_f"};
  json transitions = json::array();
  for (const char* s : {"s1", "s2", "s3", "s_eps"}) {
    for (int i = 1; i <= 3; ++i)
      transitions.push_back({{"state", s},
                             {"action", "a" + std::to_string(i)},
                             {"next", {{"s" + std::to_string(i), success}, {"s_f", 1.0 - success}}}});
    transitions.push_back({{"state", s}, {"action", "roam"}, {"next", {{"s_eps", 1.0}}}});
  }
  return {{"states", states},
          {"actions", {"a1", "a2", "a3", "roam"}},
          {"propositions", {"p1", "p2", "p3", "p_f"}},
          {"labels", {{"s1", "p1"}, {"s2", "p2"}, {"s3", "p3"}, {"s_eps", nullptr}, {"s_f", "p_f"}}},
          {"initial", "s_eps"},
          {"failure", "s_f"},
          {"transitions", transitions}};
}

// Team whose fort propositions are `forts`: from anywhere, explore_i reaches
// s_i with probability `success`, else the failure state.
inline json fort_team(const std::vector<std::string>& forts, double success = 1.0) {
  std::vector<std::string> states{"s_eps"};
  std::vector<std::string> actions;
  json labels = {{"s_eps", nullptr}};
  for (const auto& f : forts) {
    states.push_back("s_" + f);
    actions.push_back("explore_" + f);
    labels["s_" + f] = f;
  }
  states.push_back("s_err");
  labels["s_err"] = "f_err";
  std::vector<std::string> props = forts;
  props.push_back("f_err");
  json transitions = json::array();
  for (std::size_t i = 0; i + 1 < states.size(); ++i)
    for (const auto& f : forts) {
      json next = {{"s_" + f, success}};
      if (success < 1.0) next["s_err"] = 1.0 - success;
      transitions.push_back({{"state", states[i]}, {"action", "explore_" + f}, {"next", next}});
    }
  return {{"states", states},   {"actions", actions},         {"propositions", props}, {"labels", labels},
          {"initial", "s_eps"}, {"failure", "s_err"},        {"transitions", transitions}};
}

inline overwatch::terrain::CellGrid flat_grid(int rows, int cols, double g = 1.0, double los = 1.0) {
  overwatch::terrain::CellGrid grid;
  grid.rows = rows;
  grid.cols = cols;
  grid.cell_size = 4;
  grid.sensing_radius = 2;
  grid.resolution = 0.5;
  grid.stats.assign(static_cast<std::size_t>(rows * cols), {g, 0.0, los, 0.0, false});
  return grid;
}

inline overwatch::terrain::CellGrid random_grid(std::mt19937_64& rng, int rows, int cols, double nogo_rate = 0.0) {
  std::uniform_real_distribution<double> u(0.05, 1.0), v(0.0, 0.005), coin(0.0, 1.0);
  auto grid = flat_grid(rows, cols);
  for (auto& s : grid.stats) s = {u(rng), v(rng), u(rng), v(rng), coin(rng) < nogo_rate};
  return grid;
}

// Exhaustively searchable instance: one fort, one team, random terrain.
struct SmallInstance {
  overwatch::terrain::CellGrid grid;
  overwatch::mdp::PlanningMdp ppm;
};

inline std::optional<SmallInstance> random_single_fort(std::mt19937_64& rng, int rows, int cols, double nogo_rate,
                                                       double slip) {
  using namespace overwatch;
  SmallInstance inst;
  inst.grid = random_grid(rng, rows, cols, nogo_rate);
  std::vector<terrain::Cell> open;
  for (int i = 0; i < inst.grid.size(); ++i)
    if (!inst.grid.stats[static_cast<std::size_t>(i)].nogo) open.push_back(inst.grid.cell(i));
  if (open.size() < 2) return std::nullopt;
  std::shuffle(open.begin(), open.end(), rng);
  auto g = automata::Dfa({"f"}, 2);
  g.set_transition(0, 0, 1);
  g.set_accepting(1);
  auto te = mdp::validate_capability_mdp(fort_team({"f"}, 0.9));
  auto motion = mdp::build_motion_mdp(inst.grid, {{"f", open[0]}}, slip);
  inst.ppm = mdp::compose_planning_mdp(mdp::product_task(te, g), motion, open[1]);
  return inst;
}

}  // namespace fixture
