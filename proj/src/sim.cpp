#include "overwatch/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "overwatch/error.hpp"

namespace overwatch::sim {

namespace {

struct TeamState {
  const TeamPlan* plan = nullptr;
  Phase phase = Phase::BounderAdvancing;
  std::size_t target = 1;  // next point index
  plan::Point bounder{};
  plan::Point overwatcher{};
  int bounder_index = 0;
  int overwatcher_index = 0;
  trust::TrustBelief belief{};
};

// Moves `pos` toward `goal` by at most `step`; true on arrival.
bool advance(plan::Point& pos, const plan::Point& goal, double step) {
  const double dx = goal[0] - pos[0], dy = goal[1] - pos[1];
  const double dist = std::hypot(dx, dy);
  if (dist <= step + 1e-9) {
    pos = goal;
    return true;
  }
  pos[0] += dx / dist * step;
  pos[1] += dy / dist * step;
  return false;
}

int cell_coord(double v, double side) { return static_cast<int>(std::floor(v / side)); }

}  // namespace

const char* robot_name(Robot r) { return r == Robot::Bounder ? "bounder" : "overwatcher"; }

TeamPlan team_plan(const plan::Plan& p, const terrain::CellGrid& grid, int team) {
  TeamPlan t;
  t.team = team;
  const double side = grid.cell_meters();
  for (const auto& c : p.cells) t.points.push_back({(c.col + 0.5) * side, (c.row + 0.5) * side});
  t.beliefs = p.beliefs;
  return t;
}

SimLog run_sim(std::span<const TeamPlan> plans, const terrain::CellGrid& grid, double speed, double dt) {
  if (!(speed > 0.0)) throw ValidationError("speed must be positive");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");

  std::vector<TeamState> teams;
  for (const auto& p : plans) {
    if (p.points.size() != p.beliefs.size()) throw ValidationError("team plan needs one belief per point");
    for (const auto& pt : p.points)
      if (pt[0] < 0 || pt[1] < 0 || pt[0] > grid.cols * grid.cell_meters() || pt[1] > grid.rows * grid.cell_meters())
        throw ValidationError("team plan leaves the map");
    TeamState s;
    s.plan = &p;
    if (!p.points.empty()) {
      s.bounder = s.overwatcher = p.points.front();
      s.belief = p.beliefs.front();
    }
    if (p.points.size() <= 1) s.phase = Phase::Done;
    teams.push_back(s);
  }
  std::sort(teams.begin(), teams.end(), [](const auto& a, const auto& b) { return a.plan->team < b.plan->team; });

  SimLog log;
  auto emit = [&](double t, const TeamState& s) {
    log.records.push_back({t, s.plan->team, Robot::Bounder, s.bounder[0], s.bounder[1], s.bounder_index,
                           s.belief.mean, s.belief.var});
    log.records.push_back({t, s.plan->team, Robot::Overwatcher, s.overwatcher[0], s.overwatcher[1],
                           s.overwatcher_index, s.belief.mean, s.belief.var});
  };
  std::map<int, double> finish;
  for (const auto& s : teams) {
    if (s.plan->points.empty()) continue;
    emit(0.0, s);
    if (s.phase == Phase::Done) finish[s.plan->team] = 0.0;
  }

  const double step = speed * dt;
  for (long tick = 1;; ++tick) {
    bool active = false;
    const double t = static_cast<double>(tick) * dt;
    for (auto& s : teams) {
      if (s.phase == Phase::Done) continue;
      active = true;
      const auto& goal = s.plan->points[s.target];
      if (s.phase == Phase::BounderAdvancing) {
        if (advance(s.bounder, goal, step)) {
          s.bounder_index = static_cast<int>(s.target);
          s.phase = Phase::OverwatcherJoining;
        }
      } else if (advance(s.overwatcher, goal, step)) {
        s.overwatcher_index = static_cast<int>(s.target);
        s.belief = s.plan->beliefs[s.target];
        if (++s.target == s.plan->points.size()) {
          s.phase = Phase::Done;
          finish[s.plan->team] = t;
        } else {
          s.phase = Phase::BounderAdvancing;
        }
      }
      emit(t, s);
    }
    if (!active) break;
  }

  for (const auto& s : teams) {
    TeamResult r{s.plan->team, false, 0.0};
    if (auto it = finish.find(s.plan->team); it != finish.end()) {
      r.completed = true;
      r.finish_time = it->second;
    }
    log.teams.push_back(r);
  }
  return log;
}

std::string to_csv(const SimLog& log) {
  std::string out = "t,team,robot,x,y,path_index,trust_mean,trust_var\n";
  char buf[256];
  for (const auto& r : log.records) {
    std::snprintf(buf, sizeof buf, "%.3f,%d,%s,%.6f,%.6f,%d,%.12g,%.12g\n", r.t, r.team, robot_name(r.robot), r.x, r.y,
                  r.path_index, r.trust_mean, r.trust_var);
    out += buf;
  }
  return out;
}

int max_team_separation(const SimLog& log, const terrain::CellGrid& grid) {
  const double side = grid.cell_meters();
  int worst = 0;
  // records come in bounder/overwatcher pairs
  for (std::size_t i = 0; i + 1 < log.records.size(); i += 2) {
    const auto& b = log.records[i];
    const auto& o = log.records[i + 1];
    worst = std::max({worst, std::abs(cell_coord(b.x, side) - cell_coord(o.x, side)),
                      std::abs(cell_coord(b.y, side) - cell_coord(o.y, side))});
  }
  return worst;
}

}  // namespace overwatch::sim
