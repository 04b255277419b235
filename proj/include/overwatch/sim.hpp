#pragma once

#include <span>
#include <string>
#include <vector>

#include "overwatch/plan.hpp"
#include "overwatch/terrain.hpp"
#include "overwatch/trust.hpp"

namespace overwatch::sim {

enum class Robot { Bounder, Overwatcher };
enum class Phase { BounderAdvancing, OverwatcherJoining, Done };

const char* robot_name(Robot r);

/// What a team executes: one centroid per plan step (repeats kept, so a
/// step that stays in place still takes its turn) and the trust belief
/// after each step.
struct TeamPlan {
  int team = 0;
  std::vector<plan::Point> points;
  std::vector<trust::TrustBelief> beliefs;
};

TeamPlan team_plan(const plan::Plan& p, const terrain::CellGrid& grid, int team);

struct Record {
  double t = 0.0;
  int team = 0;
  Robot robot = Robot::Bounder;
  double x = 0.0;
  double y = 0.0;
  int path_index = 0;  // last plan step this robot has reached
  double trust_mean = 0.0;
  double trust_var = 0.0;
};

struct TeamResult {
  int team = 0;
  bool completed = false;
  double finish_time = 0.0;
};

struct SimLog {
  std::vector<Record> records;
  std::vector<TeamResult> teams;  // ordered by team id
};

/// Successive bounding overwatch at constant speed: the bounder drives to
/// the next point while the overwatcher holds, then the overwatcher drives
/// the same segment. One phase advances per tick of length dt; a robot
/// snaps to its target once the remaining distance is within one step.
/// Trust steps when the overwatcher arrives. Teams advance independently,
/// updated in id order.
SimLog run_sim(std::span<const TeamPlan> plans, const terrain::CellGrid& grid, double speed, double dt);

/// Columns: t,team,robot,x,y,path_index,trust_mean,trust_var
std::string to_csv(const SimLog& log);

/// Largest row or column gap between the two robots of a team, in cells,
/// over every tick of the log.
int max_team_separation(const SimLog& log, const terrain::CellGrid& grid);

}  // namespace overwatch::sim
