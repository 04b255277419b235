#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "overwatch/mdp.hpp"
#include "overwatch/terrain.hpp"
#include "overwatch/trust.hpp"

namespace overwatch::plan {

using Point = std::array<double, 2>;

struct Plan {
  std::vector<int> path;              // planning MDP states, initial first
  std::vector<std::string> actions;   // composed action into path[k + 1]
  std::vector<terrain::Cell> cells;   // cell of each path state
  std::vector<trust::TrustBelief> beliefs;
  trust::TrustBelief terminal_trust;
  /// Every finalized label had positive expected trust, the condition under
  /// which starting labels at +inf and at 0 give the same search.
  bool positive_trust = true;
};

/// Label-setting search maximizing the propagated expected trust. Failure
/// states are never entered and accepting states are not expanded. Ties go
/// to the lower state index. Throws UnsatisfiableError when no accepting
/// state is reachable.
Plan optm_path(const mdp::PlanningMdp& ppm, const terrain::CellGrid& grid, const trust::TrustParams& p);

/// Exhaustive search over simple paths ending at their first accepting
/// state, at most `max_len` states long (0 means the state count). Returns
/// the maximum terminal expected trust; ties go to the lexicographically
/// smallest state sequence.
Plan oracle_path(const mdp::PlanningMdp& ppm, const terrain::CellGrid& grid, const trust::TrustParams& p,
                 std::size_t max_len = 0);

/// Cell centroids in meters, consecutive duplicates collapsed.
std::vector<Point> waypoints(const Plan& plan, const terrain::CellGrid& grid);

/// {team, path:[{state,s,x,row,col,trust_mean,trust_var}], actions,
///  waypoints, terminal_trust:{mean,var}}
nlohmann::json to_json(const Plan& plan, const mdp::PlanningMdp& ppm, const terrain::CellGrid& grid, int team);

/// Problems found when replaying a serialized plan against a serialized
/// planning MDP (empty when the plan is valid).
std::vector<std::string> validate_plan(const nlohmann::json& plan, const nlohmann::json& ppm);

}  // namespace overwatch::plan
