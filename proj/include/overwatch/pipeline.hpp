#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "overwatch/automata.hpp"
#include "overwatch/decomp.hpp"
#include "overwatch/mdp.hpp"
#include "overwatch/plan.hpp"
#include "overwatch/sim.hpp"
#include "overwatch/terrain.hpp"
#include "overwatch/trust.hpp"

namespace overwatch::pipeline {

struct TerrainConfig {
  std::filesystem::path pgm;  // absolute once loaded
  double resolution = 1.0;    // m/px
  int cell_size = 8;          // px
  int sensing_radius = 4;     // px
  double g_min = 0.0;
  double slip = 0.0;
};

struct TaskSpec {
  std::string id;
  std::string kind;  // "re" or "ltl"
  std::string text;
};

struct TeamConfig {
  int id = 0;
  nlohmann::json capability;
  terrain::Cell start;
  trust::TrustParams trust;
};

/// Trust overrides applied to every team for one planning run.
struct Variant {
  std::string name = "default";
  std::optional<trust::Vec3> beta_mean;
  std::optional<trust::Mat3> beta_cov;
  std::optional<double> residual_var;
};

struct Scenario {
  TerrainConfig terrain;
  std::map<std::string, terrain::Cell> forts;
  std::vector<TaskSpec> tasks;
  std::string combine;  // RE over task ids; empty means the single task
  std::vector<TeamConfig> teams;  // sorted by id
  std::vector<Variant> variants;  // never empty
  double speed = 1.0;
  double dt = 0.1;
  std::uint64_t seed = 0;
};

/// Paths inside `j` resolve against `base_dir`. Throws ValidationError.
Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Reads and parses a scenario file; OVERWATCH_SEED, when set, replaces the
/// seed. Throws IoError or ValidationError.
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

trust::TrustParams apply(const Variant& v, trust::TrustParams p);

/// Compiles every task over the shared fort alphabet and evaluates the
/// combine expression (concatenation, union, star over task ids).
automata::Dfa global_task(const Scenario& s);

terrain::CellGrid build_grid(const Scenario& s);

/// Subtask i (parts are ordered by smallest letter) goes to the i-th team
/// by id. Throws ValidationError("insufficient teams").
std::vector<int> assign_teams(const decomp::Decomposition& d, const std::vector<TeamConfig>& teams);

enum class Status { Planned, Unsatisfiable, Idle };
const char* status_name(Status s);

struct TeamOutcome {
  int team = 0;
  int subtask = -1;  // -1 when idle
  Status status = Status::Idle;
  std::string message;
  std::optional<plan::Plan> plan;
  nlohmann::json plan_json;
  std::vector<std::string> plan_problems;  // replay against the serialized planning MDP
};

struct VariantResult {
  Variant variant;
  std::vector<TeamOutcome> teams;  // by team id
  sim::SimLog log;
};

struct TeamModel {
  int team = 0;
  int subtask = -1;
  std::optional<mdp::PlanningMdp> ppm;
  nlohmann::json ppm_json;
};

struct PipelineResult {
  automata::Dfa global;
  decomp::Decomposition decomposition;
  std::vector<int> assignment;  // subtask -> team id
  terrain::CellGrid grid;
  std::vector<TeamModel> models;
  std::vector<VariantResult> variants;
  std::uint64_t seed = 0;

  bool any_unsatisfiable() const;
};

/// Compile, decompose, assign, build products and planning MDPs, search
/// each team under every variant, then simulate. Stage failures throw with
/// a "[stage] " prefix; unsatisfiable teams are reported, not thrown.
PipelineResult run_pipeline(const Scenario& s);

/// report.json content: seed, subtasks, assignment and per-team status.
nlohmann::json report(const PipelineResult& r);

/// Writes the planning outputs: report.json, decomposition.json,
/// terrain.csv, one directory per variant with team<id>.plan.json and
/// team<id>.trust.csv.
void write_plans(const PipelineResult& r, const std::filesystem::path& out_dir);

/// Plan files found in a variant directory, by team id.
struct StoredPlan {
  int team = 0;
  std::vector<terrain::Cell> cells;
  std::vector<trust::TrustBelief> beliefs;
};
std::vector<StoredPlan> read_plans(const std::filesystem::path& dir);

sim::SimLog simulate(const std::vector<StoredPlan>& plans, const terrain::CellGrid& grid, double speed, double dt);

/// Plans over the given layer, one colored path per team.
std::string render_plans(const Scenario& s, const terrain::CellGrid& grid, const std::vector<StoredPlan>& plans,
                         bool line_of_sight = false);

/// Everything: write_plans plus sim.csv, trajectory.svg and paths SVGs in
/// each variant directory; terrain heatmaps and team<id>.variants.svg (all
/// variant paths of one team) at the top level.
void write_all(const PipelineResult& r, const Scenario& s, const std::filesystem::path& out_dir);

}  // namespace overwatch::pipeline
