#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "overwatch/automata.hpp"
#include "overwatch/terrain.hpp"

namespace overwatch::mdp {

inline constexpr double kRowTolerance = 1e-9;

struct Outcome {
  int target = 0;
  double prob = 0.0;
};

struct ActionRow {
  int action = 0;
  std::vector<Outcome> outcomes;
  double weight = 1.0;
};

/// Team capability MDP. A state label of nullopt is the idle label epsilon.
struct CapabilityMdp {
  std::vector<std::string> states;
  std::vector<std::optional<std::string>> labels;
  std::vector<std::string> actions;
  std::vector<std::vector<ActionRow>> rows;  // per state
  int initial = 0;
  int failure = -1;  // s_f, or -1 when the team has none
  automata::Alphabet propositions;

  int num_states() const noexcept { return static_cast<int>(states.size()); }
  int state_index(const std::string& name) const;  // -1 when absent
};

/// Parses and validates a capability MDP from JSON:
///   {"states":[...], "labels":{"s":"p" | null}, "actions":[...],
///    "transitions":[{"state","action","next":{"s'":p,...},"weight"?}],
///    "initial":"s", "failure":"s"?, "propositions":[...]}
/// Every letter of each subtask alphabet must be a proposition.
CapabilityMdp validate_capability_mdp(const nlohmann::json& raw,
                                      std::span<const automata::Alphabet> subtask_alphabets = {});
nlohmann::json to_json(const CapabilityMdp& te);

/// Throws ValidationError naming the first letter of `alphabet` missing from
/// the team's propositions.
void check_prerequisite(const CapabilityMdp& te, const automata::Alphabet& alphabet);

struct ProductState {
  int s = 0;
  int x = 0;
  auto operator<=>(const ProductState&) const = default;
};

/// Product of a capability MDP with a task DFA. `team` is a copy of the
/// input that always has a failure state (one is appended when absent).
struct ProductMdp {
  CapabilityMdp team;
  automata::Dfa task;
  std::vector<ProductState> states;
  std::vector<std::vector<ActionRow>> rows;
  std::vector<bool> accepting;
  int initial = 0;

  int num_states() const noexcept { return static_cast<int>(states.size()); }
  int index_of(ProductState p) const;  // -1 when absent
  const ProductState& at(int state) const { return states[static_cast<std::size_t>(state)]; }
  const std::optional<std::string>& label(int state) const { return team.labels[static_cast<std::size_t>(at(state).s)]; }
  bool is_failure(int state) const { return at(state).s == team.failure; }
  /// Adds (s, x) and everything reachable from it; returns its index.
  int ensure(ProductState p);

  std::map<ProductState, int> lookup;
};

/// Stutter on epsilon labels, otherwise step the DFA on the successor's
/// label; mass with no DFA transition goes to (s_f, x).
ProductMdp product_task(const CapabilityMdp& te, const automata::Dfa& g);

std::string to_dot(const ProductMdp& p, const std::string& name = "product");
nlohmann::json to_json(const ProductMdp& p);

enum class Move { N, S, E, W, NE, NW, SE, SW, Stay };
inline constexpr int kNumMoves = 9;
const char* move_name(Move m);
terrain::Cell step(terrain::Cell c, Move m);

/// Grid motion MDP over 8-connected cells plus stay. Rows exist only for
/// traversable cells and moves whose intended cell is traversable.
struct MotionMdp {
  int rows = 0;
  int cols = 0;
  double slip = 0.0;
  std::vector<bool> traversable;
  std::vector<std::optional<std::string>> fort;      // fort label per cell
  std::vector<std::vector<ActionRow>> transitions;  // per cell; action = Move index, weight = reward placeholder

  int index(terrain::Cell c) const noexcept { return c.row * cols + c.col; }
  terrain::Cell cell(int index) const noexcept { return {index / cols, index % cols}; }
  int num_cells() const noexcept { return rows * cols; }
};

/// `forts` maps a fort label (the task proposition) to its cell.
MotionMdp build_motion_mdp(const terrain::CellGrid& grid, const std::map<std::string, terrain::Cell>& forts,
                           double slip);

inline constexpr int kHold = -1;

struct PlanningState {
  int product = 0;
  int cell = 0;
  auto operator<=>(const PlanningState&) const = default;
};

struct PlanningRow {
  int task_action = kHold;  // product action, or kHold
  int move = 0;
  std::vector<Outcome> outcomes;
};

/// Composition of a product MDP with a motion MDP. Entering the cell of a
/// fort that some outcome of the chosen task action explores fires that
/// action; any other entry keeps the task layer where it is.
struct PlanningMdp {
  ProductMdp product;
  MotionMdp motion;
  std::vector<PlanningState> states;
  std::vector<std::vector<PlanningRow>> rows;
  std::vector<bool> accepting;
  std::vector<bool> failure;
  int initial = 0;

  int num_states() const noexcept { return static_cast<int>(states.size()); }
  terrain::Cell cell_of(int state) const { return motion.cell(states[static_cast<std::size_t>(state)].cell); }
  const ProductState& task_of(int state) const {
    return product.states[static_cast<std::size_t>(states[static_cast<std::size_t>(state)].product)];
  }
  bool has_accepting() const;
  std::string action_name(const PlanningRow& row) const;
};

PlanningMdp compose_planning_mdp(const ProductMdp& p, const MotionMdp& m, terrain::Cell start);

/// Sparse form: {"states":[{"s","x","row","col","accepting","failure"}],
/// "initial", "transitions":[[src, task_action, move, dst, prob]...]}.
nlohmann::json to_json(const PlanningMdp& ppm);

/// Rows whose probabilities do not sum to 1 within kRowTolerance, or carry
/// a non-positive entry or weight. Each violation is described in one line.
std::vector<std::string> stochastic_violations(const CapabilityMdp& m);
std::vector<std::string> stochastic_violations(const ProductMdp& m);
std::vector<std::string> stochastic_violations(const MotionMdp& m);
std::vector<std::string> stochastic_violations(const PlanningMdp& m);

}  // namespace overwatch::mdp
