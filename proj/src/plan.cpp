#include "overwatch/plan.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "overwatch/error.hpp"

namespace overwatch::plan {

using mdp::PlanningMdp;
using trust::TrustBelief;
using json = nlohmann::json;

namespace {

std::size_t ix(int i) { return static_cast<std::size_t>(i); }

struct Edge {
  int target;
  int row;
};

// Positive-probability successors in ascending target order, failure
// states removed. The first row reaching a target names the action.
std::vector<std::vector<Edge>> successors(const PlanningMdp& ppm) {
  std::vector<std::vector<Edge>> out(ix(ppm.num_states()));
  for (int i = 0; i < ppm.num_states(); ++i) {
    std::map<int, int> first;
    const auto& rows = ppm.rows[ix(i)];
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      for (const auto& o : rows[ix(r)].outcomes)
        if (o.prob > 0.0 && !ppm.failure[ix(o.target)]) first.emplace(o.target, r);
    for (const auto& [t, r] : first) out[ix(i)].push_back({t, r});
  }
  return out;
}

const terrain::CellStats& stats(const PlanningMdp& ppm, const terrain::CellGrid& grid, int state) {
  return grid.at(ppm.cell_of(state));
}

Plan assemble(const PlanningMdp& ppm, const terrain::CellGrid& grid, const trust::TrustParams& p,
              const std::vector<int>& path, const std::vector<int>& rows) {
  Plan plan;
  plan.path = path;
  TrustBelief b = p.tau0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    plan.cells.push_back(ppm.cell_of(path[k]));
    b = trust::propagate_trust(b, stats(ppm, grid, path[k]), p);
    plan.beliefs.push_back(b);
    if (k + 1 < path.size()) plan.actions.push_back(ppm.action_name(ppm.rows[ix(path[k])][ix(rows[k])]));
  }
  plan.terminal_trust = plan.beliefs.back();
  for (const auto& belief : plan.beliefs)
    if (!(belief.mean > 0.0)) plan.positive_trust = false;
  return plan;
}

void check_grid(const PlanningMdp& ppm, const terrain::CellGrid& grid) {
  if (grid.rows != ppm.motion.rows || grid.cols != ppm.motion.cols)
    throw ValidationError("cell grid does not match the planning MDP");
}

}  // namespace

Plan optm_path(const PlanningMdp& ppm, const terrain::CellGrid& grid, const trust::TrustParams& p) {
  check_grid(ppm, grid);
  p.validate();
  const auto succ = successors(ppm);
  const std::size_t n = ix(ppm.num_states());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> value(n, inf);
  std::vector<TrustBelief> belief(n);
  std::vector<int> pred(n, -1), pred_row(n, -1);
  std::vector<bool> done(n, false);

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  belief[ix(ppm.initial)] = trust::propagate_trust(p.tau0, stats(ppm, grid, ppm.initial), p);
  value[ix(ppm.initial)] = -belief[ix(ppm.initial)].mean;
  queue.push({value[ix(ppm.initial)], ppm.initial});

  bool positive = true;
  while (!queue.empty()) {
    auto [v, i] = queue.top();
    queue.pop();
    if (done[ix(i)] || v != value[ix(i)]) continue;
    done[ix(i)] = true;
    if (!(belief[ix(i)].mean > 0.0)) positive = false;
    if (ppm.accepting[ix(i)]) continue;
    for (const auto& e : succ[ix(i)]) {
      if (done[ix(e.target)]) continue;
      TrustBelief b = trust::propagate_trust(belief[ix(i)], stats(ppm, grid, e.target), p);
      if (-b.mean < value[ix(e.target)]) {
        value[ix(e.target)] = -b.mean;
        belief[ix(e.target)] = b;
        pred[ix(e.target)] = i;
        pred_row[ix(e.target)] = e.row;
        queue.push({-b.mean, e.target});
      }
    }
  }

  int best = -1;
  for (int i = 0; i < ppm.num_states(); ++i)
    if (done[ix(i)] && ppm.accepting[ix(i)] && (best < 0 || value[ix(i)] < value[ix(best)])) best = i;
  if (best < 0) throw UnsatisfiableError("unsatisfiable in this terrain: no accepting state is reachable");

  std::vector<int> path, rows;
  for (int i = best; i >= 0; i = pred[ix(i)]) {
    path.push_back(i);
    rows.push_back(pred_row[ix(i)]);
  }
  std::reverse(path.begin(), path.end());
  std::reverse(rows.begin(), rows.end());
  rows.erase(rows.begin());  // rows[k] now leads from path[k] to path[k + 1]
  Plan plan = assemble(ppm, grid, p, path, rows);
  plan.positive_trust = positive;
  return plan;
}

Plan oracle_path(const PlanningMdp& ppm, const terrain::CellGrid& grid, const trust::TrustParams& p,
                 std::size_t max_len) {
  check_grid(ppm, grid);
  p.validate();
  if (max_len == 0) max_len = ix(ppm.num_states());
  const auto succ = successors(ppm);
  const double b0 = p.beta_mean[0];

  // Upper bound on the terminal mean reachable from mean m, valid for
  // 0 <= b0 < 1: intermediate steps add at most b_max each, the last step
  // adds the best accepting-cell term.
  auto additive = [&](int state) {
    const auto& s = stats(ppm, grid, state);
    return p.beta_mean[1] * s.g_mean + p.beta_mean[2] * s.los_mean;
  };
  double b_max = -std::numeric_limits<double>::infinity(), s_fort = b_max;
  for (int i = 0; i < ppm.num_states(); ++i) {
    if (ppm.failure[ix(i)]) continue;
    b_max = std::max(b_max, additive(i));
    if (ppm.accepting[ix(i)]) s_fort = std::max(s_fort, additive(i));
  }
  const bool bounded = b0 >= 0.0 && b0 < 1.0;
  auto upper = [&](double m) {
    if (!bounded) return std::numeric_limits<double>::infinity();
    const double b_star = b_max / (1.0 - b0);
    const double m1 = m >= b_star ? b0 * m + b_max : b_star;
    return std::max(b0 * m, b0 * m1) + s_fort;
  };

  std::vector<int> path{ppm.initial}, rows;
  std::vector<int> best_path, best_rows;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<bool> on_path(ix(ppm.num_states()), false);
  on_path[ix(ppm.initial)] = true;

  std::function<void(double)> dfs = [&](double m) {
    const int i = path.back();
    if (ppm.accepting[ix(i)]) {
      if (m > best) {
        best = m;
        best_path = path;
        best_rows = rows;
      }
      return;
    }
    if (path.size() >= max_len) return;
    if (upper(m) < best - 1e-9) return;
    for (const auto& e : succ[ix(i)]) {
      if (on_path[ix(e.target)]) continue;
      const auto& s = stats(ppm, grid, e.target);
      const double next = p.beta_mean[0] * m + p.beta_mean[1] * s.g_mean + p.beta_mean[2] * s.los_mean;
      on_path[ix(e.target)] = true;
      path.push_back(e.target);
      rows.push_back(e.row);
      dfs(next);
      rows.pop_back();
      path.pop_back();
      on_path[ix(e.target)] = false;
    }
  };
  dfs(trust::propagate_trust(p.tau0, stats(ppm, grid, ppm.initial), p).mean);
  if (best_path.empty()) throw UnsatisfiableError("unsatisfiable in this terrain: no accepting state is reachable");
  return assemble(ppm, grid, p, best_path, best_rows);
}

std::vector<Point> waypoints(const Plan& plan, const terrain::CellGrid& grid) {
  const double side = grid.cell_meters();
  std::vector<Point> out;
  for (std::size_t k = 0; k < plan.cells.size(); ++k) {
    if (k > 0 && plan.cells[k] == plan.cells[k - 1]) continue;
    out.push_back({(plan.cells[k].col + 0.5) * side, (plan.cells[k].row + 0.5) * side});
  }
  return out;
}

json to_json(const Plan& plan, const PlanningMdp& ppm, const terrain::CellGrid& grid, int team) {
  json path = json::array();
  for (std::size_t k = 0; k < plan.path.size(); ++k) {
    const auto& t = ppm.task_of(plan.path[k]);
    path.push_back({{"state", plan.path[k]},
                    {"s", ppm.product.team.states[ix(t.s)]},
                    {"x", t.x},
                    {"row", plan.cells[k].row},
                    {"col", plan.cells[k].col},
                    {"trust_mean", plan.beliefs[k].mean},
                    {"trust_var", plan.beliefs[k].var}});
  }
  json points = json::array();
  for (const auto& w : waypoints(plan, grid)) points.push_back({w[0], w[1]});
  return {{"team", team},
          {"path", path},
          {"actions", plan.actions},
          {"waypoints", points},
          {"terminal_trust", {{"mean", plan.terminal_trust.mean}, {"var", plan.terminal_trust.var}}}};
}

std::vector<std::string> validate_plan(const json& plan, const json& ppm) {
  std::vector<std::string> problems;
  const auto& states = ppm.at("states");
  const auto& path = plan.at("path");
  if (path.empty()) return {"plan path is empty"};
  std::set<std::pair<int, int>> edges;
  for (const auto& t : ppm.at("transitions"))
    if (t.at(4).get<double>() > 0.0) edges.insert({t.at(0).get<int>(), t.at(3).get<int>()});

  for (std::size_t k = 0; k < path.size(); ++k) {
    const int s = path[k].at("state").get<int>();
    if (s < 0 || ix(s) >= states.size()) {
      problems.push_back("step " + std::to_string(k) + " names unknown state " + std::to_string(s));
      continue;
    }
    const auto& st = states[ix(s)];
    for (const char* key : {"s", "x", "row", "col"})
      if (st.at(key) != path[k].at(key)) problems.push_back("step " + std::to_string(k) + " disagrees on '" + key + "'");
    if (st.at("failure").get<bool>()) problems.push_back("step " + std::to_string(k) + " is a failure state");
    if (k == 0 && s != ppm.at("initial").get<int>()) problems.push_back("plan does not start at the initial state");
    if (k > 0 && !edges.count({path[k - 1].at("state").get<int>(), s}))
      problems.push_back("no transition into step " + std::to_string(k));
  }
  const int last = path.back().at("state").get<int>();
  if (last >= 0 && ix(last) < states.size() && !states[ix(last)].at("accepting").get<bool>())
    problems.push_back("plan does not end in an accepting state");
  return problems;
}

}  // namespace overwatch::plan
