#include "overwatch/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <set>

#include "overwatch/error.hpp"

namespace overwatch::mdp {

using json = nlohmann::json;
using terrain::Cell;

namespace {

std::size_t ix(int i) { return static_cast<std::size_t>(i); }

void add_outcome(std::vector<Outcome>& outs, int target, double prob) {
  for (auto& o : outs)
    if (o.target == target) {
      o.prob += prob;
      return;
    }
  outs.push_back({target, prob});
}

std::string fmt_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", p);
  return buf;
}

void check_rows(const std::vector<std::vector<ActionRow>>& rows, const std::string& kind,
                const std::function<std::string(int, const ActionRow&)>& describe, std::vector<std::string>& out) {
  for (std::size_t s = 0; s < rows.size(); ++s)
    for (const auto& r : rows[s]) {
      double sum = 0.0;
      bool bad_entry = false;
      for (const auto& o : r.outcomes) {
        sum += o.prob;
        if (!(o.prob > 0.0)) bad_entry = true;
      }
      if (std::abs(sum - 1.0) > kRowTolerance || bad_entry || !(r.weight > 0.0))
        out.push_back(kind + " row " + describe(static_cast<int>(s), r) + " sums to " + fmt_prob(sum));
    }
}

}  // namespace

int CapabilityMdp::state_index(const std::string& name) const {
  auto it = std::find(states.begin(), states.end(), name);
  return it == states.end() ? -1 : static_cast<int>(it - states.begin());
}

void check_prerequisite(const CapabilityMdp& te, const automata::Alphabet& alphabet) {
  for (const auto& letter : alphabet)
    if (!std::binary_search(te.propositions.begin(), te.propositions.end(), letter))
      throw ValidationError("team capability lacks proposition '" + letter + "' required by its subtask");
}

CapabilityMdp validate_capability_mdp(const json& raw, std::span<const automata::Alphabet> subtask_alphabets) {
  CapabilityMdp te;
  try {
    te.states = raw.at("states").get<std::vector<std::string>>();
    te.actions = raw.at("actions").get<std::vector<std::string>>();
    te.propositions = automata::make_alphabet(raw.at("propositions").get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("capability MDP: ") + e.what());
  }
  if (te.states.empty()) throw ValidationError("capability MDP has no states");
  if (std::set<std::string>(te.states.begin(), te.states.end()).size() != te.states.size())
    throw ValidationError("capability MDP has duplicate state names");
  if (std::set<std::string>(te.actions.begin(), te.actions.end()).size() != te.actions.size())
    throw ValidationError("capability MDP has duplicate action names");

  auto state_of = [&](const std::string& name) {
    int i = te.state_index(name);
    if (i < 0) throw ValidationError("capability MDP: unknown state '" + name + "'");
    return i;
  };

  te.labels.assign(te.states.size(), std::nullopt);
  if (raw.contains("labels")) {
    for (const auto& [name, label] : raw.at("labels").items()) {
      int s = state_of(name);
      if (label.is_null()) continue;
      if (!label.is_string()) throw ValidationError("capability MDP: label of '" + name + "' must be a string or null");
      std::string p = label.get<std::string>();
      if (!std::binary_search(te.propositions.begin(), te.propositions.end(), p))
        throw ValidationError("capability MDP: label '" + p + "' of state '" + name + "' is not a proposition");
      te.labels[ix(s)] = p;
    }
  }

  te.initial = state_of(raw.at("initial").get<std::string>());
  if (raw.contains("failure") && !raw.at("failure").is_null()) te.failure = state_of(raw.at("failure").get<std::string>());

  te.rows.assign(te.states.size(), {});
  std::set<std::pair<int, int>> seen;
  for (const auto& t : raw.value("transitions", json::array())) {
    const std::string sname = t.at("state").get<std::string>();
    const std::string aname = t.at("action").get<std::string>();
    int s = state_of(sname);
    auto ait = std::find(te.actions.begin(), te.actions.end(), aname);
    if (ait == te.actions.end()) throw ValidationError("capability MDP: unknown action '" + aname + "'");
    int a = static_cast<int>(ait - te.actions.begin());
    const std::string where = "(" + sname + ", " + aname + ")";
    if (!seen.insert({s, a}).second) throw ValidationError("capability MDP: duplicate row " + where);
    ActionRow row;
    row.action = a;
    row.weight = t.value("weight", 1.0);
    if (!(row.weight > 0.0)) throw ValidationError("capability MDP: weight of " + where + " must be positive");
    double sum = 0.0;
    for (const auto& [next, pj] : t.at("next").items()) {
      double prob = pj.get<double>();
      if (!(prob >= 0.0) || prob > 1.0) throw ValidationError("capability MDP: bad probability in row " + where);
      sum += prob;
      if (prob > 0.0) add_outcome(row.outcomes, state_of(next), prob);
    }
    if (std::abs(sum - 1.0) > kRowTolerance)
      throw ValidationError("capability MDP: row " + where + " sums to " + fmt_prob(sum));
    std::sort(row.outcomes.begin(), row.outcomes.end(), [](auto& x, auto& y) { return x.target < y.target; });
    te.rows[ix(s)].push_back(std::move(row));
  }
  for (auto& rows : te.rows)
    std::sort(rows.begin(), rows.end(), [](auto& x, auto& y) { return x.action < y.action; });

  for (const auto& alphabet : subtask_alphabets) check_prerequisite(te, alphabet);
  return te;
}

json to_json(const CapabilityMdp& te) {
  json labels = json::object();
  for (std::size_t s = 0; s < te.states.size(); ++s)
    labels[te.states[s]] = te.labels[s] ? json(*te.labels[s]) : json(nullptr);
  json transitions = json::array();
  for (std::size_t s = 0; s < te.states.size(); ++s)
    for (const auto& r : te.rows[s]) {
      json next = json::object();
      for (const auto& o : r.outcomes) next[te.states[ix(o.target)]] = o.prob;
      transitions.push_back({{"state", te.states[s]}, {"action", te.actions[ix(r.action)]}, {"next", next}, {"weight", r.weight}});
    }
  json out = {{"states", te.states},       {"actions", te.actions},         {"propositions", te.propositions},
              {"labels", labels},          {"initial", te.states[ix(te.initial)]}, {"transitions", transitions}};
  out["failure"] = te.failure >= 0 ? json(te.states[ix(te.failure)]) : json(nullptr);
  return out;
}

// ---------------------------------------------------------------------------
// product

int ProductMdp::index_of(ProductState p) const {
  auto it = lookup.find(p);
  return it == lookup.end() ? -1 : it->second;
}

int ProductMdp::ensure(ProductState p) {
  if (int i = index_of(p); i >= 0) return i;
  std::deque<int> queue;
  auto intern = [&](ProductState q) {
    auto [it, fresh] = lookup.emplace(q, num_states());
    if (fresh) {
      states.push_back(q);
      rows.emplace_back();
      accepting.push_back(task.is_accepting(q.x));
      queue.push_back(it->second);
    }
    return it->second;
  };
  const int result = intern(p);
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    const ProductState cur = states[ix(i)];
    std::vector<ActionRow> built;
    for (const auto& r : team.rows[ix(cur.s)]) {
      ActionRow row{r.action, {}, r.weight};
      for (const auto& o : r.outcomes) {
        const auto& label = team.labels[ix(o.target)];
        ProductState next{o.target, cur.x};
        if (label) {
          int letter = task.letter_index(*label);
          int nx = letter >= 0 ? task.next(cur.x, letter) : automata::kNoState;
          next = nx != automata::kNoState ? ProductState{o.target, nx} : ProductState{team.failure, cur.x};
        }
        add_outcome(row.outcomes, intern(next), o.prob);
      }
      built.push_back(std::move(row));
    }
    rows[ix(i)] = std::move(built);
  }
  return result;
}

ProductMdp product_task(const CapabilityMdp& te, const automata::Dfa& g) {
  check_prerequisite(te, g.alphabet());
  ProductMdp p;
  p.team = te;
  p.task = g;
  if (p.team.failure < 0) {
    std::string name = "s_fail";
    while (p.team.state_index(name) >= 0) name += "_";
    p.team.states.push_back(name);
    p.team.labels.push_back(std::nullopt);
    p.team.rows.emplace_back();
    p.team.failure = p.team.num_states() - 1;
  }
  int x1 = g.initial();
  if (const auto& l0 = te.labels[ix(te.initial)]) {
    int letter = g.letter_index(*l0);
    int nx = letter >= 0 ? g.next(x1, letter) : automata::kNoState;
    if (nx != automata::kNoState) x1 = nx;
  }
  p.initial = p.ensure({te.initial, x1});
  return p;
}

std::string to_dot(const ProductMdp& p, const std::string& name) {
  std::string out = "digraph " + name + " {\n  rankdir=LR;\n";
  auto node = [&](int i) {
    return "\"" + p.team.states[ix(p.states[ix(i)].s)] + "," + std::to_string(p.states[ix(i)].x) + "\"";
  };
  out += "  start [shape=point];\n  start -> " + node(p.initial) + ";\n";
  for (int i = 0; i < p.num_states(); ++i)
    if (p.accepting[ix(i)]) out += "  " + node(i) + " [shape=doublecircle];\n";
  for (int i = 0; i < p.num_states(); ++i)
    for (const auto& r : p.rows[ix(i)])
      for (const auto& o : r.outcomes)
        out += "  " + node(i) + " -> " + node(o.target) + " [label=\"" + p.team.actions[ix(r.action)] + ":" +
               fmt_prob(o.prob) + "\"];\n";
  out += "}\n";
  return out;
}

json to_json(const ProductMdp& p) {
  json states = json::array();
  for (int i = 0; i < p.num_states(); ++i)
    states.push_back({{"s", p.team.states[ix(p.states[ix(i)].s)]}, {"x", p.states[ix(i)].x}, {"accepting", bool(p.accepting[ix(i)])}});
  json transitions = json::array();
  for (int i = 0; i < p.num_states(); ++i)
    for (const auto& r : p.rows[ix(i)])
      for (const auto& o : r.outcomes) transitions.push_back({i, p.team.actions[ix(r.action)], o.target, o.prob});
  return {{"states", states}, {"initial", p.initial}, {"transitions", transitions}};
}

// ---------------------------------------------------------------------------
// motion

const char* move_name(Move m) {
  static const char* names[] = {"N", "S", "E", "W", "NE", "NW", "SE", "SW", "stay"};
  return names[static_cast<int>(m)];
}

Cell step(Cell c, Move m) {
  switch (m) {
    case Move::N: return {c.row - 1, c.col};
    case Move::S: return {c.row + 1, c.col};
    case Move::E: return {c.row, c.col + 1};
    case Move::W: return {c.row, c.col - 1};
    case Move::NE: return {c.row - 1, c.col + 1};
    case Move::NW: return {c.row - 1, c.col - 1};
    case Move::SE: return {c.row + 1, c.col + 1};
    case Move::SW: return {c.row + 1, c.col - 1};
    case Move::Stay: return c;
  }
  return c;
}

MotionMdp build_motion_mdp(const terrain::CellGrid& grid, const std::map<std::string, Cell>& forts, double slip) {
  if (!(slip >= 0.0 && slip <= 0.2)) throw ValidationError("slip must lie in [0, 0.2]");
  MotionMdp m;
  m.rows = grid.rows;
  m.cols = grid.cols;
  m.slip = slip;
  m.traversable.resize(ix(grid.size()));
  m.fort.resize(ix(grid.size()));
  m.transitions.resize(ix(grid.size()));
  for (int i = 0; i < grid.size(); ++i) m.traversable[ix(i)] = !grid.stats[ix(i)].nogo;

  for (const auto& [name, c] : forts) {
    if (!grid.in_bounds(c)) throw ValidationError("fort '" + name + "' lies outside the grid");
    if (grid.at(c).nogo) throw ValidationError("fort '" + name + "' lies on a no-go cell");
    auto& slot = m.fort[ix(grid.index(c))];
    if (slot) throw ValidationError("forts '" + *slot + "' and '" + name + "' share a cell");
    slot = name;
  }

  for (int i = 0; i < grid.size(); ++i) {
    if (!m.traversable[ix(i)]) continue;
    const Cell c = grid.cell(i);
    std::vector<std::pair<int, int>> feasible;  // (move, target)
    for (int k = 0; k < kNumMoves - 1; ++k) {
      Cell n = step(c, static_cast<Move>(k));
      if (grid.traversable(n)) feasible.push_back({k, grid.index(n)});
    }
    for (const auto& [k, target] : feasible) {
      ActionRow row{k, {}, 1.0};
      const double others = static_cast<double>(feasible.size() - 1);
      row.outcomes.push_back({target, others > 0 ? 1.0 - slip : 1.0});
      if (others > 0 && slip > 0.0)
        for (const auto& [k2, t2] : feasible)
          if (k2 != k) row.outcomes.push_back({t2, slip / others});
      m.transitions[ix(i)].push_back(std::move(row));
    }
    m.transitions[ix(i)].push_back({static_cast<int>(Move::Stay), {{i, 1.0}}, 1.0});
  }
  return m;
}

// ---------------------------------------------------------------------------
// planning

bool PlanningMdp::has_accepting() const { return std::find(accepting.begin(), accepting.end(), true) != accepting.end(); }

std::string PlanningMdp::action_name(const PlanningRow& row) const {
  std::string task = row.task_action == kHold ? "hold" : product.team.actions[ix(row.task_action)];
  return task + "/" + move_name(static_cast<Move>(row.move));
}

PlanningMdp compose_planning_mdp(const ProductMdp& p, const MotionMdp& m, Cell start) {
  if (start.row < 0 || start.row >= m.rows || start.col < 0 || start.col >= m.cols || !m.traversable[ix(m.index(start))])
    throw ValidationError("start cell (" + std::to_string(start.row) + "," + std::to_string(start.col) +
                          ") is not traversable");
  PlanningMdp out;
  out.product = p;
  out.motion = m;
  ProductMdp& prod = out.product;

  std::map<PlanningState, int> lookup;
  std::deque<int> queue;
  auto intern = [&](PlanningState s) {
    auto [it, fresh] = lookup.emplace(s, out.num_states());
    if (fresh) {
      out.states.push_back(s);
      out.rows.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  };
  out.initial = intern({prod.initial, m.index(start)});

  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    const PlanningState cur = out.states[ix(i)];
    const std::vector<ActionRow> task_rows = prod.rows[ix(cur.product)];
    const auto& moves = m.transitions[ix(cur.cell)];
    std::vector<PlanningRow> built;

    // forts whose exploration the product allows from here; entering one
    // forces that task step
    std::set<std::string> forcing;
    for (const auto& tr : task_rows)
      for (const auto& to : tr.outcomes)
        if (!prod.is_failure(to.target) && prod.label(to.target)) forcing.insert(*prod.label(to.target));
    auto forced = [&](int c) -> const std::optional<std::string>* {
      const auto& fort = m.fort[ix(c)];
      return fort && forcing.count(*fort) ? &fort : nullptr;
    };
    auto failure_pair = [&] { return prod.ensure({prod.team.failure, prod.states[ix(cur.product)].x}); };

    for (const auto& mv : moves) {
      PlanningRow row{kHold, mv.action, {}};
      for (const auto& mo : mv.outcomes) {
        int task_target = forced(mo.target) ? failure_pair() : cur.product;
        add_outcome(row.outcomes, intern({task_target, mo.target}), mo.prob);
      }
      built.push_back(std::move(row));
    }

    for (const auto& tr : task_rows) {
      for (const auto& mv : moves) {
        PlanningRow row{tr.action, mv.action, {}};
        bool fired = false;
        for (const auto& mo : mv.outcomes) {
          const auto* fort = forced(mo.target);
          bool match = false;
          if (fort)
            for (const auto& to : tr.outcomes)
              if (!prod.is_failure(to.target) && prod.label(to.target) == *fort) match = true;
          if (!fort) {
            add_outcome(row.outcomes, intern({cur.product, mo.target}), mo.prob);
          } else if (!match) {
            add_outcome(row.outcomes, intern({failure_pair(), mo.target}), mo.prob);
          } else {
            fired = true;
            for (const auto& to : tr.outcomes) {
              int task_target = prod.label(to.target) == *fort ? to.target : failure_pair();
              add_outcome(row.outcomes, intern({task_target, mo.target}), to.prob * mo.prob);
            }
          }
        }
        if (fired) built.push_back(std::move(row));
      }
    }
    out.rows[ix(i)] = std::move(built);
  }

  out.accepting.resize(ix(out.num_states()));
  out.failure.resize(ix(out.num_states()));
  for (int i = 0; i < out.num_states(); ++i) {
    out.accepting[ix(i)] = prod.accepting[ix(out.states[ix(i)].product)];
    out.failure[ix(i)] = prod.is_failure(out.states[ix(i)].product);
  }
  return out;
}

json to_json(const PlanningMdp& ppm) {
  json states = json::array();
  for (int i = 0; i < ppm.num_states(); ++i) {
    const auto& t = ppm.task_of(i);
    Cell c = ppm.cell_of(i);
    states.push_back({{"s", ppm.product.team.states[ix(t.s)]},
                      {"x", t.x},
                      {"row", c.row},
                      {"col", c.col},
                      {"accepting", bool(ppm.accepting[ix(i)])},
                      {"failure", bool(ppm.failure[ix(i)])}});
  }
  json transitions = json::array();
  for (int i = 0; i < ppm.num_states(); ++i)
    for (const auto& r : ppm.rows[ix(i)])
      for (const auto& o : r.outcomes)
        transitions.push_back({i,
                               r.task_action == kHold ? std::string("hold") : ppm.product.team.actions[ix(r.task_action)],
                               move_name(static_cast<Move>(r.move)), o.target, o.prob});
  return {{"states", states}, {"initial", ppm.initial}, {"transitions", transitions}};
}

// ---------------------------------------------------------------------------
// stochasticity

std::vector<std::string> stochastic_violations(const CapabilityMdp& m) {
  std::vector<std::string> out;
  check_rows(m.rows, "capability",
             [&](int s, const ActionRow& r) { return "(" + m.states[ix(s)] + ", " + m.actions[ix(r.action)] + ")"; }, out);
  return out;
}

std::vector<std::string> stochastic_violations(const ProductMdp& m) {
  std::vector<std::string> out;
  check_rows(m.rows, "product",
             [&](int s, const ActionRow& r) {
               return "((" + m.team.states[ix(m.states[ix(s)].s)] + "," + std::to_string(m.states[ix(s)].x) + "), " +
                      m.team.actions[ix(r.action)] + ")";
             },
             out);
  return out;
}

std::vector<std::string> stochastic_violations(const MotionMdp& m) {
  std::vector<std::string> out;
  check_rows(m.transitions, "motion",
             [&](int c, const ActionRow& r) {
               return "((" + std::to_string(c / m.cols) + "," + std::to_string(c % m.cols) + "), " +
                      move_name(static_cast<Move>(r.action)) + ")";
             },
             out);
  for (int c = 0; c < m.num_cells(); ++c)
    for (const auto& r : m.transitions[ix(c)])
      for (const auto& o : r.outcomes)
        if (!m.traversable[ix(o.target)]) out.push_back("motion row enters no-go cell " + std::to_string(o.target));
  return out;
}

std::vector<std::string> stochastic_violations(const PlanningMdp& m) {
  std::vector<std::string> out;
  for (int i = 0; i < m.num_states(); ++i)
    for (const auto& r : m.rows[ix(i)]) {
      double sum = 0.0;
      bool bad = false;
      for (const auto& o : r.outcomes) {
        sum += o.prob;
        if (!(o.prob > 0.0)) bad = true;
      }
      if (std::abs(sum - 1.0) > kRowTolerance || bad)
        out.push_back("planning row (" + std::to_string(i) + ", " + m.action_name(r) + ") sums to " + fmt_prob(sum));
    }
  return out;
}

}  // namespace overwatch::mdp
