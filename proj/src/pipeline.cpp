#include "overwatch/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "overwatch/error.hpp"
#include "overwatch/render.hpp"
#include "overwatch/spec_lang.hpp"

namespace overwatch::pipeline {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Runs one stage, prefixing its diagnostics with the stage name.
template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  const std::string tag = std::string("[") + name + "] ";
  try {
    return f();
  } catch (const ParseError& e) {
    throw ValidationError(tag + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(tag + e.what());
  } catch (const IoError& e) {
    throw IoError(tag + e.what());
  } catch (const json::exception& e) {
    throw ValidationError(tag + e.what());
  }
}

terrain::Cell cell_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ValidationError(what + " must be [row, col]");
  return {j[0].get<int>(), j[1].get<int>()};
}

trust::Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("expected 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

trust::Mat3 mat3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("expected a 3x3 matrix");
  return {vec3(j[0]), vec3(j[1]), vec3(j[2])};
}

// "nearest_psd": true asks for the covariance to be projected before use.
trust::Mat3 covariance(const json& j) {
  trust::Mat3 m = mat3(j.at("beta_cov"));
  if (j.value("nearest_psd", false)) m = trust::nearest_psd(m);
  return m;
}

trust::TrustParams trust_from(const json& j) {
  trust::TrustParams p;
  p.beta_mean = vec3(j.at("beta_mean"));
  if (j.contains("beta_cov")) p.beta_cov = covariance(j);
  p.residual_var = j.value("residual_var", 0.0);
  if (j.contains("tau0")) {
    const auto& t = j.at("tau0");
    if (!t.is_array() || t.size() != 2) throw ValidationError("tau0 must be [mean, var]");
    p.tau0 = {t[0].get<double>(), t[1].get<double>()};
  }
  p.validate();
  return p;
}

automata::Dfa evaluate(const spec::SpecAst& e, const std::map<std::string, automata::Dfa>& tasks) {
  using spec::NodeKind;
  auto sub = [&](std::size_t i) { return evaluate(e.children.at(i), tasks); };
  switch (e.kind) {
    case NodeKind::Atom: {
      auto it = tasks.find(e.atom);
      if (it == tasks.end()) throw ValidationError("combine names unknown task '" + e.atom + "'");
      return it->second;
    }
    case NodeKind::Concat:
    case NodeKind::Union: {
      std::vector<automata::Dfa> ops{sub(0), sub(1)};
      return automata::combine(e.kind == NodeKind::Concat ? automata::CombineKind::Concat : automata::CombineKind::Union,
                               ops);
    }
    case NodeKind::Star: {
      std::vector<automata::Dfa> ops{sub(0)};
      return automata::combine(automata::CombineKind::Star, ops);
    }
    default:
      throw ValidationError("combine supports task ids, concatenation, union and star only");
  }
}

std::string team_file(int team, const char* suffix) { return "team" + std::to_string(team) + suffix; }

}  // namespace

const char* status_name(Status s) {
  switch (s) {
    case Status::Planned: return "planned";
    case Status::Unsatisfiable: return "unsatisfiable";
    case Status::Idle: return "idle";
  }
  return "?";
}

bool PipelineResult::any_unsatisfiable() const {
  for (const auto& v : variants)
    for (const auto& t : v.teams)
      if (t.status == Status::Unsatisfiable) return true;
  return false;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size())))
    throw IoError("cannot write " + path.string());
}

Scenario parse_scenario(const json& j, const fs::path& base_dir) {
  return stage("scenario", [&] {
    Scenario s;
    const auto& t = j.at("terrain");
    s.terrain.pgm = base_dir / t.at("pgm").get<std::string>();
    s.terrain.resolution = t.value("resolution", 1.0);
    s.terrain.cell_size = t.value("cell_size", 8);
    s.terrain.sensing_radius = t.value("sensing_radius", 4);
    s.terrain.g_min = t.value("g_min", 0.0);
    s.terrain.slip = t.value("slip", 0.0);

    for (const auto& [name, cell] : j.at("forts").items()) {
      if (!automata::is_identifier(name)) throw ValidationError("fort name '" + name + "' is not an identifier");
      s.forts[name] = cell_from(cell, "fort " + name);
    }

    std::set<std::string> ids;
    for (const auto& task : j.at("tasks")) {
      TaskSpec ts{task.at("id").get<std::string>(), task.value("kind", "re"), task.at("text").get<std::string>()};
      if (ts.kind != "re" && ts.kind != "ltl") throw ValidationError("task " + ts.id + ": kind must be re or ltl");
      if (!automata::is_identifier(ts.id)) throw ValidationError("task id '" + ts.id + "' is not an identifier");
      if (!ids.insert(ts.id).second) throw ValidationError("duplicate task id " + ts.id);
      s.tasks.push_back(ts);
    }
    if (s.tasks.empty()) throw ValidationError("no tasks");
    s.combine = j.value("combine", "");
    if (s.combine.empty() && s.tasks.size() != 1) throw ValidationError("several tasks need a combine expression");

    std::set<int> team_ids;
    for (const auto& tj : j.at("teams")) {
      TeamConfig tc;
      tc.id = tj.at("id").get<int>();
      if (!team_ids.insert(tc.id).second) throw ValidationError("duplicate team id " + std::to_string(tc.id));
      const auto& cap = tj.at("capability");
      tc.capability = cap.is_string() ? read_json(base_dir / cap.get<std::string>()) : cap;
      tc.start = cell_from(tj.at("start"), "team start");
      tc.trust = trust_from(tj.at("trust"));
      s.teams.push_back(std::move(tc));
    }
    std::sort(s.teams.begin(), s.teams.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    if (j.contains("variants")) {
      for (const auto& vj : j.at("variants")) {
        Variant v;
        v.name = vj.at("name").get<std::string>();
        if (v.name.empty() || v.name.find_first_of("/\\.") != std::string::npos)
          throw ValidationError("variant name '" + v.name + "' is not a plain directory name");
        if (vj.contains("beta_mean")) v.beta_mean = vec3(vj.at("beta_mean"));
        if (vj.contains("beta_cov")) v.beta_cov = covariance(vj);
        if (vj.contains("residual_var")) v.residual_var = vj.at("residual_var").get<double>();
        for (const auto& other : s.variants)
          if (other.name == v.name) throw ValidationError("duplicate variant " + v.name);
        s.variants.push_back(v);
      }
    }
    if (s.variants.empty()) s.variants.push_back(Variant{});
    for (const auto& v : s.variants)
      for (const auto& team : s.teams) apply(v, team.trust).validate();

    const auto& sj = j.value("sim", json::object());
    s.speed = sj.value("speed", 1.0);
    s.dt = sj.value("dt", 0.1);
    if (!(s.speed > 0) || !(s.dt > 0)) throw ValidationError("sim speed and dt must be positive");
    s.seed = j.value("seed", std::uint64_t{0});
    return s;
  });
}

Scenario load_scenario(const fs::path& path) {
  json j = stage("scenario", [&] { return read_json(path); });
  Scenario s = parse_scenario(j, fs::absolute(path).parent_path());
  if (const char* env = std::getenv("OVERWATCH_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ValidationError("[scenario] OVERWATCH_SEED is not an unsigned integer");
    s.seed = v;
  }
  return s;
}

trust::TrustParams apply(const Variant& v, trust::TrustParams p) {
  if (v.beta_mean) p.beta_mean = *v.beta_mean;
  if (v.beta_cov) p.beta_cov = *v.beta_cov;
  if (v.residual_var) p.residual_var = *v.residual_var;
  return p;
}

automata::Dfa global_task(const Scenario& s) {
  return stage("compile", [&] {
    std::vector<spec::SpecAst> asts;
    std::vector<std::string> letters;
    for (const auto& t : s.tasks) {
      asts.push_back(t.kind == "re" ? spec::parse_re(t.text) : spec::parse_ltl(t.text));
      for (const auto& a : spec::atoms(asts.back())) {
        if (!s.forts.count(a)) throw ValidationError("task " + t.id + ": atom '" + a + "' names no fort");
        letters.push_back(a);
      }
    }
    const auto alphabet = automata::make_alphabet(letters);
    std::map<std::string, automata::Dfa> compiled;
    for (std::size_t i = 0; i < s.tasks.size(); ++i) compiled[s.tasks[i].id] = spec::compile(asts[i], alphabet);
    if (s.combine.empty()) return compiled.begin()->second;
    return automata::minimize(automata::trim(evaluate(spec::parse_re(s.combine), compiled)));
  });
}

terrain::CellGrid build_grid(const Scenario& s) {
  return stage("terrain", [&] {
    auto map = terrain::load_heightmap_file(s.terrain.pgm, s.terrain.resolution);
    terrain::DiscretizeOptions opt;
    opt.cell_size = s.terrain.cell_size;
    opt.sensing_radius = s.terrain.sensing_radius;
    opt.g_min = s.terrain.g_min;
    return terrain::discretize(map, opt);
  });
}

std::vector<int> assign_teams(const decomp::Decomposition& d, const std::vector<TeamConfig>& teams) {
  if (teams.size() < d.size())
    throw ValidationError("insufficient teams: " + std::to_string(d.size()) + " subtasks, " +
                          std::to_string(teams.size()) + " teams");
  std::vector<int> ids;
  for (const auto& t : teams) ids.push_back(t.id);
  std::sort(ids.begin(), ids.end());
  return {ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(d.size())};
}

PipelineResult run_pipeline(const Scenario& s) {
  PipelineResult r;
  r.seed = s.seed;
  r.global = global_task(s);
  r.decomposition = stage("decompose", [&] { return decomp::decompose(r.global); });
  r.assignment = stage("assign", [&] { return assign_teams(r.decomposition, s.teams); });
  r.grid = build_grid(s);
  const auto motion = stage("motion", [&] {
    for (const auto& t : s.teams)
      if (!r.grid.traversable(t.start))
        throw ValidationError("team " + std::to_string(t.id) + " starts on a blocked or off-map cell");
    return mdp::build_motion_mdp(r.grid, s.forts, s.terrain.slip);
  });

  for (const auto& t : s.teams) {
    TeamModel m;
    m.team = t.id;
    auto it = std::find(r.assignment.begin(), r.assignment.end(), t.id);
    if (it != r.assignment.end()) {
      m.subtask = static_cast<int>(it - r.assignment.begin());
      const auto& part = r.decomposition.parts[static_cast<std::size_t>(m.subtask)];
      m.ppm = stage("product", [&] {
        const auto& block = r.decomposition.partition[static_cast<std::size_t>(m.subtask)];
        auto te = mdp::validate_capability_mdp(t.capability, std::span<const automata::Alphabet>(&block, 1));
        return mdp::compose_planning_mdp(mdp::product_task(te, part), motion, t.start);
      });
      m.ppm_json = mdp::to_json(*m.ppm);
    }
    r.models.push_back(std::move(m));
  }

  for (const auto& v : s.variants) {
    VariantResult vr;
    vr.variant = v;
    std::vector<sim::TeamPlan> team_plans;
    for (std::size_t i = 0; i < s.teams.size(); ++i) {
      const auto& t = s.teams[i];
      const auto& m = r.models[i];
      TeamOutcome o;
      o.team = t.id;
      o.subtask = m.subtask;
      if (m.ppm) {
        const auto params = apply(v, t.trust);
        try {
          plan::Plan p = stage("plan", [&] { return plan::optm_path(*m.ppm, r.grid, params); });
          o.plan_json = plan::to_json(p, *m.ppm, r.grid, t.id);
          o.plan_problems = plan::validate_plan(o.plan_json, m.ppm_json);
          team_plans.push_back(sim::team_plan(p, r.grid, t.id));
          o.plan = std::move(p);
          o.status = Status::Planned;
        } catch (const UnsatisfiableError& e) {
          o.status = Status::Unsatisfiable;
          o.message = std::string("[plan] ") + e.what();
        }
      } else {
        o.message = "no subtask assigned";
      }
      vr.teams.push_back(std::move(o));
    }
    vr.log = stage("sim", [&] { return sim::run_sim(team_plans, r.grid, s.speed, s.dt); });
    r.variants.push_back(std::move(vr));
  }
  return r;
}

json report(const PipelineResult& r) {
  json subtasks = json::array();
  for (std::size_t i = 0; i < r.decomposition.size(); ++i)
    subtasks.push_back({{"index", i},
                        {"alphabet", r.decomposition.partition[i]},
                        {"states", r.decomposition.parts[i].num_states()},
                        {"team", r.assignment[i]}});
  json variants = json::array();
  for (const auto& v : r.variants) {
    json teams = json::array();
    for (const auto& t : v.teams) {
      json tj = {{"team", t.team}, {"status", status_name(t.status)}, {"subtask", t.subtask}};
      if (!t.message.empty()) tj["message"] = t.message;
      if (t.plan) {
        tj["steps"] = t.plan->path.size();
        tj["terminal_trust"] = {{"mean", t.plan->terminal_trust.mean}, {"var", t.plan->terminal_trust.var}};
        tj["positive_trust"] = t.plan->positive_trust;
        tj["plan_problems"] = t.plan_problems;
      }
      teams.push_back(tj);
    }
    json finished = json::array();
    for (const auto& tr : v.log.teams)
      finished.push_back({{"team", tr.team}, {"completed", tr.completed}, {"finish_time", tr.finish_time}});
    variants.push_back({{"name", v.variant.name}, {"teams", teams}, {"sim", finished}});
  }
  return {{"seed", r.seed},
          {"global_states", r.global.num_states()},
          {"decomposition_verified", r.decomposition.verified},
          {"subtasks", subtasks},
          {"variants", variants}};
}

void write_plans(const PipelineResult& r, const fs::path& out_dir) {
  stage("output", [&] {
    write_file(out_dir / "report.json", report(r).dump(2) + "\n");
    json parts = json::array();
    for (std::size_t i = 0; i < r.decomposition.size(); ++i)
      parts.push_back({{"alphabet", r.decomposition.partition[i]}, {"dfa", automata::to_json(r.decomposition.parts[i])}});
    json dj = {{"global", automata::to_json(r.global)},
               {"parts", parts},
               {"certificate", {{"verified", r.decomposition.verified},
                                {"recomposes", decomp::check_decomposition(r.global, r.decomposition.parts)}}}};
    write_file(out_dir / "decomposition.json", dj.dump(2) + "\n");
    write_file(out_dir / "terrain.csv", terrain::to_csv(r.grid));
    for (const auto& v : r.variants) {
      const fs::path dir = out_dir / v.variant.name;
      fs::create_directories(dir);
      for (const auto& t : v.teams) {
        if (!t.plan) continue;
        write_file(dir / team_file(t.team, ".plan.json"), t.plan_json.dump(2) + "\n");
        write_file(dir / team_file(t.team, ".trust.csv"), trust::timeline_csv(t.plan->beliefs));
      }
    }
  });
}

std::vector<StoredPlan> read_plans(const fs::path& dir) {
  return stage("plans", [&] {
    if (!fs::is_directory(dir)) throw IoError("no plan directory " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      const auto name = e.path().filename().string();
      if (name.rfind("team", 0) == 0 && name.size() > 10 && name.substr(name.size() - 10) == ".plan.json")
        files.push_back(e.path());
    }
    std::vector<StoredPlan> out;
    for (const auto& f : files) {
      json j = read_json(f);
      StoredPlan sp;
      sp.team = j.at("team").get<int>();
      for (const auto& step : j.at("path")) {
        sp.cells.push_back({step.at("row").get<int>(), step.at("col").get<int>()});
        sp.beliefs.push_back({step.at("trust_mean").get<double>(), step.at("trust_var").get<double>()});
      }
      out.push_back(std::move(sp));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.team < b.team; });
    return out;
  });
}

sim::SimLog simulate(const std::vector<StoredPlan>& plans, const terrain::CellGrid& grid, double speed, double dt) {
  return stage("sim", [&] {
    std::vector<sim::TeamPlan> team_plans;
    for (const auto& sp : plans) {
      plan::Plan p;
      p.cells = sp.cells;
      p.beliefs = sp.beliefs;
      for (const auto& c : p.cells)
        if (!grid.in_bounds(c)) throw ValidationError("team " + std::to_string(sp.team) + " plan leaves the grid");
      team_plans.push_back(sim::team_plan(p, grid, sp.team));
    }
    return sim::run_sim(team_plans, grid, speed, dt);
  });
}

std::string render_plans(const Scenario& s, const terrain::CellGrid& grid, const std::vector<StoredPlan>& plans,
                         bool line_of_sight) {
  std::vector<render::PathOverlay> overlays;
  for (std::size_t i = 0; i < plans.size(); ++i)
    overlays.push_back({"team " + std::to_string(plans[i].team), render::team_color(i), plans[i].cells});
  return render::paths_svg(grid, line_of_sight ? render::Layer::LineOfSight : render::Layer::Traversability, s.forts,
                           overlays);
}

void write_all(const PipelineResult& r, const Scenario& s, const fs::path& out_dir) {
  write_plans(r, out_dir);
  stage("output", [&] {
    for (auto layer : {render::Layer::Traversability, render::Layer::LineOfSight})
      write_file(out_dir / (std::string(render::layer_name(layer)) + ".svg"), render::heatmap_svg(r.grid, layer, s.forts));
    for (const auto& v : r.variants) {
      const fs::path dir = out_dir / v.variant.name;
      std::vector<StoredPlan> stored;
      for (const auto& t : v.teams)
        if (t.plan) stored.push_back({t.team, t.plan->cells, t.plan->beliefs});
      write_file(dir / "sim.csv", sim::to_csv(v.log));
      write_file(dir / "trajectory.svg", render::trajectory_svg(r.grid, s.forts, v.log));
      write_file(dir / "paths_traversability.svg", render_plans(s, r.grid, stored, false));
      write_file(dir / "paths_line_of_sight.svg", render_plans(s, r.grid, stored, true));
    }
    // one map per team with every variant's path
    for (std::size_t i = 0; i < r.models.size(); ++i) {
      std::vector<render::PathOverlay> overlays;
      for (std::size_t k = 0; k < r.variants.size(); ++k) {
        const auto& t = r.variants[k].teams[i];
        if (t.plan) overlays.push_back({r.variants[k].variant.name, render::team_color(k + 2), t.plan->cells});
      }
      if (overlays.empty()) continue;
      write_file(out_dir / team_file(r.models[i].team, ".variants.svg"),
                 render::paths_svg(r.grid, render::Layer::LineOfSight, s.forts, overlays));
    }
  });
}

}  // namespace overwatch::pipeline
