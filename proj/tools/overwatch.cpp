// overwatch: command-line front end for the planning toolkit.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "overwatch/automata.hpp"
#include "overwatch/decomp.hpp"
#include "overwatch/error.hpp"
#include "overwatch/pipeline.hpp"
#include "overwatch/render.hpp"
#include "overwatch/spec_lang.hpp"
#include "overwatch/terrain.hpp"

namespace fs = std::filesystem;
using namespace overwatch;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kValidation = 2, kUnsatisfiable = 3, kIo = 4 };

int spec_compile(const std::string& re, const std::string& ltl, const std::vector<std::string>& extra, bool dot) {
  const bool is_re = !re.empty();
  auto ast = is_re ? spec::parse_re(re) : spec::parse_ltl(ltl);
  auto letters = spec::atoms(ast);
  letters.insert(letters.end(), extra.begin(), extra.end());
  auto dfa = spec::compile(ast, automata::make_alphabet(letters));
  std::cout << (dot ? automata::to_dot(dfa) : automata::to_json(dfa).dump(2) + "\n");
  return kOk;
}

int spec_decompose(const fs::path& file, bool dot) {
  auto g = automata::dfa_from_json(pipeline::read_json(file));
  auto d = decomp::decompose(g);
  if (dot) {
    for (std::size_t i = 0; i < d.size(); ++i) std::cout << automata::to_dot(d.parts[i], "G" + std::to_string(i + 1));
    return kOk;
  }
  json parts = json::array();
  for (std::size_t i = 0; i < d.size(); ++i)
    parts.push_back({{"alphabet", d.partition[i]}, {"dfa", automata::to_json(d.parts[i])}});
  json out = {{"parts", parts},
              {"certificate",
               {{"verified", d.verified}, {"recomposes", decomp::check_decomposition(g, d.parts)}, {"n", d.size()}}}};
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int terrain_stats(const fs::path& pgm, int cell_size, int radius, double resolution, double g_min) {
  auto map = terrain::load_heightmap_file(pgm, resolution);
  terrain::DiscretizeOptions opt;
  opt.cell_size = cell_size;
  opt.sensing_radius = radius;
  opt.g_min = g_min;
  std::cout << terrain::to_csv(terrain::discretize(map, opt));
  return kOk;
}

void print_status(const pipeline::PipelineResult& r) {
  std::fprintf(stderr, "subtasks: %zu (verified %s)\n", r.decomposition.size(), r.decomposition.verified ? "yes" : "no");
  for (const auto& v : r.variants)
    for (const auto& t : v.teams) {
      std::fprintf(stderr, "%s team %d: %s", v.variant.name.c_str(), t.team, pipeline::status_name(t.status));
      if (t.plan) std::fprintf(stderr, ", %zu steps, terminal trust %.4f", t.plan->path.size(), t.plan->terminal_trust.mean);
      if (!t.message.empty()) std::fprintf(stderr, " (%s)", t.message.c_str());
      std::fprintf(stderr, "\n");
    }
}

int plan_cmd(const fs::path& scenario, const fs::path& out_dir, bool all) {
  auto s = pipeline::load_scenario(scenario);
  auto r = pipeline::run_pipeline(s);
  if (all)
    pipeline::write_all(r, s, out_dir);
  else
    pipeline::write_plans(r, out_dir);
  print_status(r);
  return r.any_unsatisfiable() ? kUnsatisfiable : kOk;
}

int simulate_cmd(const fs::path& scenario, const fs::path& plans, std::optional<fs::path> out) {
  auto s = pipeline::load_scenario(scenario);
  auto grid = pipeline::build_grid(s);
  auto log = pipeline::simulate(pipeline::read_plans(plans), grid, s.speed, s.dt);
  pipeline::write_file(out.value_or(plans / "sim.csv"), sim::to_csv(log));
  return kOk;
}

int render_cmd(const fs::path& scenario, const fs::path& plans, const fs::path& out, const std::string& layer,
               bool trajectory) {
  auto s = pipeline::load_scenario(scenario);
  auto grid = pipeline::build_grid(s);
  auto stored = pipeline::read_plans(plans);
  if (trajectory) {
    auto log = pipeline::simulate(stored, grid, s.speed, s.dt);
    pipeline::write_file(out, render::trajectory_svg(grid, s.forts, log));
  } else {
    pipeline::write_file(out, pipeline::render_plans(s, grid, stored, layer == "los"));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-based symbolic motion planning for bounding overwatch teams"};
  app.require_subcommand(1);

  auto* spec = app.add_subcommand("spec", "Task specifications");
  spec->require_subcommand(1);
  std::string re, ltl;
  std::vector<std::string> extra;
  bool dot = false, json_out = false;
  auto* compile = spec->add_subcommand("compile", "Compile an RE or LTL formula to a minimal DFA");
  auto* re_opt = compile->add_option("--re", re, "Regular expression");
  auto* ltl_opt = compile->add_option("--ltl", ltl, "Co-safe LTL formula");
  re_opt->excludes(ltl_opt);
  compile->add_option("--alphabet", extra, "Extra letters beyond the formula's atoms")->delimiter(',');
  auto* dot_flag = compile->add_flag("--dot", dot, "Graphviz output");
  compile->add_flag("--json", json_out, "JSON output (default)")->excludes(dot_flag);

  fs::path automaton;
  bool decomp_dot = false;
  auto* decompose = spec->add_subcommand("decompose", "Split a task DFA into parallel subtasks");
  decompose->add_option("automaton", automaton, "DFA JSON file")->required();
  decompose->add_flag("--dot", decomp_dot, "Graphviz output for each part");

  auto* terrain_cmd = app.add_subcommand("terrain", "Heightmap analysis");
  terrain_cmd->require_subcommand(1);
  fs::path pgm;
  int cell_size = 8, radius = 4;
  double resolution = 1.0, g_min = 0.0;
  auto* stats = terrain_cmd->add_subcommand("stats", "Per-cell statistics as CSV");
  stats->add_option("map", pgm, "PGM heightmap")->required();
  stats->add_option("--cell-size", cell_size, "Cell size in pixels")->capture_default_str();
  stats->add_option("--sensing-radius", radius, "Sensing radius in pixels")->capture_default_str();
  stats->add_option("--resolution", resolution, "Meters per pixel")->capture_default_str();
  stats->add_option("--g-min", g_min, "Traversability below which a cell is no-go")->capture_default_str();

  fs::path scenario, out_dir, plans, out;
  bool all = false, trajectory = false;
  std::string layer = "traversability";
  auto* plan = app.add_subcommand("plan", "Run the planning pipeline for a scenario");
  plan->add_option("--scenario", scenario, "Scenario JSON")->required();
  plan->add_option("--out-dir", out_dir, "Output directory")->required();
  plan->add_flag("--all", all, "Also simulate and render every variant");

  auto* simulate = app.add_subcommand("simulate", "Simulate the plans in a directory");
  simulate->add_option("--scenario", scenario, "Scenario JSON")->required();
  simulate->add_option("--plans", plans, "Directory holding team<id>.plan.json files")->required();
  auto* sim_out = simulate->add_option("--out", out, "CSV path (default <plans>/sim.csv)");

  auto* render_sub = app.add_subcommand("render", "Render plans as SVG");
  render_sub->add_option("--scenario", scenario, "Scenario JSON")->required();
  render_sub->add_option("--plans", plans, "Directory holding team<id>.plan.json files")->required();
  render_sub->add_option("--out", out, "SVG path")->required();
  render_sub->add_option("--layer", layer, "Background layer")
      ->check(CLI::IsMember({"traversability", "los"}))
      ->capture_default_str();
  render_sub->add_flag("--trajectory", trajectory, "Draw simulated robot trajectories instead of plan paths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (compile->parsed()) {
      if (re.empty() == ltl.empty()) throw ValidationError("give exactly one of --re or --ltl");
      return spec_compile(re, ltl, extra, dot);
    }
    if (decompose->parsed()) return spec_decompose(automaton, decomp_dot);
    if (stats->parsed()) return terrain_stats(pgm, cell_size, radius, resolution, g_min);
    if (plan->parsed()) return plan_cmd(scenario, out_dir, all);
    if (simulate->parsed())
      return simulate_cmd(scenario, plans, *sim_out ? std::optional<fs::path>(out) : std::nullopt);
    if (render_sub->parsed()) return render_cmd(scenario, plans, out, layer, trajectory);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const UnsatisfiableError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUnsatisfiable;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  }
  return kOk;
}
