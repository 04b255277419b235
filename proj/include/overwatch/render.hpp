#pragma once

#include <map>
#include <string>
#include <vector>

#include "overwatch/sim.hpp"
#include "overwatch/terrain.hpp"

namespace overwatch::render {

enum class Layer { Traversability, LineOfSight };

const char* layer_name(Layer layer);

struct Style {
  int cell_px = 24;
  bool show_grid = true;
};

struct PathOverlay {
  std::string label;
  std::string color;  // any SVG color
  std::vector<terrain::Cell> cells;
};

/// Grayscale heatmap of one cell statistic (white = 1). No-go cells carry a
/// cross; forts are outlined squares with their name.
std::string heatmap_svg(const terrain::CellGrid& grid, Layer layer, const std::map<std::string, terrain::Cell>& forts,
                        const Style& style = {});

/// Heatmap with one polyline per overlay through the cell centers.
std::string paths_svg(const terrain::CellGrid& grid, Layer layer, const std::map<std::string, terrain::Cell>& forts,
                      const std::vector<PathOverlay>& overlays, const Style& style = {});

/// Per-robot trajectories from a simulation log over the traversability map.
/// Bounders are solid, overwatchers dashed.
std::string trajectory_svg(const terrain::CellGrid& grid, const std::map<std::string, terrain::Cell>& forts,
                           const sim::SimLog& log, const Style& style = {});

/// Fixed palette indexed by team order.
const char* team_color(std::size_t i);

}  // namespace overwatch::render
