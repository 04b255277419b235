#include "overwatch/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace overwatch::render {

namespace {

// printf into a std::string; all numbers go through here so output is stable.
template <typename... Args>
void put(std::string& out, const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  out += buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double value(const terrain::CellStats& s, Layer layer) {
  return std::clamp(layer == Layer::Traversability ? s.g_mean : s.los_mean, 0.0, 1.0);
}

void open(std::string& out, const terrain::CellGrid& grid, const Style& st, int legend_px) {
  const int w = grid.cols * st.cell_px, h = grid.rows * st.cell_px + legend_px;
  put(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n", w, h, w, h);
  put(out, "<rect x=\"0\" y=\"0\" width=\"%d\" height=\"%d\" fill=\"white\"/>\n", w, h);
}

void cells(std::string& out, const terrain::CellGrid& grid, Layer layer, const Style& st) {
  const int p = st.cell_px;
  out += "<g id=\"cells\"";
  if (st.show_grid) out += " stroke=\"#888888\" stroke-width=\"0.5\"";
  out += ">\n";
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const int v = static_cast<int>(std::lround(value(grid.at({r, c}), layer) * 255.0));
      put(out, "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"rgb(%d,%d,%d)\"/>\n", c * p, r * p, p, p, v, v, v);
    }
  out += "</g>\n<g id=\"nogo\" stroke=\"#c00000\" stroke-width=\"1.5\">\n";
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      if (!grid.at({r, c}).nogo) continue;
      const int x = c * p, y = r * p, m = p / 5;
      put(out, "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\"/>", x + m, y + m, x + p - m, y + p - m);
      put(out, "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\"/>\n", x + p - m, y + m, x + m, y + p - m);
    }
  out += "</g>\n";
}

void forts_layer(std::string& out, const std::map<std::string, terrain::Cell>& forts, const Style& st) {
  const int p = st.cell_px;
  out += "<g id=\"forts\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (const auto& [name, c] : forts) {
    put(out, "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" stroke=\"#e0a000\" stroke-width=\"2\"/>",
        c.col * p + 1, c.row * p + 1, p - 2, p - 2);
    put(out, "<text x=\"%d\" y=\"%d\" fill=\"#e0a000\">%s</text>\n", c.col * p + 2, c.row * p + p - 3,
        escape(name).c_str());
  }
  out += "</g>\n";
}

void legend(std::string& out, const terrain::CellGrid& grid, const Style& st, const std::vector<std::string>& labels,
            const std::vector<std::string>& colors) {
  const int y0 = grid.rows * st.cell_px + 14;
  out += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = y0 + static_cast<int>(i) * 14;
    put(out, "<line x1=\"4\" y1=\"%d\" x2=\"24\" y2=\"%d\" stroke=\"%s\" stroke-width=\"3\"/>", y - 4, y - 4,
        escape(colors[i]).c_str());
    put(out, "<text x=\"30\" y=\"%d\">%s</text>\n", y, escape(labels[i]).c_str());
  }
  out += "</g>\n";
}

}  // namespace

const char* layer_name(Layer layer) { return layer == Layer::Traversability ? "traversability" : "line_of_sight"; }

const char* team_color(std::size_t i) {
  static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
  return palette[i % 6];
}

std::string heatmap_svg(const terrain::CellGrid& grid, Layer layer, const std::map<std::string, terrain::Cell>& forts,
                        const Style& style) {
  return paths_svg(grid, layer, forts, {}, style);
}

std::string paths_svg(const terrain::CellGrid& grid, Layer layer, const std::map<std::string, terrain::Cell>& forts,
                      const std::vector<PathOverlay>& overlays, const Style& style) {
  std::string out;
  const int legend_px = overlays.empty() ? 0 : 8 + 14 * static_cast<int>(overlays.size());
  open(out, grid, style, legend_px);
  put(out, "<title>%s</title>\n", layer_name(layer));
  cells(out, grid, layer, style);
  forts_layer(out, forts, style);
  const double p = style.cell_px;
  std::vector<std::string> labels, colors;
  for (std::size_t i = 0; i < overlays.size(); ++i) {
    const auto& o = overlays[i];
    // offset overlapping paths a little so each stays visible
    const double shift = (static_cast<double>(i) - 0.5 * static_cast<double>(overlays.size() - 1)) * p * 0.12;
    put(out, "<polyline id=\"path%zu\" fill=\"none\" stroke=\"%s\" stroke-width=\"2.5\" stroke-linejoin=\"round\" points=\"",
        i, escape(o.color).c_str());
    for (std::size_t k = 0; k < o.cells.size(); ++k) {
      if (k > 0 && o.cells[k] == o.cells[k - 1]) continue;
      put(out, "%s%.1f,%.1f", k == 0 ? "" : " ", (o.cells[k].col + 0.5) * p + shift, (o.cells[k].row + 0.5) * p + shift);
    }
    out += "\"/>\n";
    if (!o.cells.empty())
      put(out, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n", (o.cells[0].col + 0.5) * p + shift,
          (o.cells[0].row + 0.5) * p + shift, escape(o.color).c_str());
    labels.push_back(o.label);
    colors.push_back(o.color);
  }
  if (!overlays.empty()) legend(out, grid, style, labels, colors);
  out += "</svg>\n";
  return out;
}

std::string trajectory_svg(const terrain::CellGrid& grid, const std::map<std::string, terrain::Cell>& forts,
                           const sim::SimLog& log, const Style& style) {
  std::map<std::pair<int, int>, std::vector<const sim::Record*>> tracks;
  std::map<int, std::size_t> team_order;
  for (const auto& r : log.records) {
    tracks[{r.team, static_cast<int>(r.robot)}].push_back(&r);
    team_order.emplace(r.team, team_order.size());
  }
  std::string out;
  const int legend_px = tracks.empty() ? 0 : 8 + 14 * static_cast<int>(tracks.size());
  open(out, grid, style, legend_px);
  out += "<title>trajectories</title>\n";
  cells(out, grid, Layer::Traversability, style);
  forts_layer(out, forts, style);
  const double scale = style.cell_px / grid.cell_meters();
  std::vector<std::string> labels, colors;
  for (const auto& [key, recs] : tracks) {
    const auto [team, robot] = key;
    const char* color = team_color(team_order[team]);
    const bool bounder = robot == static_cast<int>(sim::Robot::Bounder);
    put(out, "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"%s\"%s points=\"", color, bounder ? "2" : "1.5",
        bounder ? "" : " stroke-dasharray=\"4 3\"");
    for (std::size_t k = 0; k < recs.size(); ++k) {
      if (k > 0 && recs[k]->x == recs[k - 1]->x && recs[k]->y == recs[k - 1]->y) continue;
      put(out, "%s%.2f,%.2f", k == 0 ? "" : " ", recs[k]->x * scale, recs[k]->y * scale);
    }
    out += "\"/>\n";
    labels.push_back("team " + std::to_string(team) + " " + sim::robot_name(static_cast<sim::Robot>(robot)));
    colors.push_back(color);
  }
  if (!tracks.empty()) legend(out, grid, style, labels, colors);
  out += "</svg>\n";
  return out;
}

}  // namespace overwatch::render
