#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace overwatch::terrain {

/// Grayscale height map. Samples are row-major; brighter means higher and
/// harder to traverse.
struct Heightmap {
  int width = 0;
  int height = 0;
  int maxval = 255;
  double resolution = 1.0;  // meters per pixel
  std::vector<std::uint16_t> samples;

  std::uint16_t at(int row, int col) const {
    return samples[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)];
  }
  double normalized(int row, int col) const { return static_cast<double>(at(row, col)) / maxval; }
};

/// Parses PGM "P2" (ASCII) or "P5" (binary, 16-bit big-endian when maxval is
/// 65535). Comments are allowed in the header. Only maxval 255 and 65535 are
/// accepted.
Heightmap load_heightmap(std::span<const std::uint8_t> bytes, double resolution);
Heightmap load_heightmap_file(const std::filesystem::path& path, double resolution);

/// Inverse of load_heightmap.
std::string encode_pgm(const Heightmap& map, bool binary);

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Per-cell Gaussian statistics. Scores are oriented so that 1 is best.
struct CellStats {
  double g_mean = 0.0;    // traversability score
  double g_var = 0.0;     // variance of the traversability score
  double los_mean = 0.0;  // line-of-sight score
  double los_var = 0.0;   // variance of the line-of-sight score
  bool nogo = false;
};

struct CellGrid {
  int rows = 0;
  int cols = 0;
  int cell_size = 0;       // pixels per cell side
  int sensing_radius = 0;  // pixels
  double resolution = 1.0;
  double g_min = 0.0;
  std::vector<CellStats> stats;  // row-major

  int size() const noexcept { return rows * cols; }
  bool in_bounds(Cell c) const noexcept { return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols; }
  int index(Cell c) const noexcept { return c.row * cols + c.col; }
  Cell cell(int index) const noexcept { return {index / cols, index % cols}; }
  const CellStats& at(Cell c) const { return stats.at(static_cast<std::size_t>(index(c))); }
  bool traversable(Cell c) const { return in_bounds(c) && !at(c).nogo; }
  /// Side length of a cell in meters.
  double cell_meters() const noexcept { return cell_size * resolution; }
};

/// Maximum variance of a variable bounded in [0, 1]; normalizes window
/// variances into line-of-sight scores.
inline constexpr double kLosReferenceVariance = 0.25;

struct DiscretizeOptions {
  int cell_size = 8;
  int sensing_radius = 4;
  double g_min = 0.0;
  /// Optional extra per-pixel cost added to the normalized intensity
  /// (clamped to [0, 1]). Unset by default.
  std::function<double(int row, int col)> texture_cost;
};

/// Per cell: g = 1 - mean normalized intensity over the cell block, g_var =
/// block variance / pixel count. Line of sight uses the intensity variance
/// over a square window [center - R, center + R) clipped to the map:
/// los = 1 - min(1, variance / 0.25); los_var is the sample variance of the
/// window variances at the 3x3 pixel stencil around the center, over 9.
CellGrid discretize(const Heightmap& map, const DiscretizeOptions& options);

/// Columns: row,col,g_mean,g_var,los_mean,los_var,nogo
std::string to_csv(const CellGrid& grid);

}  // namespace overwatch::terrain
