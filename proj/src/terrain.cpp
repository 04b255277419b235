#include "overwatch/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "overwatch/error.hpp"

namespace overwatch::terrain {

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ >= bytes_.size(); }
  std::size_t pos() const { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      std::uint8_t c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* what) {
    skip_space_and_comments();
    if (done()) throw ValidationError(std::string("PGM truncated: missing ") + what);
    if (!std::isdigit(bytes_[pos_])) throw ValidationError(std::string("PGM: expected a number for ") + what);
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000) throw ValidationError(std::string("PGM: value too large for ") + what);
      ++pos_;
    }
    return v;
  }

  std::uint8_t byte() { return bytes_[pos_++]; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Window {
  int r0, r1, c0, c1;  // half-open
};

Window clip(const Heightmap& m, int cy, int cx, int radius) {
  return {std::max(0, cy - radius), std::min(m.height, cy + radius), std::max(0, cx - radius),
          std::min(m.width, cx + radius)};
}

}  // namespace

Heightmap load_heightmap(std::span<const std::uint8_t> bytes, double resolution) {
  if (!(resolution > 0.0)) throw ValidationError("PGM resolution must be positive");
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw ValidationError("unsupported PGM magic (expected P2 or P5)");
  const bool binary = bytes[1] == '5';
  PgmReader in(bytes.subspan(2));
  Heightmap m;
  m.resolution = resolution;
  m.width = static_cast<int>(in.number("width"));
  m.height = static_cast<int>(in.number("height"));
  m.maxval = static_cast<int>(in.number("maxval"));
  if (m.width <= 0 || m.height <= 0) throw ValidationError("PGM dimensions must be positive");
  if (m.maxval != 255 && m.maxval != 65535) throw ValidationError("PGM maxval must be 255 or 65535");
  const std::size_t count = static_cast<std::size_t>(m.width) * static_cast<std::size_t>(m.height);
  m.samples.reserve(count);

  if (binary) {
    if (in.done() || !std::isspace(in.byte())) throw ValidationError("PGM truncated: missing raster");
    const std::size_t bytes_per = m.maxval > 255 ? 2 : 1;
    if (in.remaining() < count * bytes_per) throw ValidationError("PGM truncated: raster too short");
    for (std::size_t i = 0; i < count; ++i) {
      std::uint16_t v = in.byte();
      if (bytes_per == 2) v = static_cast<std::uint16_t>((v << 8) | in.byte());
      if (v > m.maxval) throw ValidationError("PGM sample exceeds maxval");
      m.samples.push_back(v);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      long v = in.number("sample");
      if (v > m.maxval) throw ValidationError("PGM sample exceeds maxval");
      m.samples.push_back(static_cast<std::uint16_t>(v));
    }
  }
  return m;
}

Heightmap load_heightmap_file(const std::filesystem::path& path, double resolution) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open height map '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_heightmap(bytes, resolution);
}

std::string encode_pgm(const Heightmap& map, bool binary) {
  std::ostringstream os;
  os << (binary ? "P5" : "P2") << "\n" << map.width << " " << map.height << "\n" << map.maxval << "\n";
  if (binary) {
    for (std::uint16_t v : map.samples) {
      if (map.maxval > 255) os.put(static_cast<char>(v >> 8));
      os.put(static_cast<char>(v & 0xff));
    }
  } else {
    for (int r = 0; r < map.height; ++r) {
      for (int c = 0; c < map.width; ++c) os << (c ? " " : "") << map.at(r, c);
      os << "\n";
    }
  }
  return os.str();
}

CellGrid discretize(const Heightmap& map, const DiscretizeOptions& options) {
  const int delta = options.cell_size;
  const int radius = options.sensing_radius;
  if (delta < 2) throw ValidationError("cell size must be at least 2 pixels");
  if (2 * radius < delta) throw ValidationError("sensing radius must be at least half the cell size");
  if (delta > map.width || delta > map.height) throw ValidationError("cell size is larger than the map");

  auto cost = [&](int r, int c) {
    double u = map.normalized(r, c);
    if (options.texture_cost) u = std::clamp(u + options.texture_cost(r, c), 0.0, 1.0);
    return u;
  };
  auto window_variance = [&](int cy, int cx) {
    Window w = clip(map, cy, cx, radius);
    double sum = 0.0, sq = 0.0;
    const double n = static_cast<double>((w.r1 - w.r0) * (w.c1 - w.c0));
    for (int r = w.r0; r < w.r1; ++r)
      for (int c = w.c0; c < w.c1; ++c) {
        double u = cost(r, c);
        sum += u;
        sq += u * u;
      }
    double mean = sum / n;
    return std::max(0.0, sq / n - mean * mean);
  };

  CellGrid g;
  g.rows = map.height / delta;
  g.cols = map.width / delta;
  g.cell_size = delta;
  g.sensing_radius = radius;
  g.resolution = map.resolution;
  g.g_min = options.g_min;
  g.stats.resize(static_cast<std::size_t>(g.rows * g.cols));

  for (int cr = 0; cr < g.rows; ++cr) {
    for (int cc = 0; cc < g.cols; ++cc) {
      CellStats& s = g.stats[static_cast<std::size_t>(cr * g.cols + cc)];
      double sum = 0.0, sq = 0.0;
      for (int r = cr * delta; r < (cr + 1) * delta; ++r)
        for (int c = cc * delta; c < (cc + 1) * delta; ++c) {
          double v = 1.0 - cost(r, c);
          sum += v;
          sq += v * v;
        }
      const double n = static_cast<double>(delta * delta);
      s.g_mean = sum / n;
      s.g_var = std::max(0.0, sq / n - s.g_mean * s.g_mean) / n;

      const int cy = cr * delta + delta / 2;
      const int cx = cc * delta + delta / 2;
      s.los_mean = 1.0 - std::min(1.0, window_variance(cy, cx) / kLosReferenceVariance);

      double stencil[9];
      int k = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          stencil[k++] = window_variance(std::clamp(cy + dy, 0, map.height - 1), std::clamp(cx + dx, 0, map.width - 1));
      double mean = 0.0;
      for (double v : stencil) mean += v;
      mean /= 9.0;
      double ss = 0.0;
      for (double v : stencil) ss += (v - mean) * (v - mean);
      s.los_var = ss / 8.0 / 9.0;

      s.g_mean = std::clamp(s.g_mean, 0.0, 1.0);
      s.nogo = s.g_mean < options.g_min;
    }
  }
  return g;
}

std::string to_csv(const CellGrid& grid) {
  std::string out = "row,col,g_mean,g_var,los_mean,los_var,nogo\n";
  char buf[256];
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const auto& s = grid.at({r, c});
      std::snprintf(buf, sizeof buf, "%d,%d,%.9f,%.9g,%.9f,%.9g,%d\n", r, c, s.g_mean, s.g_var, s.los_mean, s.los_var,
                    s.nogo ? 1 : 0);
      out += buf;
    }
  return out;
}

}  // namespace overwatch::terrain
