#include "csv.hpp"

#include "config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace fracpoint::app {

namespace {

std::ofstream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string exact(double value) { return fmt::format("{:.17g}", value); }

void write_grid(const std::filesystem::path& path, const GridFunction& g) {
  auto out = open(path);
  out << kGridHeader << '\n';
  const int cells = g.cells();
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      const Point p = GridFunction::node(cells, i, j);
      out << i << ',' << j << ',' << exact(p.x) << ',' << exact(p.y) << ',' << exact(g.values(i, j)) << '\n';
    }
  }
}

void write_coefficients(const std::filesystem::path& path, const SpectralField& w) {
  auto out = open(path);
  out << kCoefficientHeader << '\n';
  for (int n = 1; n <= w.modes(); ++n) {
    for (int m = 1; m <= w.modes(); ++m) out << m << ',' << n << ',' << exact(w({m, n})) << '\n';
  }
}

void write_history(const std::filesystem::path& path, const DescentHistory& history) {
  auto out = open(path);
  out << kHistoryHeader << '\n';
  for (const auto& r : history.records) {
    out << r.iteration << ',' << exact(r.cost) << ',' << exact(r.residual) << ',' << exact(r.step) << ','
        << exact(r.active_fraction) << '\n';
  }
}

GridFunction read_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open control file");
  std::string line;
  if (!std::getline(in, line) || line != kGridHeader) {
    throw ConfigError(fmt::format("{}:1: expected header '{}'", path.string(), kGridHeader));
  }
  struct Entry {
    long i, j;
    double value;
  };
  std::vector<Entry> entries;
  long max_index = -1;
  for (int number = 2; std::getline(in, line); ++number) {
    if (line.empty()) continue;
    std::istringstream row(line);
    Entry e{};
    double x = 0, y = 0;
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    if (!(row >> e.i >> c1 >> e.j >> c2 >> x >> c3 >> y >> c4 >> e.value) || c1 != ',' || c2 != ',' || c3 != ',' ||
        c4 != ',' || e.i < 0 || e.j < 0 || !std::isfinite(e.value)) {
      throw ConfigError(fmt::format("{}:{}: malformed grid row", path.string(), number));
    }
    max_index = std::max({max_index, e.i, e.j});
    entries.push_back(e);
  }
  const long cells = max_index + 1;
  if (cells == 0 || static_cast<long>(entries.size()) != cells * cells) {
    throw ConfigError(path.string() + ": grid file does not describe a full square grid");
  }
  GridFunction g = GridFunction::zero(static_cast<int>(cells));
  for (const auto& e : entries) g.values(e.i, e.j) = e.value;
  return g;
}

}  // namespace fracpoint::app
