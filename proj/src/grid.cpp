#include "kslab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kslab {

GridSpec make_grid(int nx, int ny, double lx, double ly) {
  if (nx < 8 || ny < 8) throw std::invalid_argument("grid: nx and ny must be >= 8");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("grid: lx and ly must be > 0");
  return GridSpec{nx, ny, lx, ly};
}

bool all_finite(const Field& f) {
  for (double v : f.a)
    if (!std::isfinite(v)) return false;
  return true;
}

void write_snapshot(std::ostream& os, const Field& f, double t) {
  char head[160];
  std::snprintf(head, sizeof(head), "# %d,%d,%.17g,%.17g,%.17g\n", f.grid.nx, f.grid.ny,
                f.grid.lx, f.grid.ly, t);
  os << head;
  char num[40];
  for (int j = 0; j < f.grid.ny; ++j) {
    for (int i = 0; i < f.grid.nx; ++i) {
      std::snprintf(num, sizeof(num), "%.17g", f.at(i, j));
      os << num << (i + 1 == f.grid.nx ? '\n' : ',');
    }
  }
}

void write_snapshot_file(const std::string& path, const Field& f, double t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_snapshot(os, f, t);
}

Field read_snapshot(std::istream& is, double* t_out) {
  std::string line;
  if (!std::getline(is, line) || line.size() < 2 || line[0] != '#')
    throw std::runtime_error("snapshot: missing `# nx,ny,lx,ly,t` header");
  GridSpec g;
  double t = 0.0;
  if (std::sscanf(line.c_str(), "# %d,%d,%lf,%lf,%lf", &g.nx, &g.ny, &g.lx, &g.ly, &t) != 5)
    throw std::runtime_error("snapshot: malformed header: " + line);
  Field f(make_grid(g.nx, g.ny, g.lx, g.ly));
  for (int j = 0; j < g.ny; ++j) {
    if (!std::getline(is, line)) throw std::runtime_error("snapshot: truncated at row " + std::to_string(j));
    std::istringstream row(line);
    std::string cell;
    for (int i = 0; i < g.nx; ++i) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("snapshot: short row " + std::to_string(j));
      f.at(i, j) = std::stod(cell);
    }
  }
  if (t_out) *t_out = t;
  return f;
}

Field read_snapshot_file(const std::string& path, double* t_out) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_snapshot(is, t_out);
}

}  // namespace kslab
