#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace kslab {

// Uniform cell-centered rectangular grid. Cell (i,j) has its center at
// ((i+1/2)dx, (j+1/2)dy); homogeneous Neumann boundaries are realized by
// mirrored ghost cells in every stencil that touches the boundary.
struct GridSpec {
  int nx = 0, ny = 0;
  double lx = 1.0, ly = 1.0;

  double dx() const { return lx / nx; }
  double dy() const { return ly / ny; }
  double area() const { return lx * ly; }
  double cell_area() const { return dx() * dy(); }
  double cx(int i) const { return (i + 0.5) * dx(); }
  double cy(int j) const { return (j + 0.5) * dy(); }
  std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }

  bool operator==(const GridSpec& o) const = default;
};

// validates cell counts and edge lengths; throws std::invalid_argument
GridSpec make_grid(int nx, int ny, double lx = 1.0, double ly = 1.0);

// Scalar cell samples in row-major order (index j*nx + i).
struct Field {
  GridSpec grid;
  std::vector<double> a;

  Field() = default;
  explicit Field(const GridSpec& g, double fill = 0.0) : grid(g), a(g.cells(), fill) {}

  double& at(int i, int j) { return a[static_cast<std::size_t>(j) * grid.nx + i]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(j) * grid.nx + i]; }
  std::size_t size() const { return a.size(); }
};

bool all_finite(const Field& f);

// snapshot CSV: one header line `# nx,ny,lx,ly,t`, then one line per grid row
void write_snapshot(std::ostream& os, const Field& f, double t);
void write_snapshot_file(const std::string& path, const Field& f, double t);
Field read_snapshot(std::istream& is, double* t_out = nullptr);
Field read_snapshot_file(const std::string& path, double* t_out = nullptr);

}  // namespace kslab
