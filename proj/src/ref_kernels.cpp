#include "kslab/ref_kernels.hpp"

#include <cmath>
#include <vector>

namespace kslab::ref {

double integrate(const Field& f) {
  double s = 0.0;
  for (double v : f.a) s += v;
  return f.grid.cell_area() * s;
}

double integral_product(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.a.size(); ++k) s += a.a[k] * b.a[k];
  return a.grid.cell_area() * s;
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.a) m = std::max(m, std::fabs(v));
  return m;
}

Field laplacian(const Field& f) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const double rx = 1.0 / (f.grid.dx() * f.grid.dx());
  const double ry = 1.0 / (f.grid.dy() * f.grid.dy());
  Field out(f.grid);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double c = f.at(i, j);
      const double w = (i > 0) ? f.at(i - 1, j) : c;
      const double e = (i + 1 < nx) ? f.at(i + 1, j) : c;
      const double s = (j > 0) ? f.at(i, j - 1) : c;
      const double n = (j + 1 < ny) ? f.at(i, j + 1) : c;
      out.at(i, j) = (e - 2.0 * c + w) * rx + (n - 2.0 * c + s) * ry;
    }
  return out;
}

Field chemo_flux_divergence(const Field& u, const Field& v, double chi) {
  const int nx = u.grid.nx, ny = u.grid.ny;
  const double inv_dx = 1.0 / u.grid.dx(), inv_dy = 1.0 / u.grid.dy();
  auto fx = [&](int i, int j) {
    const double vel = chi * (v.at(i + 1, j) - v.at(i, j)) * inv_dx;
    return vel * (vel > 0.0 ? u.at(i, j) : u.at(i + 1, j));
  };
  auto fy = [&](int i, int j) {
    const double vel = chi * (v.at(i, j + 1) - v.at(i, j)) * inv_dy;
    return vel * (vel > 0.0 ? u.at(i, j) : u.at(i, j + 1));
  };
  Field out(u.grid);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double fe = (i + 1 < nx) ? fx(i, j) : 0.0;
      const double fw = (i > 0) ? fx(i - 1, j) : 0.0;
      const double fn = (j + 1 < ny) ? fy(i, j) : 0.0;
      const double fs = (j > 0) ? fy(i, j - 1) : 0.0;
      out.at(i, j) = (fe - fw) * inv_dx + (fn - fs) * inv_dy;
    }
  return out;
}

GradNorms grad_norms(const Field& f) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const double inv_dx = 1.0 / f.grid.dx(), inv_dy = 1.0 / f.grid.dy();
  GradNorms out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const double g = (f.at(i + 1, j) - f.at(i, j)) * inv_dx;
      out.l2_sq += g * g;
      out.l4_4 += g * g * g * g;
    }
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double g = (f.at(i, j + 1) - f.at(i, j)) * inv_dy;
      out.l2_sq += g * g;
      out.l4_4 += g * g * g * g;
    }
  out.l2_sq *= f.grid.cell_area();
  out.l4_4 *= f.grid.cell_area();
  return out;
}

double grad_max(const Field& f) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const double inv_dx = 1.0 / f.grid.dx(), inv_dy = 1.0 / f.grid.dy();
  double m = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i)
      m = std::max(m, std::fabs((f.at(i + 1, j) - f.at(i, j)) * inv_dx));
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i)
      m = std::max(m, std::fabs((f.at(i, j + 1) - f.at(i, j)) * inv_dy));
  return m;
}

double tail_mass(const Field& f, double M) {
  double s = 0.0;
  for (double v : f.a)
    if (v >= M) s += v;
  return f.grid.cell_area() * s;
}

namespace {

// even cosine transform pair on contiguous lines, mathematically normalized:
//   fwd: c[k] = sum_n f[n] cos(pi k (n+1/2)/N)
//   inv: f[n] = (c[0] + 2 sum_{k>=1} c[k] cos(pi k (n+1/2)/N)) / N
void dct_fwd_line(const double* f, double* c, int n) {
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int m = 0; m < n; ++m) s += f[m] * std::cos(M_PI * k * (m + 0.5) / n);
    c[k] = s;
  }
}

void dct_inv_line(const double* c, double* f, int n) {
  for (int m = 0; m < n; ++m) {
    double s = c[0];
    for (int k = 1; k < n; ++k) s += 2.0 * c[k] * std::cos(M_PI * k * (m + 0.5) / n);
    f[m] = s / n;
  }
}

Field spectral_multiply_direct(const Field& f, const std::vector<double>& mult) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  Field c = f;
  std::vector<double> in(std::max(nx, ny)), out(std::max(nx, ny));
  const auto rows = [&](bool forward) {
    for (int j = 0; j < ny; ++j) {
      double* row = c.a.data() + static_cast<std::size_t>(j) * nx;
      forward ? dct_fwd_line(row, out.data(), nx) : dct_inv_line(row, out.data(), nx);
      for (int i = 0; i < nx; ++i) row[i] = out[i];
    }
  };
  const auto cols = [&](bool forward) {
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) in[j] = c.at(i, j);
      forward ? dct_fwd_line(in.data(), out.data(), ny) : dct_inv_line(in.data(), out.data(), ny);
      for (int j = 0; j < ny; ++j) c.at(i, j) = out[j];
    }
  };
  rows(true);
  cols(true);
  for (std::size_t k = 0; k < c.a.size(); ++k) c.a[k] *= mult[k];
  cols(false);
  rows(false);
  return c;
}

std::vector<double> neumann_eigenvalues(const GridSpec& g) {
  std::vector<double> lam(g.cells());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      lam[static_cast<std::size_t>(j) * g.nx + i] =
          (2.0 / (g.dx() * g.dx())) * (1.0 - std::cos(M_PI * i / g.nx)) +
          (2.0 / (g.dy() * g.dy())) * (1.0 - std::cos(M_PI * j / g.ny));
  return lam;
}

}  // namespace

Field diffusion_solve_direct(const Field& f, double dt, double sigma) {
  auto lam = neumann_eigenvalues(f.grid);
  std::vector<double> mult(lam.size());
  for (std::size_t k = 0; k < lam.size(); ++k) mult[k] = 1.0 / (1.0 + sigma * dt + dt * lam[k]);
  return spectral_multiply_direct(f, mult);
}

Field heat_filter_direct(const Field& f, double delta) {
  auto lam = neumann_eigenvalues(f.grid);
  std::vector<double> mult(lam.size());
  for (std::size_t k = 0; k < lam.size(); ++k) mult[k] = std::exp(-0.5 * delta * delta * lam[k]);
  return spectral_multiply_direct(f, mult);
}

}  // namespace kslab::ref
