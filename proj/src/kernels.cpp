#include "kslab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kslab {

namespace {

// sum per-row partials in fixed order: result independent of thread count
template <class RowFn>
double row_reduce(int ny, RowFn&& fn) {
  std::vector<double> part(ny, 0.0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) part[j] = fn(j);
  double total = 0.0;
  for (int j = 0; j < ny; ++j) total += part[j];
  return total;
}

template <class RowFn>
double row_reduce_max(int ny, RowFn&& fn) {
  std::vector<double> part(ny, -std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) part[j] = fn(j);
  double m = part[0];
  for (int j = 1; j < ny; ++j) m = std::max(m, part[j]);
  return m;
}

}  // namespace

double integrate(const Field& f) {
  const int nx = f.grid.nx;
  double s = row_reduce(f.grid.ny, [&](int j) {
    const double* p = f.a.data() + static_cast<std::size_t>(j) * nx;
    double r = 0.0;
    for (int i = 0; i < nx; ++i) r += p[i];
    return r;
  });
  return f.grid.cell_area() * s;
}

double integral_product(const Field& a, const Field& b) {
  const int nx = a.grid.nx;
  double s = row_reduce(a.grid.ny, [&](int j) {
    const double* p = a.a.data() + static_cast<std::size_t>(j) * nx;
    const double* q = b.a.data() + static_cast<std::size_t>(j) * nx;
    double r = 0.0;
    for (int i = 0; i < nx; ++i) r += p[i] * q[i];
    return r;
  });
  return a.grid.cell_area() * s;
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p) || p > 64.0) return max_abs(f);
  const int nx = f.grid.nx;
  const int ip = (p == std::floor(p) && p <= 8.0) ? static_cast<int>(p) : 0;
  double s = row_reduce(f.grid.ny, [&](int j) {
    const double* q = f.a.data() + static_cast<std::size_t>(j) * nx;
    double r = 0.0;
    if (ip > 0) {
      for (int i = 0; i < nx; ++i) {
        double v = std::fabs(q[i]), w = v;
        for (int k = 1; k < ip; ++k) w *= v;
        r += w;
      }
    } else {
      for (int i = 0; i < nx; ++i) r += std::pow(std::fabs(q[i]), p);
    }
    return r;
  });
  return std::pow(f.grid.cell_area() * s, 1.0 / p);
}

double max_abs(const Field& f) {
  const int nx = f.grid.nx;
  return row_reduce_max(f.grid.ny, [&](int j) {
    const double* p = f.a.data() + static_cast<std::size_t>(j) * nx;
    double m = 0.0;
    for (int i = 0; i < nx; ++i) m = std::max(m, std::fabs(p[i]));
    return m;
  });
}

double min_value(const Field& f) {
  const int nx = f.grid.nx;
  return -row_reduce_max(f.grid.ny, [&](int j) {
    const double* p = f.a.data() + static_cast<std::size_t>(j) * nx;
    double m = -p[0];
    for (int i = 1; i < nx; ++i) m = std::max(m, -p[i]);
    return m;
  });
}

double max_value(const Field& f) {
  const int nx = f.grid.nx;
  return row_reduce_max(f.grid.ny, [&](int j) {
    const double* p = f.a.data() + static_cast<std::size_t>(j) * nx;
    double m = p[0];
    for (int i = 1; i < nx; ++i) m = std::max(m, p[i]);
    return m;
  });
}

Field laplacian(const Field& f) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const double rx = 1.0 / (f.grid.dx() * f.grid.dx());
  const double ry = 1.0 / (f.grid.dy() * f.grid.dy());
  Field out(f.grid);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = f.at(i, j);
      const double w = (i > 0) ? f.at(i - 1, j) : c;       // mirrored ghost
      const double e = (i + 1 < nx) ? f.at(i + 1, j) : c;
      const double s = (j > 0) ? f.at(i, j - 1) : c;
      const double n = (j + 1 < ny) ? f.at(i, j + 1) : c;
      out.at(i, j) = (e - 2.0 * c + w) * rx + (n - 2.0 * c + s) * ry;
    }
  }
  return out;
}

namespace {

// drift flux through the face between (i,j) and (i+1,j); evaluated identically
// from both neighbor cells so the divergence telescopes exactly
inline double face_flux_x(const Field& u, const Field& v, double chi, double inv_dx, int i, int j) {
  const double vel = chi * (v.at(i + 1, j) - v.at(i, j)) * inv_dx;
  return vel * (vel > 0.0 ? u.at(i, j) : u.at(i + 1, j));
}

inline double face_flux_y(const Field& u, const Field& v, double chi, double inv_dy, int i, int j) {
  const double vel = chi * (v.at(i, j + 1) - v.at(i, j)) * inv_dy;
  return vel * (vel > 0.0 ? u.at(i, j) : u.at(i, j + 1));
}

}  // namespace

Field chemo_flux_divergence(const Field& u, const Field& v, double chi) {
  const int nx = u.grid.nx, ny = u.grid.ny;
  const double inv_dx = 1.0 / u.grid.dx(), inv_dy = 1.0 / u.grid.dy();
  Field out(u.grid);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double fe = (i + 1 < nx) ? face_flux_x(u, v, chi, inv_dx, i, j) : 0.0;
      const double fw = (i > 0) ? face_flux_x(u, v, chi, inv_dx, i - 1, j) : 0.0;
      const double fn = (j + 1 < ny) ? face_flux_y(u, v, chi, inv_dy, i, j) : 0.0;
      const double fs = (j > 0) ? face_flux_y(u, v, chi, inv_dy, i, j - 1) : 0.0;
      out.at(i, j) = (fe - fw) * inv_dx + (fn - fs) * inv_dy;
    }
  }
  return out;
}

GradNorms grad_norms(const Field& f) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const double inv_dx = 1.0 / f.grid.dx(), inv_dy = 1.0 / f.grid.dy();
  // row j owns its x-faces and the y-faces between rows j and j+1
  std::vector<double> p2(ny, 0.0), p4(ny, 0.0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    double s2 = 0.0, s4 = 0.0;
    for (int i = 0; i + 1 < nx; ++i) {
      const double g = (f.at(i + 1, j) - f.at(i, j)) * inv_dx;
      const double g2 = g * g;
      s2 += g2;
      s4 += g2 * g2;
    }
    if (j + 1 < ny) {
      for (int i = 0; i < nx; ++i) {
        const double g = (f.at(i, j + 1) - f.at(i, j)) * inv_dy;
        const double g2 = g * g;
        s2 += g2;
        s4 += g2 * g2;
      }
    }
    p2[j] = s2;
    p4[j] = s4;
  }
  GradNorms out;
  for (int j = 0; j < ny; ++j) {
    out.l2_sq += p2[j];
    out.l4_4 += p4[j];
  }
  const double a = f.grid.cell_area();
  out.l2_sq *= a;
  out.l4_4 *= a;
  return out;
}

double grad_max(const Field& f) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const double inv_dx = 1.0 / f.grid.dx(), inv_dy = 1.0 / f.grid.dy();
  return row_reduce_max(ny, [&](int j) {
    double m = 0.0;
    for (int i = 0; i + 1 < nx; ++i)
      m = std::max(m, std::fabs((f.at(i + 1, j) - f.at(i, j)) * inv_dx));
    if (j + 1 < ny)
      for (int i = 0; i < nx; ++i)
        m = std::max(m, std::fabs((f.at(i, j + 1) - f.at(i, j)) * inv_dy));
    return m;
  });
}

std::pair<Field, Field> grad_centered(const Field& f) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const double hx = 0.5 / f.grid.dx(), hy = 0.5 / f.grid.dy();
  Field gx(f.grid), gy(f.grid);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = f.at(i, j);
      const double w = (i > 0) ? f.at(i - 1, j) : c;
      const double e = (i + 1 < nx) ? f.at(i + 1, j) : c;
      const double s = (j > 0) ? f.at(i, j - 1) : c;
      const double n = (j + 1 < ny) ? f.at(i, j + 1) : c;
      gx.at(i, j) = (e - w) * hx;
      gy.at(i, j) = (n - s) * hy;
    }
  }
  return {std::move(gx), std::move(gy)};
}

double tail_mass(const Field& f, double M) {
  const int nx = f.grid.nx;
  double s = row_reduce(f.grid.ny, [&](int j) {
    const double* p = f.a.data() + static_cast<std::size_t>(j) * nx;
    double r = 0.0;
    for (int i = 0; i < nx; ++i)
      if (p[i] >= M) r += p[i];
    return r;
  });
  return f.grid.cell_area() * s;
}

void clip_negative(Field& f, double& clipped) {
  const int nx = f.grid.nx;
  double neg = row_reduce(f.grid.ny, [&](int j) {
    double* p = f.a.data() + static_cast<std::size_t>(j) * nx;
    double r = 0.0;
    for (int i = 0; i < nx; ++i) {
      if (p[i] < 0.0) {
        r -= p[i];
        p[i] = 0.0;
      }
    }
    return r;
  });
  clipped += f.grid.cell_area() * neg;
}

}  // namespace kslab
