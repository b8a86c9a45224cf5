#include "kslab/rough_data.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "kslab/kernels.hpp"

namespace kslab {

namespace {

constexpr double kTinyR = 1e-300;

double spike_term(double amplitude, double alpha, double r) {
  return amplitude * std::pow(std::max(r, kTinyR), -alpha);
}

bool in_plateau(double lx, double ly, double x, double y) {
  return x > 0.25 * lx && x < 0.75 * lx && y > 0.25 * ly && y < 0.75 * ly;
}

// bounded oscillation carried by the plateau datum (before the box cutoff)
double plateau_pattern(double amplitude, double lx, double ly, double x, double y) {
  return amplitude * (1.0 + 0.5 * std::cos(23.0 * M_PI * x / lx) * std::cos(29.0 * M_PI * y / ly));
}

// ---- adaptive Simpson quadrature on rectangles (module-side norm evaluation) ----

using Fn2 = std::function<double(double, double)>;

double simpson_cell(const Fn2& f, double x0, double x1, double y0, double y1) {
  const double xs[3] = {x0, 0.5 * (x0 + x1), x1};
  const double ys[3] = {y0, 0.5 * (y0 + y1), y1};
  const double w[3] = {1.0, 4.0, 1.0};
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s += w[a] * w[b] * f(xs[a], ys[b]);
  return s * (x1 - x0) * (y1 - y0) / 36.0;
}

double adapt_rec(const Fn2& f, double x0, double x1, double y0, double y1, double whole,
                 double tol, int depth) {
  const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
  const double q[4] = {simpson_cell(f, x0, xm, y0, ym), simpson_cell(f, xm, x1, y0, ym),
                       simpson_cell(f, x0, xm, ym, y1), simpson_cell(f, xm, x1, ym, y1)};
  const double sum = q[0] + q[1] + q[2] + q[3];
  if (depth <= 0 || std::fabs(sum - whole) <= 15.0 * tol) return sum + (sum - whole) / 15.0;
  const double t = tol / 4.0;
  return adapt_rec(f, x0, xm, y0, ym, q[0], t, depth - 1) +
         adapt_rec(f, xm, x1, y0, ym, q[1], t, depth - 1) +
         adapt_rec(f, x0, xm, ym, y1, q[2], t, depth - 1) +
         adapt_rec(f, xm, x1, ym, y1, q[3], t, depth - 1);
}

double adaptive_integral(const Fn2& f, double x0, double x1, double y0, double y1, double tol) {
  return adapt_rec(f, x0, x1, y0, y1, simpson_cell(f, x0, x1, y0, y1), tol, 28);
}

// ---- 1D adaptive Simpson (polar reduction of spike masses) ----

using Fn1 = std::function<double(double)>;

double simpson_seg(const Fn1& f, double a, double b) {
  return (f(a) + 4.0 * f(0.5 * (a + b)) + f(b)) * (b - a) / 6.0;
}

double adapt1_rec(const Fn1& f, double a, double b, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double l = simpson_seg(f, a, m), r = simpson_seg(f, m, b);
  if (depth <= 0 || std::fabs(l + r - whole) <= 15.0 * tol) return l + r + (l + r - whole) / 15.0;
  return adapt1_rec(f, a, m, l, 0.5 * tol, depth - 1) +
         adapt1_rec(f, m, b, r, 0.5 * tol, depth - 1);
}

double adaptive_integral_1d(const Fn1& f, double a, double b, double tol) {
  return adapt1_rec(f, a, b, simpson_seg(f, a, b), tol, 48);
}

// distance from an interior point to the rectangle boundary along direction theta
double ray_to_boundary(double px, double py, double lx, double ly, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  double t = std::numeric_limits<double>::infinity();
  if (c > 0.0) t = std::min(t, (lx - px) / c);
  if (c < 0.0) t = std::min(t, -px / c);
  if (s > 0.0) t = std::min(t, (ly - py) / s);
  if (s < 0.0) t = std::min(t, -py / s);
  return t;
}

// mass of amplitude * r^-alpha over the rectangle, reduced to polar form:
// amplitude * int rho(theta)^(2-alpha) / (2-alpha) dtheta. The rectangle is
// star-shaped about the interior center, and splitting at the corner angles
// leaves an analytic integrand on every arc.
double spike_mass_polar(double amplitude, double alpha, double px, double py, double lx, double ly,
                        double tol) {
  const double q = 2.0 - alpha;
  std::vector<double> cut{-M_PI, M_PI};
  const double cx[4] = {0.0, lx, lx, 0.0};
  const double cy[4] = {0.0, 0.0, ly, ly};
  for (int k = 0; k < 4; ++k) cut.push_back(std::atan2(cy[k] - py, cx[k] - px));
  std::sort(cut.begin(), cut.end());
  const Fn1 g = [&](double th) {
    return amplitude * std::pow(ray_to_boundary(px, py, lx, ly, th), q) / q;
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cut.size(); ++k)
    if (cut[k + 1] > cut[k]) total += adaptive_integral_1d(g, cut[k], cut[k + 1], tol / 6.0);
  return total;
}

}  // namespace

bool datum_is_bounded(const RoughDatumSpec& spec) {
  return spec.kind == DatumKind::plateau_noise || spec.kind == DatumKind::smooth;
}

void validate_spec(const RoughDatumSpec& spec, double lx, double ly) {
  if (spec.amplitude < 0.0) throw std::invalid_argument("datum amplitude must be >= 0");
  if (spec.v_amplitude < 0.0) throw std::invalid_argument("datum v_amplitude must be >= 0");
  const bool spiky = spec.kind == DatumKind::spike || spec.kind == DatumKind::multi_spike;
  if (spiky) {
    if (!(spec.alpha > 0.0 && spec.alpha < 2.0))
      throw std::invalid_argument("spike exponent alpha must lie in (0, 2)");
    if (spec.centers.empty()) throw std::invalid_argument("spike datum needs at least one center");
    if (spec.kind == DatumKind::spike && spec.centers.size() != 1)
      throw std::invalid_argument("kind spike takes exactly one center (use multi_spike)");
    for (const Point& p : spec.centers)
      if (!(p.x > 0.0 && p.x < lx && p.y > 0.0 && p.y < ly))
        throw std::invalid_argument("spike center outside the open domain");
  }
}

double u0_value(const RoughDatumSpec& spec, double lx, double ly, double x, double y) {
  switch (spec.kind) {
    case DatumKind::spike:
    case DatumKind::multi_spike: {
      double s = 0.0;
      for (const Point& c : spec.centers)
        s += spike_term(spec.amplitude, spec.alpha, std::hypot(x - c.x, y - c.y));
      return s;
    }
    case DatumKind::plateau_noise:
      if (!in_plateau(lx, ly, x, y)) return 0.0;
      return plateau_pattern(spec.amplitude, lx, ly, x, y);
    case DatumKind::smooth:
      return 0.5 * spec.amplitude * (1.0 + std::cos(M_PI * x / lx) * std::cos(M_PI * y / ly));
  }
  return 0.0;
}

double v0_value(const RoughDatumSpec& spec, double lx, double ly, double x, double y) {
  const double a = spec.v_amplitude;
  switch (spec.v_kind) {
    case VKind::constant:
      return a;
    case VKind::cosine_mix:
      return a * (1.0 + 0.5 * std::cos(M_PI * x / lx) * std::cos(M_PI * y / ly) +
                  0.25 * std::cos(2.0 * M_PI * x / lx));
    case VKind::kink:
      return a * (2.0 - 2.0 * std::fabs(x / lx - 0.5));
  }
  return 0.0;
}

void v0_grad_value(const RoughDatumSpec& spec, double lx, double ly, double x, double y,
                   double* gx, double* gy) {
  const double a = spec.v_amplitude;
  switch (spec.v_kind) {
    case VKind::constant:
      *gx = *gy = 0.0;
      return;
    case VKind::cosine_mix:
      *gx = a * (-0.5 * (M_PI / lx) * std::sin(M_PI * x / lx) * std::cos(M_PI * y / ly) -
                 0.5 * (M_PI / lx) * std::sin(2.0 * M_PI * x / lx));
      *gy = a * (-0.5 * (M_PI / ly) * std::cos(M_PI * x / lx) * std::sin(M_PI * y / ly));
      return;
    case VKind::kink:
      *gx = (x < 0.5 * lx ? 2.0 : -2.0) * a / lx;
      *gy = 0.0;
      return;
  }
}

Field sample_u0(const RoughDatumSpec& spec, const GridSpec& g) {
  validate_spec(spec, g.lx, g.ly);
  Field u(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.at(i, j) = u0_value(spec, g.lx, g.ly, g.cx(i), g.cy(j));

  if (spec.kind != DatumKind::spike && spec.kind != DatumKind::multi_spike) return u;

  // near-singular cells: replace the point value by a dense midpoint cell average
  const int sub = 16;  // even, so subcells pair up under reflection
  const double rmin = g.dx() / sub / 64.0;
  for (const Point& c : spec.centers) {
    // refine every cell whose center lies within 2.5 cells of the spike; this
    // keeps the refined patch mirror-symmetric even when the spike sits on a
    // cell boundary
    const int ilo = std::max(0, static_cast<int>(std::ceil(c.x / g.dx() - 3.0)));
    const int ihi = std::min(g.nx - 1, static_cast<int>(std::floor(c.x / g.dx() + 2.0)));
    const int jlo = std::max(0, static_cast<int>(std::ceil(c.y / g.dy() - 3.0)));
    const int jhi = std::min(g.ny - 1, static_cast<int>(std::floor(c.y / g.dy() + 2.0)));
    for (int j = jlo; j <= jhi; ++j) {
      for (int i = ilo; i <= ihi; ++i) {
        const auto val = [&](int a, int b) {
          const double x = (i + (a + 0.5) / sub) * g.dx();
          const double y = (j + (b + 0.5) / sub) * g.dy();
          double t = 0.0;
          for (const Point& cc : spec.centers)
            t += spike_term(spec.amplitude, spec.alpha,
                            std::max(std::hypot(x - cc.x, y - cc.y), rmin));
          return t;
        };
        // accumulate reflection quadruples so mirrored cells sum the same
        // values in the same order and the average is bitwise symmetric
        double acc = 0.0;
        for (int b = 0; b < sub / 2; ++b)
          for (int a = 0; a < sub / 2; ++a)
            acc += (val(a, b) + val(sub - 1 - a, b)) +
                   (val(a, sub - 1 - b) + val(sub - 1 - a, sub - 1 - b));
        u.at(i, j) = acc / (sub * sub);
      }
    }
  }
  return u;
}

Field sample_v0(const RoughDatumSpec& spec, const GridSpec& g) {
  Field v(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) v.at(i, j) = v0_value(spec, g.lx, g.ly, g.cx(i), g.cy(j));
  return v;
}

double u0_l1_analytic(const RoughDatumSpec& spec, double lx, double ly) {
  validate_spec(spec, lx, ly);
  const double tol = 1e-9 * std::max(1.0, spec.amplitude) * lx * ly;
  switch (spec.kind) {
    case DatumKind::spike:
    case DatumKind::multi_spike: {
      // per center: exact polar reduction (rectangle is star-shaped about it)
      double total = 0.0;
      for (const Point& p : spec.centers)
        total += spike_mass_polar(spec.amplitude, spec.alpha, p.x, p.y, lx, ly, tol);
      return total;
    }
    case DatumKind::plateau_noise: {
      // integrate the smooth pattern over exactly the plateau box, keeping the
      // cutoff out of the integrand (a masked integrand stalls the adaptivity)
      Fn2 f = [&](double x, double y) { return plateau_pattern(spec.amplitude, lx, ly, x, y); };
      return adaptive_integral(f, 0.25 * lx, 0.75 * lx, 0.25 * ly, 0.75 * ly, tol);
    }
    case DatumKind::smooth: {
      Fn2 f = [&](double x, double y) { return u0_value(spec, lx, ly, x, y); };
      return adaptive_integral(f, 0.0, lx, 0.0, ly, tol);
    }
  }
  return 0.0;
}

double W12Norms::norm() const { return std::sqrt(norm_sq()); }

W12Norms v0_w12_analytic(const RoughDatumSpec& spec, double lx, double ly) {
  const double tol = 1e-9 * std::max(1.0, spec.v_amplitude * spec.v_amplitude) * lx * ly;
  Fn2 fsq = [&](double x, double y) {
    const double v = v0_value(spec, lx, ly, x, y);
    return v * v;
  };
  Fn2 gsq = [&](double x, double y) {
    double gx = 0.0, gy = 0.0;
    v0_grad_value(spec, lx, ly, x, y, &gx, &gy);
    return gx * gx + gy * gy;
  };
  W12Norms out;
  if (spec.v_kind == VKind::kink) {
    // split at the gradient jump line x = lx/2
    out.l2_sq = adaptive_integral(fsq, 0.0, 0.5 * lx, 0.0, ly, 0.5 * tol) +
                adaptive_integral(fsq, 0.5 * lx, lx, 0.0, ly, 0.5 * tol);
    out.grad_l2_sq = adaptive_integral(gsq, 0.0, 0.5 * lx, 0.0, ly, 0.5 * tol) +
                     adaptive_integral(gsq, 0.5 * lx, lx, 0.0, ly, 0.5 * tol);
  } else {
    out.l2_sq = adaptive_integral(fsq, 0.0, lx, 0.0, ly, tol);
    out.grad_l2_sq = adaptive_integral(gsq, 0.0, lx, 0.0, ly, tol);
  }
  return out;
}

FamilyResult build_family(const RoughDatumSpec& spec, const GridSpec& g, double eps,
                          SpectralSolver& solver, double delta_scale) {
  if (!(eps > 0.0)) throw std::invalid_argument("build_family: eps must be > 0");
  validate_spec(spec, g.lx, g.ly);
  FamilyResult out;
  out.eps = eps;
  out.clamp_level = 1.0 / eps;
  out.delta = delta_scale * std::min(g.lx, g.ly) * std::sqrt(eps);

  Field u0 = sample_u0(spec, g);
  for (double& v : u0.a) v = std::min(v, out.clamp_level);
  out.u0e = solver.heat_filter(u0, out.delta);
  for (double& v : out.u0e.a) v = std::max(v, 0.0);

  Field v0 = sample_v0(spec, g);
  out.v0e = solver.heat_filter(v0, out.delta);
  for (double& v : out.v0e.a) v = std::max(v, 0.0);

  // guard: the analytic-norm doubling budget must hold on the produced fields
  const double l1_cap = 2.0 * u0_l1_analytic(spec, g.lx, g.ly);
  const double l1_now = integrate(out.u0e);
  if (l1_now > l1_cap && l1_now > 0.0) {
    const double s = l1_cap / l1_now;
    for (double& v : out.u0e.a) v *= s;
    out.rescaled_u = true;
  }
  const double w12_cap_sq = 4.0 * v0_w12_analytic(spec, g.lx, g.ly).norm_sq();
  const double w12_now_sq = integral_product(out.v0e, out.v0e) + grad_norms(out.v0e).l2_sq;
  if (w12_now_sq > w12_cap_sq && w12_now_sq > 0.0) {
    const double s = std::sqrt(w12_cap_sq / w12_now_sq);
    for (double& v : out.v0e.a) v *= s;
    out.rescaled_v = true;
  }
  return out;
}

}  // namespace kslab
