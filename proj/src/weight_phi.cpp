#include "kslab/weight_phi.hpp"

#include <algorithm>
#include <cmath>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

double bump_sigma(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

std::vector<double> cumtrapz(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return out;
}

// linear interpolation with linear extension beyond the last sample
double interp(const std::vector<double>& xs, const std::vector<double>& ys, double v,
              double tail_slope) {
  if (v <= xs.front()) return ys.front();
  if (v >= xs.back()) return ys.back() + tail_slope * (v - xs.back());
  const auto it = std::upper_bound(xs.begin(), xs.end(), v);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double w = (v - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

}  // namespace

double smoothstep_zeta(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = bump_sigma(s), b = bump_sigma(1.0 - s);
  return a / (a + b);
}

double smoothstep_zeta_deriv(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = bump_sigma(s), b = bump_sigma(1.0 - s);
  const double ap = a / (s * s);            // d/ds sigma(s)
  const double bp = -b / ((1.0 - s) * (1.0 - s));  // d/ds sigma(1-s)
  const double d = a + b;
  return (ap * d - a * (ap + bp)) / (d * d);
}

double cutoff_phi_c(double t) {
  if (t <= -1.0) return 1.0;
  if (t >= -0.5) return 0.0;
  return smoothstep_zeta(-2.0 * t - 1.0);
}

double cutoff_lipschitz() {
  static const double L = [] {
    double m = 0.0;
    for (int i = 0; i <= 200000; ++i) m = std::max(m, smoothstep_zeta_deriv(i / 200000.0));
    return 2.0 * m;  // chain rule: |d/dt zeta(-2t-1)| = 2 |zeta'|
  }();
  return L;
}

double PhiSpec::inv_eps(int k) const { return k <= 0 ? 1.0 : std::ldexp(1.0, k); }

double PhiSpec::slope(double x) const {
  const int K = segments();
  if (x >= knots.back()) return inv_eps(K - 1);
  for (int k = 0; k < K; ++k) {
    if (x >= knots[k] && x < knots[k + 1]) {
      const double s = (knots[k + 1] - x) / (knots[k + 1] - knots[k]);
      const double z = smoothstep_zeta(s);
      return (1.0 - z) * inv_eps(k) + z * inv_eps(k - 1);
    }
  }
  return 1.0;  // x < 0 never queried; first segment starts at 0
}

double PhiSpec::slope_deriv(double x) const {
  const int K = segments();
  if (x >= knots.back() || x < 0.0) return 0.0;
  for (int k = 0; k < K; ++k) {
    if (x >= knots[k] && x < knots[k + 1]) {
      const double w = knots[k + 1] - knots[k];
      const double s = (knots[k + 1] - x) / w;
      return smoothstep_zeta_deriv(s) * (inv_eps(k) - inv_eps(k - 1)) / w;
    }
  }
  return 0.0;
}

PhiSpec construct_phi(const std::function<double(double)>& tail_profile, int k_max) {
  if (k_max < 1) throw ConstructionError("construct_phi: k_max must be >= 1");
  PhiSpec spec;
  spec.knots.push_back(0.0);
  int m = 1;
  for (int k = 1; k <= k_max; ++k) {
    const double target = std::pow(4.0, -k);
    for (;;) {
      if (m > 200)
        throw ConstructionError(
            "construct_phi: tail profile does not decay below 4^-k within the probe range");
      const double M = std::ldexp(1.0, m);
      if (tail_profile(M) < target) {
        spec.knots.push_back(M);
        ++m;
        break;
      }
      ++m;
    }
  }
  return spec;
}

std::vector<double> march_grid(double x0, double x_max, double step) {
  if (!(step > 0.0) || !(x0 > 0.0) || !(x_max > x0))
    throw ConstructionError("march grid: need 0 < x0 < x_max and step > 0");
  std::vector<double> xs;
  for (double x = x0; x < 1.0; x += step) xs.push_back(x);
  double x = std::max(1.0, x0);
  while (x < x_max) {
    xs.push_back(x);
    x *= (1.0 + step);
  }
  if (!xs.empty() && x_max - xs.back() < 1e-15 * x_max) xs.pop_back();
  xs.push_back(x_max);
  return xs;
}

AdjustedWeight adjust_weight(const std::function<double(double)>& f, double x_max, double step) {
  AdjustedWeight w;
  w.march_step = step;
  w.x_max = x_max;
  w.lipschitz_phi_c = cutoff_lipschitz();
  w.x = march_grid(step, x_max, step);
  const std::size_t n = w.x.size();
  w.f.resize(n);
  w.g.resize(n);
  w.h.resize(n);
  w.psi.resize(n);

  double psi = 0.0, fprev = 0.0, hprev = 0.0, xprev = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double xv = w.x[j];
    const double fv = f(xv);
    const double gv = 1.0 / xv;
    double hv;
    if (fv >= gv) {
      hv = gv;  // already at (or above) the envelope: cap there
    } else {
      const double c = cutoff_phi_c(psi);
      hv = c * gv + (1.0 - c) * fv;
    }
    if (j > 0) {
      const double dpsi = 0.5 * ((hv - fv) + (hprev - fprev)) * (xv - xprev);
      if (dpsi > 0.25)
        throw ConstructionError(
            "adjust_weight: step too coarse, psi crosses the cutoff band within one step; "
            "rerun with a smaller march step");
      psi += dpsi;
    }
    w.f[j] = fv;
    w.g[j] = gv;
    w.h[j] = hv;
    w.psi[j] = psi;
    fprev = fv;
    hprev = hv;
    xprev = xv;
  }
  return w;
}

FinalWeight finalize_phi(const PhiSpec& /*spec*/, const AdjustedWeight& w) {
  FinalWeight out;
  const std::size_t n = w.x.size();
  out.x.reserve(n + 1);
  out.h.reserve(n + 1);
  // below the first march point both branches sit inside the envelope; extend
  // the leading sample flatly (the effect on integrals is O(step))
  out.x.push_back(0.0);
  out.h.push_back(w.h.front());
  out.x.insert(out.x.end(), w.x.begin(), w.x.end());
  out.h.insert(out.h.end(), w.h.begin(), w.h.end());

  std::vector<double> f0;
  f0.reserve(n + 1);
  f0.push_back(w.f.front());
  f0.insert(f0.end(), w.f.begin(), w.f.end());

  out.phi1 = cumtrapz(out.x, out.h);
  for (double& v : out.phi1) v += 1.0;  // slope at zero is one
  out.phi0 = cumtrapz(out.x, out.phi1);
  out.upper1 = cumtrapz(out.x, f0);
  for (double& v : out.upper1) v += 1.0;
  out.upper0 = cumtrapz(out.x, out.upper1);
  return out;
}

double FinalWeight::phi(double v) const {
  if (v <= 0.0) return 0.0;
  return interp(x, phi0, v, phi1.back());
}

double FinalWeight::phi_prime(double v) const {
  if (v <= 0.0) return phi1.front();
  return interp(x, phi1, v, 0.0);
}

double FinalWeight::phi_second(double v) const {
  if (v <= 0.0) return h.front();
  if (v > x.back()) return 0.0;  // the weight extends linearly past the grid
  return interp(x, h, v, 0.0);
}

double FinalWeight::upper(double v) const {
  if (v <= 0.0) return 0.0;
  return interp(x, upper0, v, upper1.back());
}

}  // namespace kslab
