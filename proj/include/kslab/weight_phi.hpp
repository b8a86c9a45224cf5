#pragma once

#include <functional>
#include <vector>

#include "kslab/grid.hpp"

// Constructive superlinear convex weight.
//
// Stage 1 (construct_phi): from a measured tail profile M -> sup over the
// family of mass above level M, pick knots M_k (powers of two, M_0 = 0) such
// that the tail at M_k is below 4^-k, and define a smooth nondecreasing slope
// function that climbs from 1 to 2^(k-1) through a C-infinity smoothstep on
// each knot interval. Its integral is a convex superlinear weight whose
// composition with the family has uniformly bounded integral.
//
// Stage 2 (adjust_weight): replace the second derivative f of that weight by
// h with 0 <= h <= g = 1/x and integral of h dominated by the integral of f,
// marching in x while tracking psi(x) = int_0^x (h - f); a smooth cutoff in
// psi blends between the envelope g (when psi is well below 0) and f. The
// re-integrated weight keeps convexity and superlinearity but gains
// x * Phi''(x) <= 1, while never exceeding the stage-1 weight.

namespace kslab {

// C-infinity step: 0 at 0, 1 at 1, flat at both ends
double smoothstep_zeta(double s);
double smoothstep_zeta_deriv(double s);

// C-infinity cutoff: 1 on (-inf,-1], 0 on [-1/2,inf)
double cutoff_phi_c(double t);
double cutoff_lipschitz();  // measured once on a dense sample, then cached

struct PhiSpec {
  std::vector<double> knots;  // M_0 = 0 < M_1 < M_2 < ...

  int segments() const { return static_cast<int>(knots.size()) - 1; }
  // 1/eps_k with eps_k = 2^-k and eps_{-1} = eps_0 = 1
  double inv_eps(int k) const;
  double slope(double x) const;        // the nondecreasing first derivative
  double slope_deriv(double x) const;  // its derivative (stage-2 target f)
};

// tail_profile must be nonincreasing and decaying; throws ConstructionError
// if no admissible knot is found below 2^200
PhiSpec construct_phi(const std::function<double(double)>& tail_profile, int k_max);

struct AdjustedWeight {
  std::vector<double> x;    // march abscissae (x[0] = step)
  std::vector<double> f;    // target second derivative samples
  std::vector<double> g;    // envelope 1/x
  std::vector<double> h;    // adjusted samples
  std::vector<double> psi;  // running int_0^x (h - f), trapezoid
  double march_step = 0.0;
  double x_max = 0.0;
  double lipschitz_phi_c = 0.0;
};

// linear spacing `step` on [step, 1), then geometric with ratio (1 + step)
std::vector<double> march_grid(double x0, double x_max, double step);

// throws ConstructionError when one step moves psi by more than a quarter of
// the cutoff transition band (step too coarse to resolve the blend)
AdjustedWeight adjust_weight(const std::function<double(double)>& f, double x_max, double step);

struct FinalWeight {
  std::vector<double> x;       // leading 0 prepended to the march grid
  std::vector<double> h;       // second derivative
  std::vector<double> phi1;    // first derivative = 1 + cumtrapz(h)
  std::vector<double> phi0;    // value = cumtrapz(phi1), phi0[0] = 0
  std::vector<double> upper1;  // stage-1 first derivative rebuilt the same way from f
  std::vector<double> upper0;  // stage-1 value (the pointwise upper bound)

  // piecewise-linear evaluation; beyond the grid the weight extends linearly
  double phi(double v) const;
  double phi_prime(double v) const;
  double phi_second(double v) const;
  double upper(double v) const;
};

FinalWeight finalize_phi(const PhiSpec& spec, const AdjustedWeight& w);

}  // namespace kslab
