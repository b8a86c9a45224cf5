#pragma once

#include <vector>

#include "kslab/dct.hpp"
#include "kslab/grid.hpp"

// Analytic initial data and the regularized family built from it.
//
// u0 kinds:
//   spike        amplitude * |x-c|^(-alpha), one center (L1 but not L2 for alpha >= 1)
//   multi_spike  sum of spikes over several centers
//   plateau_noise bounded discontinuous: modulated plateau on the centered half box
//   smooth       amplitude * (1 + cos(pi x/lx) cos(pi y/ly)) / 2
// v0 kinds: constant, cosine_mix (smooth, nonnegative), kink (tent in x, gradient jump).
//
// The family at parameter eps clamps u0 at level 1/eps, then applies the
// grid heat filter of width delta = delta_scale * min(lx,ly) * sqrt(eps), and
// finally rescales (guard only) if the produced mass/W12 norms exceed twice
// the analytic ones.

namespace kslab {

enum class DatumKind { spike, multi_spike, plateau_noise, smooth };
enum class VKind { constant, cosine_mix, kink };

struct Point {
  double x = 0.0, y = 0.0;
};

struct RoughDatumSpec {
  DatumKind kind = DatumKind::spike;
  std::vector<Point> centers = {{0.5, 0.5}};
  double alpha = 1.0;      // spike exponent, 0 < alpha < 2
  double amplitude = 1.0;  // >= 0
  VKind v_kind = VKind::cosine_mix;
  double v_amplitude = 0.5;  // >= 0
};

bool datum_is_bounded(const RoughDatumSpec& spec);  // true unless a spike kind

// rejects bad exponents/amplitudes and centers outside the open domain
void validate_spec(const RoughDatumSpec& spec, double lx, double ly);

double u0_value(const RoughDatumSpec& spec, double lx, double ly, double x, double y);
double v0_value(const RoughDatumSpec& spec, double lx, double ly, double x, double y);
void v0_grad_value(const RoughDatumSpec& spec, double lx, double ly, double x, double y,
                   double* gx, double* gy);

// cell-center samples; cells near a spike center get a subsampled cell average
// instead of the (possibly unbounded) point value
Field sample_u0(const RoughDatumSpec& spec, const GridSpec& g);
Field sample_v0(const RoughDatumSpec& spec, const GridSpec& g);

// quadrature of the analytic forms (adaptive; spike cores handled in closed form)
double u0_l1_analytic(const RoughDatumSpec& spec, double lx, double ly);

struct W12Norms {
  double l2_sq = 0.0;
  double grad_l2_sq = 0.0;
  double norm_sq() const { return l2_sq + grad_l2_sq; }
  double norm() const;
};
W12Norms v0_w12_analytic(const RoughDatumSpec& spec, double lx, double ly);

struct FamilyResult {
  Field u0e, v0e;
  double eps = 0.0;
  double clamp_level = 0.0;  // 1/eps
  double delta = 0.0;        // filter width
  bool rescaled_u = false, rescaled_v = false;
};

FamilyResult build_family(const RoughDatumSpec& spec, const GridSpec& g, double eps,
                          SpectralSolver& solver, double delta_scale = 0.25);

}  // namespace kslab
