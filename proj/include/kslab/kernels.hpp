#pragma once

#include <utility>

#include "kslab/grid.hpp"

// Discrete calculus on Field. All reductions accumulate per-row partial sums
// and add them in fixed index order, so results are bitwise identical for any
// thread count. Loops over rows are OpenMP parallel.

namespace kslab {

double integrate(const Field& f);                       // dx*dy * sum of samples
double integral_product(const Field& a, const Field& b);  // ∫ a b
double lp_norm(const Field& f, double p);               // p in [1,inf); huge p -> max
double max_abs(const Field& f);
double min_value(const Field& f);
double max_value(const Field& f);

// 5-point Laplacian with mirrored ghost cells (no-flux)
Field laplacian(const Field& f);

// conservative divergence of the drift flux chi * u * grad(v); interface u is
// upwinded by the sign of the face-normal drift, boundary faces carry no flux
Field chemo_flux_divergence(const Field& u, const Field& v, double chi);

struct GradNorms {
  double l2_sq = 0.0;  // sum over interior faces of (df/dn)^2 * dx*dy
  double l4_4 = 0.0;   // same with fourth powers
};
GradNorms grad_norms(const Field& f);
double grad_max(const Field& f);  // largest |face gradient| over both directions

// cell-centered central-difference gradient (mirrored ghosts)
std::pair<Field, Field> grad_centered(const Field& f);

// ∫_{f >= M} f
double tail_mass(const Field& f, double M);

// zero out negative samples; adds |removed mass| (dx*dy weighted) to `clipped`
void clip_negative(Field& f, double& clipped);

}  // namespace kslab
