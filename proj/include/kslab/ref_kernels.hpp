#pragma once

#include "kslab/kernels.hpp"

// Plain serial reference implementations of every kernel, kept for tests and
// for the kernel benchmark. Additionally a direct O(n^2)-per-line cosine
// transform realization of the implicit diffusion solve, used as an oracle
// for the fast transform path on small grids.

namespace kslab::ref {

double integrate(const Field& f);
double integral_product(const Field& a, const Field& b);
double max_abs(const Field& f);
Field laplacian(const Field& f);
Field chemo_flux_divergence(const Field& u, const Field& v, double chi);
GradNorms grad_norms(const Field& f);
double grad_max(const Field& f);
double tail_mass(const Field& f, double M);

// solves (1 + sigma*dt - dt*Lap_h) g = f by direct cosine-basis expansion
Field diffusion_solve_direct(const Field& f, double dt, double sigma);
// multiplies cosine coefficients by exp(-delta^2 * lambda / 2)
Field heat_filter_direct(const Field& f, double delta);

}  // namespace kslab::ref
