#pragma once

#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

// Fast implicit diffusion and spectral smoothing on the Neumann grid.
//
// The discrete Laplacian with mirrored ghosts is diagonalized by the even
// cosine basis; eigenvalues of -Lap_h are
//   lambda(kx,ky) = (2/dx^2)(1-cos(pi kx/nx)) + (2/dy^2)(1-cos(pi ky/ny)).
// diffusion_solve returns the unique g with (1 + sigma*dt - dt*Lap_h) g = f.
// heat_filter applies exp((delta^2/2) Lap_h), i.e. discrete heat flow to time
// delta^2/2 (a reflected-Gaussian mollifier of width delta); it preserves the
// mean exactly and nonnegativity up to round-off.
//
// Plan creation/destruction is serialized behind a global mutex (the planner
// is not thread-safe); execution uses only this instance's buffers, so
// distinct instances may run on distinct threads concurrently.
class SpectralSolver {
 public:
  explicit SpectralSolver(const GridSpec& g);
  ~SpectralSolver();
  SpectralSolver(const SpectralSolver&) = delete;
  SpectralSolver& operator=(const SpectralSolver&) = delete;

  Field diffusion_solve(const Field& f, double dt, double sigma);
  Field heat_filter(const Field& f, double delta);

  const GridSpec& grid() const { return grid_; }
  // eigenvalues of -Lap_h, same layout as Field samples
  const std::vector<double>& eigenvalues() const { return lambda_; }

 private:
  Field transform_with_multiplier(const Field& f, const std::vector<double>& mult);

  GridSpec grid_;
  std::vector<double> lambda_;
  std::vector<double> mult_;  // scratch multiplier
  double* buf_ = nullptr;
  void* plan_fwd_ = nullptr;  // fftw_plan, kept opaque here
  void* plan_bwd_ = nullptr;
};

}  // namespace kslab
