#include "kslab/dct.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace kslab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SpectralSolver::SpectralSolver(const GridSpec& g) : grid_(g) {
  lambda_.resize(g.cells());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      lambda_[static_cast<std::size_t>(j) * g.nx + i] =
          (2.0 / (g.dx() * g.dx())) * (1.0 - std::cos(M_PI * i / g.nx)) +
          (2.0 / (g.dy() * g.dy())) * (1.0 - std::cos(M_PI * j / g.ny));
  mult_.resize(g.cells());
  buf_ = fftw_alloc_real(g.cells());
  if (!buf_) throw std::bad_alloc();
  std::lock_guard<std::mutex> lock(planner_mutex());
  // row-major (ny, nx): fftw wants slowest-varying dimension first
  plan_fwd_ = fftw_plan_r2r_2d(grid_.ny, grid_.nx, buf_, buf_, FFTW_REDFT10, FFTW_REDFT10,
                               FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_r2r_2d(grid_.ny, grid_.nx, buf_, buf_, FFTW_REDFT01, FFTW_REDFT01,
                               FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("fftw plan creation failed");
}

SpectralSolver::~SpectralSolver() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(buf_);
}

Field SpectralSolver::transform_with_multiplier(const Field& f, const std::vector<double>& mult) {
  if (!(f.grid == grid_)) throw std::invalid_argument("spectral solver: grid mismatch");
  const std::size_t n = grid_.cells();
  const double norm = 1.0 / (4.0 * grid_.nx * grid_.ny);  // REDFT10+REDFT01 round trip scale
  for (std::size_t k = 0; k < n; ++k) buf_[k] = f.a[k];
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  for (std::size_t k = 0; k < n; ++k) buf_[k] *= mult[k] * norm;
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  Field out(grid_);
  for (std::size_t k = 0; k < n; ++k) out.a[k] = buf_[k];
  return out;
}

Field SpectralSolver::diffusion_solve(const Field& f, double dt, double sigma) {
  if (!(dt > 0.0)) throw std::invalid_argument("diffusion_solve: dt must be > 0");
  if (sigma < 0.0) throw std::invalid_argument("diffusion_solve: sigma must be >= 0");
  for (std::size_t k = 0; k < mult_.size(); ++k)
    mult_[k] = 1.0 / (1.0 + sigma * dt + dt * lambda_[k]);
  return transform_with_multiplier(f, mult_);
}

Field SpectralSolver::heat_filter(const Field& f, double delta) {
  if (delta < 0.0) throw std::invalid_argument("heat_filter: delta must be >= 0");
  for (std::size_t k = 0; k < mult_.size(); ++k)
    mult_[k] = std::exp(-0.5 * delta * delta * lambda_[k]);
  return transform_with_multiplier(f, mult_);
}

}  // namespace kslab
