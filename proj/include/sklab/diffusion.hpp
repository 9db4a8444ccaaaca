#pragma once

#include <cstdint>

#include "sklab/parisi.hpp"

namespace sklab {

/// Seeded ensemble of the controlled diffusion, stored at the requested
/// output times only. Reproducible bit-for-bit from (seed, n_paths, dt).
struct PathEnsemble {
  std::size_t n_paths = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> times;                // ascending, within [0,1]
  std::vector<std::vector<double>> states;  // [time][path]
};

struct Curve {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> stderrs;  // 0 for quadrature-computed curves
};

/// Output grid on [q,1] whose points sit on the Euler lattice q + k*dt.
/// dt is adjusted so that the lattice ends exactly at 1.
struct AlignedGrid {
  double dt = 0.0;
  std::vector<double> times;
};
AlignedGrid aligned_time_grid(double q, double dt_target, int n_outputs);

/// Euler-Maruyama with drift beta^2 cdf(t) ux(t, X); exact Gaussian stepping
/// on zero-drift intervals. For a single-atom measure the drift on [q,1] is
/// the closed-form beta^2 tanh(X). Antithetic path pairs; per-block seeds.
PathEnsemble simulate(const AtomicMeasure& measure, const ModelParams& params,
                      const ValueGrid& vg, std::size_t n_paths, double dt,
                      std::uint64_t seed, const std::vector<double>& out_times);

/// Per-time Monte Carlo mean of ux(t, X_t)^2 with standard errors.
Curve g_curve(const PathEnsemble& ensemble, const ValueGrid& vg);

/// MC-free reference for g on [0,q]: nested quadrature over the Gaussian
/// marginal X_t ~ N(h, beta^2 t) of (E[tanh(X_t + beta sqrt(q-t) Z)])^2.
double g_curve_quadrature(const ModelParams& params, const RSFixedPoint& fp,
                          double t, const QuadratureRule& rule = default_rule());

/// E[tanh^2(X_t)] on [q,1] by the closed-form conditional kernel (quadrature
/// over X_q and the tilted Gaussian), no Monte Carlo.
double m2_kernel(const ModelParams& params, const RSFixedPoint& fp, double t,
                 const QuadratureRule& rule = default_rule());

/// f(t) = E[tanh^2(X_t)] - t on [q,1], from a simulated ensemble.
Curve f_curve(const ModelParams& params, const RSFixedPoint& fp,
              const std::vector<double>& t_grid, std::size_t n_paths,
              double dt, std::uint64_t seed);

/// G(t) = int_t^1 (beta^2/2)(E[ux(s,X_s)^2] - s) ds on the given grid,
/// integrand by quadrature on both sides of q.
Curve G_curve(const ModelParams& params, const RSFixedPoint& fp,
              const std::vector<double>& t_grid,
              const QuadratureRule& rule = default_rule());

/// E[psi(X_t) | X_q = x] with t = q + lambda/beta^2, via the cosh-tilted
/// Gaussian formula.
double doob_conditional(const ModelParams& params, double x, double lambda,
                        const std::function<double(double)>& psi,
                        const QuadratureRule& rule = default_rule());

/// MC oracle for doob_conditional: Euler paths of the drifted SDE started
/// at x, run for time lambda/beta^2. Returns (mean, stderr).
std::pair<double, double> doob_conditional_mc(
    const ModelParams& params, double x, double lambda,
    const std::function<double(double)>& psi, std::size_t n_paths, double dt,
    std::uint64_t seed);

}  // namespace sklab
