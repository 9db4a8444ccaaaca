#pragma once

#include <functional>

#include "sklab/rs_core.hpp"

namespace sklab {

/// Finitely-supported probability measure on [0,1], the candidate order
/// parameter. Atoms strictly increasing; weights nonnegative, summing to 1
/// (zero weights are tolerated and ignored by the cdf).
struct AtomicMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;

  static AtomicMeasure delta(double q) { return {{q}, {1.0}}; }

  void validate() const;

  /// mu([0,t]), right-continuous piecewise-constant cdf.
  double cdf(double t) const {
    double c = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i] <= t) c += weights[i];
    return c;
  }
};

struct GridConfig {
  double x_max = 0.0;  // <= 0 means auto: |h| + 8 beta + 4
  double dx = 2e-3;
  std::vector<double> times;  // requested output slices; 0 and 1 always added
  int quad_order = 64;

  static GridConfig for_params(const ModelParams& p) {
    GridConfig cfg;
    cfg.x_max = std::fabs(p.h) + 8.0 * p.beta + 4.0;
    return cfg;
  }
};

/// Discretized value function on x >= 0 (even reflection at 0, linear tail
/// u ~ x + c beyond x_max). u, ux, uxx indexed [time][x].
struct ValueGrid {
  std::vector<double> times;
  std::vector<double> xgrid;
  std::vector<std::vector<double>> u, ux, uxx;

  std::size_t time_index(double t) const;
  /// Cubic interpolation with even reflection and linear tail.
  double u_at(std::size_t ti, double x) const;
  /// Odd in x; saturates to sign(x) beyond the grid.
  double ux_at(std::size_t ti, double x) const;
  double uxx_at(std::size_t ti, double x) const;
};

/// Backward Cole-Hopf solve of the Parisi terminal-value problem for an
/// atomic measure. Each constant-cdf interval is convolved in one shot.
ValueGrid solve_u(const AtomicMeasure& measure, const ModelParams& params,
                  const GridConfig& cfg);

struct ExplicitValue {
  double u = 0.0;
  double ux = 0.0;
  double uxx = 0.0;
};

/// Closed forms for mu = delta_q: log cosh branch for t >= q, Gaussian
/// smoothing for t < q.
ExplicitValue u_delta_q_explicit(const ModelParams& params,
                                 const RSFixedPoint& fp, double t, double x,
                                 const QuadratureRule& rule = default_rule());

/// (beta^2/2) * int_0^1 s * cdf(s) ds, in closed form.
double parisi_penalty(const AtomicMeasure& measure, const ModelParams& params);

/// log 2 + u_mu(0, h) - penalty.
double parisi_functional(const AtomicMeasure& measure,
                         const ModelParams& params, const GridConfig& cfg);
double parisi_functional(const AtomicMeasure& measure,
                         const ModelParams& params);

struct RsbResult {
  AtomicMeasure best_measure;
  double best_value = 0.0;
  double delta_q_value = 0.0;  // P(delta_q) reference
  bool budget_exhausted = false;
  int evaluations = 0;
};

/// Nelder-Mead minimization of the functional over k-atom measures
/// (sigmoid-mapped locations, softmax weights), seeded from delta_q.
RsbResult rsb_search(const ModelParams& params, int k, int budget = 400);

}  // namespace sklab
