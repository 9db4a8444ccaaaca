#pragma once

#include "sklab/diffusion.hpp"

namespace sklab {

/// Parameters for the kernel analysis on the time-rescaled interval
/// lambda in [0, beta^2(1-q)], with S = sech^2(h + sigma Z), sigma^2 = beta^2 q.
struct KernelContext {
  ModelParams params;
  RSFixedPoint fp;
  double lambda_max = 0.0;  // beta^2 (1 - q)
  double sigma = 0.0;       // beta sqrt(q)

  static KernelContext make(const ModelParams& params,
                            const QuadratureRule& rule = dense_rule()) {
    KernelContext ctx;
    ctx.params = params;
    ctx.fp = solve_q(params, rule);
    ctx.lambda_max = params.beta * params.beta * (1.0 - ctx.fp.q);
    ctx.sigma = params.beta * std::sqrt(ctx.fp.q);
    return ctx;
  }
};

/// Conditional second-moment kernel
/// e^{-lambda/2} E[cosh(sqrt(lambda) G) (1+(4-3s) sinh^2)/(1+s sinh^2)^3].
double F_lambda(double lambda, double s,
                const QuadratureRule& rule = default_rule());

/// Integral of phi against nu(ds) = ds/(2 sqrt(1-s)), by the s = sech^2 y
/// substitution: nu(ds) -> sech^2(y) dy on (0,inf). F_lambda develops a
/// boundary layer of width ~e^{-4 lambda} at s = 0, which this substitution
/// stretches onto an O(1) scale in y.
double nu_expect(const std::function<double(double)>& phi, int order = 32,
                 int panels = 60);

/// y(s) = arcosh(s^{-1/2}), series-guarded near s = 1.
double y_of_s(double s);

/// Density of S on (0,1).
double rho_S(const KernelContext& ctx, double s);

/// d mu_2 / d nu where mu_2(A) = E[S^2 1{S in A}]; increasing when h <= sigma^2.
double r_ratio(const KernelContext& ctx, double s);

/// a2(lambda) = E[S^2 F_lambda(S)], quadrature over Z.
double a2_kernel(const KernelContext& ctx, double lambda,
                 const QuadratureRule& rule = default_rule());

/// int (F_lambda - 1) r dnu = a2(lambda) - a2(0); <= 0 when h <= sigma^2.
double covariance_gap(const KernelContext& ctx, double lambda,
                      const QuadratureRule& rule = default_rule());

/// Mbar(lambda) = (1-q) - int_0^lambda a2(s) ds by per-cell Gauss-Legendre.
Curve mbar_curve(const KernelContext& ctx,
                 const std::vector<double>& lambda_grid,
                 const QuadratureRule& rule = default_rule());

}  // namespace sklab
