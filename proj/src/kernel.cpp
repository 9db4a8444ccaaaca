#include "sklab/kernel.hpp"

#include <algorithm>

namespace sklab {

double F_lambda(double lambda, double s, const QuadratureRule& rule) {
  if (lambda < 0.0) throw std::invalid_argument("F_lambda: lambda < 0");
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("F_lambda: s outside [0,1]");
  if (lambda == 0.0) return 1.0;
  const double rl = std::sqrt(lambda);
  const double val = gauss_expect(
      rule,
      [&](double eta) {
        const double sh = std::sinh(eta);
        const double u = sh * sh;
        const double den = 1.0 + s * u;
        return std::cosh(eta) * (1.0 + (4.0 - 3.0 * s) * u) / (den * den * den);
      },
      0.0, rl);
  return std::exp(-0.5 * lambda) * val;
}

double nu_expect(const std::function<double(double)>& phi, int order,
                 int panels) {
  // beyond y = 60 both sech^2(y) and every phi of interest are below 1e-50
  return integrate_gl([&](double y) { return phi(sech2(y)) * sech2(y); }, 0.0,
                      60.0, order, panels);
}

double y_of_s(double s) {
  if (!(s > 0.0 && s < 1.0))
    throw std::domain_error("y_of_s: s must be in (0,1)");
  const double w = 1.0 / std::sqrt(s);
  if (w - 1.0 < 1e-8) return std::sqrt(2.0 * (w - 1.0));
  return std::log(w + std::sqrt(w * w - 1.0));
}

namespace {

// Sum of the two Gaussian branch weights at +-y(s).
double branch_sum(const KernelContext& ctx, double s) {
  const double y = y_of_s(s);
  const double h = ctx.params.h;
  const double s2 = ctx.sigma * ctx.sigma;
  return std::exp(-(y - h) * (y - h) / (2.0 * s2)) +
         std::exp(-(y + h) * (y + h) / (2.0 * s2));
}

constexpr double kSqrt2Pi = 2.506628274631000502;

}  // namespace

double rho_S(const KernelContext& ctx, double s) {
  if (!(s > 0.0 && s < 1.0))
    throw std::domain_error("rho_S: s must be in (0,1)");
  return branch_sum(ctx, s) /
         (2.0 * ctx.sigma * kSqrt2Pi * s * std::sqrt(1.0 - s));
}

double r_ratio(const KernelContext& ctx, double s) {
  if (!(s > 0.0 && s < 1.0))
    throw std::domain_error("r_ratio: s must be in (0,1)");
  return s / (ctx.sigma * kSqrt2Pi) * branch_sum(ctx, s);
}

double a2_kernel(const KernelContext& ctx, double lambda,
                 const QuadratureRule& rule) {
  if (lambda < 0.0) throw std::invalid_argument("a2_kernel: lambda < 0");
  return gauss_expect(
      rule,
      [&](double x) {
        const double s = sech2(x);
        return s * s * F_lambda(lambda, s, rule);
      },
      ctx.params.h, ctx.sigma);
}

double covariance_gap(const KernelContext& ctx, double lambda,
                      const QuadratureRule& rule) {
  return nu_expect(
      [&](double s) {
        if (s <= 0.0 || s >= 1.0) return 0.0;  // r vanishes at the endpoints
        return (F_lambda(lambda, s, rule) - 1.0) * r_ratio(ctx, s);
      });
}

Curve mbar_curve(const KernelContext& ctx,
                 const std::vector<double>& lambda_grid,
                 const QuadratureRule& rule) {
  if (lambda_grid.empty() || !std::is_sorted(lambda_grid.begin(), lambda_grid.end()))
    throw std::invalid_argument("mbar_curve: need a sorted grid");
  if (lambda_grid.front() < 0.0 || lambda_grid.back() > ctx.lambda_max + 1e-9)
    throw std::invalid_argument("mbar_curve: grid outside [0, lambda_max]");
  Curve c;
  c.times = lambda_grid;
  c.stderrs.assign(lambda_grid.size(), 0.0);
  double acc = 0.0;
  double prev = 0.0;
  for (double lam : lambda_grid) {
    if (lam > prev) {
      acc += integrate_gl(
          [&](double s) { return a2_kernel(ctx, s, rule); }, prev, lam, 8, 1);
      prev = lam;
    }
    c.values.push_back(1.0 - ctx.fp.q - acc);
  }
  return c;
}

}  // namespace sklab
