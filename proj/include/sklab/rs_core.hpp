#pragma once

#include "sklab/quadrature.hpp"

namespace sklab {

/// One SK instance: inverse temperature beta > 0, external field h >= 0.
/// h = 0 is admitted for boundary and limit tests only.
struct ModelParams {
  double beta = 1.0;
  double h = 0.0;

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("ModelParams: beta must be > 0");
    if (!(h >= 0.0)) throw std::invalid_argument("ModelParams: h must be >= 0");
  }
};

/// Solution of q = E[tanh^2(beta sqrt(q) Z + h)] and the derived scalars.
struct RSFixedPoint {
  ModelParams params;
  double q = 0.0;
  double alpha = 0.0;   // beta^2 E[sech^4(beta sqrt(q) Z + h)]
  double sigma2 = 0.0;  // beta^2 q
  double residual = 0.0;
};

enum class Case { I, II };  // beta^2(1-q) <= 1 vs > 1

RSFixedPoint solve_q(const ModelParams& params,
                     const QuadratureRule& rule = default_rule());

double alpha_param(const RSFixedPoint& fp,
                   const QuadratureRule& rule = default_rule());

/// log 2 + E[log cosh(beta sqrt(q) Z + h)] + (beta^2/4)(1-q)^2
double phi_rs(const RSFixedPoint& fp,
              const QuadratureRule& rule = default_rule());

/// m1 = E[S], m2 = E[S^2] with S = sech^2(beta sqrt(q) Z + h).
/// m1 equals 1 - q; m2 < m1 strictly whenever h > 0.
struct SechMoments {
  double m1 = 0.0;
  double m2 = 0.0;
};
SechMoments sech_moments(const RSFixedPoint& fp,
                         const QuadratureRule& rule = default_rule());

/// lhs = E[sech^2(sigma^2 + sigma Z)], rhs = 1/(1+sigma^2); lhs <= rhs.
struct MmseBound {
  double lhs = 0.0;
  double rhs = 0.0;
};
MmseBound mmse_check(double sigma, const QuadratureRule& rule = default_rule());

/// E[sech^2(h + sigma Z)]; strictly decreasing in h for fixed sigma.
double m_sigma(double sigma, double h,
               const QuadratureRule& rule = default_rule());

/// The field h >= 0 with alpha(beta, h) = 1 (the phase boundary).
/// Returns 0 for beta <= 1.
double at_line(double beta, const QuadratureRule& rule = default_rule());

/// Case split on beta^2(1-q); in Case II additionally checks h < beta^2 q
/// and throws if that fails.
Case case_classifier(const RSFixedPoint& fp);

}  // namespace sklab
