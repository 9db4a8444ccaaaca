#include "sklab/rs_core.hpp"

#include <sstream>

namespace sklab {

namespace {

double tanh2_expect(const ModelParams& p, double q, const QuadratureRule& rule) {
  return gauss_expect(
      rule, [](double x) { double t = std::tanh(x); return t * t; }, p.h,
      p.beta * std::sqrt(std::max(q, 0.0)));
}

}  // namespace

RSFixedPoint solve_q(const ModelParams& params, const QuadratureRule& rule) {
  params.validate();
  RSFixedPoint fp;
  fp.params = params;

  double q = 0.0;
  if (params.h == 0.0 && params.beta <= 1.0) {
    q = 0.0;  // q = 0 branch at and below the zero-field critical point
  } else {
    // Damped fixed-point iteration from q0 = 0.5.
    q = 0.5;
    const double omega = 0.6;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
      const double t = tanh2_expect(params, q, rule);
      const double next = (1.0 - omega) * q + omega * t;
      if (std::fabs(t - q) < 1e-13) {
        converged = true;
        break;
      }
      q = next;
    }
    if (!converged) {
      // Bisection fallback on phi(q) = T(q) - q over [lo, 1].
      double lo = (params.h > 0.0) ? 0.0 : 1e-12;
      double hi = 1.0;
      double flo = tanh2_expect(params, lo, rule) - lo;
      double fhi = tanh2_expect(params, hi, rule) - hi;
      if (!(flo >= 0.0 && fhi <= 0.0)) {
        std::ostringstream msg;
        msg << "solve_q: no bracket on [" << lo << ", " << hi << "], phi(lo)="
            << flo << ", phi(hi)=" << fhi;
        throw std::runtime_error(msg.str());
      }
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = tanh2_expect(params, mid, rule) - mid;
        if (fm >= 0.0)
          lo = mid;
        else
          hi = mid;
      }
      q = 0.5 * (lo + hi);
      if (std::fabs(tanh2_expect(params, q, rule) - q) > 1e-12) {
        std::ostringstream msg;
        msg << "solve_q: bisection did not converge, last bracket [" << lo
            << ", " << hi << "]";
        throw std::runtime_error(msg.str());
      }
    }
  }

  fp.q = q;
  fp.residual = q - tanh2_expect(params, q, rule);
  fp.sigma2 = params.beta * params.beta * q;
  fp.alpha = alpha_param(fp, rule);
  return fp;
}

double alpha_param(const RSFixedPoint& fp, const QuadratureRule& rule) {
  const double b = fp.params.beta;
  return b * b *
         gauss_expect(
             rule, [](double x) { double s = sech2(x); return s * s; },
             fp.params.h, b * std::sqrt(std::max(fp.q, 0.0)));
}

double phi_rs(const RSFixedPoint& fp, const QuadratureRule& rule) {
  const double b = fp.params.beta;
  const double one_minus_q = 1.0 - fp.q;
  return 0.6931471805599453094 +
         gauss_expect(rule, [](double x) { return log_cosh(x); }, fp.params.h,
                      b * std::sqrt(std::max(fp.q, 0.0))) +
         0.25 * b * b * one_minus_q * one_minus_q;
}

SechMoments sech_moments(const RSFixedPoint& fp, const QuadratureRule& rule) {
  const double sd = fp.params.beta * std::sqrt(std::max(fp.q, 0.0));
  SechMoments m;
  m.m1 = gauss_expect(rule, [](double x) { return sech2(x); }, fp.params.h, sd);
  m.m2 = gauss_expect(
      rule, [](double x) { double s = sech2(x); return s * s; }, fp.params.h,
      sd);
  return m;
}

MmseBound mmse_check(double sigma, const QuadratureRule& rule) {
  if (sigma < 0.0) throw std::invalid_argument("mmse_check: sigma < 0");
  MmseBound b;
  b.lhs = gauss_expect(rule, [](double x) { return sech2(x); }, sigma * sigma,
                       sigma);
  b.rhs = 1.0 / (1.0 + sigma * sigma);
  return b;
}

double m_sigma(double sigma, double h, const QuadratureRule& rule) {
  if (sigma < 0.0) throw std::invalid_argument("m_sigma: sigma < 0");
  return gauss_expect(rule, [](double x) { return sech2(x); }, h, sigma);
}

double at_line(double beta, const QuadratureRule& rule) {
  if (beta <= 1.0) return 0.0;
  double lo = 0.0, hi = 10.0;
  const double alo = solve_q({beta, lo}, rule).alpha - 1.0;
  const double ahi = solve_q({beta, hi}, rule).alpha - 1.0;
  if (!(alo >= 0.0 && ahi <= 0.0)) {
    std::ostringstream msg;
    msg << "at_line: no bracket for beta=" << beta << " on h in [0, 10], "
        << "alpha(0)-1=" << alo << ", alpha(10)-1=" << ahi;
    throw std::runtime_error(msg.str());
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (solve_q({beta, mid}, rule).alpha - 1.0 >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Case case_classifier(const RSFixedPoint& fp) {
  const double b2 = fp.params.beta * fp.params.beta;
  if (b2 * (1.0 - fp.q) <= 1.0) return Case::I;
  if (fp.params.h >= b2 * fp.q) {
    std::ostringstream msg;
    msg << "case_classifier: contract violation, Case II with h=" << fp.params.h
        << " >= beta^2 q=" << b2 * fp.q;
    throw std::logic_error(msg.str());
  }
  return Case::II;
}

}  // namespace sklab
