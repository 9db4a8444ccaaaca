#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sklab {

/// Gauss-Hermite rule in the probabilist's convention:
/// sum_i weights[i] * f(nodes[i]) approximates E[f(Z)], Z ~ N(0,1).
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;    // ascending, symmetric about 0
  std::vector<double> weights;  // positive, sum to 1
};

/// Golub-Welsch on the Jacobi matrix of the (monic) Hermite recurrence.
/// Valid orders: 2..512.
QuadratureRule build_rule(int order);

/// Shared order-64 rule used by all scalar expectations.
const QuadratureRule& default_rule();

/// Shared order-384 rule for cross-checks that compare two independent
/// integration routes; plain Gauss-Hermite loses accuracy on sech-type
/// integrands once the effective std exceeds ~1.
const QuadratureRule& dense_rule();

/// E[f(mean + std*Z)] by the given rule. std == 0 is an exact passthrough.
template <class F>
double gauss_expect(const QuadratureRule& rule, F&& f, double mean = 0.0,
                    double std = 1.0) {
  if (std < 0.0) throw std::invalid_argument("gauss_expect: negative std");
  if (std == 0.0) {
    double v = f(mean);
    if (!std::isfinite(v))
      throw std::runtime_error("gauss_expect: non-finite integrand at x=" +
                               std::to_string(mean));
    return v;
  }
  double acc = 0.0;
  for (int i = 0; i < rule.order; ++i) {
    const double x = mean + std * rule.nodes[i];
    const double v = f(x);
    if (!std::isfinite(v))
      throw std::runtime_error("gauss_expect: non-finite integrand at node x=" +
                               std::to_string(x));
    acc += rule.weights[i] * v;
  }
  return acc;
}

/// Overflow-safe log cosh: |x| + log((1 + e^{-2|x|})/2).
inline double log_cosh(double x) {
  const double a = std::fabs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453094;
}

inline double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

/// Gauss-Legendre nodes/weights on [-1,1].
struct LegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

LegendreRule build_legendre(int order);

/// Composite Gauss-Legendre integral of f over [a,b].
template <class F>
double integrate_gl(F&& f, double a, double b, int order = 32,
                    int panels = 8) {
  static thread_local int cached_order = -1;
  static thread_local LegendreRule cached;
  if (order != cached_order) {
    cached = build_legendre(order);
    cached_order = order;
  }
  const double hp = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * hp;
    const double mid = lo + 0.5 * hp;
    for (std::size_t i = 0; i < cached.nodes.size(); ++i)
      acc += cached.weights[i] * f(mid + 0.5 * hp * cached.nodes[i]);
  }
  return acc * 0.5 * hp;
}

/// splitmix64 step; used to derive independent sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace sklab
