#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sklab/rs_core.hpp"

using namespace sklab;

namespace {

// Brute-force oracle: bisection on q - E[tanh^2(beta sqrt(q) Z + h)],
// independent of the iteration in solve_q.
double q_bisection(double beta, double h, const QuadratureRule& rule) {
  auto defect = [&](double q) {
    return q - gauss_expect(
                   rule,
                   [](double x) {
                     const double t = std::tanh(x);
                     return t * t;
                   },
                   h, beta * std::sqrt(q));
  };
  double lo = 1e-14, hi = 1.0;
  REQUIRE(defect(lo) < 0.0);
  REQUIRE(defect(hi) > 0.0);
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    (defect(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ModelParams({0.0, 0.5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams({1.0, -0.1}).validate(), std::invalid_argument);
  CHECK_NOTHROW(ModelParams({1.0, 0.0}).validate());
}

TEST_CASE("q = 0 branch at h = 0, beta <= 1") {
  const RSFixedPoint fp = solve_q({1.0, 0.0});
  CHECK(fp.q == 0.0);
  CHECK(std::fabs(fp.alpha - 1.0) < 1e-12);  // beta^2 sech^4(0) = 1
}

TEST_CASE("beta -> 0 limit: q tends to tanh^2(h)") {
  const RSFixedPoint fp = solve_q({1e-6, 0.7});
  CHECK(std::fabs(fp.q - std::pow(std::tanh(0.7), 2)) < 1e-9);
}

TEST_CASE("solve_q matches the bisection oracle") {
  const QuadratureRule r200 = build_rule(200);
  {
    const RSFixedPoint fp = solve_q({1.5, 0.5}, r200);
    CHECK(std::fabs(fp.q - q_bisection(1.5, 0.5, r200)) < 1e-10);
    CHECK(std::fabs(fp.residual) < 1e-12);
    CHECK(std::fabs(fp.sigma2 - 1.5 * 1.5 * fp.q) < 1e-15);
    // the order-64 default carries ~1e-9 quadrature truncation here
    CHECK(std::fabs(solve_q({1.5, 0.5}).q - fp.q) < 2e-9);
  }
  // At larger sigma = beta sqrt(q) the order-64 default rule carries real
  // truncation error, so compare iteration against bisection on matched
  // dense rules.
  for (auto [beta, h] : {std::pair{0.8, 1.2}, {2.5, 0.3}}) {
    const RSFixedPoint fp = solve_q({beta, h}, dense_rule());
    CHECK(std::fabs(fp.q - q_bisection(beta, h, dense_rule())) < 1e-12);
    CHECK(std::fabs(fp.residual) < 1e-12);
  }
}

TEST_CASE("alpha matches a seeded Monte Carlo oracle") {
  const ModelParams p{1.2, 0.8};
  const RSFixedPoint fp = solve_q(p);
  std::mt19937_64 rng(777ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = 2'000'000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = sech2(p.beta * std::sqrt(fp.q) * gauss(rng) + p.h);
    sum += s * s;
    sum2 += s * s * s * s;
  }
  const double mc = p.beta * p.beta * sum / n;
  const double se =
      p.beta * p.beta * std::sqrt((sum2 / n - std::pow(sum / n, 2)) / n);
  CHECK(std::fabs(fp.alpha - mc) < 4.0 * se);
  CHECK(std::fabs(fp.alpha - alpha_param(fp)) < 1e-14);
}

TEST_CASE("sech moments: E[S] = 1-q and E[S^2] < E[S] for h > 0") {
  for (auto [beta, h] : {std::pair{0.7, 0.2}, {1.4, 1.0}, {2.2, 0.6}}) {
    const RSFixedPoint fp = solve_q({beta, h});
    const SechMoments m = sech_moments(fp);
    CHECK(std::fabs(m.m1 - (1.0 - fp.q)) < 1e-12);
    CHECK(m.m2 < m.m1);
  }
}

TEST_CASE("free energy tends to log 2 + log cosh h as beta -> 0") {
  const RSFixedPoint fp = solve_q({1e-6, 0.7});
  CHECK(std::fabs(phi_rs(fp) - (std::log(2.0) + std::log(std::cosh(0.7)))) <
        1e-9);
}

TEST_CASE("mmse bound: E[sech^2(s^2 + s Z)] <= 1/(1+s^2), tight at 0") {
  const MmseBound at0 = mmse_check(0.0);
  CHECK(at0.lhs == 1.0);
  CHECK(at0.rhs == 1.0);
  for (double s : {0.3, 1.0, 2.7, 5.0}) {
    const MmseBound b = mmse_check(s);
    CHECK(b.lhs <= b.rhs + 1e-13);
    CHECK(std::fabs(b.rhs - 1.0 / (1.0 + s * s)) < 1e-15);
  }
}

TEST_CASE("m_sigma decreases strictly in h") {
  double prev = m_sigma(1.0, 0.0);
  for (int i = 1; i <= 20; ++i) {
    const double cur = m_sigma(1.0, 0.25 * i);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("phase boundary: alpha = 1 on the line, 0 below beta = 1") {
  CHECK(at_line(0.9) == 0.0);
  for (double beta : {1.2, 2.0}) {
    const double h = at_line(beta);
    CHECK(h > 0.0);
    CHECK(std::fabs(solve_q({beta, h}).alpha - 1.0) < 1e-9);
  }
}

TEST_CASE("case split") {
  CHECK(case_classifier(solve_q({0.8, 0.5})) == Case::I);
  const RSFixedPoint fp = solve_q({2.0, 1.5});
  CHECK(case_classifier(fp) == Case::II);
  CHECK(fp.params.h < fp.sigma2);  // the Case II side condition
}

TEST_CASE("alpha = 1 forces beta^2(1-q) > 1") {
  for (double beta : {1.3, 1.8, 2.4}) {
    const RSFixedPoint fp = solve_q({beta, at_line(beta)});
    CHECK(beta * beta * (1.0 - fp.q) > 1.0);
  }
}
