#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sklab/parisi.hpp"

using namespace sklab;

TEST_CASE("measure validation") {
  CHECK_NOTHROW(AtomicMeasure({{0.2, 0.7}, {0.4, 0.6}}).validate());
  // unsorted atoms
  CHECK_THROWS_AS(AtomicMeasure({{0.7, 0.2}, {0.4, 0.6}}).validate(),
                  std::invalid_argument);
  // weights not summing to one
  CHECK_THROWS_AS(AtomicMeasure({{0.5}, {0.9}}).validate(),
                  std::invalid_argument);
  // zero weights are tolerated
  CHECK_NOTHROW(AtomicMeasure({{0.1, 0.5}, {0.0, 1.0}}).validate());
}

TEST_CASE("cdf is right-continuous and piecewise constant") {
  const AtomicMeasure mu{{0.3, 0.8}, {0.25, 0.75}};
  CHECK(mu.cdf(0.0) == 0.0);
  CHECK(mu.cdf(0.3) == 0.25);
  CHECK(mu.cdf(0.5) == 0.25);
  CHECK(mu.cdf(0.8) == 1.0);
  CHECK(mu.cdf(1.0) == 1.0);
}

TEST_CASE("delta_1: pure heat flow reproduces the Gaussian smoothing") {
  // mu = delta_1 has cdf 0 on [0,1), so u(t,x) = E[log cosh(x + b sqrt(1-t) Z)].
  const ModelParams p{1.3, 0.6};
  const ValueGrid vg = solve_u(AtomicMeasure::delta(1.0), p,
                               GridConfig::for_params(p));
  const std::size_t t0 = vg.time_index(0.0);
  for (double x : {0.0, 0.4, 1.7, 5.0}) {
    const double ref = gauss_expect(
        build_rule(256), [](double y) { return log_cosh(y); }, x, p.beta);
    CHECK(std::fabs(vg.u_at(t0, x) - ref) < 2e-7);
  }
}

TEST_CASE("delta_q solution agrees with its closed form") {
  const ModelParams p{1.2, 1.0};
  const RSFixedPoint fp = solve_q(p);
  const AtomicMeasure mu = AtomicMeasure::delta(fp.q);
  GridConfig cfg = GridConfig::for_params(p);
  cfg.times = {0.0, 0.3, fp.q, 0.8, 1.0};
  const ValueGrid vg = solve_u(mu, p, cfg);
  double sup_u = 0.0, sup_ux = 0.0, sup_uxx = 0.0;
  for (double t : cfg.times) {
    const std::size_t ti = vg.time_index(t);
    for (double x = 0.0; x <= 6.0; x += 0.37) {
      const ExplicitValue ev = u_delta_q_explicit(p, fp, t, x, build_rule(256));
      sup_u = std::max(sup_u, std::fabs(vg.u_at(ti, x) - ev.u));
      sup_ux = std::max(sup_ux, std::fabs(vg.ux_at(ti, x) - ev.ux));
      sup_uxx = std::max(sup_uxx, std::fabs(vg.uxx_at(ti, x) - ev.uxx));
    }
  }
  CHECK(sup_u < 2e-6);
  CHECK(sup_ux < 2e-5);
  CHECK(sup_uxx < 2e-4);
}

TEST_CASE("grid refinement shrinks the error against the closed form") {
  const ModelParams p{1.0, 0.5};
  const RSFixedPoint fp = solve_q(p);
  auto sup_err = [&](double dx) {
    GridConfig cfg = GridConfig::for_params(p);
    cfg.dx = dx;
    cfg.times = {0.0};
    const ValueGrid vg = solve_u(AtomicMeasure::delta(fp.q), p, cfg);
    double e = 0.0;
    for (double x = 0.0; x <= 4.0; x += 0.23)
      e = std::max(e, std::fabs(vg.u_at(vg.time_index(0.0), x) -
                                u_delta_q_explicit(p, fp, 0.0, x).u));
    return e;
  };
  const double coarse = sup_err(8e-3), fine = sup_err(2e-3);
  CHECK(fine < coarse);
  CHECK(fine < 1e-6);
}

TEST_CASE("derivative bounds: |ux| <= 1 and 0 < uxx <= 1") {
  const ModelParams p{1.5, 0.4};
  const AtomicMeasure mu{{0.2, 0.6}, {0.5, 0.5}};
  GridConfig cfg = GridConfig::for_params(p);
  cfg.times = {0.0, 0.2, 0.4, 0.6, 0.9};
  const ValueGrid vg = solve_u(mu, p, cfg);
  for (double t : cfg.times) {
    const std::size_t ti = vg.time_index(t);
    for (double x = 0.0; x <= 8.0; x += 0.5) {
      CHECK(std::fabs(vg.ux_at(ti, x)) <= 1.0 + 1e-9);
      CHECK(vg.uxx_at(ti, x) > -1e-9);
      CHECK(vg.uxx_at(ti, x) <= 1.0 + 1e-7);
    }
  }
}

TEST_CASE("value function is even in x; ux is odd") {
  const ModelParams p{1.1, 0.3};
  GridConfig cfg = GridConfig::for_params(p);
  cfg.times = {0.5};
  const ValueGrid vg = solve_u(AtomicMeasure::delta(0.4), p, cfg);
  const std::size_t ti = vg.time_index(0.5);
  for (double x : {0.3, 1.1, 2.9}) {
    CHECK(vg.u_at(ti, -x) == vg.u_at(ti, x));
    CHECK(vg.ux_at(ti, -x) == -vg.ux_at(ti, x));
  }
}

TEST_CASE("penalty closed form vs direct integration of s * cdf(s)") {
  const ModelParams p{1.7, 0.2};
  const AtomicMeasure mu{{0.25, 0.65}, {0.3, 0.7}};
  const double direct =
      0.5 * p.beta * p.beta *
      integrate_gl([&](double s) { return s * mu.cdf(s); }, 0.0, 1.0, 32, 200);
  // the integrand has kinks at the atoms: integrate each smooth piece exactly
  const double exact =
      0.5 * p.beta * p.beta *
      (0.3 * 0.5 * (0.65 * 0.65 - 0.25 * 0.25) +
       1.0 * 0.5 * (1.0 - 0.65 * 0.65));
  CHECK(std::fabs(parisi_penalty(mu, p) - exact) < 1e-14);
  CHECK(std::fabs(parisi_penalty(mu, p) - direct) < 1e-5);
}

TEST_CASE("zero-weight atoms do not change the functional, bit for bit") {
  const ModelParams p{1.4, 0.8};
  const RSFixedPoint fp = solve_q(p);
  const double base =
      parisi_functional(AtomicMeasure::delta(fp.q), p);
  const double padded =
      parisi_functional(AtomicMeasure{{0.2, fp.q}, {0.0, 1.0}}, p);
  CHECK(base == padded);
}

TEST_CASE("single-atom functional equals the replica-symmetric free energy") {
  for (auto [beta, h] : {std::pair{0.8, 0.5}, {1.2, 1.0}}) {
    const ModelParams p{beta, h};
    const RSFixedPoint fp = solve_q(p);
    CHECK(std::fabs(parisi_functional(AtomicMeasure::delta(fp.q), p) -
                    phi_rs(fp)) < 1e-6);
  }
}

TEST_CASE("a single atom away from q raises the functional") {
  // oracle for the k = 1 search: P(delta_t) has its minimum at t = q
  const ModelParams p{1.5, 0.8};
  const RSFixedPoint fp = solve_q(p);
  const double at_q = parisi_functional(AtomicMeasure::delta(fp.q), p);
  for (double off : {-0.15, -0.05, 0.05, 0.15}) {
    CHECK(parisi_functional(AtomicMeasure::delta(fp.q + off), p) >
          at_q + 1e-8);
  }
}

TEST_CASE("k = 1 search stays at delta_q on the replica-symmetric side") {
  const ModelParams p{1.5, 0.8};  // alpha < 1 here
  const RsbResult res = rsb_search(p, 1, 120);
  CHECK(res.best_value <= res.delta_q_value + 1e-12);
  CHECK(res.best_value >= res.delta_q_value - 1e-6);
  CHECK(res.evaluations > 0);
}
