#include "sklab/verify.hpp"

#include <random>

namespace sklab {

namespace {

void add(std::vector<CheckResult>& out, const std::string& id,
         const std::string& detail, double defect, double tol, double scale) {
  CheckResult r;
  r.id = id;
  r.detail = detail;
  r.defect = defect;
  r.tolerance = tol * scale;
  r.pass = defect <= r.tolerance;
  out.push_back(r);
}

double j_integral(double u) {
  return integrate_gl(
      [&](double r) {
        const double r2 = r * r;
        const double den = 1.0 + (1.0 - r2) * u;
        return (1.0 + (1.0 + 3.0 * r2) * u) / (den * den * den);
      },
      0.0, 1.0, 32, 8);
}

}  // namespace

std::vector<CheckResult> run_verify(std::uint64_t seed, double scale) {
  std::vector<CheckResult> out;
  const QuadratureRule& rule = default_rule();

  // --- quadrature moment invariants ---
  {
    double wsum = 0.0, m2 = 0.0, m4 = 0.0, odd = 0.0, sym = 0.0;
    for (int i = 0; i < rule.order; ++i) {
      wsum += rule.weights[i];
      m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
      m4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
      sym = std::max(sym,
                     std::fabs(rule.nodes[i] + rule.nodes[rule.order - 1 - i]));
    }
    // Odd moments: iterative powers keep (-x)^k the exact negation of x^k,
    // so symmetric pairs cancel exactly when summed pair by pair.
    std::vector<double> pw(rule.order, 1.0);
    for (int k = 1; k < rule.order; ++k) {
      for (int i = 0; i < rule.order; ++i) pw[i] *= rule.nodes[i];
      if (k % 2 == 0) continue;
      double s = 0.0;
      for (int i = 0; i < rule.order / 2; ++i)
        s += rule.weights[i] * pw[i] +
             rule.weights[rule.order - 1 - i] * pw[rule.order - 1 - i];
      odd = std::max(odd, std::fabs(s));
    }
    add(out, "quad_weight_sum", "order 64", std::fabs(wsum - 1.0), 1e-14, scale);
    add(out, "quad_node_symmetry", "order 64", sym, 1e-12, scale);
    add(out, "quad_moment2", "E[Z^2]=1", std::fabs(m2 - 1.0), 1e-10, scale);
    add(out, "quad_moment4", "E[Z^4]=3", std::fabs(m4 - 3.0), 1e-10, scale);
    add(out, "quad_odd_moments", "odd k <= 21", odd, 1e-10, scale);
  }
  {
    const QuadratureRule r128 = build_rule(128);
    double gap = 0.0;
    auto fns = std::vector<std::function<double(double)>>{
        [](double x) { double t = std::tanh(x); return t * t; },
        [](double x) { double s = sech2(x); return s * s; },
        [](double x) { return log_cosh(x); }};
    // The sech-family integrands have poles at Im x = pi/2; scaled by the
    // std they approach the real axis and plain Gauss-Hermite convergence
    // degrades past std ~ 0.7 (the 64-vs-128 gap is ~1e-7 at std 1 and
    // ~1e-2 at std 4).  The tight-tolerance claim is tested where it holds;
    // dense_rule() covers the larger-std cross-checks.
    for (const auto& f : fns)
      for (double mean = -10.0; mean <= 10.0; mean += 2.5)
        for (double sd : {0.25, 0.5, 0.7})
          gap = std::max(gap, std::fabs(gauss_expect(rule, f, mean, sd) -
                                        gauss_expect(r128, f, mean, sd)));
    add(out, "quad_convergence_64_128", "tanh^2, sech^4, log cosh, std<=0.7",
        gap, 1e-10, scale);
  }

  // --- fixed point and scalar lemmas ---
  {
    double res = 0.0, alpha_dev = 0.0;
    for (double beta : {0.5, 1.0, 1.5, 2.0, 3.0})
      for (double h : {0.1, 0.5, 1.0, 2.5}) {
        const RSFixedPoint fp = solve_q({beta, h});
        res = std::max(res, std::fabs(fp.residual));
        alpha_dev = std::max(alpha_dev, std::fabs(fp.alpha - alpha_param(fp)));
      }
    add(out, "fixed_point_residual", "5x4 (beta,h) grid", res, 1e-12, scale);
    add(out, "alpha_recompute", "5x4 (beta,h) grid", alpha_dev, 1e-12, scale);
  }
  {
    double worst_gap = -1.0, worst_m1 = 0.0;
    for (int i = 1; i <= 20; ++i)
      for (int j = 1; j <= 20; ++j) {
        const double beta = 0.15 * i, h = 0.15 * j;
        const RSFixedPoint fp = solve_q({beta, h});
        const SechMoments m = sech_moments(fp);
        worst_gap = std::max(worst_gap, m.m2 - m.m1);
        worst_m1 = std::max(worst_m1, std::fabs(m.m1 - (1.0 - fp.q)));
      }
    add(out, "moment_gap", "E[S^2] < E[S], 20x20 grid h>0", worst_gap, 0.0, scale);
    add(out, "moment_identity", "E[S] = 1-q, 20x20 grid", worst_m1, 1e-12, scale);
  }
  {
    double worst = -1.0;
    for (int i = 0; i <= 50; ++i) {
      const MmseBound b = mmse_check(0.1 * i);
      worst = std::max(worst, b.lhs - b.rhs);
    }
    add(out, "mmse_bound", "sigma in [0,5]", worst, 1e-12, scale);
  }
  {
    double worst = -1.0;
    for (double s : {0.0, 0.5, 1.0, 2.0}) {
      double prev = m_sigma(s, 0.0);
      for (int i = 1; i < 100; ++i) {
        const double cur = m_sigma(s, 5.0 * i / 99.0);
        worst = std::max(worst, cur - prev);
        prev = cur;
      }
    }
    add(out, "msigma_strict_decrease", "100-point h grid", worst, 0.0, scale);
  }
  {
    double worst = 0.0;
    for (double beta : {1.1, 1.5, 2.0, 3.0}) {
      const double h = at_line(beta);
      worst = std::max(worst, std::fabs(solve_q({beta, h}).alpha - 1.0));
    }
    add(out, "at_line_consistency", "beta in {1.1,1.5,2,3}", worst, 1e-9, scale);
  }
  {
    // alpha = 1 forces beta^2(1-q) > 1 and (Case II) h < beta^2 q.
    double worst_b = 0.0, worst_h = 0.0;
    for (double beta : {1.2, 1.7, 2.5}) {
      const RSFixedPoint fp = solve_q({beta, at_line(beta)});
      worst_b = std::max(worst_b, 1.0 - beta * beta * (1.0 - fp.q));
      worst_h = std::max(worst_h, fp.params.h - fp.sigma2);
      (void)case_classifier(fp);  // throws on violation
    }
    add(out, "alpha_one_implies_case2", "AT-line points", worst_b, 0.0, scale);
    add(out, "case2_h_below_sigma2", "AT-line points", worst_h, 0.0, scale);
  }

  // --- kernel machinery ---
  {
    double worst = 0.0;
    for (double u : {0.0, 0.5, 1.0, 5.0, 50.0})
      worst = std::max(worst, std::fabs(j_integral(u) - 1.0));
    add(out, "j_identity", "u in {0,0.5,1,5,50}", worst, 1e-10, scale);
  }
  {
    double worst = 0.0;
    for (double lam : {0.1, 0.5, 1.0, 2.0, 5.0})
      worst = std::max(
          worst, std::fabs(nu_expect([&](double s) {
                   return F_lambda(lam, s);
                 }) - 1.0));
    add(out, "f_kernel_mean_one", "lambda in {0.1,...,5}", worst, 1e-9, scale);
  }
  {
    double worst = -1.0;
    for (double lam : {0.5, 1.0, 2.0}) {
      double prev = F_lambda(lam, 0.0);
      for (int i = 1; i < 200; ++i) {
        const double cur = F_lambda(lam, i / 199.0);
        worst = std::max(worst, cur - prev);
        prev = cur;
      }
    }
    add(out, "f_kernel_strict_decrease", "200-point s grid", worst, 0.0, scale);
  }
  {
    ModelParams p{2.0, 0.3};
    double worst = 0.0;
    for (double x : {0.2, 1.0, 3.0})
      for (double lam : {0.3, 1.0}) {
        const double s = sech2(x);
        const double lhs = doob_conditional(p, x, lam, [](double y) {
          const double v = sech2(y);
          return v * v;
        });
        worst = std::max(worst, std::fabs(lhs - s * s * F_lambda(lam, s)));
      }
    add(out, "kernel_conditional_identity", "E[v^2|X_q=x] = s^2 F(s)", worst,
        1e-9, scale);
  }
  {
    // d/ds of (1+(4-3s)u)/(1+su)^3 is <= 0, strictly for u > 0.
    double worst = -1.0;
    for (double u : {0.0, 0.1, 1.0, 10.0, 100.0})
      for (int i = 0; i <= 40; ++i) {
        const double s = i / 40.0;
        const double den = 1.0 + s * u;
        const double d = -6.0 * u * (1.0 + 2.0 * u - s * u) / std::pow(den, 4);
        worst = std::max(worst, d);
      }
    add(out, "phi_s_derivative_sign", "(s,u) grid", worst, 0.0, scale);
  }

  // --- density machinery at a Case II, h <= sigma^2 point ---
  {
    const KernelContext ctx = KernelContext::make({2.0, 0.3});
    const double mass = integrate_gl(
        [&](double y) {
          const double h = ctx.params.h, s2 = ctx.sigma * ctx.sigma;
          return (std::exp(-(y - h) * (y - h) / (2.0 * s2)) +
                  std::exp(-(y + h) * (y + h) / (2.0 * s2))) /
                 (ctx.sigma * std::sqrt(2.0 * M_PI));
        },
        0.0, 40.0, 32, 64);
    add(out, "rho_s_normalization", "substitution integral", std::fabs(mass - 1.0),
        1e-8, scale);

    const double mean_s = integrate_gl(
        [&](double y) {
          const double h = ctx.params.h, s2 = ctx.sigma * ctx.sigma;
          return sech2(y) *
                 (std::exp(-(y - h) * (y - h) / (2.0 * s2)) +
                  std::exp(-(y + h) * (y + h) / (2.0 * s2))) /
                 (ctx.sigma * std::sqrt(2.0 * M_PI));
        },
        0.0, 40.0, 32, 64);
    add(out, "rho_s_mean", "E[S] = 1-q", std::fabs(mean_s - (1.0 - ctx.fp.q)),
        1e-8, scale);

    double worst = -1.0;
    double prev = r_ratio(ctx, 1.0 / 501.0);
    for (int i = 2; i <= 500; ++i) {
      const double cur = r_ratio(ctx, i / 501.0);
      worst = std::max(worst, prev - cur);
      prev = cur;
    }
    add(out, "r_ratio_increasing", "500-point grid, h <= sigma^2", worst, 0.0,
        scale);

    const double r_int = nu_expect([&](double s) {
      return (s > 0.0 && s < 1.0) ? r_ratio(ctx, s) : 0.0;
    });
    const SechMoments m = sech_moments(ctx.fp, dense_rule());
    add(out, "r_total_mass", "int r dnu = E[S^2]", std::fabs(r_int - m.m2),
        1e-8, scale);

    // d/dy log r(s(y)) <= -tanh y - y/sigma^2 for y > 0 when h <= sigma^2.
    double worst_ld = -1.0;
    const double c = ctx.params.h / (ctx.sigma * ctx.sigma);
    for (int i = 1; i <= 100; ++i) {
      const double y = 0.05 * i;
      const double ld = -2.0 * std::tanh(y) - y / (ctx.sigma * ctx.sigma) +
                        c * std::tanh(c * y);
      worst_ld = std::max(worst_ld,
                          ld - (-std::tanh(y) - y / (ctx.sigma * ctx.sigma)));
    }
    add(out, "log_r_derivative_bound", "y grid, c = h/sigma^2 <= 1", worst_ld,
        0.0, scale);

    double worst_a2 = -1.0, worst_cons = 0.0;
    const double a20 = a2_kernel(ctx, 0.0, dense_rule());
    for (int i = 0; i < 64; ++i) {
      const double lam = ctx.lambda_max * i / 63.0;
      const double a2 = a2_kernel(ctx, lam, dense_rule());
      worst_a2 = std::max(worst_a2, a2 - a20);
      if (i % 16 == 0)
        worst_cons = std::max(
            worst_cons,
            std::fabs(covariance_gap(ctx, lam, dense_rule()) - (a2 - a20)));
    }
    add(out, "a2_nonincreasing_from_zero", "64 lambda points", worst_a2, 1e-9,
        scale);
    add(out, "covariance_gap_consistency", "gap = a2(l)-a2(0)", worst_cons,
        1e-9, scale);
    add(out, "a2_zero_identity", "a2(0) = alpha/beta^2",
        std::fabs(a20 - ctx.fp.alpha / (ctx.params.beta * ctx.params.beta)),
        1e-9, scale);
  }

  // --- Mbar lower bound needs alpha <= 1 on top of Case II, h <= sigma^2 ---
  {
    const KernelContext ctx = KernelContext::make({2.0, 1.5});
    std::vector<double> grid(33);
    for (int i = 0; i < 33; ++i) grid[i] = ctx.lambda_max * i / 32.0;
    const Curve mbar = mbar_curve(ctx, grid, dense_rule());
    double worst_mb = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double line = 1.0 - ctx.fp.q -
                          grid[i] / (ctx.params.beta * ctx.params.beta);
      worst_mb = std::max(worst_mb, line - mbar.values[i]);
    }
    add(out, "mbar_lower_bound", "Mbar >= 1-q-lambda/beta^2, alpha <= 1",
        worst_mb, 1e-8, scale);
  }

  // --- PDE / functional identities ---
  {
    const ModelParams p{1.2, 1.0};
    const RSFixedPoint fp = solve_q(p);
    add(out, "parisi_rs_identity", "(beta,h)=(1.2,1.0)",
        std::fabs(parisi_functional(AtomicMeasure::delta(fp.q), p) - phi_rs(fp)),
        1e-6, scale);
    add(out, "penalty_closed_form", "delta_q penalty = beta^2(1-q^2)/4",
        std::fabs(parisi_penalty(AtomicMeasure::delta(fp.q), p) -
                  0.25 * p.beta * p.beta * (1.0 - fp.q * fp.q)),
        1e-12, scale);

    double worst_left = -1.0;
    for (int i = 0; i < 50; ++i) {
      const double t = fp.q * i / 49.0;
      const double g = g_curve_quadrature(p, fp, t);
      worst_left = std::max(worst_left,
                            (1.0 - fp.alpha) * (fp.q - t) - (g - t));
    }
    add(out, "left_interval_inequality", "g(t)-t >= (1-alpha)(q-t)", worst_left,
        1e-8, scale);

    const double g_left = g_curve_quadrature(p, fp, fp.q);
    const double g_right = m2_kernel(p, fp, fp.q);
    add(out, "interface_continuity", "one-sided limits at q",
        std::max(std::fabs(g_left - fp.q), std::fabs(g_right - fp.q)), 1e-9,
        scale);

    add(out, "doob_normalization", "psi = 1",
        std::fabs(doob_conditional(p, 0.8, 0.5, [](double) { return 1.0; }) -
                  1.0),
        1e-12, scale);
  }

  // --- seeded Monte Carlo sanity: X_q marginal ---
  {
    const ModelParams p{1.5, 0.5};
    const RSFixedPoint fp = solve_q(p);
    const ValueGrid unused;
    const PathEnsemble ens = simulate(AtomicMeasure::delta(fp.q), p, unused,
                                      20000, 1e-2, seed, {fp.q});
    double mean = 0.0, var = 0.0;
    for (double x : ens.states[0]) mean += x;
    mean /= static_cast<double>(ens.n_paths);
    for (double x : ens.states[0]) var += (x - mean) * (x - mean);
    var /= static_cast<double>(ens.n_paths);
    const double se_mean = p.beta * std::sqrt(fp.q / ens.n_paths);
    add(out, "xq_marginal_mean", "X_q ~ N(h, beta^2 q)",
        std::fabs(mean - p.h) - 4.0 * se_mean, 0.0, scale);
    add(out, "xq_marginal_var", "X_q ~ N(h, beta^2 q)",
        std::fabs(var - fp.sigma2) / fp.sigma2 - 0.05, 0.0, scale);
  }

  return out;
}

}  // namespace sklab
