#include "sklab/diffusion.hpp"

#include <algorithm>
#include <random>

namespace sklab {

namespace {

constexpr std::size_t kBlockSize = 4096;  // paths per seeded block

std::uint64_t block_seed(std::uint64_t master, std::uint64_t block) {
  std::uint64_t s = master + 0x632be59bd9b4e019ULL * (block + 1);
  return splitmix64(s);
}

struct Action {
  enum Kind { ExactGaussian, Euler, Record } kind;
  double sd = 0.0;       // ExactGaussian: std of the increment
  long n_steps = 0;      // Euler
  double dt = 0.0;       // Euler
  double m = 0.0;        // Euler: cdf level on the segment
  double t0 = 0.0;       // Euler: segment start time
  std::size_t slot = 0;  // Record: output slot
};

}  // namespace

AlignedGrid aligned_time_grid(double q, double dt_target, int n_outputs) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("aligned_time_grid: bad q");
  if (n_outputs < 2) throw std::invalid_argument("aligned_time_grid: n_outputs < 2");
  const long total = std::max(1L, std::lround((1.0 - q) / dt_target));
  AlignedGrid g;
  g.dt = (1.0 - q) / static_cast<double>(total);
  long prev = -1;
  for (int j = 0; j < n_outputs; ++j) {
    const long k = std::lround(static_cast<double>(j) * total /
                               static_cast<double>(n_outputs - 1));
    if (k == prev) continue;
    prev = k;
    g.times.push_back(q + static_cast<double>(k) * g.dt);
  }
  g.times.back() = 1.0;
  return g;
}

PathEnsemble simulate(const AtomicMeasure& measure, const ModelParams& params,
                      const ValueGrid& vg, std::size_t n_paths, double dt,
                      std::uint64_t seed,
                      const std::vector<double>& out_times) {
  measure.validate();
  params.validate();
  if (n_paths == 0 || dt <= 0.0)
    throw std::invalid_argument("simulate: need n_paths > 0 and dt > 0");
  if (out_times.empty() || !std::is_sorted(out_times.begin(), out_times.end()))
    throw std::invalid_argument("simulate: out_times must be sorted, nonempty");
  if (out_times.front() < 0.0 || out_times.back() > 1.0)
    throw std::invalid_argument("simulate: out_times outside [0,1]");

  const bool single_atom = measure.atoms.size() == 1;
  const double beta = params.beta;

  // Event times: outputs plus every drift switch (atom) up to the horizon.
  std::vector<double> events = out_times;
  for (double a : measure.atoms)
    if (a > 0.0 && a < out_times.back()) events.push_back(a);
  events.push_back(0.0);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  std::vector<Action> plan;
  std::size_t slot = 0;
  if (events.front() == 0.0 && out_times.front() == 0.0)
    plan.push_back({Action::Record, 0, 0, 0, 0, 0, slot++});
  for (std::size_t e = 0; e + 1 < events.size(); ++e) {
    const double t0 = events[e], t1 = events[e + 1];
    const double m = measure.cdf(t0);
    if (m == 0.0) {
      plan.push_back({Action::ExactGaussian, beta * std::sqrt(t1 - t0),
                      0, 0, 0, 0, 0});
    } else {
      const double steps = (t1 - t0) / dt;
      const long n = std::lround(steps);
      if (n < 1 || std::fabs(steps - static_cast<double>(n)) > 1e-6 * std::max(1.0, steps))
        throw std::invalid_argument(
            "simulate: dt does not divide the segment between atoms/outputs");
      plan.push_back({Action::Euler, 0, n, (t1 - t0) / static_cast<double>(n),
                      m, t0, 0});
    }
    if (std::binary_search(out_times.begin(), out_times.end(), t1))
      plan.push_back({Action::Record, 0, 0, 0, 0, 0, slot++});
  }

  PathEnsemble ens;
  ens.n_paths = n_paths;
  ens.dt = dt;
  ens.seed = seed;
  ens.times = out_times;
  ens.states.assign(out_times.size(), std::vector<double>(n_paths));

  // Drift field: closed form tanh for a single atom, nearest stored slice
  // of the value grid otherwise.
  auto drift_ux = [&](double t, double x) -> double {
    if (single_atom) return std::tanh(x);
    std::size_t best = vg.times.size() - 1;
    for (std::size_t i = 0; i < vg.times.size(); ++i)
      if (vg.times[i] >= t - 1e-12) {
        best = i;
        break;
      }
    return vg.ux_at(best, x);
  };

  const std::size_t n_blocks = (n_paths + kBlockSize - 1) / kBlockSize;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    std::mt19937_64 rng(block_seed(seed, b));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t lo = b * kBlockSize;
    const std::size_t hi = std::min(n_paths, lo + kBlockSize);
    for (std::size_t p = lo; p < hi; p += 2) {
      const bool pair = p + 1 < hi;  // antithetic partner
      double xa = params.h, xb = params.h;
      for (const Action& act : plan) {
        switch (act.kind) {
          case Action::Record:
            ens.states[act.slot][p] = xa;
            if (pair) ens.states[act.slot][p + 1] = xb;
            break;
          case Action::ExactGaussian: {
            const double xi = normal(rng);
            xa += act.sd * xi;
            xb -= act.sd * xi;
            break;
          }
          case Action::Euler: {
            const double root_dt = beta * std::sqrt(act.dt);
            const double b2m = beta * beta * act.m * act.dt;
            double t = act.t0;
            for (long s = 0; s < act.n_steps; ++s) {
              const double xi = normal(rng);
              xa += b2m * drift_ux(t, xa) + root_dt * xi;
              xb += b2m * drift_ux(t, xb) - root_dt * xi;
              t = act.t0 + static_cast<double>(s + 1) * act.dt;
            }
            break;
          }
        }
      }
    }
  }
  return ens;
}

Curve g_curve(const PathEnsemble& ensemble, const ValueGrid& vg) {
  Curve c;
  c.times = ensemble.times;
  for (std::size_t ti = 0; ti < ensemble.times.size(); ++ti) {
    const std::size_t vi = vg.time_index(ensemble.times[ti]);
    double sum = 0.0, sum2 = 0.0;
    for (double x : ensemble.states[ti]) {
      const double v = vg.ux_at(vi, x);
      sum += v * v;
      sum2 += v * v * v * v;
    }
    const double n = static_cast<double>(ensemble.n_paths);
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    c.values.push_back(mean);
    c.stderrs.push_back(std::sqrt(var / n));
  }
  return c;
}

double g_curve_quadrature(const ModelParams& params, const RSFixedPoint& fp,
                          double t, const QuadratureRule& rule) {
  if (t < 0.0 || t > fp.q + 1e-12)
    throw std::invalid_argument("g_curve_quadrature: t outside [0,q]");
  t = std::min(t, fp.q);
  const double sd_outer = params.beta * std::sqrt(t);
  const double sd_inner = params.beta * std::sqrt(fp.q - t);
  return gauss_expect(
      rule,
      [&](double x) {
        const double inner = gauss_expect(
            rule, [](double y) { return std::tanh(y); }, x, sd_inner);
        return inner * inner;
      },
      params.h, sd_outer);
}

double m2_kernel(const ModelParams& params, const RSFixedPoint& fp, double t,
                 const QuadratureRule& rule) {
  if (t < fp.q - 1e-12 || t > 1.0)
    throw std::invalid_argument("m2_kernel: t outside [q,1]");
  const double lambda = params.beta * params.beta * std::max(0.0, t - fp.q);
  const double rl = std::sqrt(lambda);
  const double sd_q = params.beta * std::sqrt(fp.q);
  return gauss_expect(
      rule,
      [&](double x) {
        if (lambda == 0.0) {
          const double m = std::tanh(x);
          return m * m;
        }
        const double num = gauss_expect(
            rule,
            [](double y) {
              const double m = std::tanh(y);
              return m * m * std::cosh(y);
            },
            x, rl);
        const double den =
            gauss_expect(rule, [](double y) { return std::cosh(y); }, x, rl);
        return num / den;
      },
      params.h, sd_q);
}

Curve f_curve(const ModelParams& params, const RSFixedPoint& fp,
              const std::vector<double>& t_grid, std::size_t n_paths,
              double dt, std::uint64_t seed) {
  for (double t : t_grid)
    if (t < fp.q - 1e-12 || t > 1.0 + 1e-12)
      throw std::invalid_argument("f_curve: grid outside [q,1]");
  const AtomicMeasure mu = AtomicMeasure::delta(fp.q);
  const ValueGrid unused;  // single-atom drift is closed form
  const PathEnsemble ens = simulate(mu, params, unused, n_paths, dt, seed, t_grid);
  Curve c;
  c.times = t_grid;
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    double sum = 0.0, sum2 = 0.0;
    for (double x : ens.states[ti]) {
      const double m = std::tanh(x);
      sum += m * m;
      sum2 += m * m * m * m;
    }
    const double n = static_cast<double>(n_paths);
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    c.values.push_back(mean - t_grid[ti]);
    c.stderrs.push_back(std::sqrt(var / n));
  }
  return c;
}

Curve G_curve(const ModelParams& params, const RSFixedPoint& fp,
              const std::vector<double>& t_grid, const QuadratureRule& rule) {
  if (t_grid.size() < 2 || !std::is_sorted(t_grid.begin(), t_grid.end()))
    throw std::invalid_argument("G_curve: need a sorted grid");
  const std::size_t n = t_grid.size();
  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = t_grid[i];
    const double g = (s <= fp.q) ? g_curve_quadrature(params, fp, s, rule)
                                 : m2_kernel(params, fp, s, rule);
    integrand[i] = 0.5 * params.beta * params.beta * (g - s);
  }
  Curve c;
  c.times = t_grid;
  c.values.assign(n, 0.0);
  c.stderrs.assign(n, 0.0);
  // Trapezoid from the right; the tail [t_grid.back(), 1] uses the kernel
  // integrand on a fine fallback mesh if the grid stops short of 1.
  double tail = 0.0;
  if (t_grid.back() < 1.0)
    tail = integrate_gl(
        [&](double s) {
          const double g = m2_kernel(params, fp, s, rule);
          return 0.5 * params.beta * params.beta * (g - s);
        },
        t_grid.back(), 1.0, 16, 4);
  c.values[n - 1] = tail;
  for (std::size_t i = n - 1; i-- > 0;)
    c.values[i] = c.values[i + 1] + 0.5 * (integrand[i] + integrand[i + 1]) *
                                        (t_grid[i + 1] - t_grid[i]);
  return c;
}

double doob_conditional(const ModelParams& params, double x, double lambda,
                        const std::function<double(double)>& psi,
                        const QuadratureRule& rule) {
  (void)params;  // the conditional law does not depend on (beta, h)
  if (lambda < 0.0) throw std::invalid_argument("doob_conditional: lambda < 0");
  if (lambda == 0.0) return psi(x);
  const double rl = std::sqrt(lambda);
  const double num = gauss_expect(
      rule, [&](double y) { return psi(y) * std::cosh(y); }, x, rl);
  const double den =
      gauss_expect(rule, [](double y) { return std::cosh(y); }, x, rl);
  return num / den;
}

std::pair<double, double> doob_conditional_mc(
    const ModelParams& params, double x, double lambda,
    const std::function<double(double)>& psi, std::size_t n_paths, double dt,
    std::uint64_t seed) {
  params.validate();
  if (lambda < 0.0) throw std::invalid_argument("doob_conditional_mc: lambda < 0");
  const double beta = params.beta;
  const double tau = lambda / (beta * beta);
  const long n_steps = std::max(1L, std::lround(tau / dt));
  const double dte = tau / static_cast<double>(n_steps);
  const double root_dt = beta * std::sqrt(dte);
  const double bdt = beta * beta * dte;

  double sum = 0.0, sum2 = 0.0;
  const std::size_t n_blocks = (n_paths + kBlockSize - 1) / kBlockSize;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    std::mt19937_64 rng(block_seed(seed, b));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t lo = b * kBlockSize;
    const std::size_t hi = std::min(n_paths, lo + kBlockSize);
    for (std::size_t p = lo; p < hi; p += 2) {
      const bool pair = p + 1 < hi;
      double xa = x, xb = x;
      for (long s = 0; s < n_steps; ++s) {
        const double xi = normal(rng);
        xa += bdt * std::tanh(xa) + root_dt * xi;
        xb += bdt * std::tanh(xb) - root_dt * xi;
      }
      double v = psi(xa);
      sum += v;
      sum2 += v * v;
      if (pair) {
        v = psi(xb);
        sum += v;
        sum2 += v * v;
      }
    }
  }
  const double n = static_cast<double>(n_paths);
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace sklab
