#include "sklab/parisi.hpp"

#include <algorithm>
#include <random>

namespace sklab {

void AtomicMeasure::validate() const {
  if (atoms.empty()) throw std::invalid_argument("AtomicMeasure: no atoms");
  if (atoms.size() != weights.size())
    throw std::invalid_argument("AtomicMeasure: atoms/weights size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] >= 0.0 && atoms[i] <= 1.0))
      throw std::invalid_argument("AtomicMeasure: atom outside [0,1]");
    if (i > 0 && !(atoms[i] > atoms[i - 1]))
      throw std::invalid_argument("AtomicMeasure: atoms not strictly increasing");
    if (!(weights[i] >= 0.0))
      throw std::invalid_argument("AtomicMeasure: negative weight");
    sum += weights[i];
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("AtomicMeasure: weights do not sum to 1");
}

namespace {

constexpr double kTailBand = 100.0;  // extrapolation band beyond x_max

// Cubic Lagrange interpolation on a uniform slice stored on x >= 0.
// reflect_sign: +1 for even functions, -1 for odd. tail_slope: slope of the
// linear continuation past the grid (1 for u, 0 for ux/uxx plateaus).
double interp_core(const std::vector<double>& v, double dx, double y,
                   double reflect_sign, double tail_slope) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
  const double xmax = static_cast<double>(n - 1) * dx;
  if (y >= xmax + kTailBand)
    throw std::runtime_error("ValueGrid: requested x beyond tail band");
  auto at = [&](std::ptrdiff_t k) -> double {
    if (k < 0) return reflect_sign * v[static_cast<std::size_t>(-k)];
    if (k < n) return v[static_cast<std::size_t>(k)];
    return v.back() + static_cast<double>(k - (n - 1)) * dx * tail_slope;
  };
  if (y >= xmax) return v.back() + (y - xmax) * tail_slope;
  const double p = y / dx;
  const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(std::floor(p));
  const double t = p - static_cast<double>(j);
  const double fm1 = at(j - 1), f0 = at(j), f1 = at(j + 1), f2 = at(j + 2);
  return fm1 * (-t * (t - 1.0) * (t - 2.0) / 6.0) +
         f0 * ((t * t - 1.0) * (t - 2.0) / 2.0) +
         f1 * (-t * (t + 1.0) * (t - 2.0) / 2.0) +
         f2 * (t * (t * t - 1.0) / 6.0);
}

// Even slice with slope-1 tail: the value function itself.
double interp_slice(const std::vector<double>& v, double dx, double x) {
  return interp_core(v, dx, std::fabs(x), 1.0, 1.0);
}

// One backward constant-coefficient step over a time interval of Gaussian
// width s = beta * sqrt(dt): Cole-Hopf when m > 0, plain heat when m = 0.
std::vector<double> propagate(const std::vector<double>& prev, double dx,
                              double m, double s, const QuadratureRule& rule) {
  if (s == 0.0) return prev;
  const std::size_t n = prev.size();
  std::vector<double> out(n);
  std::vector<double> vals(rule.order);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * dx;
    for (int j = 0; j < rule.order; ++j)
      vals[j] = interp_slice(prev, dx, x + s * rule.nodes[j]);
    if (m <= 1e-7) {
      // m = 0 heat step; for tiny m, second-order expansion of the
      // Cole-Hopf step to avoid (log of 1 + tiny)/tiny cancellation.
      double e1 = 0.0, e2 = 0.0;
      for (int j = 0; j < rule.order; ++j) {
        e1 += rule.weights[j] * vals[j];
        e2 += rule.weights[j] * vals[j] * vals[j];
      }
      out[i] = e1 + 0.5 * m * (e2 - e1 * e1);
    } else {
      double mx = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < rule.order; ++j) mx = std::max(mx, m * vals[j]);
      double acc = 0.0;
      for (int j = 0; j < rule.order; ++j)
        acc += rule.weights[j] * std::exp(m * vals[j] - mx);
      out[i] = (mx + std::log(acc)) / m;
    }
  }
  return out;
}

struct Interval {
  double lo, hi, m;
};

// Constant-cdf intervals covering [0,1], adjacent equal-m intervals merged.
std::vector<Interval> constant_intervals(const AtomicMeasure& mu) {
  std::vector<double> bnds{0.0, 1.0};
  for (double a : mu.atoms)
    if (a > 0.0 && a < 1.0) bnds.push_back(a);
  std::sort(bnds.begin(), bnds.end());
  bnds.erase(std::unique(bnds.begin(), bnds.end()), bnds.end());
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < bnds.size(); ++i) {
    const double m = mu.cdf(bnds[i]);
    if (!out.empty() && out.back().m == m)
      out.back().hi = bnds[i + 1];
    else
      out.push_back({bnds[i], bnds[i + 1], m});
  }
  return out;
}

void fd_derivatives(const std::vector<double>& u, double dx,
                    std::vector<double>& ux, std::vector<double>& uxx) {
  const std::size_t n = u.size();
  ux.resize(n);
  uxx.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double up = (i + 1 < n) ? u[i + 1] : u[n - 1] + dx;  // tail ghost
    const double um = (i > 0) ? u[i - 1] : u[1];               // even ghost
    ux[i] = (i == 0) ? 0.0 : (up - um) / (2.0 * dx);
    uxx[i] = (up - 2.0 * u[i] + um) / (dx * dx);
  }
}

const QuadratureRule& rule_for(int order) {
  if (order == 64) return default_rule();
  static thread_local int cached_order = -1;
  static thread_local QuadratureRule cached;
  if (order != cached_order) {
    cached = build_rule(order);
    cached_order = order;
  }
  return cached;
}

}  // namespace

std::size_t ValueGrid::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::fabs(times[i] - t) < 1e-12) return i;
  throw std::invalid_argument("ValueGrid: time slice not stored");
}

double ValueGrid::u_at(std::size_t ti, double x) const {
  return interp_slice(u.at(ti), xgrid[1] - xgrid[0], x);
}

double ValueGrid::ux_at(std::size_t ti, double x) const {
  const double dx = xgrid[1] - xgrid[0];
  const double mag = interp_core(ux.at(ti), dx, std::fabs(x), -1.0, 0.0);
  return x >= 0.0 ? mag : -mag;
}

double ValueGrid::uxx_at(std::size_t ti, double x) const {
  const double dx = xgrid[1] - xgrid[0];
  return interp_core(uxx.at(ti), dx, std::fabs(x), 1.0, 0.0);
}

ValueGrid solve_u(const AtomicMeasure& measure, const ModelParams& params,
                  const GridConfig& cfg) {
  measure.validate();
  params.validate();
  GridConfig c = cfg;
  if (c.x_max <= 0.0) c.x_max = std::fabs(params.h) + 8.0 * params.beta + 4.0;
  const std::size_t nx = static_cast<std::size_t>(std::round(c.x_max / c.dx)) + 1;
  const QuadratureRule& rule = rule_for(c.quad_order);

  ValueGrid vg;
  vg.xgrid.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) vg.xgrid[i] = static_cast<double>(i) * c.dx;

  // Anchor slices at interval boundaries, built backward from t = 1.
  const std::vector<Interval> ivals = constant_intervals(measure);
  std::vector<std::vector<double>> anchors(ivals.size() + 1);
  anchors.back().resize(nx);
  for (std::size_t i = 0; i < nx; ++i) anchors.back()[i] = log_cosh(vg.xgrid[i]);
  for (std::size_t k = ivals.size(); k-- > 0;) {
    const double s = params.beta * std::sqrt(ivals[k].hi - ivals[k].lo);
    anchors[k] = propagate(anchors[k + 1], c.dx, ivals[k].m, s, rule);
  }

  std::vector<double> ts = c.times;
  ts.push_back(0.0);
  ts.push_back(1.0);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  for (double t : ts)
    if (t < 0.0 || t > 1.0)
      throw std::invalid_argument("solve_u: time slice outside [0,1]");

  vg.times = ts;
  vg.u.resize(ts.size());
  vg.ux.resize(ts.size());
  vg.uxx.resize(ts.size());
  for (std::size_t ti = 0; ti < ts.size(); ++ti) {
    const double t = ts[ti];
    if (t >= 1.0) {
      vg.u[ti] = anchors.back();
    } else {
      std::size_t k = 0;
      while (k + 1 < ivals.size() && t >= ivals[k].hi) ++k;
      if (t == ivals[k].lo) {
        vg.u[ti] = anchors[k];
      } else {
        const double s = params.beta * std::sqrt(ivals[k].hi - t);
        vg.u[ti] = propagate(anchors[k + 1], c.dx, ivals[k].m, s, rule);
      }
    }
    fd_derivatives(vg.u[ti], c.dx, vg.ux[ti], vg.uxx[ti]);
  }
  return vg;
}

ExplicitValue u_delta_q_explicit(const ModelParams& params,
                                 const RSFixedPoint& fp, double t, double x,
                                 const QuadratureRule& rule) {
  if (t < 0.0 || t > 1.0)
    throw std::invalid_argument("u_delta_q_explicit: t outside [0,1]");
  const double b2 = params.beta * params.beta;
  ExplicitValue v;
  if (t >= fp.q) {
    v.u = 0.5 * b2 * (1.0 - t) + log_cosh(x);
    v.ux = std::tanh(x);
    v.uxx = sech2(x);
  } else {
    const double sd = params.beta * std::sqrt(fp.q - t);
    v.u = 0.5 * b2 * (1.0 - fp.q) +
          gauss_expect(rule, [](double y) { return log_cosh(y); }, x, sd);
    v.ux = gauss_expect(rule, [](double y) { return std::tanh(y); }, x, sd);
    v.uxx = gauss_expect(rule, [](double y) { return sech2(y); }, x, sd);
  }
  return v;
}

double parisi_penalty(const AtomicMeasure& measure, const ModelParams& params) {
  double integral = 0.0;
  for (const Interval& iv : constant_intervals(measure))
    integral += iv.m * 0.5 * (iv.hi * iv.hi - iv.lo * iv.lo);
  return 0.5 * params.beta * params.beta * integral;
}

double parisi_functional(const AtomicMeasure& measure,
                         const ModelParams& params, const GridConfig& cfg) {
  GridConfig c = cfg;
  c.times = {0.0};
  const ValueGrid vg = solve_u(measure, params, c);
  const double u0h = vg.u_at(vg.time_index(0.0), params.h);
  return 0.6931471805599453094 + u0h - parisi_penalty(measure, params);
}

double parisi_functional(const AtomicMeasure& measure,
                         const ModelParams& params) {
  return parisi_functional(measure, params, GridConfig::for_params(params));
}

namespace {

double logit(double p) {
  p = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return std::log(p / (1.0 - p));
}

AtomicMeasure decode_measure(const std::vector<double>& theta, int k) {
  std::vector<double> locs(k), w(k);
  for (int i = 0; i < k; ++i) locs[i] = 1.0 / (1.0 + std::exp(-theta[i]));
  if (k == 1) {
    w[0] = 1.0;
  } else {
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) mx = std::max(mx, theta[k + i]);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += (w[i] = std::exp(theta[k + i] - mx));
    for (int i = 0; i < k; ++i) w[i] /= sum;
  }
  std::vector<std::size_t> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return locs[a] < locs[b]; });
  AtomicMeasure mu;
  for (std::size_t i : idx) {
    if (!mu.atoms.empty() && locs[i] - mu.atoms.back() < 1e-9)
      mu.weights.back() += w[i];  // merge near-coincident atoms
    else {
      mu.atoms.push_back(locs[i]);
      mu.weights.push_back(w[i]);
    }
  }
  return mu;
}

// Plain Nelder-Mead; terminates on simplex diameter or evaluation budget.
template <class F>
std::pair<std::vector<double>, double> nelder_mead(F&& obj,
                                                   std::vector<double> x0,
                                                   double step, int max_evals,
                                                   int& evals) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> sx(d + 1, x0);
  std::vector<double> sf(d + 1);
  for (std::size_t i = 0; i < d; ++i) sx[i + 1][i] += step;
  for (std::size_t i = 0; i <= d; ++i) {
    sf[i] = obj(sx[i]);
    ++evals;
  }
  while (evals < max_evals) {
    std::vector<std::size_t> ord(d + 1);
    for (std::size_t i = 0; i <= d; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(),
              [&](std::size_t a, std::size_t b) { return sf[a] < sf[b]; });
    if (sf[ord[d]] - sf[ord[0]] < 1e-11) break;
    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) centroid[j] += sx[ord[i]][j] / d;
    auto blend = [&](double c) {
      std::vector<double> p(d);
      for (std::size_t j = 0; j < d; ++j)
        p[j] = centroid[j] + c * (centroid[j] - sx[ord[d]][j]);
      return p;
    };
    std::vector<double> xr = blend(1.0);
    double fr = obj(xr);
    ++evals;
    if (fr < sf[ord[0]]) {
      std::vector<double> xe = blend(2.0);
      double fe = obj(xe);
      ++evals;
      if (fe < fr) {
        sx[ord[d]] = xe;
        sf[ord[d]] = fe;
      } else {
        sx[ord[d]] = xr;
        sf[ord[d]] = fr;
      }
    } else if (fr < sf[ord[d - 1]]) {
      sx[ord[d]] = xr;
      sf[ord[d]] = fr;
    } else {
      std::vector<double> xc = blend(-0.5);
      double fc = obj(xc);
      ++evals;
      if (fc < sf[ord[d]]) {
        sx[ord[d]] = xc;
        sf[ord[d]] = fc;
      } else {
        for (std::size_t i = 1; i <= d; ++i) {
          for (std::size_t j = 0; j < d; ++j)
            sx[ord[i]][j] = 0.5 * (sx[ord[i]][j] + sx[ord[0]][j]);
          sf[ord[i]] = obj(sx[ord[i]]);
          ++evals;
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= d; ++i)
    if (sf[i] < sf[best]) best = i;
  return {sx[best], sf[best]};
}

}  // namespace

RsbResult rsb_search(const ModelParams& params, int k, int budget) {
  if (k < 1 || k > 3) throw std::invalid_argument("rsb_search: k must be in {1,2,3}");
  params.validate();
  const RSFixedPoint fp = solve_q(params);
  const GridConfig cfg = GridConfig::for_params(params);

  RsbResult res;
  res.delta_q_value = parisi_functional(AtomicMeasure::delta(fp.q), params, cfg);

  const std::size_t dims = (k == 1) ? 1 : 2 * static_cast<std::size_t>(k);
  auto objective = [&](const std::vector<double>& theta) {
    try {
      return parisi_functional(decode_measure(theta, k), params, cfg);
    } catch (const std::exception&) {
      return 1e30;
    }
  };

  // Starting points: delta_q collapsed plus deterministic spreads around q.
  std::vector<std::vector<double>> starts;
  {
    std::vector<double> t0(dims, 0.0);
    for (int i = 0; i < k; ++i) t0[i] = logit(fp.q);
    starts.push_back(t0);
    if (k >= 2) {
      std::vector<double> t1 = t0;
      for (int i = 0; i < k; ++i)
        t1[i] = logit(std::clamp(fp.q + (i - 0.5 * (k - 1)) * 0.4, 0.02, 0.98));
      starts.push_back(t1);
      std::vector<double> t2 = t0;
      t2[0] = logit(std::clamp(0.25 * fp.q, 0.01, 0.98));
      t2[k - 1] = logit(std::clamp(fp.q + 0.5 * (1.0 - fp.q), 0.02, 0.99));
      starts.push_back(t2);
    }
  }

  double best_f = res.delta_q_value;
  AtomicMeasure best_mu = AtomicMeasure::delta(fp.q);
  int evals = 0;
  const int per_start = std::max(budget / static_cast<int>(starts.size()), 16);
  for (const auto& s : starts) {
    if (evals >= budget) {
      res.budget_exhausted = true;
      break;
    }
    auto [x, f] = nelder_mead(objective, s, 0.35,
                              std::min(budget, evals + per_start), evals);
    if (f < best_f) {
      best_f = f;
      best_mu = decode_measure(x, k);
    }
  }
  if (evals >= budget) res.budget_exhausted = true;
  res.best_value = std::min(best_f, res.delta_q_value);
  res.best_measure = best_mu;
  res.evaluations = evals;
  return res;
}

}  // namespace sklab
