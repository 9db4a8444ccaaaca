// Command-line entry point: fixed points, AT line, Parisi functional
// evaluation, diffusion curves, kernel analysis, lemma verification,
// RSB search, and exact finite-N enumeration.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "sklab/sk_exact.hpp"
#include "sklab/verify.hpp"

using json = nlohmann::ordered_json;

namespace {

// 17 significant digits: doubles round-trip exactly.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << fmt(row[i]) << (i + 1 < row.size() ? "," : "\n");
  }
  return os.str();
}

int thread_count() {
  if (const char* env = std::getenv("SKLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Deterministic parallel map: results land by index regardless of scheduling.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  const int nt = std::min<std::size_t>(thread_count(), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
    });
  for (auto& th : pool) th.join();
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the SK replica-symmetric phase"};
  app.set_config("--config");
  app.require_subcommand(1);

  std::string output;
  std::string format = "csv";
  app.add_option("--output", output, "output file (default: stdout)");
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  double beta = 1.0, h = 0.5, dt = 1e-3, dx = 2e-3, x_max = 0.0;
  std::uint64_t seed = 1;
  std::size_t n_paths = 200000;
  int points = 101, quad_order = 64;

  app.set_help_flag("--help", "print help");
  auto add_model = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "print help");  // frees -h for the field
    cmd->add_option("--beta", beta, "inverse temperature")->check(CLI::PositiveNumber);
    cmd->add_option("--h,-h", h, "external field")->check(CLI::NonNegativeNumber);
  };

  // fixed-point
  auto* cmd_fp = app.add_subcommand("fixed-point", "RS fixed point q, alpha, phi_rs");
  add_model(cmd_fp);
  double beta_max = 0.0, h_max = 0.0;
  int beta_steps = 1, h_steps = 1;
  cmd_fp->add_option("--beta-max", beta_max, "sweep endpoint for beta");
  cmd_fp->add_option("--beta-steps", beta_steps, "sweep points in beta");
  cmd_fp->add_option("--h-max", h_max, "sweep endpoint for h");
  cmd_fp->add_option("--h-steps", h_steps, "sweep points in h");

  // at-line
  auto* cmd_at = app.add_subcommand("at-line", "trace the alpha = 1 boundary");
  double at_beta_min = 1.0, at_beta_max = 3.0;
  int at_steps = 21;
  cmd_at->add_option("--beta-min", at_beta_min, "start of beta range");
  cmd_at->add_option("--beta-max", at_beta_max, "end of beta range");
  cmd_at->add_option("--steps", at_steps, "number of rows");

  // parisi-eval
  auto* cmd_pe = app.add_subcommand("parisi-eval", "Parisi functional of an atomic measure");
  add_model(cmd_pe);
  std::string atoms_str, weights_str;
  cmd_pe->add_option("--atoms", atoms_str, "comma-separated atom locations (default: delta_q)");
  cmd_pe->add_option("--weights", weights_str, "comma-separated weights");
  cmd_pe->add_option("--dx", dx, "x-grid spacing");
  cmd_pe->add_option("--x-max", x_max, "x-grid extent (0 = auto)");
  cmd_pe->add_option("--order", quad_order, "quadrature order");

  // g-curve
  auto* cmd_g = app.add_subcommand("g-curve", "E[u_x(t,X_t)^2] on [0,1] (quadrature)");
  add_model(cmd_g);
  bool cumulative = false;
  cmd_g->add_option("--points", points, "grid size");
  cmd_g->add_flag("--cumulative", cumulative, "emit G(t) instead of g(t)");

  // f-curve
  auto* cmd_f = app.add_subcommand("f-curve", "E[m_t^2] - t on [q,1] (Monte Carlo)");
  add_model(cmd_f);
  cmd_f->add_option("--points", points, "grid size");
  cmd_f->add_option("--n-paths", n_paths, "paths");
  cmd_f->add_option("--dt", dt, "Euler step target");
  cmd_f->add_option("--seed", seed, "RNG seed");

  // kernel
  auto* cmd_k = app.add_subcommand("kernel", "a2(lambda), covariance gap, Mbar");
  add_model(cmd_k);
  cmd_k->add_option("--points", points, "lambda grid size");

  // verify-lemmas
  auto* cmd_v = app.add_subcommand("verify-lemmas", "run the full lemma suite");
  double tol_scale = 1.0;
  cmd_v->add_option("--seed", seed, "RNG seed");
  cmd_v->add_option("--tolerance-scale", tol_scale, "multiplies every tolerance");

  // rsb-search
  auto* cmd_r = app.add_subcommand("rsb-search", "minimize P over k-atom measures");
  add_model(cmd_r);
  int k = 2, budget = 400;
  cmd_r->add_option("--k", k, "atom count (1-3)");
  cmd_r->add_option("--budget", budget, "objective evaluation budget");

  // sk-enum
  auto* cmd_s = app.add_subcommand("sk-enum", "exact finite-N free energy");
  add_model(cmd_s);
  std::vector<int> sizes{8, 12, 16, 20};
  int samples = 0;
  cmd_s->add_option("--n", sizes, "system sizes (n <= 24)");
  cmd_s->add_option("--samples", samples, "disorder samples (0 = 200 for n<=16, 50 above)");
  cmd_s->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_fp) {
      const std::vector<double> betas =
          beta_steps > 1 ? linspace(beta, beta_max, beta_steps)
                         : std::vector<double>{beta};
      const std::vector<double> hs =
          h_steps > 1 ? linspace(h, h_max, h_steps) : std::vector<double>{h};
      std::vector<std::vector<double>> rows(betas.size() * hs.size());
      parallel_for(rows.size(), [&](std::size_t i) {
        const double b = betas[i / hs.size()];
        const double hh = hs[i % hs.size()];
        const sklab::RSFixedPoint fp = sklab::solve_q({b, hh});
        const double cs =
            (sklab::case_classifier(fp) == sklab::Case::I) ? 1.0 : 2.0;
        rows[i] = {b,         hh, fp.q, fp.alpha, fp.sigma2,
                   sklab::phi_rs(fp), fp.residual, cs};
      });
      if (format == "json") {
        json j = json::array();
        for (const auto& r : rows)
          j.push_back({{"beta", r[0]},   {"h", r[1]},        {"q", r[2]},
                       {"alpha", r[3]},  {"sigma2", r[4]},   {"phi_rs", r[5]},
                       {"residual", r[6]}, {"case", static_cast<int>(r[7])}});
        emit(output, j.dump(2) + "\n");
      } else {
        emit(output, csv({"beta", "h", "q", "alpha", "sigma2", "phi_rs",
                          "residual", "case"},
                         rows));
      }
    } else if (*cmd_at) {
      std::vector<std::vector<double>> rows(at_steps);
      const std::vector<double> bs = linspace(at_beta_min, at_beta_max, at_steps);
      parallel_for(rows.size(), [&](std::size_t i) {
        const double hat = sklab::at_line(bs[i]);
        const double alpha_check =
            bs[i] > 1.0 ? sklab::solve_q({bs[i], hat}).alpha : 1.0;
        rows[i] = {bs[i], hat, alpha_check};
      });
      emit(output, csv({"beta", "h_at", "alpha_check"}, rows));
    } else if (*cmd_pe) {
      const sklab::ModelParams p{beta, h};
      const sklab::RSFixedPoint fp = sklab::solve_q(p);
      sklab::AtomicMeasure mu = sklab::AtomicMeasure::delta(fp.q);
      if (!atoms_str.empty()) {
        mu.atoms = parse_list(atoms_str);
        mu.weights = weights_str.empty()
                         ? std::vector<double>(mu.atoms.size(),
                                               1.0 / mu.atoms.size())
                         : parse_list(weights_str);
      }
      sklab::GridConfig cfg = sklab::GridConfig::for_params(p);
      cfg.dx = dx;
      cfg.quad_order = quad_order;
      if (x_max > 0.0) cfg.x_max = x_max;
      const double pmu = sklab::parisi_functional(mu, p, cfg);
      const double pdq = sklab::parisi_functional(
          sklab::AtomicMeasure::delta(fp.q), p, cfg);
      json j{{"beta", beta},
             {"h", h},
             {"q", fp.q},
             {"p_mu", pmu},
             {"p_delta_q", pdq},
             {"phi_rs", sklab::phi_rs(fp)},
             {"gap_vs_delta_q", pmu - pdq}};
      emit(output, j.dump(2) + "\n");
    } else if (*cmd_g) {
      const sklab::ModelParams p{beta, h};
      const sklab::RSFixedPoint fp = sklab::solve_q(p);
      std::vector<double> grid = linspace(0.0, 1.0, points);
      grid.push_back(fp.q);
      std::sort(grid.begin(), grid.end());
      grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
      std::vector<std::vector<double>> rows(grid.size());
      if (cumulative) {
        const sklab::Curve G = sklab::G_curve(p, fp, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
          rows[i] = {grid[i], G.values[i], 0.0};
      } else {
        parallel_for(grid.size(), [&](std::size_t i) {
          const double g = grid[i] <= fp.q
                               ? sklab::g_curve_quadrature(p, fp, grid[i])
                               : sklab::m2_kernel(p, fp, grid[i]);
          rows[i] = {grid[i], g, 0.0};
        });
      }
      emit(output, csv({"t", "value", "stderr"}, rows));
    } else if (*cmd_f) {
      const sklab::ModelParams p{beta, h};
      const sklab::RSFixedPoint fp = sklab::solve_q(p);
      const sklab::AlignedGrid g = sklab::aligned_time_grid(fp.q, dt, points);
      const sklab::Curve c = sklab::f_curve(p, fp, g.times, n_paths, g.dt, seed);
      std::vector<std::vector<double>> rows(c.times.size());
      for (std::size_t i = 0; i < c.times.size(); ++i)
        rows[i] = {c.times[i], c.values[i], c.stderrs[i]};
      emit(output, csv({"t", "value", "stderr"}, rows));
    } else if (*cmd_k) {
      const sklab::KernelContext ctx = sklab::KernelContext::make({beta, h});
      std::vector<double> grid = linspace(0.0, ctx.lambda_max, points);
      const sklab::Curve mbar = sklab::mbar_curve(ctx, grid);
      std::vector<std::vector<double>> rows(grid.size());
      parallel_for(grid.size(), [&](std::size_t i) {
        const double a2 = sklab::a2_kernel(ctx, grid[i]);
        rows[i] = {grid[i], a2, sklab::covariance_gap(ctx, grid[i]),
                   mbar.values[i],
                   1.0 - ctx.fp.q - grid[i] / (beta * beta)};
      });
      emit(output, csv({"lambda", "a2", "cov_gap", "mbar", "lower_line"}, rows));
    } else if (*cmd_v) {
      const auto checks = sklab::run_verify(seed, tol_scale);
      bool all = true;
      json arr = json::array();
      for (const auto& c : checks) {
        all = all && c.pass;
        arr.push_back({{"id", c.id},
                       {"detail", c.detail},
                       {"defect", c.defect},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass}});
      }
      json j{{"seed", seed},
             {"tolerance_scale", tol_scale},
             {"all_pass", all},
             {"checks", arr}};
      emit(output, j.dump(2) + "\n");
      return all ? 0 : 1;
    } else if (*cmd_r) {
      const sklab::RsbResult res = sklab::rsb_search({beta, h}, k, budget);
      json j{{"beta", beta},
             {"h", h},
             {"k", k},
             {"best_value", res.best_value},
             {"p_delta_q", res.delta_q_value},
             {"improvement", res.delta_q_value - res.best_value},
             {"atoms", res.best_measure.atoms},
             {"weights", res.best_measure.weights},
             {"evaluations", res.evaluations},
             {"budget_exhausted", res.budget_exhausted}};
      emit(output, j.dump(2) + "\n");
    } else if (*cmd_s) {
      const sklab::ModelParams p{beta, h};
      const double phi = sklab::phi_rs(sklab::solve_q(p));
      std::vector<std::vector<double>> rows(sizes.size());
      parallel_for(sizes.size(), [&](std::size_t i) {
        const int ns = samples > 0 ? samples : (sizes[i] <= 16 ? 200 : 50);
        std::uint64_t sub_state = seed + static_cast<std::uint64_t>(sizes[i]);
        const std::uint64_t sub = sklab::splitmix64(sub_state);
        const sklab::FreeEnergyEstimate est =
            sklab::disorder_average(sizes[i], p, ns, sub);
        rows[i] = {static_cast<double>(est.n), est.mean, est.stderr_, phi,
                   est.mean - phi};
      });
      emit(output, csv({"n", "mean", "stderr", "phi_rs", "gap"}, rows));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
